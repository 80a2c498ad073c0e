"""Tests for the command-line entry point."""

import json

import pytest

from src.main import EXIT_LIBRARY_ERROR, EXIT_OK, main


def run(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


class TestMain:
    def test_galois_sign(self, capsys):
        code, report = run(capsys, ["galois", "sign", "--setting", "zeta5", "--type", "e1,e2", "--tau", "s"])
        assert code == EXIT_OK
        assert report["data"]["sign"] == -1

    def test_period_report(self, capsys, tmp_path):
        path = tmp_path / "period.json"
        code, report = run(capsys, ["period", "--field", "Q(sqrt-7)", "--prec", "128", "--json", str(path)])
        assert code == EXIT_OK
        assert report["j"] == "-3375"
        assert json.loads(path.read_text(encoding="utf-8")) == report

    def test_parse_error(self, capsys):
        code, report = run(capsys, ["lvalue", "--char", "hecke field=Q(i) f=(1+i)^3 a=x b=0"])
        assert code == EXIT_LIBRARY_ERROR
        assert report["error"]["code"] == "spec_parse_error"
        assert report["error"]["column"] == 30

    def test_configuration_error(self, capsys):
        code, report = run(capsys, ["lvalue", "--char", "field=Q(i) f=(2) a=4 b=0"])
        assert code == EXIT_LIBRARY_ERROR
        assert report["error"]["code"] == "spec_parse_error"

    def test_precision_out_of_range(self, capsys):
        code, report = run(capsys, ["period", "--prec", "8"])
        assert code == EXIT_LIBRARY_ERROR

    def test_missing_subcommand(self):
        with pytest.raises(SystemExit):
            main([])

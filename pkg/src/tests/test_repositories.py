"""Tests for the setting file parser and the golden value store."""

import mpmath
import pytest
from pydantic import ValidationError

from src.core.exceptions import GoldenDataError, SpecParseError, SubgroupNotClosed
from src.core.precision import precision_manager
from src.models.golden import GoldenEntry, GoldenFile
from src.repositories.golden_repository import GoldenRepository, golden_repository
from src.repositories.setting_repository import PROJECT_SETTINGS, setting_repository
from src.services import galois

KLEIN = """\
# Q(zeta8) written out by hand
order=4 conj=1
0 1 2 3
1 0 3 2
2 3 0 1
3 2 1 0
names 1 c s cs
field Q(i) = 0,2
field Q(sqrt2) = 0,1
"""


class TestSettingRepository:
    def test_builtin_names(self):
        assert {"C2", "zeta5", "S3"} <= set(setting_repository.names())
        assert setting_repository.get("zeta5").group.order == 4

    def test_parse(self):
        setting = setting_repository.parse(KLEIN, name="klein")
        assert setting.element("cs") == 3
        assert galois.is_cm_field(setting, "Q(i)")
        assert len(galois.cm_types(setting, setting.top)) == 4

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "klein.txt"
        path.write_text(KLEIN, encoding="utf-8")
        setting = setting_repository.get(str(path))
        assert setting.name == "klein"

    def test_shipped_setting_file(self):
        setting = setting_repository.get(str(PROJECT_SETTINGS / "zeta5.txt"))
        assert [setting.label(setting.top, r) for r in range(4)] == ["e1", "e2", "e4", "e3"]

    @pytest.mark.parametrize("text,line,column", [
        ("", 1, 1),
        ("order 2\n", 1, 1),
        ("order=2 conj=1\n0 1\n1 x\n", 3, 3),
        ("order=2 conj=1\n0 1\n1 0\nfield K = 0,y\n", 4, 13),
        ("order=2 conj=1\n0 1\n1 0\n  bogus\n", 4, 3),
    ])
    def test_parse_errors(self, text, line, column):
        with pytest.raises(SpecParseError) as info:
            setting_repository.parse(text)
        assert (info.value.line, info.value.column) == (line, column)

    def test_validation_errors_propagate(self):
        with pytest.raises(SubgroupNotClosed):
            setting_repository.parse("order=2 conj=1\n0 1\n1 0\nfield K = 0,5\n")

    def test_unknown_name(self):
        with pytest.raises(SpecParseError, match="unknown setting"):
            setting_repository.get("no-such-setting")


class TestGoldenRepository:
    def test_shipped_files(self):
        assert set(golden_repository.list_files()) >= {"eklattice", "periods", "verify"}
        for name in golden_repository.list_files():
            assert golden_repository.load(name).entries

    def test_save_and_load(self, tmp_path):
        repo = GoldenRepository(tmp_path)
        golden = GoldenFile(version=1, entries=[
            GoldenEntry(name="pi", closed_form="pi", oracle="exact"),
            GoldenEntry(name="third", value="0.3333333333333333333333333333333333", tolerance="1e-30",
                        oracle="decimal"),
        ])
        repo.save("sample", golden)
        assert repo.list_files() == ["sample"]
        with precision_manager.working(192):
            assert abs(repo.value("sample", "pi", 192) - mpmath.pi) < mpmath.mpf(10) ** -50
        assert repo.tolerance("sample", "third") == mpmath.mpf("1e-30")

    def test_missing_file(self, tmp_path):
        with pytest.raises(GoldenDataError, match="not found"):
            GoldenRepository(tmp_path).load("absent")

    def test_malformed_files(self, tmp_path):
        (tmp_path / "broken.json").write_text("{", encoding="utf-8")
        (tmp_path / "schema.json").write_text('{"version": 0}', encoding="utf-8")
        repo = GoldenRepository(tmp_path)
        with pytest.raises(GoldenDataError, match="not valid JSON"):
            repo.load("broken")
        with pytest.raises(GoldenDataError, match="schema"):
            repo.load("schema")

    def test_missing_entry(self):
        with pytest.raises(GoldenDataError, match="no entry"):
            golden_repository.entry("periods", "absent")

    def test_entry_needs_one_source(self):
        with pytest.raises(ValidationError):
            GoldenEntry(name="x", oracle="none")
        with pytest.raises(ValidationError):
            GoldenEntry(name="x", value="1", closed_form="1", oracle="none")


class TestShippedSettings:
    def test_s3_file_matches_builtin(self):
        from_file = setting_repository.get(str(PROJECT_SETTINGS / "s3.txt"))
        builtin = galois.setting_s3()
        assert from_file.group.table == builtin.group.table
        assert {f.name: f.subgroup for f in from_file.fields} == {f.name: f.subgroup for f in builtin.fields}

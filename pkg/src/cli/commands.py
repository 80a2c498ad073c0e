"""Command implementations: each returns a pydantic report."""

import logging
from argparse import Namespace
from typing import Dict, List

import mpmath

from src.cli.specs import (
    RunConfig,
    parse_character,
    parse_cm_type,
    parse_complex,
    parse_embedding,
    parse_lattice,
    parse_translate,
    parse_type,
)
from src.config.settings import settings
from src.core.precision import decimal_string, precision_manager
from src.models.reports import EKReport, GaloisReport, LValueReport, PeriodReport, VerifyReport
from src.repositories.setting_repository import setting_repository
from src.services.eklattice import EKParams, ek, ek_direct
from src.services.galois import (
    CMSetting,
    InfinityType,
    cm_types,
    critical_decompose,
    critical_types,
    embeddings,
    epsilon_sign,
    is_cm_field,
    is_totally_imaginary,
    reflex,
    xi_infinity_type,
)
from src.services.lvalues import L_value
from src.services.periods import cm_period, dual_period
from src.services.quadarith import ImagQuadField
from src.services.verify import verify

logger = logging.getLogger(__name__)


def run_config(args: Namespace) -> RunConfig:
    """Validated configuration of one invocation."""
    prec = getattr(args, "prec", None) or settings.precision.default_bits
    precision_manager.validate(prec)
    return RunConfig(
        precision=prec,
        field=getattr(args, "field", None),
        character=getattr(args, "char", None),
        setting=getattr(args, "setting", None),
        output=getattr(args, "json", None),
    )


# --- galois ----------------------------------------------------------------

def format_type(setting: CMSetting, mu: InfinityType) -> str:
    if not mu.coeffs:
        return "0"
    parts = []
    for rep, value in mu.coeffs:
        label = setting.label(mu.field, rep)
        sign = "-" if value < 0 else "+"
        if rep == setting.group.identity and label not in setting.embedding_labels:
            body = str(abs(value))
        else:
            body = label if abs(value) == 1 else f"{abs(value)}*{label}"
        parts.append(f"{sign}{body}")
    text = "".join(parts)
    return text[1:] if text.startswith("+") else text


def _labels(setting: CMSetting, fld, reps) -> List[str]:
    return [setting.label(fld, r) for r in sorted(reps)]


def cmd_galois(args: Namespace) -> GaloisReport:
    setting = setting_repository.get(args.setting)
    action = args.galois_command
    if action == "reflex":
        phi = parse_cm_type(setting, args.field, args.type)
        E, phi_star = reflex(setting, phi.field, phi)
        data = {"cm_type": _labels(setting, phi.field, phi.members),
                "reflex_field": E.name, "reflex_type": _labels(setting, E, phi_star.members)}
        return GaloisReport(command="reflex", setting=setting.name, field=phi.field.name, data=data)

    if action == "sign":
        phi = parse_cm_type(setting, args.field, args.type)
        E, _ = reflex(setting, phi.field, phi)
        eta = parse_embedding(setting, E, args.eta)
        tau = setting.element(args.tau)
        sign = epsilon_sign(setting, phi, eta, tau)
        data = {"cm_type": _labels(setting, phi.field, phi.members), "reflex_field": E.name,
                "eta": args.eta, "tau": args.tau, "sign": sign}
        return GaloisReport(command="sign", setting=setting.name, field=phi.field.name, data=data)

    if action == "critical":
        mu = parse_type(setting, args.field, args.mu)
        decomposition = critical_decompose(setting, mu)
        data: Dict[str, object] = {"mu": format_type(setting, mu), "critical": decomposition is not None}
        if decomposition is not None:
            xi = xi_infinity_type(setting, decomposition)
            data.update({
                "cm_type": _labels(setting, mu.field, decomposition.cm_type.members),
                "alpha": format_type(setting, decomposition.alpha),
                "beta": format_type(setting, decomposition.beta),
                "weight": decomposition.weight,
                "xi": format_type(setting, xi),
            })
        return GaloisReport(command="critical", setting=setting.name, field=mu.field.name, data=data)

    return GaloisReport(command="demo", setting=setting.name, data=galois_demo(setting))


def galois_demo(setting: CMSetting) -> Dict[str, object]:
    """Embeddings, CM-types, reflex pairs, sign tables and critical types of every registered field."""
    fields = {}
    for fld in setting.fields:
        entry: Dict[str, object] = {
            "embeddings": _labels(setting, fld, [e.rep for e in embeddings(setting, fld)]),
            "totally_imaginary": is_totally_imaginary(setting, fld),
            "cm": is_cm_field(setting, fld),
        }
        if entry["totally_imaginary"]:
            types = []
            for phi in cm_types(setting, fld):
                E, phi_star = reflex(setting, fld, phi)
                signs = {
                    f"{setting.element_names[tau]}|{setting.label(E, eta.rep)}":
                        epsilon_sign(setting, phi, eta, tau)
                    for tau in setting.group.elements
                    for eta in embeddings(setting, E)
                }
                types.append({"cm_type": _labels(setting, fld, phi.members), "reflex_field": E.name,
                              "reflex_type": _labels(setting, E, phi_star.members), "signs": signs})
            entry["cm_types"] = types
            entry["critical_types"] = [
                {"alpha": format_type(setting, d.alpha), "beta": format_type(setting, d.beta), "weight": d.weight}
                for d in critical_types(setting, fld, 1)
            ]
        fields[fld.name] = entry
    return {"order": setting.group.order, "conj": setting.element_names[setting.conj], "fields": fields}


# --- analytic commands -----------------------------------------------------

def cmd_ek(args: Namespace) -> EKReport:
    config = run_config(args)
    prec = config.precision
    lattice, field = parse_lattice(args.lattice, config.field, prec)
    t, _ = parse_translate(args.t, field, prec) if args.t else (0, None)
    s = parse_complex(args.s, prec)
    params = EKParams(args.b, args.a, t, s, args.gamma)
    if args.method == "direct":
        value, bound = ek_direct(params, lattice, args.radius or settings.lattice.direct_radius, prec)
    else:
        value = ek(params, lattice, prec)
        with precision_manager.working(prec):
            bound = mpmath.ldexp(max(abs(value.value), 1), -prec + 4)
    return EKReport(
        b=args.b, a=args.a, s=args.s, t=args.t or "0",
        lattice=[lattice.w1.to_decimal_string(), lattice.w2.to_decimal_string()],
        gamma_order=args.gamma, method=args.method, precision=prec,
        value=value.to_decimal_string(), error_bound=decimal_string(bound, 32),
    )


def cmd_lvalue(args: Namespace) -> LValueReport:
    config = run_config(args)
    chi = parse_character(config.character)
    s = parse_complex(args.s, config.precision)
    return L_value(chi, s, config.precision, method=args.method, nmax=args.nmax)


def cmd_period(args: Namespace) -> PeriodReport:
    config = run_config(args)
    prec = config.precision
    field = ImagQuadField.from_name(config.field or "Q(i)")
    period = cm_period(field, prec)
    inv = period.invariants
    with precision_manager.working(prec):
        bound = mpmath.ldexp(max(abs(period.omega.value), 1), -prec + 8)
    return PeriodReport(
        field=field.name, precision=prec,
        g2=inv.g2.to_decimal_string(), g3=inv.g3.to_decimal_string(), j=str(period.j),
        omega=period.omega.to_decimal_string(), normalization=period.normalization,
        dual_period=dual_period(period).to_decimal_string(), error_bound=decimal_string(bound, 32),
    )


def cmd_verify(args: Namespace) -> VerifyReport:
    config = run_config(args)
    chi = parse_character(config.character)
    scale = parse_complex(args.omega_scale, config.precision) if args.omega_scale else 1
    return verify(chi, config.precision, max_degree=args.maxdeg, omega_scale=scale)


def write_report(report, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(report.model_dump_json(indent=2) + "\n")
    logger.info(f"Report written to {path}")


__all__ = [
    "cmd_ek",
    "cmd_galois",
    "cmd_lvalue",
    "cmd_period",
    "cmd_verify",
    "format_type",
    "galois_demo",
    "run_config",
    "write_report",
]

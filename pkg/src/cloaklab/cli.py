"""Command-line front end.

Usage::

    cloaklab {solve,field,resonances,limit,materials,check} --config run.json
             [--out PATH] [--allow-near-resonance] [--threads N]

Exit codes: 0 success, 1 configuration error, 2 math-domain error
(resonance, transmission eigenvalue, singular system), 3 verification
failure.
"""

import argparse
import copy
import json
import sys

import jsonschema
import numpy as np

from . import io
from .errors import CloakError, DomainError, ResonantFrequency, VacuumDirichletEigenvalue
from .fields import LimitField, sample_grid, transmission_residual
from .geometry import CloakGeometry, sample_materials
from .limits import run_sweep
from .modes import CloakParams, intermediates, residuals, solve_all
from .oracle import verification_suite
from .resonance import DEFAULT_SCAN_STEP, check_nonresonant, find_resonances

EXIT_CONFIG = 1
EXIT_MATH = 2
EXIT_VERIFY = 3

_MODE_LIST = {
    "type": "array",
    "items": {
        "type": "array",
        "prefixItems": [{"type": "integer"}, {"type": "number"}, {"type": "number"}],
        "minItems": 3,
        "maxItems": 3,
    },
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["kappa", "omega"],
    "additionalProperties": False,
    "properties": {
        "kappa": {"type": "number", "exclusiveMinimum": 0},
        "omega": {"type": "number", "exclusiveMinimum": 0},
        "R": {"type": "number", "exclusiveMinimum": 1, "exclusiveMaximum": 2},
        "N": {"type": "integer", "minimum": 0, "maximum": 60},
        "sigma_a": {"type": "number", "exclusiveMinimum": 0},
        "source": _MODE_LIST,
        "boundary": _MODE_LIST,
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "r_min": {"type": "number", "minimum": 1e-6},
                "r_max": {"type": "number", "exclusiveMinimum": 0, "maximum": 3},
                "n_r": {"type": "integer", "minimum": 1},
                "n_theta": {"type": "integer", "minimum": 1},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "k_min": {"type": "integer", "minimum": 1},
                "k_max": {"type": "integer", "minimum": 1, "maximum": 40},
            },
        },
        "resonances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "omega_min": {"type": "number", "exclusiveMinimum": 0},
                "omega_max": {"type": "number", "exclusiveMinimum": 0},
                "scan_step": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "output_path": {"type": "string"},
        "format": {"enum": ["csv", "json"]},
    },
}

DEFAULTS = {
    "N": 0,
    "sigma_a": 1.0,
    "source": [],
    "boundary": [],
    "grid": {"r_min": 0.01, "r_max": 3.0, "n_r": 31, "n_theta": 16},
    "sweep": {"k_min": 4, "k_max": 14},
    "resonances": {"omega_min": 0.1, "omega_max": 10.0, "scan_step": DEFAULT_SCAN_STEP},
}

CHECK_RADII = (1.05, 1.2, 1.5)


class ConfigError(Exception):
    pass


def _field_path(error):
    parts = ["config"]
    for p in error.absolute_path:
        parts.append(f"[{p}]" if isinstance(p, int) else f".{p}")
    return "".join(parts)


def resolve_config(raw):
    """Validate a parsed config and fill in defaults."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ConfigError(f"{_field_path(e)}: {e.message}")
    cfg = copy.deepcopy(DEFAULTS)
    for key, value in raw.items():
        if isinstance(value, dict):
            cfg[key] = {**cfg.get(key, {}), **value}
        else:
            cfg[key] = value
    for key in ("source", "boundary"):
        seen = set()
        for i, (n, _, _) in enumerate(cfg[key]):
            if abs(n) > cfg["N"]:
                raise ConfigError(f"config.{key}[{i}]: mode {n} exceeds cutoff N = {cfg['N']}")
            if n in seen:
                raise ConfigError(f"config.{key}[{i}]: mode {n} listed twice")
            seen.add(n)
    g = cfg["grid"]
    if g["r_min"] > g["r_max"]:
        raise ConfigError("config.grid: r_min exceeds r_max")
    s = cfg["sweep"]
    if s["k_min"] >= s["k_max"]:
        raise ConfigError("config.sweep: k_min must be below k_max")
    w = cfg["resonances"]
    if w["omega_min"] >= w["omega_max"]:
        raise ConfigError("config.resonances: omega_min must be below omega_max")
    return cfg


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return resolve_config(raw)


def _modes(entries):
    return {int(n): complex(re, im) for n, re, im in entries}


def _params(cfg):
    return CloakParams(cfg["kappa"], cfg["omega"], cfg["R"], cfg["N"])


def _require_nonresonant(cfg, allow):
    probe = CloakParams(cfg["kappa"], cfg["omega"], cfg.get("R", 1.5), cfg["N"])
    check = check_nonresonant(probe)
    if not check and not allow:
        n = check.violating_mode
        hint = "pass --allow-near-resonance to proceed"
        if check.condition == "resonance":
            raise ResonantFrequency(
                f"omega = {cfg['omega']!r} is within {check.min_margin:.3e} of an "
                f"interior resonance of mode {n}; {hint}",
                n=n,
            )
        raise VacuumDirichletEigenvalue(
            f"J_{n}(3 omega) = {check.min_margin:.3e} for mode {n}; {hint}"
        )


def _radii(grid):
    return np.linspace(grid["r_min"], grid["r_max"], grid["n_r"])


def _thetas(grid):
    return 2.0 * np.pi * np.arange(grid["n_theta"]) / grid["n_theta"]


def _complex_cells(prefix, z):
    return {f"re_{prefix}": float(z.real), f"im_{prefix}": float(z.imag)}


def cmd_solve(cfg, args):
    _require_nonresonant(cfg, args.allow_near_resonance)
    source, boundary = _modes(cfg["source"]), _modes(cfg["boundary"])
    rows = []
    if "R" not in cfg:
        limit = LimitField.from_source(cfg["kappa"], cfg["omega"], cfg["N"], source)
        for n in sorted(limit.a_tilde):
            rows.append({"n": n, **_complex_cells("a_tilde", limit.a_tilde[n])})
        columns = ("n", "re_a_tilde", "im_a_tilde")
        return {"ideal_limit": True, "modes": rows}, columns, rows
    params = _params(cfg)
    sol = solve_all(params, source, boundary, threads=args.threads)
    for n in sol.modes:
        co = sol.coeffs[n]
        inter = intermediates(n, params)
        row = {"n": n}
        for name, z in (("a", co.a), ("b", co.b), ("c", co.c)):
            row.update(_complex_cells(name, z))
        for name in ("l1", "l2", "s", "t", "s_tilde", "t_tilde", "D", "A", "B"):
            row.update(_complex_cells(name, getattr(inter, name)))
        for name, value in zip(("res_dirichlet", "res_value", "res_flux"),
                               residuals(co, sol.inputs[n], params)):
            row[name] = float(value)
        rows.append(row)
    value, flux = transmission_residual(sol)
    doc = {"ideal_limit": False, "modes": rows,
           "transmission_residual": {"value": value, "flux": flux}}
    return doc, tuple(rows[0]), rows


def cmd_field(cfg, args):
    _require_nonresonant(cfg, args.allow_near_resonance)
    source, boundary = _modes(cfg["source"]), _modes(cfg["boundary"])
    if "R" in cfg:
        target = solve_all(_params(cfg), source, boundary, threads=args.threads)
    else:
        target = LimitField.from_source(cfg["kappa"], cfg["omega"], cfg["N"], source)
    grid = sample_grid(target, _radii(cfg["grid"]), _thetas(cfg["grid"]), threads=args.threads)
    rows = list(io.field_rows(grid))
    return {"points": rows}, io.FIELD_COLUMNS, rows


def cmd_resonances(cfg, args):
    w = cfg["resonances"]
    reports = [
        find_resonances(n, cfg["kappa"], (w["omega_min"], w["omega_max"]), w["scan_step"])
        for n in range(cfg["N"] + 1)
    ]
    rows = [
        {"n": rep.n, "omega": root, "g_abs": g, "h_abs": h}
        for rep in reports
        for root, (g, h) in zip(rep.roots, rep.condition_values)
    ]
    return {"reports": [rep.to_dict() for rep in reports]}, ("n", "omega", "g_abs", "h_abs"), rows


def cmd_limit(cfg, args):
    _require_nonresonant(cfg, args.allow_near_resonance)
    params = CloakParams(cfg["kappa"], cfg["omega"], cfg.get("R", 1.5), cfg["N"])
    modes = range(cfg["N"] + 1)
    source = _modes(cfg["source"])
    p = {n: source.get(n, 0j) for n in modes} if source else None
    s = cfg["sweep"]
    report = run_sweep(
        params, (s["k_min"], s["k_max"]), modes, p, _modes(cfg["boundary"]),
        threads=args.threads, require_nonresonant=False,
    )
    doc = report.to_dict()
    doc["n0_log_product"] = report.n0_log_product
    return doc, io.SWEEP_COLUMNS, list(report.flat_rows())


def cmd_materials(cfg, args):
    sigma_a = cfg["sigma_a"]
    lambda_a = 1.0 / (cfg["kappa"] ** 2 * sigma_a)
    if "R" in cfg:
        CloakGeometry(cfg["R"])
    samples = sample_materials(
        _radii(cfg["grid"]), _thetas(cfg["grid"]), cfg.get("R"), sigma_a, lambda_a
    )
    rows = list(io.material_rows(samples))
    return {"samples": rows}, io.MATERIAL_COLUMNS, rows


def cmd_check(cfg, args):
    radii = (cfg["R"],) if "R" in cfg else CHECK_RADII
    entries = verification_suite(cfg["kappa"], cfg["omega"], radii)
    rows = [
        {"name": e["name"], "value": _scalar(e["value"]), "tolerance": e["tolerance"],
         "passed": e["passed"]}
        for e in entries
    ]
    doc = {"checks": entries, "passed": all(e["passed"] for e in entries)}
    return doc, ("name", "value", "tolerance", "passed"), rows


def _scalar(value):
    return max(abs(v - 2.0) for v in value) if isinstance(value, list) else value


COMMANDS = {
    "solve": cmd_solve,
    "field": cmd_field,
    "resonances": cmd_resonances,
    "limit": cmd_limit,
    "materials": cmd_materials,
    "check": cmd_check,
}

DEFAULT_FORMAT = {
    "solve": "json",
    "field": "csv",
    "resonances": "json",
    "limit": "json",
    "materials": "csv",
    "check": "json",
}


def render(command, cfg, args):
    doc, columns, rows = COMMANDS[command](cfg, args)
    fmt = cfg.get("format", DEFAULT_FORMAT[command])
    if fmt == "csv":
        text = io.dumps_csv(columns, rows, cfg)
    else:
        text = io.dumps_json({"command": command, "config": cfg, **doc})
    return text, doc


def build_parser():
    parser = argparse.ArgumentParser(prog="cloaklab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--allow-near-resonance", action="store_true")
        p.add_argument("--threads", type=int, default=1)
    return parser


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        text, doc = render(args.command, cfg, args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (ArithmeticError, CloakError) as exc:
        print(f"{args.command}: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_MATH
    except ValueError as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG
    out = args.out or cfg.get("output_path")
    io.write_text(text, out, stdout)
    if args.command == "check" and not doc["passed"]:
        failed = [e["name"] for e in doc["checks"] if not e["passed"]]
        print(f"check: verification failed: {', '.join(failed)}", file=stderr)
        return EXIT_VERIFY
    return 0


if __name__ == "__main__":
    sys.exit(main())

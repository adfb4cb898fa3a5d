"""Command-line surface: reproducible pipelines over the toolkit modules.

Every command writes its documented CSV/JSON artifacts plus a manifest
carrying a schema version, the effective-configuration hash, and the wall
time (wall time lives only in the manifest so data files stay bit-for-bit
reproducible).  Exit codes: 0 success, 2 frequency outside the existence
window, 3 solver or validation failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import curves as curves_mod
from . import landscape as landscape_mod
from .analytic1d import validate_quadrature_1d
from .dynamics import linearized_spectra, stability_experiment, write_experiment
from .errors import CqnlsError, FrequencyOutOfWindow
from .functionals import evaluate
from .profiles import ShootingConfig, test_function_profile
from .shooting import solve_cubic_reference, solve_ground_state

SCHEMA_VERSION = 1
RESIDUAL_GATE = 1e-7
ENV_OUT_DIR = "CQNLS_OUT_DIR"


def _read_config_file(path: str | None) -> dict:
    """Flat key=value document; '#' starts a comment."""
    if not path:
        return {}
    options = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line is not key=value: {raw!r}")
        key, value = line.split("=", 1)
        options[key.strip().replace("-", "_")] = value.strip()
    return options


def _effective_options(args: argparse.Namespace, keys) -> dict:
    file_opts = _read_config_file(getattr(args, "config", None))
    merged = {}
    for key in keys:
        value = getattr(args, key, None)
        if value is None and key in file_opts:
            value = file_opts[key]
        merged[key] = value
    return merged


def _coerce_float(value, default=None):
    if value is None:
        return default
    return float(value)


def _config_hash(options: dict) -> str:
    payload = json.dumps({k: repr(v) for k, v in sorted(options.items())})
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _out_dir(args) -> Path:
    out = getattr(args, "out", None) or os.environ.get(ENV_OUT_DIR) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_manifest(directory: Path, command: str, options: dict,
                    wall_time: float, extra: dict | None = None):
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "toolkit_version": __version__,
        "command": command,
        "config_hash": _config_hash(options),
        "options": {k: (v if v is None or isinstance(v, (int, float, str, bool))
                        else repr(v)) for k, v in options.items()},
        "wall_time_seconds": wall_time,
    }
    if extra:
        manifest.update(extra)
    with (directory / "manifest.json").open("w") as fh:
        json.dump(manifest, fh, indent=2)


def _shooting_config(options: dict) -> ShootingConfig:
    kwargs = {}
    if options.get("ode_tol") is not None:
        kwargs["ode_tolerance"] = float(options["ode_tol"])
    return ShootingConfig(**kwargs)


def cmd_solve(args) -> int:
    start = time.time()
    options = _effective_options(args, ["omega", "ode_tol"])
    omega = _coerce_float(options["omega"])
    out = _out_dir(args)
    cfg = _shooting_config(options)
    profile = solve_ground_state(omega, cfg)
    report = evaluate(profile)
    residuals = {"nehari": report.nehari_residual,
                 "pohozaev": report.pohozaev_residual}
    profile.to_csv(out / "profile.csv")
    with (out / "report.json").open("w") as fh:
        payload = report.as_dict()
        payload["omega"] = omega
        json.dump(payload, fh, indent=2)
    _write_manifest(out, "solve", options, time.time() - start,
                    {"residuals": residuals})
    if (report.nehari_residual > RESIDUAL_GATE
            or report.pohozaev_residual > RESIDUAL_GATE):
        print(f"residual gate failed: nehari={report.nehari_residual:.2e}, "
              f"pohozaev={report.pohozaev_residual:.2e} exceed {RESIDUAL_GATE:g}",
              file=sys.stderr)
        return 3
    print(f"solved omega={omega}: residuals {residuals}")
    return 0


def _scan_grid(options) -> np.ndarray:
    n = int(options.get("grid_size") or 60)
    lo = _coerce_float(options.get("omega_min"), 0.004)
    hi = _coerce_float(options.get("omega_max"), 0.185)
    return curves_mod.default_omega_grid(n, lo, hi)


def _run_scan(options, differentiate: bool = False):
    cfg = _shooting_config(options)
    curve = curves_mod.scan(_scan_grid(options), cfg)
    if differentiate:
        curve = curves_mod.differentiate(curve, cfg)
    return curve, cfg


def cmd_scan(args) -> int:
    start = time.time()
    options = _effective_options(
        args, ["grid_size", "omega_min", "omega_max", "ode_tol", "derivatives"])
    out = _out_dir(args)
    curve, _ = _run_scan(options, differentiate=bool(options.get("derivatives")))
    curve.to_csv(out / "curve.csv")
    _write_manifest(out, "scan", options, time.time() - start,
                    {"failures": [list(f) for f in curve.failures],
                     "points": len(curve.points)})
    print(f"scanned {len(curve.points)} frequencies "
          f"({len(curve.failures)} failures) -> {out / 'curve.csv'}")
    return 0 if curve.points else 3


def cmd_critical(args) -> int:
    start = time.time()
    options = _effective_options(
        args, ["grid_size", "omega_min", "omega_max", "ode_tol"])
    out = _out_dir(args)
    curve, cfg = _run_scan(options)
    crit = curves_mod.locate_critical(curve, cfg)
    curve = curves_mod.classify_stability(curve, crit)
    curve.to_csv(out / "curve.csv")
    crit.to_json(out / "critical.json")
    _write_manifest(out, "critical", options, time.time() - start,
                    {"failures": [list(f) for f in curve.failures]})
    print(json.dumps(crit.as_dict(), indent=2))
    return 0


def cmd_classify(args) -> int:
    start = time.time()
    options = _effective_options(
        args, ["mass", "mass_ratio", "grid_size", "omega_min", "omega_max", "ode_tol"])
    out = _out_dir(args)
    curve, cfg = _run_scan(options)
    crit = curves_mod.locate_critical(curve, cfg)
    if options.get("mass") is not None:
        mass = float(options["mass"])
    elif options.get("mass_ratio") is not None:
        mass = float(options["mass_ratio"]) * crit.m0
    else:
        raise ValueError("classify needs --mass or --mass-ratio")
    result = landscape_mod.classify_normalized(mass, curve, crit, cfg)
    with (out / "classification.json").open("w") as fh:
        json.dump(result.as_dict(), fh, indent=2)
    _write_manifest(out, "classify", options, time.time() - start)
    print(json.dumps(result.as_dict(), indent=2))
    return 0


def cmd_landscape(args) -> int:
    start = time.time()
    options = _effective_options(
        args, ["mass_grid", "grid_size", "omega_min", "omega_max", "ode_tol"])
    out = _out_dir(args)
    curve, cfg = _run_scan(options)
    crit = curves_mod.locate_critical(curve, cfg)
    n_masses = int(options.get("mass_grid") or 20)
    masses = np.linspace(0.4 * crit.m_threshold, 2.2 * crit.m_q1, n_masses)
    rows = landscape_mod.landscape_table(masses, curve, crit, cfg)
    landscape_mod.write_landscape_csv(rows, out / "landscape.csv")
    _write_manifest(out, "landscape", options, time.time() - start,
                    {"critical": crit.as_dict()})
    print(f"landscape table over {n_masses} masses -> {out / 'landscape.csv'}")
    return 0


def cmd_evolve(args) -> int:
    start = time.time()
    options = _effective_options(
        args, ["omega", "perturbation", "t_end", "dt", "ode_tol"])
    out = _out_dir(args)
    omega = _coerce_float(options["omega"])
    size = _coerce_float(options.get("perturbation"), 0.01)
    t_end = _coerce_float(options.get("t_end"), 100.0)
    dt = _coerce_float(options.get("dt"), 0.02)
    result = stability_experiment(omega, size, t_end=t_end, dt=dt,
                                  cfg=_shooting_config(options))
    write_experiment(result, out)
    _write_manifest(out, "evolve", options, time.time() - start,
                    {"verdict": result["verdict"]})
    print(f"verdict: {result['verdict']} "
          f"(growth ratio {result['growth_ratio']:.2f})")
    return 0


def cmd_spectra(args) -> int:
    start = time.time()
    options = _effective_options(args, ["omega", "n_eigs", "ode_tol"])
    out = _out_dir(args)
    omega = _coerce_float(options["omega"])
    n_eigs = int(options.get("n_eigs") or 6)
    ground = solve_ground_state(omega, _shooting_config(options))
    record = linearized_spectra(ground, n_eigs=n_eigs)
    with (out / "spectra.json").open("w") as fh:
        json.dump(record, fh, indent=2)
    _write_manifest(out, "spectra", options, time.time() - start)
    print(json.dumps(record, indent=2))
    return 0


def _validate_checks() -> list[tuple[str, bool, str]]:
    checks = []

    gaussian = test_function_profile(
        lambda r: np.exp(-(r**2)), lambda r: -2.0 * r * np.exp(-(r**2)))
    mass = evaluate(gaussian).mass
    target = (math.pi / 2.0) ** 1.5
    err = abs(mass - target) / target
    checks.append(("gaussian mass (pi/2)^(3/2)", err < 1e-10, f"rel err {err:.2e}"))

    oned = validate_quadrature_1d(0.1)
    worst = max(v["rel_error"] for v in oned.values() if isinstance(v, dict))
    checks.append(("1d closed-form quadrature", worst < 1e-10, f"worst rel {worst:.2e}"))
    checks.append(("1d nehari identity", oned["nehari_residual"] < 1e-9,
                   f"residual {oned['nehari_residual']:.2e}"))

    for omega in (0.05, 0.09, 0.15):
        rep = evaluate(solve_ground_state(omega))
        ok = (rep.nehari_residual < RESIDUAL_GATE
              and rep.pohozaev_residual < RESIDUAL_GATE)
        checks.append((f"ground-state residuals omega={omega}", ok,
                       f"nehari {rep.nehari_residual:.2e}, "
                       f"pohozaev {rep.pohozaev_residual:.2e}"))

    rep_g = evaluate(solve_cubic_reference())
    ok = rep_g.nehari_residual < RESIDUAL_GATE and rep_g.pohozaev_residual < RESIDUAL_GATE
    checks.append(("cubic reference residuals", ok,
                   f"nehari {rep_g.nehari_residual:.2e}"))
    return checks


def cmd_validate(args) -> int:
    start = time.time()
    options = _effective_options(args, ["ode_tol"])
    out = _out_dir(args)
    checks = _validate_checks()
    width = max(len(name) for name, _, _ in checks)
    all_ok = True
    for name, ok, detail in checks:
        status = "PASS" if ok else "FAIL"
        all_ok &= ok
        print(f"{name.ljust(width)}  {status}  {detail}")
    _write_manifest(out, "validate", options, time.time() - start,
                    {"checks": [{"name": n, "pass": bool(p), "detail": d}
                                for n, p, d in checks]})
    return 0 if all_ok else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqnls",
        description="Ground-state soliton toolkit for the 3D cubic-quintic NLS",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help=f"output directory (default ${ENV_OUT_DIR} or .)")
        p.add_argument("--config", help="flat key=value config file; CLI overrides")
        p.add_argument("--ode-tol", dest="ode_tol", help="ODE integrator tolerance")

    p = sub.add_parser("solve", help="solve one ground state")
    p.add_argument("--omega", required=True)
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("scan", help="sweep the frequency window")
    p.add_argument("--grid-size", dest="grid_size")
    p.add_argument("--omega-min", dest="omega_min")
    p.add_argument("--omega-max", dest="omega_max")
    p.add_argument("--derivatives", action="store_true")
    common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("critical", help="locate the critical frequencies")
    p.add_argument("--grid-size", dest="grid_size")
    p.add_argument("--omega-min", dest="omega_min")
    p.add_argument("--omega-max", dest="omega_max")
    common(p)
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("classify", help="count normalized solutions at a mass")
    p.add_argument("--mass")
    p.add_argument("--mass-ratio", dest="mass_ratio",
                   help="mass as a multiple of the minimum soliton mass m0")
    p.add_argument("--grid-size", dest="grid_size")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("landscape", help="constrained-minimization table")
    p.add_argument("--mass-grid", dest="mass_grid")
    p.add_argument("--grid-size", dest="grid_size")
    common(p)
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("evolve", help="finite-time stability experiment")
    p.add_argument("--omega", required=True)
    p.add_argument("--perturbation")
    p.add_argument("--t-end", dest="t_end")
    p.add_argument("--dt")
    common(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("spectra", help="linearized operator spectra")
    p.add_argument("--omega", required=True)
    p.add_argument("--n-eigs", dest="n_eigs")
    common(p)
    p.set_defaults(func=cmd_spectra)

    p = sub.add_parser("validate", help="run the invariant battery")
    common(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FrequencyOutOfWindow as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except CqnlsError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 3
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

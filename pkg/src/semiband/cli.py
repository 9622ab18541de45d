"""Command-line interface: batch diagonalization, rays and verification.

Subcommands
-----------
diagonalize   band energies on a list or grid of phase points (CSV + JSON)
connections   order-0 / corrected connection sets per point
curvature     curvature blocks per point
trajectory    fixed-helicity ray tracing (CSV per helicity + manifest)
verify        run the verification suites, exit 0 iff all pass
bracket-check exact symbolic identity checks with a seeded case list

Configuration is a JSON document (see README for the schema); identical
config + seed produce byte-identical reports.  Exit codes: 0 success,
1 configuration/schema error, 2 point-level errors (listed per point).
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from semiband import weyl
from semiband.models import PhasePoint, make_model
from semiband.frames import Tolerances, berry_connections, classical_frame
from semiband.energy import (
    band_energy,
    connection_component_gradients,
    corrected_connections,
    rotation_generator,
)
from semiband.dynamics import band_curvature_vector, berry_curvatures, integrate_ray
from semiband.verify import BRACKET_SUITES, run_suites

__all__ = ["main"]

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _resolve_points(cfg: dict, rng: np.random.Generator) -> list:
    if "points" in cfg:
        pts = []
        for i, rec in enumerate(cfg["points"]):
            try:
                pts.append(PhasePoint.of(rec["R"], rec["P"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"bad point #{i}: {exc}") from exc
        return pts
    if "grid" in cfg:
        section = cfg["grid"]
        axes = []
        for key in ("R", "P"):
            rows = section.get(key)
            if rows is None or len(rows) != 3:
                raise ConfigError(f"grid.{key} must give [min, max, count] x 3")
            for row in rows:
                lo, hi, count = row
                if int(count) < 1:
                    raise ConfigError("grid counts must be >= 1")
                axes.append(np.linspace(float(lo), float(hi), int(count)))
        mesh = np.meshgrid(*axes, indexing="ij")
        flat = [m.ravel() for m in mesh]
        return [PhasePoint.of([flat[0][i], flat[1][i], flat[2][i]],
                              [flat[3][i], flat[4][i], flat[5][i]])
                for i in range(flat[0].size)]
    if "random_points" in cfg:
        section = cfg["random_points"]
        count = int(section.get("count", 10))
        pmin, pmax = section.get("p_range", [0.3, 3.0])
        pts = []
        for _ in range(count):
            R = rng.uniform(-1.0, 1.0, 3)
            P = rng.uniform(-1.0, 1.0, 3)
            P *= rng.uniform(pmin, pmax) / np.linalg.norm(P)
            pts.append(PhasePoint.of(R, P))
        return pts
    raise ConfigError("config needs 'points', 'grid' or 'random_points'")


def _tolerances(cfg: dict) -> Tolerances:
    section = cfg.get("tolerances", {})
    defaults = Tolerances()
    kwargs = {}
    for name in ("degeneracy", "gap", "block", "unitarity", "hermiticity",
                 "fd_base", "overlap"):
        kwargs[name] = float(section.get(name, getattr(defaults, name)))
    return Tolerances(**kwargs)


def _mat_json(mat: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in mat]


def _diag_json(diag: dict) -> dict:
    out = {}
    for key, value in diag.items():
        if hasattr(value, "order") and hasattr(value, "discrepancy"):
            out[key] = {"order": int(value.order),
                        "discrepancy": float(value.discrepancy),
                        "fallbacks": int(value.fallbacks)}
        elif isinstance(value, (bool, int, float)):
            out[key] = value if isinstance(value, bool) else float(value)
        else:
            out[key] = str(value)
    return out


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _write_csv(path: Path, header: list, rows: list) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _map_points(fn, points, jobs: int):
    """Apply fn to each point, preserving order; collect per-point errors."""
    def safe(args):
        idx, x = args
        try:
            return idx, fn(x), None
        except Exception as exc:  # noqa: BLE001 - reported per point
            return idx, None, f"{type(exc).__name__}: {exc}"

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(safe, enumerate(points)))
    else:
        results = [safe(item) for item in enumerate(points)]
    errors = [{"index": i, "error": err} for i, _r, err in results if err]
    values = [(i, r) for i, r, err in results if not err]
    return values, errors


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_diagonalize(cfg: dict, args) -> int:
    model = make_model(cfg.get("model", {}))
    hbar = float(args.hbar if args.hbar is not None else cfg.get("hbar", 0.01))
    if hbar <= 0:
        raise ConfigError("hbar must be positive")
    order = int(args.order if args.order is not None else cfg.get("order", 2))
    representation = cfg.get("representation", "canonical")
    tol = _tolerances(cfg)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    rng = np.random.default_rng(seed)
    points = _resolve_points(cfg, rng)
    out = Path(args.out)

    def work(x: PhasePoint):
        return band_energy(model, x, hbar, order=order,
                           representation=representation, tol=tol)

    values, errors = _map_points(work, points, args.jobs)

    n = model.n
    header = (["R_x", "R_y", "R_z", "P_x", "P_y", "P_z", "hbar", "order"]
              + [f"band{i}_{part}" for i in range(n)
                 for part in ("total", "order0", "order1", "order2", "bracket")]
              + ["hermiticity_defect", "offblock_norm", "bracket_unavailable"])
    rows = []
    records = []
    for _i, rep in values:
        row = [*rep.point.R, *rep.point.P, hbar, order]
        for i in range(n):
            row += [float(np.real(rep.eps[i, i])),
                    float(np.real(rep.zeroth[i, i])),
                    float(np.real(rep.first[i, i])),
                    float(np.real(rep.second[i, i])),
                    float(np.real(rep.bracket_term[i, i]))]
        row += [rep.diagnostics["hermiticity_defect"],
                rep.diagnostics["offblock_norm"], int(rep.partial)]
        rows.append(row)
        records.append({
            "R": list(rep.point.R), "P": list(rep.point.P),
            "hbar": hbar, "order": order, "representation": representation,
            "bands": [float(v) for v in rep.band_values()],
            "eps": _mat_json(rep.eps),
            "partial": rep.partial,
            "diagnostics": _diag_json(rep.diagnostics),
        })
    _write_csv(out / "energies.csv", header, rows)
    _write_json(out / "energies.json", {
        "schema_version": SCHEMA_VERSION, "model": model.to_config(),
        "seed": seed, "records": records, "errors": errors,
    })
    if errors:
        for err in errors:
            print(f"point {err['index']}: {err['error']}", file=sys.stderr)
        return 2
    print(f"wrote {len(rows)} rows to {out / 'energies.csv'}")
    return 0


def cmd_connections(cfg: dict, args) -> int:
    model = make_model(cfg.get("model", {}))
    hbar = float(args.hbar if args.hbar is not None else cfg.get("hbar", 0.01))
    order = str(cfg.get("connection_order", "corrected"))
    tol = _tolerances(cfg)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    rng = np.random.default_rng(seed)
    points = _resolve_points(cfg, rng)
    out = Path(args.out)

    def work(x: PhasePoint):
        frame = classical_frame(model, x, tol)
        conns0 = berry_connections(model, x, hbar, frame=frame, tol=tol)
        if order == "0":
            return conns0
        grads = connection_component_gradients(model, x, hbar, frame, tol)
        B = rotation_generator(model, frame, conns0, tol)
        return corrected_connections(model, frame, conns0, B, hbar, tol, grads)

    values, errors = _map_points(work, points, args.jobs)
    header = ["R_x", "R_y", "R_z", "P_x", "P_y", "P_z", "hbar", "order"] + \
        [f"norm_A_{kind}{l}" for kind in ("R", "P") for l in range(3)]
    rows, records = [], []
    for _i, conns in values:
        row = [*conns.point.R, *conns.point.P, hbar, conns.order]
        row += [float(np.linalg.norm(a)) for a in conns.A_R]
        row += [float(np.linalg.norm(a)) for a in conns.A_P]
        rows.append(row)
        records.append({
            "R": list(conns.point.R), "P": list(conns.point.P),
            "hbar": hbar, "order": conns.order,
            "A_R": [_mat_json(a) for a in conns.A_R],
            "A_P": [_mat_json(a) for a in conns.A_P],
        })
    _write_csv(out / "connections.csv", header, rows)
    _write_json(out / "connections.json", {
        "schema_version": SCHEMA_VERSION, "model": model.to_config(),
        "seed": seed, "records": records, "errors": errors,
    })
    if errors:
        for err in errors:
            print(f"point {err['index']}: {err['error']}", file=sys.stderr)
        return 2
    print(f"wrote {len(rows)} rows to {out / 'connections.csv'}")
    return 0


def cmd_curvature(cfg: dict, args) -> int:
    model = make_model(cfg.get("model", {}))
    hbar = float(args.hbar if args.hbar is not None else cfg.get("hbar", 0.01))
    tol = _tolerances(cfg)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    rng = np.random.default_rng(seed)
    points = _resolve_points(cfg, rng)
    out = Path(args.out)

    def work(x: PhasePoint):
        cset = berry_curvatures(model, x, hbar, tol)
        extra = {}
        if model.name == "neutrino_metric":
            for lam in (+1, -1):
                extra[f"band_theta_lam{lam:+d}"] = band_curvature_vector(
                    model, x, lam, tol).tolist()
        return cset, extra

    values, errors = _map_points(work, points, args.jobs)
    header = ["R_x", "R_y", "R_z", "P_x", "P_y", "P_z", "hbar",
              "norm_theta_rr", "norm_theta_pp", "norm_theta_pr",
              "antisym_defect"]
    rows, records = [], []
    for _i, (cset, extra) in values:
        anti = max(
            float(np.max(np.abs(cset.theta_rr + cset.theta_rr.transpose(1, 0, 2, 3)))),
            float(np.max(np.abs(cset.theta_pp + cset.theta_pp.transpose(1, 0, 2, 3)))),
        )
        rows.append([*cset.point.R, *cset.point.P, hbar,
                     float(np.linalg.norm(cset.theta_rr)),
                     float(np.linalg.norm(cset.theta_pp)),
                     float(np.linalg.norm(cset.theta_pr)), anti])
        rec = {"R": list(cset.point.R), "P": list(cset.point.P), "hbar": hbar,
               "theta_rr": [[_mat_json(cset.theta_rr[i, j]) for j in range(3)]
                            for i in range(3)],
               "theta_pp": [[_mat_json(cset.theta_pp[i, j]) for j in range(3)]
                            for i in range(3)],
               "theta_pr": [[_mat_json(cset.theta_pr[i, j]) for j in range(3)]
                            for i in range(3)]}
        rec.update(extra)
        records.append(rec)
    _write_csv(out / "curvature.csv", header, rows)
    _write_json(out / "curvature.json", {
        "schema_version": SCHEMA_VERSION, "model": model.to_config(),
        "seed": seed, "records": records, "errors": errors,
    })
    if errors:
        for err in errors:
            print(f"point {err['index']}: {err['error']}", file=sys.stderr)
        return 2
    print(f"wrote {len(rows)} rows to {out / 'curvature.csv'}")
    return 0


def cmd_trajectory(cfg: dict, args) -> int:
    model = make_model(cfg.get("model", {}))
    section = cfg.get("trajectory", {})
    hbar = float(args.hbar if args.hbar is not None else cfg.get("hbar", 1e-3))
    dt = float(section.get("dt", 1e-2))
    if dt <= 0:
        raise ConfigError("trajectory dt must be positive")
    steps = int(section.get("steps", 1000))
    method = section.get("method", "rk4")
    r0 = section.get("r0", [0.0, 0.0, 0.0])
    P0 = section.get("P0", [0.0, 0.0, 1.0])
    lams = [+1, -1] if section.get("pair_lambdas", True) else [int(section.get("lambda", 1))]
    out = Path(args.out)

    manifest = {"schema_version": SCHEMA_VERSION, "model": model.to_config(),
                "hbar": hbar, "dt": dt, "steps": steps, "method": method,
                "r0": list(map(float, r0)), "P0": list(map(float, P0)),
                "lambdas": lams, "runs": []}
    header = ["t", "r_x", "r_y", "r_z", "P_x", "P_y", "P_z",
              "lambda", "eps", "speed"]
    for lam in lams:
        traj = integrate_ray(model, r0, P0, lam, hbar, dt, steps, method)
        rows = [[s.t, *s.r, *s.P, s.lam, s.eps, s.speed] for s in traj.states]
        path = out / f"trajectory_lam{lam:+d}.csv"
        _write_csv(path, header, rows)
        manifest["runs"].append({
            "lambda": lam, "file": path.name,
            "helicity_drift": traj.helicity_drift,
            "energy_drift": traj.energy_drift,
            "rejected_steps": traj.rejected_steps,
            "final_r": [float(v) for v in traj.final().r],
        })
        print(f"lambda={lam:+d}: {len(rows)} samples -> {path}")
    _write_json(out / "trajectory_manifest.json", manifest)
    return 0


def cmd_verify(cfg: dict, args) -> int:
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    names = [args.suite] if args.suite else cfg.get("suites_to_run")
    if args.suite == "bracket":
        names = BRACKET_SUITES
    overrides = cfg.get("suites", {})
    report = run_suites(names, seed=seed, overrides=overrides)
    out = Path(args.out)
    _write_json(out / "verify_report.json", report)
    for suite in report["suites"]:
        status = "PASS" if suite["passed"] else "FAIL"
        print(f"{status} {suite['name']}")
    print(f"report -> {out / 'verify_report.json'}")
    return 0 if report["all_passed"] else 2


def cmd_bracket_check(cfg: dict, args) -> int:
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 1))
    cases = int(cfg.get("cases", 200))
    max_degree = int(cfg.get("max_degree", 6))
    if max_degree > 8:
        raise ConfigError("max_degree exceeds the symmetrization cap (8)")
    dims = cfg.get("dims", [1, 2])
    rows = []
    exact = 0
    for dim in dims:
        rng = random.Random(seed + int(dim))
        for case in range(cases // len(dims)):
            f = weyl.random_factorization(rng, n=int(dim), max_degree=max_degree)
            g = weyl.random_factorization(rng, n=int(dim), max_degree=max_degree)
            ok_prod = weyl.bracket_product_residual(f, g).is_zero()
            h = weyl.random_resymmetrization(rng, f)
            ok_inv = weyl.invariant_derivative_residual(f, h).is_zero()
            exact += int(ok_prod and ok_inv)
            rows.append({"dim": int(dim), "case": case,
                         "product_rule_exact": ok_prod,
                         "invariance_exact": ok_inv})
    # Pure sums have no mixed pair: bracket vanishes for every scalar case.
    rng = random.Random(seed)
    pure_zero = True
    for _ in range(10):
        for kind in ("R", "P"):
            expr = weyl._random_pure_expr(rng, kind, 1, 3)
            if not weyl.Factorization([(kind, expr)]).bracket().is_zero():
                pure_zero = False
    total = len(rows)
    report = {"schema_version": SCHEMA_VERSION, "seed": seed,
              "cases": total, "exact": exact,
              "pure_sum_brackets_vanish": pure_zero,
              "all_passed": exact == total and pure_zero,
              "rows": rows}
    out = Path(args.out)
    _write_json(out / "bracket_report.json", report)
    print(f"{exact}/{total} cases exact -> {out / 'bracket_report.json'}")
    return 0 if report["all_passed"] else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="semiband",
        description="Block-diagonal band energies, Berry data and ray tracing "
                    "for matrix-valued Hamiltonians.",
    )
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--order", type=int, help="expansion order (0, 1, 2)")
    parser.add_argument("--hbar", type=float, help="value of hbar")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--out", default="semiband_out", help="output directory")
    parser.add_argument("--suite", help="verification suite name (verify)")
    parser.add_argument("--jobs", type=int, default=1, help="worker threads")
    parser.add_argument("command", choices=[
        "diagonalize", "connections", "curvature", "trajectory",
        "verify", "bracket-check",
    ])
    args = parser.parse_args(argv)

    handlers = {
        "diagonalize": cmd_diagonalize,
        "connections": cmd_connections,
        "curvature": cmd_curvature,
        "trajectory": cmd_trajectory,
        "verify": cmd_verify,
        "bracket-check": cmd_bracket_check,
    }
    try:
        cfg = _load_config(args.config)
        return handlers[args.command](cfg, args)
    except (ConfigError, ValueError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

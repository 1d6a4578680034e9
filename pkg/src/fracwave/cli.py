"""Command-line front end.

    fracwave <command> --config <path> [--out <dir>] [--force]
                       [--workers K] [--seed S]

Commands: solve, branch, spectrum, classify, evolve, sweep, report.
Artifacts (branch/spectrum/verdict JSON, trace/sweep CSV) are schema
versioned; existing files are never overwritten without --force. Exit codes:
0 success, 1 computation failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import io as fio
from .config import ConfigError, load_config
from .errors import FracwaveError
from .evolve import build_mode_perturbation, evolve_nonlinear, project_constraints
from .operators import build_second_variation, eigen_spectrum, project_mean_zero
from .spectral import functionals_kdv, functionals_rlw
from .stability import classify
from .waves import (Branch, SolverConfig, TravelingWave,
                    bifurcation_seed, continue_branch, newton_solve,
                    solve_family_wave)

COMMANDS = ("solve", "branch", "spectrum", "classify", "evolve", "sweep", "report")


def _solver_cfg(cfg):
    return SolverConfig(tol=cfg["tol"], max_iter=cfg["max_iter"])


def _obtain_wave(cfg) -> TravelingWave:
    """Wave from a branch file, the (1, a0) family, or a bifurcation seed."""
    if cfg.get("wave_file"):
        branch = fio.load_branch(cfg["wave_file"])
        return branch.points[cfg.get("point_index", -1)]
    scfg = _solver_cfg(cfg)
    if cfg.get("family_offset") is not None:
        return solve_family_wave(cfg["alpha"], cfg["family_offset"],
                                 cfg["period"], cfg["num_points"], scfg)
    seed, params = bifurcation_seed(cfg.get("seed_mode", 1), cfg["period"],
                                    cfg["alpha"], cfg["seed_eps"],
                                    cfg["num_points"], power=cfg["power"],
                                    model=cfg["model"])
    if cfg.get("speed") is not None:
        params = params.with_(speed=cfg["speed"])
    if cfg.get("offset"):
        params = params.with_(offset=cfg["offset"])
    return newton_solve(seed, params, scfg)


def _out_path(args, name):
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, name)
    fio.require_writable(path, args.force)
    return path


def _summary(command, **kv):
    parts = " ".join(f"{k}={v}" for k, v in kv.items())
    print(f"fracwave {command} ok {parts}")


# ---------------------------------------------------------------------------
# commands

def cmd_solve(cfg, args):
    w = _obtain_wave(cfg)
    path = _out_path(args, "branch.json")
    fio.save_branch(Branch([w], "speed"), path)
    _summary("solve", converged=w.converged, residual=f"{w.residual_norm:.3e}",
             speed=f"{w.params.speed:.6g}", file=path)
    return 0 if w.converged else 1


def cmd_branch(cfg, args):
    start = _obtain_wave(cfg)
    if not start.converged:
        print("fracwave branch failed: start wave did not converge",
              file=sys.stderr)
        return 1
    branch = continue_branch(start, cfg["parameter"], cfg["direction"],
                             cfg["steps"], _solver_cfg(cfg),
                             initial_step=cfg["initial_step"])
    path = _out_path(args, "branch.json")
    fio.save_branch(branch, path)
    _summary("branch", points=len(branch), parameter=cfg["parameter"],
             file=path)
    return 0


def cmd_spectrum(cfg, args):
    w = _obtain_wave(cfg)
    op = build_second_variation(w)
    if cfg["projected"]:
        op = project_mean_zero(op)
    rep = eigen_spectrum(op, cfg["sector"], cfg["k_request"])
    path = _out_path(args, "spectrum.json")
    fio.save_json(rep.to_json_dict(), path)
    if cfg["k_request"] > 0:
        for i, f in enumerate(rep.eigenfunctions):
            epath = _out_path(args, f"eigenfunction_{i}.json")
            with open(epath, "w") as fh:
                fh.write(f.dumps())
    _summary("spectrum", sector=cfg["sector"], n_minus=rep.n_minus,
             kernel_dim=rep.kernel_dim, file=path)
    return 0


def cmd_classify(cfg, args):
    w = _obtain_wave(cfg)
    verdict = classify(w, cfg["fd_step"], _solver_cfg(cfg))
    path = _out_path(args, "verdict.json")
    fio.save_json(verdict.to_json_dict(), path)
    _summary("classify", classification=verdict.classification,
             n_minus=verdict.n_minus_L, file=path)
    return 0


def cmd_evolve(cfg, args):
    w = _obtain_wave(cfg)
    u0 = w.profile
    if cfg["perturb_amplitude"] > 0:
        phi = build_mode_perturbation(u0.grid, {cfg["perturb_mode"]: 1.0},
                                      cfg["perturb_amplitude"],
                                      cfg["alpha"] / 2.0)
        u0 = u0 + phi
        if cfg["constrain_pm"]:
            f0 = (functionals_kdv(w.profile, cfg["alpha"], cfg["power"])
                  if cfg["model"] == "kdv"
                  else functionals_rlw(w.profile, cfg["alpha"]))
            u0 = project_constraints(u0, f0.P, f0.M, cfg["alpha"], cfg["model"])
    trace = evolve_nonlinear(u0, w.params, cfg["t_final"], cfg["dt"],
                             reference=w, n_samples=cfg["n_samples"])
    path = _out_path(args, "trace.csv")
    fio.save_trace_csv(trace, path, metadata={"alpha": cfg["alpha"],
                                              "model": cfg["model"]})
    _summary("evolve", samples=len(trace.times), blowup=trace.blowup,
             drift=f"{trace.invariant_drift():.3e}", file=path)
    return 0


def _cell_resolution(base: int, period: float) -> int:
    """Scale the collocation size with the period (next power of two)."""
    target = base * max(1.0, period / (2 * math.pi))
    return int(min(2048, 2 ** math.ceil(math.log2(target))))


def _sweep_cell(task):
    """One sweep cell, isolated; returns a row dict (never raises)."""
    idx, alpha, period, cfg, seed = task
    row = {"cell": idx, "alpha": alpha, "period": period}
    try:
        scfg = SolverConfig(tol=cfg["tol"], max_iter=cfg["max_iter"])
        w = solve_family_wave(alpha, cfg["family_offset"], period,
                              _cell_resolution(cfg["num_points"], period),
                              scfg)
        if not w.converged:
            row["status"] = "solve-failed"
            return row
        if cfg["pipeline"] == "classify":
            v = classify(w, cfg["fd_step"], scfg)
            row.update(status="ok", classification=v.classification,
                       n_minus_L=v.n_minus_L,
                       n_minus_projected=v.n_minus_projected,
                       P_c=(v.jacobian.P_c if v.jacobian else float("nan")),
                       residual=w.residual_norm)
        else:
            rng = np.random.Generator(np.random.Philox(key=[seed, idx]))
            phi_scale = 1e-3
            phi = build_mode_perturbation(
                w.grid, {2: (float(rng.standard_normal()),
                             float(rng.standard_normal()))},
                phi_scale, alpha / 2.0)
            trace = evolve_nonlinear(w.profile + phi, w.params,
                                     cfg["t_final"], cfg["dt"], reference=w)
            ratio = (float(trace.rho.max() / max(trace.rho[0], 1e-300))
                     if trace.rho is not None else float("nan"))
            row.update(status="ok", sup_ratio=ratio, blowup=trace.blowup,
                       drift=trace.invariant_drift(), residual=w.residual_norm)
        return row
    except Exception as exc:
        row["status"] = f"error: {type(exc).__name__}: {exc}"
        return row


def cmd_sweep(cfg, args):
    alphas = [float(a) for a in cfg["alphas"]]
    periods = [float(t) for t in cfg["periods"]]
    cells = [(i, a, t) for i, (a, t) in enumerate(
        (a, t) for a in alphas for t in periods)]
    if len(cells) > cfg["max_cells"]:
        raise ConfigError(f"sweep has {len(cells)} cells, cap is "
                          f"{cfg['max_cells']}")
    tasks = [(i, a, t, cfg, args.seed) for i, a, t in cells]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_cell, tasks))
    else:
        rows = [_sweep_cell(t) for t in tasks]
    rows.sort(key=lambda r: r["cell"])   # deterministic regardless of workers

    keys = ["cell", "alpha", "period", "status"]
    extra = sorted({k for r in rows for k in r} - set(keys))
    header = keys + extra
    lines = [f"# schema_version=1", f"# seed={args.seed}",
             f"# pipeline={cfg['pipeline']}", ",".join(header)]
    for r in rows:
        lines.append(",".join(repr(r.get(k, "")) if not isinstance(r.get(k, ""), str)
                              else str(r.get(k, "")) for k in header))
    path = _out_path(args, "sweep.csv")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    n_fail = sum(1 for r in rows if r["status"] != "ok")
    _summary("sweep", cells=len(rows), failures=n_fail, file=path)
    return 0


def cmd_report(cfg, args):
    lines = []
    for path in cfg["inputs"]:
        with open(path) as fh:
            d = json.load(fh)
        kind = ("verdict" if "classification" in d
                else "spectrum" if "eigenvalues" in d
                else "branch" if "points" in d else "artifact")
        if kind == "verdict":
            lines.append(f"{path}: {d['classification']} "
                         f"(n-={d.get('n_minus_L')}, P_c={d.get('P_c')})")
        elif kind == "spectrum":
            ev = d["eigenvalues"]
            lines.append(f"{path}: {d['sector']} spectrum, n-={d['n_minus']}, "
                         f"kernel={d['kernel_dim']}, lowest={ev[0]:.6g}")
        elif kind == "branch":
            lines.append(f"{path}: branch of {len(d['points'])} points, "
                         f"alpha={d['alpha']}, model={d['model']}")
        else:
            lines.append(f"{path}: unrecognized artifact")
    report = "\n".join(lines)
    print(report)
    path = _out_path(args, "report.txt")
    with open(path, "w") as fh:
        fh.write(report + "\n")
    _summary("report", inputs=len(cfg["inputs"]), file=path)
    return 0


# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="fracwave", description=__doc__)
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True)
    ap.add_argument("--out", default=".")
    ap.add_argument("--force", action="store_true",
                    help="overwrite existing output files")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.command)
    except ConfigError as exc:
        print(f"fracwave {args.command} config error: {exc}", file=sys.stderr)
        return 2
    handler = globals()[f"cmd_{args.command}"]
    try:
        return handler(cfg, args)
    except ConfigError as exc:
        print(f"fracwave {args.command} config error: {exc}", file=sys.stderr)
        return 2
    except FileExistsError as exc:
        print(f"fracwave {args.command} refused: {exc}", file=sys.stderr)
        return 2
    except (FracwaveError, RuntimeError, ValueError) as exc:
        print(f"fracwave {args.command} failed: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Schema-versioned persistence for branches, spectra, verdicts, and traces.

JSON artifacts round-trip doubles bit-exactly (Python's float repr is the
shortest exact representation). Trace CSVs carry '#'-prefixed metadata
lines before the header row.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import SchemaVersionError
from .grids import Grid, RealField
from .waves import Branch, TravelingWave, WaveParams

BRANCH_SCHEMA_VERSION = 1
TRACE_SCHEMA_VERSION = 1


def _parse_json(text: str, origin: str = "<string>") -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaVersionError(
            f"{origin}: parse error at byte offset {exc.pos}: {exc.msg}") from exc


def _check_version(d: dict, expected: int, what: str):
    got = d.get("schema_version")
    if got != expected:
        raise SchemaVersionError(
            f"{what}: schema version {got!r} found, {expected} required "
            "(no migration path)")


# ---------------------------------------------------------------------------
# branches

def branch_to_json_dict(branch: Branch) -> dict:
    if not branch.points:
        raise ValueError("cannot persist an empty branch")
    head = branch.points[0].params
    return {
        "schema_version": BRANCH_SCHEMA_VERSION,
        "model": head.model,
        "alpha": head.alpha,
        "power": head.power,
        "period": head.period,
        "continuation_parameter": branch.continuation_parameter,
        "step_history": [float(s) for s in branch.step_history],
        "points": [
            {
                "speed": w.params.speed,
                "offset": w.params.offset,
                "period": w.params.period,
                "num_points": w.grid.num_points,
                "residual_norm": w.residual_norm,
                "converged": w.converged,
                "branch_id": w.branch_id,
                "values": [float(v) for v in w.profile.values],
            }
            for w in branch.points
        ],
    }


def branch_from_json_dict(d: dict) -> Branch:
    _check_version(d, BRANCH_SCHEMA_VERSION, "branch")
    pts = []
    for pd in d["points"]:
        grid = Grid(int(pd["num_points"]), float(pd["period"]))
        params = WaveParams(alpha=float(d["alpha"]), speed=float(pd["speed"]),
                            offset=float(pd["offset"]), period=float(pd["period"]),
                            power=int(d["power"]), model=d["model"])
        pts.append(TravelingWave(RealField(grid, pd["values"]), params,
                                 float(pd["residual_norm"]), bool(pd["converged"]),
                                 pd.get("branch_id", "")))
    return Branch(pts, d.get("continuation_parameter", "speed"),
                  list(d.get("step_history", [])))


def save_branch(branch: Branch, path: str):
    with open(path, "w") as fh:
        json.dump(branch_to_json_dict(branch), fh)


def load_branch(path: str) -> Branch:
    with open(path) as fh:
        return branch_from_json_dict(_parse_json(fh.read(), path))


# ---------------------------------------------------------------------------
# generic json artifacts (spectra, verdicts, reports)

def save_json(obj_dict: dict, path: str):
    with open(path, "w") as fh:
        json.dump(obj_dict, fh)


def load_json(path: str, expected_version: int | None = 1,
              what: str = "artifact") -> dict:
    with open(path) as fh:
        d = _parse_json(fh.read(), path)
    if expected_version is not None:
        _check_version(d, expected_version, what)
    return d


# ---------------------------------------------------------------------------
# traces

def save_trace_csv(trace, path: str, metadata: dict | None = None):
    """Columns t, H, K, U, P, M, rho, x_star; '#' metadata lines on top."""
    lines = [f"# schema_version={TRACE_SCHEMA_VERSION}",
             f"# dt={trace.dt!r}", f"# scheme={trace.scheme}",
             f"# blowup={trace.blowup}"]
    for k, v in (metadata or {}).items():
        lines.append(f"# {k}={v}")
    lines.append("t,H,K,U,P,M,rho,x_star")
    fmt = lambda v: repr(float(v)) if v != "" else ""
    for i, t in enumerate(trace.times):
        f = trace.invariants[i]
        rho = trace.rho[i] if trace.rho is not None else ""
        xs = trace.x_star[i] if trace.x_star is not None else ""
        lines.append(",".join(fmt(v) for v in
                              (t, f.H, f.K, f.U, f.P, f.M, rho, xs)))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_trace_csv(path: str):
    """Back out (times, column dict, metadata) from a trace CSV."""
    meta = {}
    rows = []
    header = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "=" in line:
                    k, v = line[1:].strip().split("=", 1)
                    meta[k.strip()] = v.strip()
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(line.split(","))
    if int(meta.get("schema_version", -1)) != TRACE_SCHEMA_VERSION:
        raise SchemaVersionError(f"{path}: trace schema version mismatch")
    cols = {name: [] for name in header}
    for r in rows:
        for name, val in zip(header, r):
            cols[name].append(float(val) if val else np.nan)
    return np.asarray(cols["t"]), {k: np.asarray(v) for k, v in cols.items()}, meta


def require_writable(path: str, force: bool):
    if os.path.exists(path) and not force:
        raise FileExistsError(f"{path} exists; pass --force to overwrite")

"""Stability classification: parameter Jacobians, negative-index bookkeeping,
purely-growing-mode scans, and solitary-limit diagnostics.

Derivatives in (c, a) are computed by re-solving the wave on a finite
difference stencil (with Richardson extrapolation) rather than from the
linearized operator alone; the deflated-solve route through the operator is
kept as an independent cross-check of the same quantities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .grids import RealField
from .operators import (LinearOperator, build_second_variation, eigen_spectrum,
                        field_to_coeffs, kernel_check, project_mean_zero)
from .spectral import (DispersionSymbol, differentiate, functionals_kdv,
                       functionals_rlw, inner_product, l2_norm)
from .waves import (Branch, SolverConfig, TravelingWave, newton_solve,
                    solve_family_wave)


# ---------------------------------------------------------------------------
# parameter Jacobian by branch re-solves

@dataclass(frozen=True)
class ParameterJacobian:
    M_a: float
    P_a: float
    M_c: float
    P_c: float
    fd_step: float
    determinant: float
    symmetry_defect: float      # |M_c - P_a|
    failure_mask: tuple = ()    # names of stencil points that failed

    @property
    def complete(self):
        return not self.failure_mask

    def to_json_dict(self):
        return {"M_a": self.M_a, "P_a": self.P_a, "M_c": self.M_c,
                "P_c": self.P_c, "det": self.determinant,
                "fd_step": self.fd_step,
                "symmetry_defect": self.symmetry_defect,
                "failures": list(self.failure_mask)}


def _functionals_for(w: TravelingWave):
    if w.params.model == "kdv":
        return functionals_kdv(w.profile, w.params.alpha, w.params.power)
    return functionals_rlw(w.profile, w.params.alpha)


def _resolve_at(w, dc, da, cfg):
    params = w.params.with_(speed=w.params.speed + dc,
                            offset=w.params.offset + da)
    sol = newton_solve(w.profile, params, cfg)
    if not sol.converged:
        return None
    return _functionals_for(sol)


def parameter_jacobian(w: TravelingWave, h: float = 1e-4,
                       cfg: SolverConfig = SolverConfig(),
                       richardson: bool = True) -> ParameterJacobian:
    """Central-difference d(M, P)/d(c, a) at fixed period and even phase.

    Waves are re-solved at (c +- h, a) and (c, a +- h) seeded from ``w``;
    with ``richardson`` the h and h/2 stencils are combined to cancel the
    leading O(h^2) error. Stencil failures leave a partial result with the
    failed points named in ``failure_mask``.
    """
    if not w.converged:
        raise ValueError("parameter_jacobian needs a converged wave")
    h = h * max(1.0, abs(w.params.speed))
    failures = []

    def central(da_or_dc):
        def diff(hh):
            plus = _resolve_at(w, *da_or_dc(hh), cfg)
            minus = _resolve_at(w, *da_or_dc(-hh), cfg)
            if plus is None or minus is None:
                return None
            return ((plus.M - minus.M) / (2 * hh), (plus.P - minus.P) / (2 * hh))
        d1 = diff(h)
        if d1 is None:
            return None
        if not richardson:
            return d1
        d2 = diff(h / 2)
        if d2 is None:
            return d1
        return ((4 * d2[0] - d1[0]) / 3.0, (4 * d2[1] - d1[1]) / 3.0)

    dc = central(lambda hh: (hh, 0.0))
    if dc is None:
        failures.append("speed")
        M_c = P_c = float("nan")
    else:
        M_c, P_c = dc
    da = central(lambda hh: (0.0, hh))
    if da is None:
        failures.append("offset")
        M_a = P_a = float("nan")
    else:
        M_a, P_a = da

    det = M_a * P_c - M_c * P_a
    return ParameterJacobian(M_a, P_a, M_c, P_c, h, float(det),
                             float(abs(M_c - P_a)), tuple(failures))


def negative_index_predict(J: ParameterJacobian, tol: float = 1e-9) -> Optional[int]:
    """Sign changes in the sequence 1, M_a, M_a P_c - M_c P_a.

    Valid only when the determinant is away from zero; returns None
    (marginal) otherwise. Zero entries are skipped in the count.
    """
    scale = max(abs(J.M_a), abs(J.P_c), abs(J.M_c), abs(J.P_a), 1.0)
    if not J.complete or abs(J.determinant) <= tol * scale ** 2:
        return None
    seq = [1.0, J.M_a, J.determinant]
    signs = [np.sign(v) for v in seq if v != 0.0]
    return int(sum(1 for sa, sb in zip(signs, signs[1:]) if sa != sb))


# ---------------------------------------------------------------------------
# minimizer certificate and the projected momentum derivative

def minimizer_certificate(w: TravelingWave, op: Optional[LinearOperator] = None,
                          tol_factor: float = 1e-8):
    """Least eigenvalue of the second variation compressed onto the
    orthogonal complement of the constraint gradients {delta P, delta M}.

    Nonnegative (within -tol_factor * spectral radius) certifies a local
    constrained minimizer. Returns (passed, min_eigenvalue, threshold).
    """
    if op is None:
        op = build_second_variation(w)
    A = op.matrix("full")
    if w.params.model == "kdv":
        gP = field_to_coeffs(w.profile, "full")
    else:
        sym = DispersionSymbol(w.params.alpha)(w.grid.wavenumbers)
        gP = field_to_coeffs(
            RealField.from_modes(w.grid, (1.0 + sym) * w.profile.modes), "full")
    gM = np.zeros(A.shape[0])
    gM[0] = np.sqrt(w.params.period)
    G = np.stack([gP, gM], axis=1)
    Qg, _ = np.linalg.qr(G)
    # orthonormal basis of the complement via the projector's eigenvectors
    P = np.eye(A.shape[0]) - Qg @ Qg.T
    wv, V = np.linalg.eigh(P)
    Qc = V[:, wv > 0.5]
    evc = scipy.linalg.eigh(Qc.T @ A @ Qc, eigvals_only=True)
    radius = float(np.abs(evc).max())
    thresh = -tol_factor * max(radius, 1.0)
    return bool(evc.min() >= thresh), float(evc.min()), float(thresh)


def projected_momentum_derivative(w: TravelingWave,
                                  op: Optional[LinearOperator] = None) -> float:
    """P_c of the mean-zero-projected problem, via the deflated solve.

    Defined as -<(Pi L Pi)^{-1} Pi u, Pi u>. Equals
    (P_c - M_c M / T) / (1 - 2 M_c / T) by the derivative relations, and
    tends to the plain P_c in the solitary limit. This is the quantity the
    moving-kernel eigenvalue sees (after kernel normalization).
    """
    if op is None:
        op = build_second_variation(w)
    proj = project_mean_zero(op)
    A = proj.matrix("full")
    evals, evecs = scipy.linalg.eigh(A)
    ztol = 1e-8 * max(float(np.abs(evals).max()), 1.0)
    q = proj.coeffs_of(w.profile, "full")
    coef = evecs.T @ q
    keep = np.abs(evals) > ztol
    quad = float(np.sum(coef[keep] ** 2 / evals[keep]))
    return -quad


# ---------------------------------------------------------------------------
# purely-growing-mode scan

@dataclass(frozen=True)
class ScanResult:
    mu_grid: np.ndarray
    eigenvalue_path: np.ndarray      # complex e_mu per mu (tracked branch)
    min_modulus_path: np.ndarray     # min |eig(A^mu)| per mu
    crossing_mu: Optional[float]     # mu* where A^mu is singular, if found
    crossing_mode: Optional[RealField]  # growing mode at mu*
    axis_crossing_mu: Optional[float]   # tracked Re(e) sign change (marker)
    fitted_limit_mu: float           # e_mu / mu     -> L1
    fitted_limit_mu2: float          # e_mu / mu^2   -> L2
    kernel_norm_sq: float            # ||u_x||_{L2}^2 (limit normalization)
    predicted_limit: float           # -P_c^pi / ||u_x||^2, independent route
    aborted: bool
    exploratory: bool                # alpha < 1 is outside the scan's theory
    message: str = ""

    def to_json_dict(self):
        return {
            "schema_version": 1,
            "mu_grid": [float(m) for m in self.mu_grid],
            "eigenvalue_path_real": [float(e.real) for e in self.eigenvalue_path],
            "eigenvalue_path_imag": [float(e.imag) for e in self.eigenvalue_path],
            "min_modulus_path": [float(m) for m in self.min_modulus_path],
            "crossing_mu": self.crossing_mu,
            "has_crossing_mode": self.crossing_mode is not None,
            "axis_crossing_mu": self.axis_crossing_mu,
            "fitted_limit_mu": self.fitted_limit_mu,
            "fitted_limit_mu2": self.fitted_limit_mu2,
            "kernel_norm_sq": self.kernel_norm_sq,
            "predicted_limit": self.predicted_limit,
            "aborted": self.aborted,
            "exploratory": self.exploratory,
            "message": self.message,
        }


def _moving_operator_matrix(u_vals, alpha, c, p, T, mu):
    """A^mu = c - cD (mu - cD)^{-1} (|D|^alpha - f'(u)) on modes k != 0.

    Assembled on the complex exponentials k in {-(N/2-1) .. N/2-1} \\ {0};
    the constant mode is excluded (the mu -> 0+ limit is the mean-zero
    compression of the linearized operator) and the Nyquist mode is dropped
    with the odd symbol.
    """
    n = len(u_vals)
    ks = np.concatenate([np.arange(1, n // 2), -np.arange(1, n // 2)[::-1]])
    xiv = 2.0 * np.pi * ks / T
    g = 1j * c * xiv / (mu - 1j * c * xiv)
    vh = np.fft.fft(-(p + 1.0) * u_vals ** p) / n
    d = ks[:, None] - ks[None, :]
    conv = np.where(np.abs(d) <= n // 2, vh[d % n], 0.0)
    M = conv + np.diag(np.abs(xiv) ** alpha)
    return c * np.eye(len(ks)) - g[:, None] * M, ks


def growing_mode_scan(w: TravelingWave, mu_grid=None,
                      jump_tol: float = 0.5) -> ScanResult:
    """Track the near-origin eigenvalue of the mu-family toward a crossing.

    The tracked branch starts from the translation kernel u_x at the
    smallest mu (or the smallest-modulus eigenvalue for a flat profile) and
    is continued by maximal eigenvector overlap. A purely growing mode
    exists exactly where some eigenvalue of the family vanishes; that is
    detected as an interior dip of min |eig| toward zero and refined by a
    golden-section search, which also yields the mode. The tracked branch's
    own real-part sign change is reported separately as ``axis_crossing_mu``
    (a complex pair crossing the imaginary axis, not by itself a growing
    mode).

    The small-mu limits e_mu/mu -> L1 (should vanish) and e_mu/mu^2 -> L2
    are fitted over the smallest grid points; L2 is compared against the
    independently computed -P_c^pi / ||u_x||^2.

    Continuity loss (jump > ``jump_tol`` relative to the extrapolated value
    while the eigenvector overlap degrades) aborts the scan at the last
    good mu. Scans with alpha < 1 are marked exploratory.
    """
    p = w.params
    if p.model != "kdv":
        raise NotImplementedError("the scan is implemented for the KdV model")
    if p.speed == 0:
        raise ValueError("the scan needs c != 0")
    if mu_grid is None:
        mu_grid = np.geomspace(1e-3, 1e2, 25)
    mu_grid = np.asarray(sorted(mu_grid))

    n, T = w.grid.num_points, p.period
    ux = differentiate(w.profile)
    uxh = np.fft.fft(ux.values) / n
    ks = np.concatenate([np.arange(1, n // 2), -np.arange(1, n // 2)[::-1]])
    track = uxh[ks % n]
    nrm = np.linalg.norm(track)
    kernel_start = nrm > 0
    if kernel_start:
        track = track / nrm

    def solve_at(mu):
        A, _ = _moving_operator_matrix(w.profile.values, p.alpha, p.speed,
                                       p.power, T, float(mu))
        return scipy.linalg.eig(A)

    path = []
    minmod = []
    parity = []
    axis_crossing = None
    aborted = False
    msg = ""
    prev_e = None
    prev2_e = None
    for j, mu in enumerate(mu_grid):
        evals, evecs = solve_at(mu)
        if j == 0 and not kernel_start:
            idx = int(np.argmin(np.abs(evals)))   # flat profile: no kernel
        else:
            ov = np.abs(track.conj() @ evecs)
            idx = int(np.argmax(ov))
        e = evals[idx]
        v = evecs[:, idx]
        if prev_e is not None:
            if prev2_e is not None:
                e_pred = prev_e + (prev_e - prev2_e)
            else:
                e_pred = prev_e
            dev = abs(e - e_pred) / max(abs(e_pred), abs(e), 1e-12)
            overlap = float(np.abs(track.conj() @ v) / np.linalg.norm(v))
            if dev > jump_tol and overlap < 0.75:
                aborted = True
                msg = f"eigenvalue continuity lost at mu={mu:.3e}"
                break
        path.append(e)
        minmod.append(float(np.abs(evals).min()))
        parity.append(_lhp_count(evals) % 2)
        track = v / np.linalg.norm(v)
        if axis_crossing is None and prev_e is not None:
            if np.sign(e.real) != np.sign(prev_e.real) and prev_e.real != 0:
                axis_crossing = float(mu)
        prev2_e, prev_e = prev_e, e

    path = np.asarray(path)
    minmod = np.asarray(minmod)
    mus = mu_grid[: len(path)]

    crossing = crossing_mode = None
    for j in range(1, len(parity)):
        if parity[j] != parity[j - 1]:
            crossing, crossing_mode = _refine_singular_mu(
                solve_at, float(mus[j - 1]), float(mus[j]), parity[j - 1],
                n, w.grid)
            break

    nfit = min(4, len(path))
    if nfit >= 2:
        # extrapolate e/mu and e/mu^2 to mu -> 0 by a linear fit in mu
        y1 = (path[:nfit].real / mus[:nfit])
        y2 = (path[:nfit].real / mus[:nfit] ** 2)
        L1 = float(np.polyfit(mus[:nfit], y1, 1)[1])
        L2 = float(np.polyfit(mus[:nfit], y2, 1)[1])
    else:
        L1 = L2 = float("nan")

    ux_norm_sq = inner_product(ux, ux)
    if ux_norm_sq > 0:
        predicted = -projected_momentum_derivative(w) / ux_norm_sq
    else:
        predicted = float("nan")
    return ScanResult(mus, path, minmod, crossing, crossing_mode,
                      axis_crossing, L1, L2, float(ux_norm_sq),
                      float(predicted), aborted, bool(p.alpha < 1.0), msg)


def _lhp_count(evals) -> int:
    """Eigenvalues strictly in the left half plane, above roundoff noise."""
    radius = float(np.abs(evals).max()) if len(evals) else 0.0
    tol = max(1e-12 * radius, 1e-13)
    return int(np.sum(evals.real < -tol))


def _refine_singular_mu(solve_at, mu_lo, mu_hi, parity_lo, n, grid,
                        iters: int = 50):
    """Bisect a parity change of the left-half-plane count to the mu where
    an eigenvalue passes through the origin; return (mu*, growing mode).

    Complex pairs cross the imaginary axis in twos and leave the parity
    alone, so a parity change brackets a real-axis origin crossing.
    """
    for _ in range(iters):
        mid = np.sqrt(mu_lo * mu_hi)
        evals, _ = solve_at(mid)
        if _lhp_count(evals) % 2 == parity_lo:
            mu_lo = mid
        else:
            mu_hi = mid
        if mu_hi - mu_lo < 1e-11 * mu_hi:
            break
    mu_star = float(np.sqrt(mu_lo * mu_hi))
    evals, evecs = solve_at(mu_star)
    k = int(np.argmin(np.abs(evals)))
    vec = evecs[:, k]
    ks = np.concatenate([np.arange(1, n // 2), -np.arange(1, n // 2)[::-1]])
    full = np.zeros(n, dtype=complex)
    full[ks % n] = vec
    vals = np.real(np.fft.ifft(full * n))
    if np.abs(vals).max() < 1e-8 * np.abs(vec).max():
        vals = np.imag(np.fft.ifft(full * n))
    mode = RealField(grid, vals / max(np.abs(vals).max(), 1e-300))
    return mu_star, mode


# ---------------------------------------------------------------------------
# the verdict

@dataclass(frozen=True)
class StabilityVerdict:
    classification: str
    n_minus_L: Optional[int]
    n_minus_projected: Optional[int]
    P_c_sign: int
    criteria_fired: tuple
    jacobian: Optional[ParameterJacobian]
    growing_mode: Optional[tuple]     # (mu_star, field) when a witness exists
    tolerances: dict
    message: str = ""

    def to_json_dict(self):
        return {
            "schema_version": 1,
            "classification": self.classification,
            "n_minus_L": self.n_minus_L,
            "n_minus_projected": self.n_minus_projected,
            "P_c": None if self.jacobian is None else self.jacobian.P_c,
            "jacobian": None if self.jacobian is None else self.jacobian.to_json_dict(),
            "criteria_fired": list(self.criteria_fired),
            "tolerances": self.tolerances,
            "message": self.message,
        }


def classify_from_indices(kernel_ok: bool, certificate: Optional[bool],
                          det_nonsingular: Optional[bool],
                          n_minus_projected: Optional[int],
                          P_c: Optional[float], marginal: bool = False):
    """Pure decision table behind :func:`classify`.

    Order: degenerate kernel -> inconclusive; minimizer certificate ->
    stable (upgraded to stable_full on a nonsingular parameter matrix);
    parity of the projected negative count against the sign of P_c ->
    linearly unstable; anything else inconclusive.
    Returns (classification, fired criteria names).
    """
    if marginal:
        return "marginal", ("tolerance-boundary",)
    if not kernel_ok:
        return "inconclusive", ("kernel-degenerate",)
    if certificate:
        if det_nonsingular:
            return "stable_full", ("minimizer-certificate", "matrix-nonsingular")
        return "stable_constrained", ("minimizer-certificate",)
    if n_minus_projected is not None and P_c is not None and P_c != 0:
        odd = n_minus_projected % 2 == 1
        if odd and P_c < 0:
            return "linearly_unstable", ("parity-odd-Pc-negative",)
        if not odd and P_c > 0:
            return "linearly_unstable", ("parity-even-Pc-positive",)
    return "inconclusive", ()


def classify(w: TravelingWave, h: float = 1e-4,
             cfg: SolverConfig = SolverConfig(),
             scan_witness: bool = True) -> StabilityVerdict:
    """Full classification of one converged wave.

    Deterministic: identical inputs and tolerances give identical verdicts.
    Solver or spectrum failures surface as "inconclusive" with diagnostics.
    """
    try:
        op = build_second_variation(w)
        full = eigen_spectrum(op, "full")
        proj = eigen_spectrum(project_mean_zero(op), "full")
        kv = kernel_check(op, w)
    except Exception as exc:   # propagate as a verdict, not a crash
        return StabilityVerdict("inconclusive", None, None, 0, (),
                                None, None, {}, f"spectrum failure: {exc}")

    # trivial (flat) waves have no translation kernel; the projected
    # positivity test still applies with the constraint gradients
    is_trivial = l2_norm(differentiate(w.profile)) < 1e-12
    kernel_ok = kv.nondegenerate or (is_trivial and kv.kernel_dim == 0)

    try:
        J = parameter_jacobian(w, h, cfg)
    except Exception:
        J = None

    cert, cert_min, cert_thresh = minimizer_certificate(w, op)
    scale = 1.0 if J is None else max(abs(J.M_a), abs(J.P_c),
                                      abs(J.M_c), abs(J.P_a), 1.0)
    det_ok = None if (J is None or not J.complete) \
        else bool(abs(J.determinant) > 1e-9 * scale ** 2)
    P_c = None if (J is None or not J.complete) else J.P_c

    # near-zero eigenvalues other than the kernel make the verdict marginal
    gap = np.abs(full.eigenvalues)
    near = np.sum(gap <= 10 * full.zero_tol) - kv.kernel_dim
    marginal = bool(near > 0 and not cert)

    cls, fired = classify_from_indices(kernel_ok, cert, det_ok,
                                       proj.n_minus, P_c, marginal)

    growing = None
    if cls == "linearly_unstable" and scan_witness and w.params.model == "kdv":
        try:
            scan = growing_mode_scan(w)
            if scan.crossing_mu is not None:
                growing = (scan.crossing_mu, scan.crossing_mode)
                fired = fired + ("growing-mode-witness",)
        except Exception:
            pass

    tolerances = {"zero_tol_full": full.zero_tol,
                  "zero_tol_projected": proj.zero_tol,
                  "certificate_min": cert_min,
                  "certificate_threshold": cert_thresh,
                  "fd_step": None if J is None else J.fd_step}
    return StabilityVerdict(cls, full.n_minus, proj.n_minus,
                            int(np.sign(P_c)) if P_c else 0,
                            tuple(fired), J, growing, tolerances)


# ---------------------------------------------------------------------------
# solitary-limit diagnostics

@dataclass(frozen=True)
class LimitRow:
    period: float
    M_a: float
    M_c: float
    P_c: float
    identity_defect: float    # |M_a + T - 2 M_c| at c = 1
    det: float
    n_minus_L: Optional[int]
    n_minus_projected: Optional[int]
    flagged: bool
    message: str = ""


@dataclass(frozen=True)
class LimitReport:
    rows: tuple
    checks: dict

    def to_json_dict(self):
        return {
            "schema_version": 1,
            "rows": [vars(r) | {"flagged": bool(r.flagged)} for r in self.rows],
            "checks": self.checks,
        }


def build_solitary_branch(alpha: float, a0: float, periods,
                          num_points_for=None,
                          cfg: SolverConfig = SolverConfig()) -> Branch:
    """Waves at fixed (c, a) = (1, a0) across increasing periods.

    No nontrivial wave exists at this speed for a0 = 0 at period 2*pi, so a
    small positive a0 realizes the branch; each period is solved through the
    normal form and re-converged at its own resolution.
    """
    if num_points_for is None:
        num_points_for = lambda T: int(min(1024, max(128, 2 ** int(np.ceil(
            np.log2(32 * T / np.pi))))))
    pts = []
    for T in periods:
        w = solve_family_wave(alpha, a0, T, num_points_for(T), cfg)
        pts.append(w)
    return Branch(pts, "period")


def solitary_limit_report(branch: Branch, h: float = 1e-4,
                          cfg: SolverConfig = SolverConfig()) -> LimitReport:
    """Tabulate the large-period diagnostics along a fixed-speed branch.

    Checks, evaluated where the rows are clean: M_a < 0 for every period;
    |M_a + T - 2 M_c| bounded by a period-independent constant (exactly zero
    in theory at c = 1, so the bound is finite-difference-sized); P_c > 0;
    and at the two largest periods the projected and unprojected negative
    counts both equal to 1.
    """
    rows = []
    for w in branch.points:
        T = w.params.period
        if not w.converged:
            rows.append(LimitRow(T, *(float("nan"),) * 5, None, None, True,
                                 "wave not converged"))
            continue
        try:
            J = parameter_jacobian(w, h, cfg)
            op = build_second_variation(w)
            full = eigen_spectrum(op, "full")
            proj = eigen_spectrum(project_mean_zero(op), "full")
            defect = abs(J.M_a + T - 2 * J.M_c)
            rows.append(LimitRow(T, J.M_a, J.M_c, J.P_c, float(defect),
                                 J.determinant, full.n_minus, proj.n_minus,
                                 not J.complete))
        except Exception as exc:
            rows.append(LimitRow(T, *(float("nan"),) * 5, None, None, True,
                                 str(exc)))

    clean = [r for r in rows if not r.flagged]
    two_largest = sorted(clean, key=lambda r: r.period)[-2:]
    checks = {
        "M_a_negative": bool(clean and all(r.M_a < 0 for r in clean)),
        "P_c_positive": bool(clean and all(r.P_c > 0 for r in clean)),
        "identity_bound": max((r.identity_defect for r in clean), default=float("nan")),
        "M_c_bound": max((abs(r.M_c) for r in clean), default=float("nan")),
        "index_one_at_largest": bool(
            len(two_largest) == 2
            and all(r.n_minus_L == 1 and r.n_minus_projected == 1
                    for r in two_largest)),
    }
    return LimitReport(tuple(rows), checks)


# ---------------------------------------------------------------------------
# solitary-wave criteria on a long-period proxy

@dataclass(frozen=True)
class CriteriaReport:
    applicable: bool
    kernel_is_translation: bool
    kernel_margin: float
    n_minus_is_one: bool
    n_minus: int
    P_c_positive: bool
    P_c: float

    def all_hold(self):
        return (self.applicable and self.kernel_is_translation
                and self.n_minus_is_one and self.P_c_positive)


def gss_solitary_criteria(w: TravelingWave, h: float = 1e-4,
                          cfg: SolverConfig = SolverConfig()) -> CriteriaReport:
    """The three solitary-wave stability conditions, with numeric margins.

    (i) kernel = span{u_x}; (ii) exactly one negative eigenvalue of the
    second variation; (iii) P_c > 0. Evaluated verbatim on a long-period
    wave standing in for the solitary limit. Trivial waves report
    not-applicable (n_minus = 0 has no ground state to certify).
    """
    op = build_second_variation(w)
    full = eigen_spectrum(op, "full")
    kv = kernel_check(op, w)
    if l2_norm(differentiate(w.profile)) < 1e-12:
        return CriteriaReport(False, False, 0.0, False, full.n_minus,
                              False, float("nan"))
    try:
        J = parameter_jacobian(w, h, cfg)
        pc = J.P_c
    except Exception:
        pc = float("nan")
    return CriteriaReport(True, kv.nondegenerate, kv.alignment,
                          full.n_minus == 1, full.n_minus,
                          bool(pc > 0), float(pc))

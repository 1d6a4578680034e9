"""Traveling-wave profiles: Newton solves, branch seeding and continuation,
normal-form transformations.

The profile equations solved here are

    KdV model:  |D|^alpha u - u^{p+1} + c u + a = 0
    RLW model:  c (1 + |D|^alpha) u + u - u^2 + a = 0      (p = 1 only)

Profiles are even about x = 0; Newton runs on cosine coefficients, which
removes the translation kernel direction u_x (phase condition) and keeps the
Jacobian square and symmetric. The Jacobian is the second-variation operator
restricted to the even sector, assembled densely and solved by direct
factorization: robust over fast at desk scale.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .errors import (BifurcationPointError, NormalFormError, ReductionError,
                     UnsupportedModelError)
from .grids import Grid, RealField
from .operators import (build_second_variation, coeffs_to_field,
                        field_to_coeffs)
from .spectral import (apply_fractional_laplacian, functionals_kdv,
                       integrate, l2_norm)

MODELS = ("kdv", "rlw")

_branch_counter = itertools.count()


@dataclass(frozen=True)
class WaveParams:
    """Parameter bundle (alpha, c, a, T, p, model) naming one profile problem."""

    alpha: float
    speed: float
    offset: float
    period: float
    power: int = 1
    model: str = "kdv"

    def __post_init__(self):
        if not (0 < self.alpha <= 2):
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")
        if self.period <= 0:
            raise ValueError(f"period must be positive, got {self.period}")
        model = self.model.lower()
        if model not in MODELS:
            raise UnsupportedModelError(f"unknown model {self.model!r}")
        object.__setattr__(self, "model", model)
        if self.power < 1 or int(self.power) != self.power:
            raise ValueError(f"power must be a positive integer, got {self.power}")
        if model == "rlw":
            if self.power != 1:
                raise UnsupportedModelError("RLW model supports power p = 1 only")
            if self.speed == 0:
                raise ValueError("RLW model needs speed c != 0")
        if model == "kdv" and self.alpha < 1:
            pmax = 2 * self.alpha / (1 - self.alpha)
            if not self.power < pmax:
                raise ValueError(
                    f"power p={self.power} violates p < 2a/(1-a) = {pmax:.3f} "
                    f"for alpha={self.alpha}")

    def with_(self, **kw) -> "WaveParams":
        return replace(self, **kw)


@dataclass(frozen=True)
class SolverConfig:
    """Newton controls.

    ``tol`` is the requested L2 residual tolerance. The achievable floor is
    set by roundoff through the dispersion multiplier, roughly
    eps * (1 + max symbol value), so the effective tolerance is the larger
    of the two; the recorded residual_norm is always the truth.
    """

    tol: float = 1e-12          # on the L2 residual norm
    max_iter: int = 50
    singular_threshold: float = 1e-13  # reciprocal condition estimate
    step_damping: bool = True   # halve steps while the residual increases

    def effective_tol(self, grid: Grid, alpha: float) -> float:
        s_max = (np.pi * grid.num_points / grid.period) ** alpha
        return max(self.tol, 2.0 * np.finfo(float).eps * (1.0 + s_max))


@dataclass(frozen=True)
class TravelingWave:
    """A (possibly non-converged) profile with its parameters and provenance."""

    profile: RealField
    params: WaveParams
    residual_norm: float
    converged: bool
    branch_id: str = ""
    iterations: int = 0
    message: str = ""

    @property
    def grid(self) -> Grid:
        return self.profile.grid

    def resolved(self, tail_tol: float = 1e-12) -> bool:
        return self.profile.spectral_tail() < tail_tol


@dataclass
class Branch:
    """An ordered family of converged waves sharing (alpha, T, p, model)."""

    points: list
    continuation_parameter: str
    step_history: list = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    def speeds(self):
        return np.array([w.params.speed for w in self.points])

    def offsets(self):
        return np.array([w.params.offset for w in self.points])


# ---------------------------------------------------------------------------
# residual and Newton

def residual(u: RealField, params: WaveParams) -> RealField:
    """Profile-equation residual at u (pointwise nonlinearity)."""
    lam = apply_fractional_laplacian(u, params.alpha)
    if params.model == "kdv":
        nl = u.values ** (params.power + 1)
        vals = lam.values - nl + params.speed * u.values + params.offset
    else:
        vals = (params.speed * (u.values + lam.values) + u.values
                - u.values ** 2 + params.offset)
    return RealField(u.grid, vals)


def _even_jacobian(u: RealField, params: WaveParams) -> np.ndarray:
    op = build_second_variation(
        TravelingWave(u, params, np.nan, False))
    return op.matrix("even")


def _even_symmetrize(vals: np.ndarray) -> np.ndarray:
    return 0.5 * (vals + np.roll(vals[::-1], 1))


def newton_solve(seed: RealField, params: WaveParams,
                 cfg: SolverConfig = SolverConfig(),
                 branch_id: str = "") -> TravelingWave:
    """Newton iteration at fixed parameters in the even cosine sector.

    Returns a converged wave, or a non-converged result with diagnostics
    rather than raising; sweeps must tolerate failures. A singular even
    Jacobian raises :class:`BifurcationPointError` with the smallest
    singular value attached.
    """
    u = RealField(seed.grid, _even_symmetrize(seed.values))
    tol = cfg.effective_tol(seed.grid, params.alpha)
    rn_prev = np.inf
    for it in range(cfg.max_iter + 1):
        r = residual(u, params)
        rn = l2_norm(r)
        if rn < tol:
            return TravelingWave(u, params, rn, True, branch_id, it)
        if it == cfg.max_iter:
            break
        J = _even_jacobian(u, params)
        anorm = np.linalg.norm(J, 1)
        try:
            lu, piv = scipy.linalg.lu_factor(J)
        except scipy.linalg.LinAlgError:
            raise BifurcationPointError("singular even-sector Jacobian", 0.0)
        rcond = scipy.linalg.lapack.dgecon(lu, anorm, norm="1")[0]
        if rcond <= cfg.singular_threshold:
            sv = scipy.linalg.svdvals(J)
            raise BifurcationPointError(
                f"even-sector Jacobian numerically singular "
                f"(smallest singular value {sv[-1]:.3e})", float(sv[-1]))
        dq = scipy.linalg.lu_solve((lu, piv), field_to_coeffs(r, "even"))
        du = coeffs_to_field(u.grid, dq, "even")
        if cfg.step_damping and rn > rn_prev:
            # fall back to a damped step when the full step overshot
            step = 1.0
            for _ in range(6):
                trial = u - step * du
                if l2_norm(residual(trial, params)) < rn:
                    break
                step *= 0.5
            u = u - step * du
        else:
            u = u - du
        u = RealField(u.grid, _even_symmetrize(u.values))
        rn_prev = rn
    return TravelingWave(u, params, rn, False, branch_id, cfg.max_iter,
                         "newton did not converge")


def _pinned_jacobian(u, params, k_pin):
    """Bordered Jacobian for the amplitude-pinned system (unknowns: coeffs, c)."""
    J = _even_jacobian(u, params)
    m = J.shape[0]
    B = np.zeros((m + 1, m + 1))
    B[:m, :m] = J
    if params.model == "kdv":
        dFdc = field_to_coeffs(u, "even")
    else:
        lam = apply_fractional_laplacian(u, params.alpha)
        dFdc = field_to_coeffs(u + lam, "even")
    B[:m, m] = dFdc
    B[m, k_pin] = 1.0
    return B


def solve_pinned_amplitude(seed: RealField, params: WaveParams, amplitude: float,
                           k_pin: int = 1, cfg: SolverConfig = SolverConfig()):
    """Newton on (profile, speed) with one cosine coefficient pinned.

    Pins the orthonormal-basis coefficient of cos(2*pi*k_pin*x/T) to
    ``amplitude`` and frees the speed. Well conditioned through the
    small-amplitude bifurcation where the fixed-speed Jacobian degenerates.
    Returns (wave, speed).
    """
    u = RealField(seed.grid, _even_symmetrize(seed.values))
    tol = cfg.effective_tol(seed.grid, params.alpha)
    c = params.speed
    for it in range(cfg.max_iter + 1):
        pr = params.with_(speed=c)
        r = residual(u, pr)
        q = field_to_coeffs(u, "even")
        con = q[k_pin] - amplitude
        rn = float(np.hypot(l2_norm(r), abs(con)))
        if rn < tol:
            return TravelingWave(u, pr, l2_norm(r), True, "", it), c
        if it == cfg.max_iter:
            break
        B = _pinned_jacobian(u, pr, k_pin)
        rhs = np.concatenate([field_to_coeffs(r, "even"), [con]])
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                d = scipy.linalg.solve(B, rhs)
        except scipy.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(d)):
            break
        u = u - coeffs_to_field(u.grid, d[:-1], "even")
        u = RealField(u.grid, _even_symmetrize(u.values))
        c = c - d[-1]
    return TravelingWave(u, params.with_(speed=c), l2_norm(residual(u, params.with_(speed=c))),
                         False, "", cfg.max_iter, "pinned newton did not converge"), c


# ---------------------------------------------------------------------------
# branch seeding

def _symbol_at(k: int, T: float, alpha: float) -> float:
    return (2.0 * np.pi * k / T) ** alpha


def small_amplitude_speed_curvature(k: int, T: float, alpha: float,
                                    model: str = "kdv") -> float:
    """Quadratic speed correction c2 of the small-amplitude branch c(eps).

    From the weakly nonlinear expansion u = eps cos(k theta) + O(eps^2)
    at offset a = 0: c = c_bif + c2 eps^2.
    """
    s1 = _symbol_at(k, T, alpha)
    s2 = _symbol_at(2 * k, T, alpha)
    if model == "kdv":
        return -1.0 / s1 + 1.0 / (2.0 * (s2 - s1))
    # rlw: c_bif = -1/(1+s1); mean and second-harmonic feedback flip sign
    return 1.0 / s1 - 1.0 / (2.0 * (s2 - s1))


def bifurcation_speed(k: int, T: float, alpha: float, model: str = "kdv") -> float:
    if model == "kdv":
        return -_symbol_at(k, T, alpha)
    return -1.0 / (1.0 + _symbol_at(k, T, alpha))


def bifurcation_seed(k: int, T: float, alpha: float, eps: float,
                     num_points: int = 128, kappa: float | None = None,
                     power: int = 1, model: str = "kdv"):
    """Small-amplitude branch seed u = eps cos(2 pi k x / T) with offset 0.

    The speed defaults to the bifurcation value plus the quadratic branch
    correction c2 * eps^2, which places fixed-parameter Newton on the
    nontrivial branch (at the exact bifurcation speed the only nearby
    solution is trivial). Pass ``kappa`` to use c = c_bif - eps * kappa
    instead. The seed residual is O(eps^2) either way.
    """
    if abs(eps) > 0.5:
        warnings.warn(f"seed amplitude eps={eps} is large for a bifurcation seed",
                      stacklevel=2)
    if k >= num_points // 3:
        raise ValueError(f"mode k={k} too large for num_points={num_points}")
    grid = Grid(num_points, T)
    u = RealField(grid, eps * np.cos(2.0 * np.pi * k * grid.nodes / T))
    c_bif = bifurcation_speed(k, T, alpha, model)
    if kappa is None:
        c = c_bif + small_amplitude_speed_curvature(k, T, alpha, model) * eps ** 2
    else:
        c = c_bif - eps * kappa
    params = WaveParams(alpha=alpha, speed=c, offset=0.0, period=T,
                        power=power, model=model)
    return u, params


def march_to_speed(alpha: float, c_target: float, T: float, num_points: int,
                   model: str = "kdv", a: float = 0.0, amp0: float = 0.02,
                   damp: float = 0.05, cfg: SolverConfig = SolverConfig(),
                   max_steps: int = 4000, power: int = 1) -> TravelingWave:
    """Walk the k=1 small-amplitude branch (offset fixed) until c = c_target.

    Marches the pinned cosine-1 coefficient upward with adaptive steps, then
    refines the amplitude by secant so the free speed lands on ``c_target``,
    and polishes with fixed-parameter Newton. The amplitude pinning keeps
    every Newton solve nonsingular through the bifurcation; if the pinned
    coefficient folds along the branch (spiky low-dispersion profiles), the
    remaining stretch is covered by pseudo-arclength continuation in the
    speed, which does not care about folds in any one coordinate.
    """
    grid = Grid(num_points, T)
    c_bif = bifurcation_speed(1, T, alpha, model)
    going_down = c_target < c_bif
    if (c_target - c_bif) == 0:
        raise BifurcationPointError("target speed equals the bifurcation speed", 0.0)
    scale = np.sqrt(2.0 / T)
    u = RealField(grid, amp0 * scale * np.cos(2.0 * np.pi * grid.nodes / T))
    params = WaveParams(alpha=alpha, speed=c_bif, offset=a, period=T,
                        model=model, power=power)
    A = amp0
    dA = damp
    hist = []
    w = None
    stalled = False
    last_good = None
    for _ in range(max_steps):
        trial, c = solve_pinned_amplitude(u, params, A, cfg=cfg)
        if not trial.converged:
            dA *= 0.5
            A = (hist[-1][0] + dA) if hist else amp0 * 0.5
            if dA < 1e-8:
                stalled = True
                break
            continue
        u, params = trial.profile, trial.params
        last_good = trial
        hist.append((A, c))
        crossed = (c <= c_target) if going_down else (c >= c_target)
        if crossed:
            w = trial
            break
        if dA < damp:
            dA *= 1.5
        A += dA

    if w is None and stalled and last_good is not None:
        # amplitude-coordinate fold: hand over to arclength in the speed
        direction = -1.0 if going_down else +1.0
        branch = continue_branch(last_good, "speed", direction, steps=400,
                                 cfg=cfg, initial_step=0.01,
                                 stop_speed=c_target)
        end = branch.points[-1]
        crossed = (end.params.speed <= c_target) if going_down \
            else (end.params.speed >= c_target)
        if crossed:
            return newton_solve(end.profile, end.params.with_(speed=c_target),
                                cfg, branch_id=f"march-{next(_branch_counter)}")
        raise RuntimeError(f"speed {c_target} not reached (arclength fallback "
                           f"ended at c={end.params.speed})")
    if w is None:
        raise RuntimeError(f"speed {c_target} not reached on the k=1 branch "
                           f"(last c={hist[-1][1] if hist else None})")
    # secant in the pinned amplitude so that c(A) = c_target
    (A1, c1) = hist[-1]
    (A0, c0) = hist[-2] if len(hist) > 1 else (A1 * 0.9, c_bif)
    for _ in range(80):
        if abs(c1 - c_target) < 1e-13 or c1 == c0:
            break
        Anew = A1 + (c_target - c1) * (A1 - A0) / (c1 - c0)
        trial, cn = solve_pinned_amplitude(u, params, Anew, cfg=cfg)
        if not trial.converged:
            break
        u, params = trial.profile, trial.params
        A0, c0, A1, c1 = A1, c1, Anew, cn
    return newton_solve(u, params.with_(speed=c_target), cfg,
                        branch_id=f"march-{next(_branch_counter)}")


def solve_normal_form_wave(alpha: float, period: float, num_points: int,
                           cfg: SolverConfig = SolverConfig()) -> TravelingWave:
    """The nontrivial even wave of |D|^a u - u^2 + u = 0 at the given period.

    Built from the (c, a) = (-1, 0) branch wave at the same period by the
    constant shift u + 1. The k = 1 branch reaches speed -1 only on one side
    of period 2*pi: above it when the branch curvature c2 is negative
    (alpha > log2(3/2)), below it when c2 is positive.
    """
    c2 = small_amplitude_speed_curvature(1, period, alpha)
    need_longer = c2 < 0
    if (period <= 2 * np.pi) if need_longer else (period >= 2 * np.pi):
        side = "above" if need_longer else "below"
        raise ValueError(f"no nontrivial (1, 0) wave at period {period:.6g} "
                         f"for alpha={alpha}: the branch lives {side} 2*pi")
    # march on a coarse grid (the expensive part), then refine spectrally
    # and polish: the Newton basin easily absorbs the resampling error
    coarse = min(num_points, 256)
    w = march_to_speed(alpha, -1.0, period, coarse, cfg=cfg)
    if coarse < num_points:
        w = newton_solve(w.profile.resample(num_points), w.params, cfg)
    u = w.profile + 1.0
    params = w.params.with_(speed=1.0)
    return newton_solve(u, params, cfg, branch_id=f"nf-{next(_branch_counter)}")


def solve_family_wave(alpha: float, a0: float, T: float, num_points: int,
                      cfg: SolverConfig = SolverConfig()) -> TravelingWave:
    """Nontrivial wave at (c, a) = (1, a0), period T.

    Realized through the normal form: the (1, 0) wave at period
    gamma^{1/alpha} T with gamma = sqrt(1 + 4 a0), Galilean-shifted back.
    Node values map to node values, so no interpolation is involved.
    a0 > 0 rescales to longer normal-form periods (the existing side for
    alpha > log2(3/2)); for smaller alpha the branch lives at shorter
    periods and a0 in (-1/4, 0) is the existing side.
    """
    if a0 <= -0.25 or a0 == 0:
        raise ValueError("family offset a0 must be nonzero with 1 + 4 a0 > 0")
    gam = float(np.sqrt(1.0 + 4.0 * a0))
    inner = solve_normal_form_wave(alpha, gam ** (1.0 / alpha) * T, num_points, cfg)
    vals = gam * inner.profile.values - (gam - 1.0) / 2.0
    u = RealField(Grid(num_points, T), vals)
    params = WaveParams(alpha=alpha, speed=1.0, offset=a0, period=T)
    return newton_solve(u, params, cfg, branch_id=f"family-{next(_branch_counter)}")


# ---------------------------------------------------------------------------
# pseudo-arclength continuation

def _extended_residual(u, params, con_par):
    r = field_to_coeffs(residual(u, params), "even")
    return r


def _dF_dpar(u, params, con_par):
    if con_par == "speed":
        if params.model == "kdv":
            return field_to_coeffs(u, "even")
        lam = apply_fractional_laplacian(u, params.alpha)
        return field_to_coeffs(u + lam, "even")
    # offset: dF/da = 1
    g = RealField(u.grid, np.ones(u.grid.num_points))
    return field_to_coeffs(g, "even")


def _get_par(params, con_par):
    return params.speed if con_par == "speed" else params.offset


def _set_par(params, con_par, val):
    return params.with_(speed=val) if con_par == "speed" else params.with_(offset=val)


def continue_branch(start: TravelingWave, parameter: str = "speed",
                    direction: float = +1.0, steps: int = 20,
                    cfg: SolverConfig = SolverConfig(),
                    initial_step: float = 0.02, max_step: float = 0.5,
                    min_step: float = 1e-9,
                    stop_speed: float | None = None) -> Branch:
    """Pseudo-arclength continuation in (profile, parameter).

    The tangent comes from the secant of the last two points; each accepted
    point is Newton-converged to cfg.tol. Steps halve on failure and grow by
    1.3 after fast (<= 3 iteration) solves. Folds are traversed, not errors;
    step underflow truncates the branch with a reason recorded.

    ``parameter`` is "speed", "offset", or "amplitude" (natural continuation
    in the pinned cosine-1 coefficient with the speed free). With
    ``stop_speed`` the branch ends early once the speed passes that value.
    """
    if not start.converged:
        raise ValueError("continuation must start from a converged wave")
    bid = f"branch-{next(_branch_counter)}"
    branch = Branch([replace(start, branch_id=bid)], parameter)
    if steps <= 0:
        return branch

    if parameter == "amplitude":
        A = float(field_to_coeffs(start.profile, "even")[1])
        u, params = start.profile, start.params
        h = direction * initial_step
        done = 0
        while done < steps:
            trial, c = solve_pinned_amplitude(u, params, A + h, cfg=cfg)
            if not trial.converged:
                h *= 0.5
                if abs(h) < min_step:
                    branch.step_history.append(0.0)
                    break
                continue
            A += h
            u, params = trial.profile, trial.params
            branch.points.append(replace(trial, branch_id=bid))
            branch.step_history.append(h)
            done += 1
            if trial.iterations <= 3:
                h = float(np.clip(1.3 * h, -max_step, max_step))
        return branch

    if parameter not in ("speed", "offset"):
        raise ValueError(f"unknown continuation parameter {parameter!r}")

    # secant tangent needs a second point: take one small natural step
    lam0 = _get_par(start.params, parameter)
    h0 = direction * initial_step
    second = None
    while abs(h0) >= min_step:
        second = newton_solve(start.profile,
                              _set_par(start.params, parameter, lam0 + h0), cfg)
        if second.converged:
            break
        h0 *= 0.5
        second = None
    if second is None:
        branch.step_history.append(0.0)
        return branch
    branch.points.append(replace(second, branch_id=bid))
    branch.step_history.append(h0)

    ds = abs(h0)
    for _ in range(steps - 1):
        w0, w1 = branch.points[-2], branch.points[-1]
        q0 = field_to_coeffs(w0.profile, "even")
        q1 = field_to_coeffs(w1.profile, "even")
        t = np.concatenate([q1 - q0, [_get_par(w1.params, parameter)
                                      - _get_par(w0.params, parameter)]])
        norm_t = np.linalg.norm(t)
        if norm_t == 0:
            branch.step_history.append(0.0)
            break
        t /= norm_t

        accepted = False
        while ds >= min_step:
            q = q1 + ds * t[:-1]
            lam = _get_par(w1.params, parameter) + ds * t[-1]
            u = coeffs_to_field(w1.grid, q, "even")
            params = _set_par(w1.params, parameter, lam)
            ok = False
            for it in range(cfg.max_iter):
                r = residual(u, params)
                qc = field_to_coeffs(u, "even")
                con = float(t[:-1] @ (qc - q1) + t[-1]
                            * (_get_par(params, parameter)
                               - _get_par(w1.params, parameter)) - ds)
                rn = float(np.hypot(l2_norm(r), con))
                if rn < cfg.effective_tol(u.grid, params.alpha):
                    ok = True
                    break
                J = _even_jacobian(u, params)
                m = J.shape[0]
                B = np.zeros((m + 1, m + 1))
                B[:m, :m] = J
                B[:m, m] = _dF_dpar(u, params, parameter)
                B[m, :m] = t[:-1]
                B[m, m] = t[-1]
                rhs = np.concatenate([field_to_coeffs(r, "even"), [con]])
                try:
                    d = scipy.linalg.solve(B, rhs)
                except scipy.linalg.LinAlgError:
                    break
                u = RealField(u.grid,
                              _even_symmetrize((u - coeffs_to_field(u.grid, d[:m], "even")).values))
                params = _set_par(params, parameter,
                                  _get_par(params, parameter) - d[m])
            if ok:
                wnew = TravelingWave(u, params, l2_norm(residual(u, params)),
                                     True, bid, it)
                branch.points.append(wnew)
                branch.step_history.append(ds)
                if it <= 3:
                    ds = min(1.3 * ds, max_step)
                accepted = True
                break
            ds *= 0.5
        if not accepted:
            branch.step_history.append(0.0)  # truncated: step underflow
            break
        if stop_speed is not None:
            c_prev = branch.points[-2].params.speed
            c_now = branch.points[-1].params.speed
            if (c_prev - stop_speed) * (c_now - stop_speed) <= 0:
                break
    return branch


# ---------------------------------------------------------------------------
# normal-form and cross-model transformations

@dataclass(frozen=True)
class TransformRecord:
    """Invertible record of the Galilean shift + scaling applied."""

    galilean_shift: float   # d: u -> u + d
    gamma: float            # scaling gamma = sqrt(c^2 + 4a)
    alpha: float
    original_params: WaveParams

    def invert(self, w: TravelingWave) -> TravelingWave:
        """Map a normalized wave back to the original parameters."""
        gam, d = self.gamma, self.galilean_shift
        vals = gam * w.profile.values - d
        grid = Grid(w.grid.num_points, self.original_params.period)
        u = RealField(grid, vals)
        rn = l2_norm(residual(u, self.original_params))
        return TravelingWave(u, self.original_params, rn, w.converged,
                             w.branch_id, w.iterations)


def canonical_normalize(w: TravelingWave):
    """Reduce a quadratic KdV wave to speed 1, offset 0.

    Galilean shift u -> u + (gamma - c)/2 moves (c, a) to (gamma, 0) with
    gamma = sqrt(c^2 + 4a); the scaling u(x) -> u(x / gamma^{1/alpha}) / gamma
    then lands on (1, 0) with period gamma^{1/alpha} T. Node values map to
    node values. Returns (normalized wave, invertible record).
    """
    p = w.params
    if p.model != "kdv" or p.power != 1:
        raise UnsupportedModelError("normal form applies to the quadratic KdV model")
    disc = p.speed ** 2 + 4.0 * p.offset
    if disc <= 0:
        raise NormalFormError(f"c^2 + 4a = {disc:.3e} <= 0: no real normal form")
    gam = float(np.sqrt(disc))
    d = 0.5 * (gam - p.speed)
    new_T = gam ** (1.0 / p.alpha) * p.period
    vals = (w.profile.values + d) / gam
    u = RealField(Grid(w.grid.num_points, new_T), vals)
    new_params = WaveParams(alpha=p.alpha, speed=1.0, offset=0.0,
                            period=new_T, power=1, model="kdv")
    rn = l2_norm(residual(u, new_params))
    rec = TransformRecord(d, gam, p.alpha, p)
    return TravelingWave(u, new_params, rn, w.converged, w.branch_id,
                         w.iterations), rec


def rlw_to_kdv_reduction(w: TravelingWave) -> TravelingWave:
    """Map an RLW wave to the quadratic KdV wave with speed 2.

    If u solves the RLW profile equation at (c, a) then
    (2/(c+1)) u((2c/(c+1))^{1/alpha} x) solves the KdV profile equation at
    (2, 4a/(c+1)^2) with period ((c+1)/(2c))^{1/alpha} T. Defined for
    c(c+1) > 0. At c = 1 the two equations coincide and the map is the
    identity.
    """
    p = w.params
    if p.model != "rlw":
        raise UnsupportedModelError("reduction applies to RLW waves")
    c = p.speed
    if c * (c + 1.0) <= 0:
        raise ReductionError(f"c(c+1) = {c * (c + 1.0):.3e} <= 0: reduction undefined")
    A = 2.0 / (c + 1.0)
    beta = (2.0 * c / (c + 1.0)) ** (1.0 / p.alpha)
    new_T = p.period / beta
    vals = A * w.profile.values     # x -> beta x maps nodes to nodes
    u = RealField(Grid(w.grid.num_points, new_T), vals)
    new_params = WaveParams(alpha=p.alpha, speed=2.0,
                            offset=4.0 * p.offset / (c + 1.0) ** 2,
                            period=new_T, power=1, model="kdv")
    rn = l2_norm(residual(u, new_params))
    return TravelingWave(u, new_params, rn, w.converged, w.branch_id, w.iterations)


def integral_identity_residuals(w: TravelingWave):
    """Defects of the two quadrature identities every KdV solution satisfies.

    Integrating the profile equation gives int u^{p+1} = c M + a T
    (for p = 1: 2P - cM - aT = 0); multiplying by u and integrating gives
    2K + (p+2)U + 2cP + aM = 0. Both are reported as absolute values;
    nonzero values on non-solutions are data, not errors.
    """
    p = w.params
    if p.model != "kdv":
        raise UnsupportedModelError("integral identities are for the KdV model")
    f = functionals_kdv(w.profile, p.alpha, p.power)
    T = p.period
    if p.power == 1:
        r1 = abs(2.0 * f.P - p.speed * f.M - p.offset * T)
    else:
        pow_int = integrate(RealField(w.grid, w.profile.values ** (p.power + 1)))
        r1 = abs(pow_int - p.speed * f.M - p.offset * T)
    r2 = abs(2.0 * f.K + (p.power + 2.0) * f.U + 2.0 * p.speed * f.P
             + p.offset * f.M)
    return float(r1), float(r2)

"""Second-variation operators and their spectra.

Operators of the form  multiplier(|D|) + potential(x) + shift  are kept as a
symbol table plus a pointwise potential. Dense matrices are assembled in the
orthonormal trigonometric (Galerkin) basis

    1/sqrt(T),  sqrt(2/T) cos(2*pi*j*x/T),  sqrt(2/T) sin(2*pi*j*x/T),

where the multiplier is diagonal and the potential couples modes through its
Fourier coefficients (Toeplitz-plus-Hankel blocks). That keeps the discrete
matrix exactly symmetric and splits cleanly into even/odd sectors when the
potential is even.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import InvalidFieldError, ProjectionError, SectorError
from .grids import Grid, RealField
from .spectral import DispersionSymbol, differentiate, inner_product, l2_norm

SECTORS = ("full", "even", "odd")


# ---------------------------------------------------------------------------
# trigonometric basis bookkeeping
# ---------------------------------------------------------------------------

def sector_size(n: int, sector: str) -> int:
    if sector == "even":
        return n // 2 + 1
    if sector == "odd":
        return n // 2 - 1
    if sector == "full":
        return n
    raise ValueError(f"unknown sector {sector!r}")


def field_to_coeffs(f: RealField, sector: str = "full"):
    """Expand a field in the orthonormal trig basis of the given sector."""
    n = f.grid.num_points
    T = f.grid.period
    ch = f.modes
    qc = np.empty(n // 2 + 1)
    qc[0] = ch[0].real / n * np.sqrt(T)
    qc[1 : n // 2] = 2.0 * ch[1 : n // 2].real / n * np.sqrt(T / 2.0)
    qc[n // 2] = ch[n // 2].real / n * np.sqrt(T / 2.0)
    if sector == "even":
        return qc
    qs = -2.0 * ch[1 : n // 2].imag / n * np.sqrt(T / 2.0)
    if sector == "odd":
        return qs
    return np.concatenate([qc, qs])


def coeffs_to_field(grid: Grid, q, sector: str = "full") -> RealField:
    """Inverse of :func:`field_to_coeffs`."""
    n, T = grid.num_points, grid.period
    q = np.asarray(q, dtype=float)
    ch = np.zeros(n // 2 + 1, dtype=complex)
    if sector in ("even", "full"):
        qc = q[: n // 2 + 1]
        ch[0] = n * qc[0] / np.sqrt(T)
        ch[1 : n // 2] += (n / 2.0) * qc[1 : n // 2] * np.sqrt(2.0 / T)
        ch[n // 2] = n * qc[n // 2] * np.sqrt(2.0 / T)
    if sector in ("odd", "full"):
        qs = q if sector == "odd" else q[n // 2 + 1 :]
        ch[1 : n // 2] += -1j * (n / 2.0) * qs * np.sqrt(2.0 / T)
    return RealField.from_modes(grid, ch)


def sector_wavenumber_indices(n: int, sector: str):
    """Integer wavenumber of each basis vector in the sector's ordering."""
    if sector == "even":
        return np.arange(n // 2 + 1)
    if sector == "odd":
        return np.arange(1, n // 2)
    return np.concatenate([np.arange(n // 2 + 1), np.arange(1, n // 2)])


# ---------------------------------------------------------------------------
# the operator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearOperator:
    """Self-adjoint operator multiplier(|D|) + potential(x) + constant_shift.

    ``multiplier`` holds the real symbol values on the grid's nonnegative
    wavenumbers. ``projected`` marks the mean-zero compression Pi L Pi.
    """

    grid: Grid
    multiplier: np.ndarray
    potential: Optional[RealField]
    constant_shift: float
    projected: bool = False

    def __post_init__(self):
        m = np.asarray(self.multiplier, dtype=float)
        if m.shape != (self.grid.num_points // 2 + 1,):
            raise ValueError("multiplier must cover the rfft wavenumbers")
        if not np.all(np.isfinite(m)):
            raise InvalidFieldError("multiplier values must be finite")
        object.__setattr__(self, "multiplier", m)

    def potential_is_even(self, tol: float = 1e-10) -> bool:
        if self.potential is None:
            return True
        v = self.potential
        odd_part = np.abs(v.modes.imag).max()
        scale = max(np.abs(v.modes).max(), 1e-300)
        return odd_part <= tol * scale

    def apply(self, f: RealField) -> RealField:
        """Collocation application (pointwise potential, spectral multiplier)."""
        g = f
        if self.projected:
            g = g - float(np.mean(g.values))
        out = RealField.from_modes(g.grid, self.multiplier * g.modes)
        if self.potential is not None:
            out = out + self.potential * g
        out = out + self.constant_shift * g
        if self.projected:
            out = out - float(np.mean(out.values))
        return out

    def matrix(self, sector: str = "full") -> np.ndarray:
        """Dense symmetric Galerkin matrix on the requested sector."""
        if sector not in SECTORS:
            raise ValueError(f"unknown sector {sector!r}")
        if sector != "full" and not self.potential_is_even():
            raise SectorError("even/odd sectors need an even potential")
        n, T = self.grid.num_points, self.grid.period
        E, O = n // 2 + 1, n // 2 - 1

        if self.potential is not None:
            ch = self.potential.modes
            ac = np.zeros(n + 2)
            ac[0] = ch[0].real / n
            ac[1 : n // 2] = 2.0 * ch[1 : n // 2].real / n
            ac[n // 2] = ch[n // 2].real / n
            bs = np.zeros(n + 2)
            bs[1 : n // 2] = -2.0 * ch[1 : n // 2].imag / n
            g = np.zeros(2 * n + 2)
            g[0] = T * ac[0]
            g[1 : n // 2 + 1] = (T / 2.0) * ac[1 : n // 2 + 1]
            h = np.zeros(2 * n + 2)
            h[1 : n // 2] = (T / 2.0) * bs[1 : n // 2]
        else:
            g = np.zeros(2 * n + 2)
            h = np.zeros(2 * n + 2)

        nc = np.full(E, np.sqrt(T / 2.0))
        nc[0] = np.sqrt(T)
        ns = np.full(O, np.sqrt(T / 2.0))
        jc = np.arange(E)
        js = np.arange(1, n // 2)

        blocks = {}
        if sector in ("even", "full"):
            cc = 0.5 * (g[jc[:, None] + jc[None, :]] + g[np.abs(jc[:, None] - jc[None, :])])
            blocks["cc"] = cc / nc[:, None] / nc[None, :]
        if sector in ("odd", "full"):
            ss = 0.5 * (g[np.abs(js[:, None] - js[None, :])] - g[js[:, None] + js[None, :]])
            blocks["ss"] = ss / ns[:, None] / ns[None, :]
        if sector == "full":
            dif = js[:, None] - jc[None, :]
            sc = 0.5 * (h[js[:, None] + jc[None, :]] + np.sign(dif) * h[np.abs(dif)])
            blocks["sc"] = sc / ns[:, None] / nc[None, :]

        if sector == "even":
            A = blocks["cc"]
        elif sector == "odd":
            A = blocks["ss"]
        else:
            A = np.zeros((n, n))
            A[:E, :E] = blocks["cc"]
            A[E:, E:] = blocks["ss"]
            A[E:, :E] = blocks["sc"]
            A[:E, E:] = blocks["sc"].T
        A = np.ascontiguousarray(A)

        kidx = sector_wavenumber_indices(n, sector)
        diag = self.multiplier[kidx] + self.constant_shift
        A[np.arange(len(kidx)), np.arange(len(kidx))] += diag

        if self.projected and sector in ("even", "full"):
            A = np.delete(np.delete(A, 0, axis=0), 0, axis=1)
        return A

    def matrix_basis_indices(self, sector: str = "full"):
        """Wavenumber index per matrix row, accounting for projection."""
        kidx = sector_wavenumber_indices(self.grid.num_points, sector)
        if self.projected and sector in ("even", "full"):
            return kidx[1:]
        return kidx

    def coeffs_of(self, f: RealField, sector: str = "full"):
        q = field_to_coeffs(f, sector)
        if self.projected and sector in ("even", "full"):
            return q[1:]
        return q

    def field_of(self, q, sector: str = "full") -> RealField:
        if self.projected and sector in ("even", "full"):
            q = np.concatenate([[0.0], q])
        return coeffs_to_field(self.grid, q, sector)


def build_second_variation(w) -> LinearOperator:
    """Second variation of the augmented energy at a traveling wave.

    KdV model:  |D|^alpha - (p+1) u^p + c.
    RLW model:  c (1 + |D|^alpha) + 1 - 2u.
    """
    params = w.params
    grid = w.profile.grid
    sym = DispersionSymbol(params.alpha)(grid.wavenumbers)
    if params.model == "kdv":
        p = params.power
        pot = RealField(grid, -(p + 1) * w.profile.values ** p)
        return LinearOperator(grid, sym, pot, params.speed)
    pot = RealField(grid, -2.0 * w.profile.values)
    return LinearOperator(grid, params.speed * sym, pot, params.speed + 1.0)


def project_mean_zero(op: LinearOperator) -> LinearOperator:
    """Compress onto mean-zero functions (drop the constant mode)."""
    if op.projected:
        raise ProjectionError("operator is already mean-zero projected")
    return replace(op, projected=True)


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues of one sector, sorted ascending, with index counts.

    ``n_minus`` counts eigenvalues < -zero_tol; ``kernel_dim`` counts
    |eigenvalue| <= zero_tol. Requested eigenfunctions come back as fields.
    """

    eigenvalues: np.ndarray
    sector: str
    n_minus: int
    kernel_dim: int
    zero_tol: float
    eigenfunctions: tuple

    def to_json_dict(self):
        return {
            "schema_version": 1,
            "sector": self.sector,
            "zero_tol": self.zero_tol,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "n_minus": self.n_minus,
            "kernel_dim": self.kernel_dim,
        }


def eigen_spectrum(op: LinearOperator, sector: str = "full",
                   k_request: int = 0, zero_tol: float | None = None) -> SpectrumReport:
    """Dense symmetric eigensolve in the trig basis of one sector.

    zero_tol defaults to 1e-8 times the spectral radius.
    """
    A = op.matrix(sector)
    if k_request > 0:
        evals, evecs = scipy.linalg.eigh(A)
    else:
        evals = scipy.linalg.eigh(A, eigvals_only=True)
        evecs = None
    radius = float(np.abs(evals).max()) if len(evals) else 0.0
    if zero_tol is None:
        zero_tol = 1e-8 * max(radius, 1.0)
    n_minus = int(np.sum(evals < -zero_tol))
    kernel_dim = int(np.sum(np.abs(evals) <= zero_tol))
    funcs = ()
    if evecs is not None:
        funcs = tuple(op.field_of(evecs[:, j], sector)
                      for j in range(min(k_request, evecs.shape[1])))
    return SpectrumReport(np.asarray(evals), sector, n_minus, kernel_dim,
                          float(zero_tol), funcs)


@dataclass(frozen=True)
class KernelVerdict:
    nondegenerate: bool
    kernel_dim: int
    alignment: float  # |cos angle| between the kernel vector and u_x
    zero_tol: float


def kernel_check(op: LinearOperator, w) -> KernelVerdict:
    """Nondegenerate iff the kernel is one-dimensional and aligned with u_x."""
    A = op.matrix("full")
    evals, evecs = scipy.linalg.eigh(A)
    ztol = 1e-8 * max(float(np.abs(evals).max()), 1.0)
    kmask = np.abs(evals) <= ztol
    kdim = int(np.sum(kmask))
    ux = differentiate(w.profile)
    nux = l2_norm(ux)
    if kdim != 1 or nux == 0.0:
        return KernelVerdict(False, kdim, 0.0, ztol)
    v = op.field_of(evecs[:, int(np.argmax(kmask))], "full")
    align = abs(inner_product(v, ux)) / (l2_norm(v) * nux)
    return KernelVerdict(align > 0.999, kdim, float(align), ztol)


def nodal_count(v: RealField) -> int:
    """Sign changes of the node values around the periodic cycle.

    Values below 1e-10 * max|v| are snapped to the sign of the nearest
    non-snapped neighbor; the wrap-around pair is counted once.
    """
    vals = v.values
    top = np.abs(vals).max()
    if top == 0.0:
        raise InvalidFieldError("nodal_count of the zero field")
    s = np.sign(vals)
    s[np.abs(vals) < 1e-10 * top] = 0
    n = len(s)
    if np.all(s == 0):
        raise InvalidFieldError("nodal_count: all values below the snap threshold")
    idx = np.where(s == 0)[0]
    for i in idx:
        for d in range(1, n):
            left, right = s[(i - d) % n], s[(i + d) % n]
            if right != 0:
                s[i] = right
                break
            if left != 0:
                s[i] = left
                break
    return int(np.sum(s != np.roll(s, -1)))


@dataclass(frozen=True)
class RangeVerdict:
    in_range: bool
    preimage: Optional[RealField]
    residual: float
    kernel_overlap: float
    ill_conditioned: bool


def range_membership(op: LinearOperator, f: RealField,
                     rel_tol: float = 1e-8) -> RangeVerdict:
    """Is f in the operator's range? Solve for a preimage if so.

    Membership means orthogonality to the numerical kernel (relative
    tolerance ``rel_tol``); the preimage is the deflated solve in the
    kernel's orthogonal complement. Condition numbers beyond 1e12 flag
    the result instead of failing.
    """
    sector = "full"
    A = op.matrix(sector)
    evals, evecs = scipy.linalg.eigh(A)
    radius = float(np.abs(evals).max())
    ztol = 1e-8 * max(radius, 1.0)
    qf = op.coeffs_of(f, sector)
    nf = np.linalg.norm(qf)
    kmask = np.abs(evals) <= ztol
    overlap = 0.0
    if kmask.any() and nf > 0:
        overlap = float(np.abs(evecs[:, kmask].T @ qf).max() / nf)
    in_range = overlap <= rel_tol
    if not in_range:
        return RangeVerdict(False, None, float("inf"), overlap, False)
    keep = ~kmask
    coef = evecs[:, keep].T @ qf
    lam = evals[keep]
    sol = evecs[:, keep] @ (coef / lam)
    cond = radius / float(np.abs(lam).min()) if len(lam) else np.inf
    pre = op.field_of(sol, sector)
    resid = l2_norm(op.apply(pre) - f)
    return RangeVerdict(True, pre, float(resid), overlap, bool(cond > 1e12))

"""Uniform periodic collocation grids and real fields on them.

A :class:`RealField` stores node values as the source of truth; Fourier
coefficients are a lazily computed cache (fields are immutable, so the
cache never goes stale). Node j sits at x_j = j*T/N.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, InvalidFieldError

FIELD_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Grid:
    """Uniform mesh of ``num_points`` nodes on the periodic interval [0, period)."""

    num_points: int
    period: float

    def __post_init__(self):
        n, T = self.num_points, self.period
        if n < 8 or n % 2 != 0:
            raise ValueError(f"num_points must be even and >= 8, got {n}")
        if not (T > 0 and np.isfinite(T)):
            raise ValueError(f"period must be positive and finite, got {T}")

    @property
    def nodes(self):
        return self.period * np.arange(self.num_points) / self.num_points

    @property
    def spacing(self):
        return self.period / self.num_points

    @property
    def wavenumbers(self):
        """Nonnegative wavenumbers 2*pi*k/T of the half (rfft) spectrum."""
        return 2.0 * np.pi * np.arange(self.num_points // 2 + 1) / self.period


class RealField:
    """A real T-periodic function sampled at the grid nodes.

    Values are immutable after construction. ``modes`` returns the rfft of
    the values (conjugate-symmetric half spectrum), cached on first use.
    """

    __slots__ = ("grid", "_values", "_modes")

    def __init__(self, grid: Grid, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.num_points,):
            raise InvalidFieldError(
                f"expected {grid.num_points} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InvalidFieldError("field values must be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "_values", values)
        object.__setattr__(self, "_modes", None)

    def __setattr__(self, name, value):
        raise AttributeError("RealField is immutable")

    @property
    def values(self):
        return self._values

    @property
    def modes(self):
        if self._modes is None:
            m = np.fft.rfft(self._values)
            m.setflags(write=False)
            object.__setattr__(self, "_modes", m)
        return self._modes

    @classmethod
    def from_modes(cls, grid: Grid, modes):
        return cls(grid, np.fft.irfft(modes, n=grid.num_points))

    @classmethod
    def from_callable(cls, grid: Grid, f):
        return cls(grid, f(grid.nodes))

    @classmethod
    def zeros(cls, grid: Grid):
        return cls(grid, np.zeros(grid.num_points))

    def with_values(self, values) -> "RealField":
        return RealField(self.grid, values)

    # -- arithmetic conveniences (pointwise; no dealiasing) -----------------

    def _check(self, other):
        if other.grid != self.grid:
            raise GridMismatchError("fields live on different grids")

    def __add__(self, other):
        if isinstance(other, RealField):
            self._check(other)
            return RealField(self.grid, self._values + other._values)
        return RealField(self.grid, self._values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, RealField):
            self._check(other)
            return RealField(self.grid, self._values - other._values)
        return RealField(self.grid, self._values - other)

    def __rsub__(self, other):
        return RealField(self.grid, other - self._values)

    def __mul__(self, other):
        if isinstance(other, RealField):
            self._check(other)
            return RealField(self.grid, self._values * other._values)
        return RealField(self.grid, self._values * other)

    __rmul__ = __mul__

    def __neg__(self):
        return RealField(self.grid, -self._values)

    # -- spectral utilities --------------------------------------------------

    def shift(self, x0: float) -> "RealField":
        """Return the translate x -> f(x - x0), evaluated spectrally."""
        k = self.grid.wavenumbers
        return RealField.from_modes(self.grid, self.modes * np.exp(-1j * k * x0))

    def resample(self, num_points: int) -> "RealField":
        """Spectral interpolation onto a grid with ``num_points`` nodes."""
        g2 = Grid(num_points, self.grid.period)
        n_old, n_new = self.grid.num_points, num_points
        m_old = self.modes
        m_new = np.zeros(n_new // 2 + 1, dtype=complex)
        keep = min(n_old, n_new) // 2 + 1
        m_new[:keep] = m_old[:keep]
        if n_new < n_old:
            m_new[-1] = m_new[-1].real  # new Nyquist must be real
        return RealField(g2, np.fft.irfft(m_new * (n_new / n_old), n=n_new))

    def spectral_tail(self) -> float:
        """Relative magnitude of the last 10% of modes; resolution diagnostic."""
        mag = np.abs(self.modes)
        top = mag.max()
        if top == 0.0:
            return 0.0
        ntail = max(2, len(mag) // 10)
        return float(mag[-ntail:].max() / top)

    # -- serialization ---------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "schema_version": FIELD_SCHEMA_VERSION,
            "period": self.grid.period,
            "num_points": self.grid.num_points,
            "values": [float(v) for v in self._values],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "RealField":
        return cls(Grid(int(d["num_points"]), float(d["period"])), d["values"])

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def loads(cls, s: str) -> "RealField":
        return cls.from_json_dict(json.loads(s))

    def __repr__(self):
        return (f"RealField(N={self.grid.num_points}, T={self.grid.period:.6g}, "
                f"range=[{self._values.min():.3g}, {self._values.max():.3g}])")

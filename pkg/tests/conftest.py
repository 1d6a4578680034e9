"""Shared fixtures. Waves are expensive enough to cache for the session."""

import numpy as np
import pytest

import fracwave as fw

TWO_PI = 2.0 * np.pi

# the acceptance wave set: three amplitudes per dispersion exponent at T = 2 pi
FAMILY_OFFSETS = {
    0.6: (0.01, 0.03, 0.06),
    1.0: (0.02, 0.06, 0.12),
    1.5: (0.03, 0.08, 0.15),
    2.0: (0.03, 0.10, 0.20),
}
ALPHAS = tuple(sorted(FAMILY_OFFSETS))


class WaveCache:
    def __init__(self):
        self._cache = {}

    def family(self, alpha, a0, T=TWO_PI, n=256):
        """Converged wave at (c, a) = (1, a0)."""
        key = ("family", alpha, a0, T, n)
        if key not in self._cache:
            w = fw.solve_family_wave(alpha, a0, T, n)
            assert w.converged, (key, w.residual_norm)
            self._cache[key] = w
        return self._cache[key]

    def branch_small(self, alpha, eps, T=TWO_PI, n=128):
        """Small-amplitude wave on the zero-offset branch (c < 0)."""
        key = ("small", alpha, eps, T, n)
        if key not in self._cache:
            seed, params = fw.bifurcation_seed(1, T, alpha, eps, n)
            w = fw.newton_solve(seed, params)
            assert w.converged, (key, w.residual_norm)
            self._cache[key] = w
        return self._cache[key]

    def normal_form(self, alpha, period, n=256):
        """The (1, 0) wave at the given period (> 2 pi)."""
        key = ("nf", alpha, period, n)
        if key not in self._cache:
            w = fw.solve_normal_form_wave(alpha, period, n)
            assert w.converged, (key, w.residual_norm)
            self._cache[key] = w
        return self._cache[key]

    def rlw(self, alpha=2.0, T=TWO_PI, n=256):
        """RLW wave at c = 1, a = 0 (identical profile to the KdV (2, 0) wave)."""
        key = ("rlw", alpha, T, n)
        if key not in self._cache:
            kdv = self.normal_form(alpha, 2.0 ** (1.0 / alpha) * T, n)
            u = 2.0 * kdv.profile.values   # scaling onto the speed-2 KdV wave
            params = fw.WaveParams(alpha=alpha, speed=1.0, offset=0.0,
                                   period=T, model="rlw")
            grid = fw.Grid(n, T)
            w = fw.newton_solve(fw.RealField(grid, u), params)
            assert w.converged, (key, w.residual_norm)
            self._cache[key] = w
        return self._cache[key]

    def trivial(self, alpha=2.0, speed=1.0, T=TWO_PI, n=64):
        key = ("trivial", alpha, speed, T, n)
        if key not in self._cache:
            grid = fw.Grid(n, T)
            params = fw.WaveParams(alpha=alpha, speed=speed, offset=0.0, period=T)
            self._cache[key] = fw.newton_solve(fw.RealField.zeros(grid), params)
        return self._cache[key]


@pytest.fixture(scope="session")
def waves():
    return WaveCache()


@pytest.fixture()
def rng():
    return np.random.default_rng(20260808)

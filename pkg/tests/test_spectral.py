"""Fourier machinery: multipliers, products, quadrature, norms."""

import numpy as np
import pytest

import fracwave as fw
from fracwave.errors import GridMismatchError, InvalidFieldError

from oracles import (band_limited_field, dense_product, mode_sum_sobolev,
                     refined_grid_functionals, refined_grid_functionals_rlw)

TWO_PI = 2.0 * np.pi


def make_field(n=64, T=TWO_PI, f=None):
    g = fw.Grid(n, T)
    return fw.RealField.from_callable(g, f or (lambda x: np.cos(x)))


class TestGridAndField:
    def test_grid_validation(self):
        with pytest.raises(ValueError):
            fw.Grid(6, TWO_PI)
        with pytest.raises(ValueError):
            fw.Grid(65, TWO_PI)
        with pytest.raises(ValueError):
            fw.Grid(64, -1.0)

    def test_nonfinite_rejected(self):
        g = fw.Grid(8, 1.0)
        vals = np.zeros(8)
        vals[3] = np.nan
        with pytest.raises(InvalidFieldError):
            fw.RealField(g, vals)

    def test_field_immutable(self):
        f = make_field()
        with pytest.raises(Exception):
            f.values[0] = 1.0

    def test_json_round_trip_exact(self):
        rng = np.random.default_rng(7)
        g = fw.Grid(32, 3.7)
        f = fw.RealField(g, rng.standard_normal(32))
        f2 = fw.RealField.loads(f.dumps())
        assert np.array_equal(f.values, f2.values)
        assert f2.grid == g

    def test_resample_spectral(self):
        f = make_field(32, TWO_PI, lambda x: np.cos(3 * x) - 0.5 * np.sin(x))
        f2 = f.resample(64)
        expected = np.cos(3 * f2.grid.nodes) - 0.5 * np.sin(f2.grid.nodes)
        assert np.abs(f2.values - expected).max() < 1e-13

    def test_shift(self):
        f = make_field(64, TWO_PI, lambda x: np.cos(2 * x))
        g = f.shift(0.3)
        expected = np.cos(2 * (f.grid.nodes - 0.3))
        assert np.abs(g.values - expected).max() < 1e-13


class TestFractionalLaplacian:
    def test_single_mode_multiplier(self):
        T = 5.0
        alpha = 1.3
        f = make_field(64, T, lambda x: np.cos(2 * np.pi * x / T))
        out = fw.apply_fractional_laplacian(f, alpha)
        expected = (2 * np.pi / T) ** alpha * f.values
        assert np.abs(out.values - expected).max() < 1e-13

    def test_constant_maps_to_zero(self):
        f = make_field(64, TWO_PI, lambda x: np.full_like(x, 2.5))
        out = fw.apply_fractional_laplacian(f, 0.7)
        assert np.abs(out.values).max() < 1e-14

    def test_two_modes_alpha_15(self):
        f = make_field(64, TWO_PI, lambda x: np.cos(x) + 3 * np.sin(2 * x))
        out = fw.apply_fractional_laplacian(f, 1.5)
        expected = np.cos(make_field().grid.nodes) \
            + 3 * 2 ** 1.5 * np.sin(2 * make_field().grid.nodes)
        assert np.abs(out.values - expected).max() < 1e-12

    def test_self_adjoint(self, rng):
        g = fw.Grid(64, TWO_PI)
        f = fw.RealField(g, band_limited_field(rng, 64, 16))
        h = fw.RealField(g, band_limited_field(rng, 64, 16))
        lf = fw.apply_fractional_laplacian(f, 1.2)
        lh = fw.apply_fractional_laplacian(h, 1.2)
        assert abs(fw.inner_product(lf, h) - fw.inner_product(f, lh)) < 1e-12 * 100

    def test_semigroup(self, rng):
        g = fw.Grid(64, TWO_PI)
        f = fw.RealField(g, band_limited_field(rng, 64, 16))
        ab = fw.apply_fractional_laplacian(fw.apply_fractional_laplacian(f, 0.7), 0.9)
        direct = fw.apply_fractional_laplacian(f, 1.6)
        assert np.abs(ab.values - direct.values).max() < 1e-12 * 100

    def test_warns_outside_range(self):
        f = make_field()
        with pytest.warns(UserWarning):
            fw.apply_fractional_laplacian(f, 2.5)


class TestDifferentiate:
    def test_sine(self):
        T = 3.0
        f = make_field(64, T, lambda x: np.sin(2 * np.pi * x / T))
        out = fw.differentiate(f)
        expected = (2 * np.pi / T) * np.cos(2 * np.pi * f.grid.nodes / T)
        assert np.abs(out.values - expected).max() < 1e-13

    def test_constant(self):
        f = make_field(32, TWO_PI, lambda x: np.full_like(x, 1.7))
        assert np.abs(fw.differentiate(f).values).max() < 1e-14

    def test_antisymmetry_on_wave(self, waves):
        w = waves.family(2.0, 0.10)
        ux = fw.differentiate(w.profile)
        assert abs(fw.inner_product(ux, w.profile)) < 1e-12


class TestDealiasedProduct:
    def test_cos_squared(self):
        f = make_field(64)
        out = fw.dealiased_product(f, f)
        expected = 0.5 + 0.5 * np.cos(2 * f.grid.nodes)
        assert np.abs(out.values - expected).max() < 1e-14

    def test_zero_factor(self, rng):
        g = fw.Grid(64, TWO_PI)
        f = fw.RealField(g, band_limited_field(rng, 64, 20))
        z = fw.RealField.zeros(g)
        assert np.abs(fw.dealiased_product(f, z).values).max() == 0.0

    def test_grid_mismatch(self):
        f = make_field(64)
        g = make_field(32)
        with pytest.raises(GridMismatchError):
            fw.dealiased_product(f, g)

    def test_matches_dense_convolution(self, rng):
        n = 48
        g = fw.Grid(n, TWO_PI)
        fv = band_limited_field(rng, n, n // 3 - 1)
        gv = band_limited_field(rng, n, n // 3 - 1)
        ours = fw.dealiased_product(fw.RealField(g, fv), fw.RealField(g, gv))
        ref = dense_product(fv, gv)
        assert np.abs(ours.values - ref).max() < 1e-12 * max(1, np.abs(ref).max())


class TestFunctionals:
    def test_cosine_kdv(self):
        A, T, alpha = 1.3, 5.0, 1.4
        f = make_field(128, T, lambda x: A * np.cos(2 * np.pi * x / T))
        vals = fw.functionals_kdv(f, alpha)
        assert np.isclose(vals.K, 0.25 * A ** 2 * T * (2 * np.pi / T) ** alpha,
                          rtol=1e-13)
        assert abs(vals.U) < 1e-14          # integral of cos^3 vanishes
        assert np.isclose(vals.P, 0.25 * A ** 2 * T, rtol=1e-13)
        assert abs(vals.M) < 1e-13
        assert np.isclose(vals.H, vals.K + vals.U, rtol=1e-14)

    def test_constant_kdv(self):
        c0, T = 0.8, TWO_PI
        f = make_field(64, T, lambda x: np.full_like(x, c0))
        vals = fw.functionals_kdv(f, 1.0)
        assert vals.K == 0.0
        assert np.isclose(vals.U, -c0 ** 3 * T / 3, rtol=1e-14)
        assert np.isclose(vals.P, 0.5 * c0 ** 2 * T, rtol=1e-14)
        assert np.isclose(vals.M, c0 * T, rtol=1e-14)

    def test_random_vs_refined_grid(self, rng):
        n, T, alpha = 64, 4.0, 1.7
        fv = band_limited_field(rng, n, n // 4)
        vals = fw.functionals_kdv(fw.RealField(fw.Grid(n, T), fv), alpha, p=1)
        ref = refined_grid_functionals(fv, T, alpha, 1)
        for k in ("H", "K", "U", "P", "M"):
            assert abs(getattr(vals, k) - ref[k]) < 1e-10 * max(1, abs(ref[k]))

    def test_random_vs_refined_grid_cubic_power(self, rng):
        # the quartic integrand needs band limitation below N/4
        n, T, alpha = 64, 4.0, 1.7
        fv = band_limited_field(rng, n, n // 6)
        vals = fw.functionals_kdv(fw.RealField(fw.Grid(n, T), fv), alpha, p=2)
        ref = refined_grid_functionals(fv, T, alpha, 2)
        for k in ("H", "K", "U", "P", "M"):
            assert abs(getattr(vals, k) - ref[k]) < 1e-10 * max(1, abs(ref[k]))

    def test_cosine_rlw(self):
        A, T, alpha = 0.9, TWO_PI, 1.6
        f = make_field(128, T, lambda x: A * np.cos(2 * np.pi * x / T))
        vals = fw.functionals_rlw(f, alpha)
        assert np.isclose(vals.H, 0.25 * A ** 2 * T, rtol=1e-13)
        assert np.isclose(vals.P, 0.25 * A ** 2 * T * (1 + (2 * np.pi / T) ** alpha),
                          rtol=1e-13)
        assert abs(vals.M) < 1e-13

    def test_zero_rlw(self):
        f = fw.RealField.zeros(fw.Grid(32, TWO_PI))
        vals = fw.functionals_rlw(f, 1.0)
        assert vals.H == vals.P == vals.M == 0.0

    def test_rlw_vs_refined_grid(self, rng):
        n, T, alpha = 64, 3.0, 0.9
        fv = band_limited_field(rng, n, n // 4)
        vals = fw.functionals_rlw(fw.RealField(fw.Grid(n, T), fv), alpha)
        ref = refined_grid_functionals_rlw(fv, T, alpha)
        for k in ("H", "P", "M"):
            assert abs(getattr(vals, k) - ref[k]) < 1e-10 * max(1, abs(ref[k]))

    def test_shift_invariance(self, rng):
        n, T = 64, TWO_PI
        fv = band_limited_field(rng, n, n // 4)
        f = fw.RealField(fw.Grid(n, T), fv)
        fs = f.shift(0.737)
        a = fw.functionals_kdv(f, 1.3)
        b = fw.functionals_kdv(fs, 1.3)
        for k in ("H", "K", "U", "P", "M"):
            assert abs(getattr(a, k) - getattr(b, k)) < 1e-10


class TestSobolevNorm:
    def test_cosine(self):
        T, s = TWO_PI, 0.8
        f = make_field(64, T, lambda x: np.cos(2 * np.pi * x / T))
        expected = np.sqrt(T / 2 * (1 + (2 * np.pi / T) ** (2 * s)))
        assert np.isclose(fw.sobolev_norm(f, s), expected, rtol=1e-13)

    def test_constant_any_order(self):
        T = 3.3
        f = make_field(32, T, lambda x: np.ones_like(x))
        assert np.isclose(fw.sobolev_norm(f, 0.0), np.sqrt(T), rtol=1e-14)
        assert np.isclose(fw.sobolev_norm(f, 1.1), np.sqrt(T), rtol=1e-14)

    def test_random_vs_mode_sum(self, rng):
        n, T, s = 64, 5.0, 1.2
        fv = band_limited_field(rng, n, n // 4)
        f = fw.RealField(fw.Grid(n, T), fv)
        assert np.isclose(fw.sobolev_norm(f, s), mode_sum_sobolev(fv, T, s),
                          rtol=1e-12)


class TestParseval:
    def test_inner_product_mode_space(self, rng):
        n, T = 64, TWO_PI
        fv = band_limited_field(rng, n, n // 4)
        gv = band_limited_field(rng, n, n // 4)
        f = fw.RealField(fw.Grid(n, T), fv)
        g = fw.RealField(fw.Grid(n, T), gv)
        # mode-space inner product with rfft half-spectrum weights
        fa, ga = f.modes / n, g.modes / n
        mult = np.full(n // 2 + 1, 2.0)
        mult[0] = mult[-1] = 1.0
        mode_ip = float(np.sum(mult * T * (fa * np.conj(ga)).real))
        assert abs(fw.inner_product(f, g) - mode_ip) < 1e-12 * 100

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mixscale.fields import (
    GridFunction,
    ball_average_field,
    ball_symbol,
    bessel_j1,
    fourier_transform,
    inverse_transform,
    large_scale_removal,
    read_grid_csv,
    sobolev_norm,
    write_grid_csv,
)
from mixscale.mixing_scales import make_oscillating_sign, make_two_scale

from conftest import band_limited_field, random_field_1d, random_field_2d
from oracles import ball_average_quadrature, direct_dft


class TestGridFunction:
    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            GridFunction(np.zeros(100), (0.0, 1.0))

    def test_rejects_non_finite(self):
        vals = np.zeros(16)
        vals[3] = np.inf
        with pytest.raises(ValueError):
            GridFunction(vals, (0.0, 1.0))

    def test_values_immutable(self, rng):
        f = random_field_1d(rng)
        with pytest.raises(ValueError):
            f.values[0] = 1.0

    def test_csv_roundtrip_bit_exact(self, rng, tmp_path):
        f = random_field_2d(rng, 8, ((-1.0, 1.0), (0.0, 2 * math.pi)))
        path = tmp_path / "field.csv"
        write_grid_csv(f, path)
        g = read_grid_csv(path)
        assert g.dim == 2 and g.domain == f.domain and g.periodic == f.periodic
        assert np.array_equal(g.values, f.values)

    @given(st.lists(st.floats(-1e300, 1e300, allow_nan=False, width=64),
                    min_size=16, max_size=16))
    @settings(max_examples=50, deadline=None)
    def test_csv_roundtrip_extreme_values(self, tmp_path_factory, values):
        f = GridFunction(np.array(values), (0.0, 1.0))
        path = tmp_path_factory.mktemp("csv") / "f.csv"
        write_grid_csv(f, path)
        assert np.array_equal(read_grid_csv(path).values, f.values)


class TestFourierTransform:
    def test_zero_field(self):
        f = GridFunction(np.zeros(16), (0.0, 1.0))
        assert np.all(fourier_transform(f).coefficients == 0.0)

    def test_single_cosine_mode(self):
        n = 64
        x = np.arange(n) / n
        f = GridFunction(np.cos(2 * math.pi * x), (0.0, 1.0))
        spec = fourier_transform(f)
        nonzero = np.abs(spec.coefficients) > 1e-12
        assert nonzero.sum() == 2
        assert set(np.round(spec.frequencies[0][nonzero], 10)) == {
            round(2 * math.pi, 10), round(-2 * math.pi, 10)}

    def test_matches_direct_sum(self, rng):
        f = random_field_1d(rng, 1024)
        spec = fourier_transform(f)
        direct = direct_dft(f.values, f.spacings[0], f.axes()[0], spec.frequencies[0])
        scale = np.max(np.abs(direct))
        assert np.max(np.abs(spec.coefficients - direct)) <= 1e-10 * scale

    def test_roundtrip_many_random_fields(self, rng):
        for _ in range(100):
            f = random_field_1d(rng, 128)
            g = inverse_transform(fourier_transform(f))
            assert np.max(np.abs(g.values - f.values)) <= 1e-10 * f.max_norm()

    def test_plancherel_both_dims(self, rng):
        for make in (random_field_1d, random_field_2d):
            for _ in range(20):
                f = make(rng)
                spec = fourier_transform(f)
                assert abs(spec.l2_norm() - f.l2_norm()) <= 1e-10 * f.l2_norm()

    def test_zero_frequency_is_mean_times_volume(self, rng):
        f = random_field_2d(rng, 16, ((0.0, 2.0), (0.0, 3.0)))
        spec = fourier_transform(f)
        c0 = spec.coefficients[0, 0]
        assert abs(c0 - f.mean() * f.volume) <= 1e-12 * max(1.0, abs(c0))

    def test_requires_periodic(self):
        f = GridFunction(np.zeros(16), (0.0, 1.0), periodic=False)
        with pytest.raises(ValueError):
            fourier_transform(f)


class TestSobolevNorm:
    def test_zero_field(self):
        f = GridFunction(np.zeros(16), (0.0, 1.0))
        assert sobolev_norm(f, -1.0, homogeneous=True) == 0.0

    def test_single_mode_scaling(self):
        n = 512
        x = 2 * math.pi * np.arange(n) / n
        for m in (1, 3, 8):
            f = GridFunction(np.sin(m * x), (0.0, 2 * math.pi))
            got = sobolev_norm(f, -1.0, homogeneous=True)
            assert got == pytest.approx(f.l2_norm() / m, rel=1e-12)

    def test_two_scale_matches_reference_size(self):
        # frozen from the whole-space Fourier-integral oracle: the scaled
        # norm sits at 0.568 and the measured value within 2.5% of it
        f = make_two_scale(12, 6)
        got = sobolev_norm(f, -1.0, homogeneous=True)
        assert 0.25 * 2.0 ** -3 <= got <= 4.0 * 2.0 ** -3
        assert got * 2.0 ** 3 == pytest.approx(0.565, abs=0.01)

    def test_monotone_in_order(self, rng):
        orders = np.linspace(-1.0, 1.0, 9)
        for _ in range(20):
            f = random_field_1d(rng, 128)
            norms = [sobolev_norm(f, s) for s in orders]
            assert all(a <= b * (1 + 1e-12) for a, b in zip(norms, norms[1:]))

    def test_interpolation_bound_holder(self, rng):
        # ||f||_{H^-lam} <= ||f||_L2^{1-lam} ||f||_{H^-1}^lam with constant 1
        for _ in range(100):
            f = band_limited_field(rng, 256, 32)
            l2 = f.l2_norm()
            h1 = sobolev_norm(f, -1.0)
            for lam in (0.25, 0.5, 0.75):
                lhs = sobolev_norm(f, -lam)
                assert lhs <= l2 ** (1 - lam) * h1 ** lam * (1 + 1e-12)

    def test_homogeneous_rejects_nonzero_mean(self):
        f = GridFunction(np.ones(16), (0.0, 1.0))
        with pytest.raises(ValueError):
            sobolev_norm(f, -0.5, homogeneous=True)

    def test_order_out_of_range(self):
        f = GridFunction(np.ones(16), (0.0, 1.0))
        with pytest.raises(ValueError):
            sobolev_norm(f, 1.5)


class TestBessel:
    def test_against_arbitrary_precision(self):
        mpmath = pytest.importorskip("mpmath")
        mpmath.mp.dps = 30
        zs = np.concatenate([
            np.linspace(0.0, 15.99, 500),
            np.linspace(16.0, 300.0, 500),
            [1e-10, 15.999999, 16.000001, 2000.0],
        ])
        ref = np.array([float(mpmath.besselj(1, z)) for z in zs])
        assert np.max(np.abs(bessel_j1(zs) - ref)) <= 1e-10

    def test_odd(self):
        zs = np.linspace(0.1, 40.0, 100)
        assert np.allclose(bessel_j1(-zs), -bessel_j1(zs), rtol=0, atol=0)


class TestBallSymbol:
    def test_unit_at_origin(self):
        assert ball_symbol(0.0, 1) == 1.0
        assert ball_symbol(0.0, 2) == 1.0

    def test_first_bessel_zero(self):
        assert abs(ball_symbol(3.8317059702075123, 2)) <= 1e-6

    def test_sinc_zero(self):
        assert abs(ball_symbol(math.pi, 1)) <= 1e-12

    def test_bounded_by_one(self):
        z = np.linspace(0.0, 200.0, 4001)
        for dim in (1, 2):
            assert np.max(np.abs(ball_symbol(z, dim))) <= 1.0 + 1e-12

    def test_lipschitz_at_origin(self):
        z = np.linspace(1e-8, 100.0, 10001)
        for dim in (1, 2):
            assert np.all(np.abs(ball_symbol(z, dim) - 1.0) <= np.minimum(2.0, z))

    def test_bad_dim(self):
        with pytest.raises(ValueError):
            ball_symbol(1.0, 3)


class TestBallAverage:
    def test_constant_field(self):
        f = GridFunction(np.full(64, 2.5), (0.0, 1.0))
        g = ball_average_field(f, 0.1)
        assert np.max(np.abs(g.values - 2.5)) <= 1e-12

    def test_radius_below_resolution(self):
        f = GridFunction(np.zeros(64), (0.0, 1.0))
        with pytest.raises(ValueError, match="minimum resolvable radius"):
            ball_average_field(f, 1.0 / 64)

    def test_oscillating_sign_weak_limit(self):
        # averaging over exactly one period gives sgn(x)/2 away from the
        # sign changes; spectral evaluation reproduces it to Gibbs accuracy
        k = 16
        f = make_oscillating_sign(k, n_points=1024)
        avg = ball_average_field(f, 1.0 / k)
        x = f.axes()[0]
        target = 0.5 * np.sign(x + 1e-15)
        dist = np.minimum(np.abs(x), np.minimum(np.abs(x - 1), np.abs(x + 1)))
        mask = dist >= 2.0 / k
        assert np.max(np.abs(avg.values[mask] - target[mask])) <= 1e-3

    def test_matches_quadrature_oracle(self, rng):
        f = random_field_1d(rng, 256)
        for r in (8 / 256, 16 / 256, 32 / 256):
            got = ball_average_field(f, r).values
            want = ball_average_quadrature(f, r)
            assert np.max(np.abs(got - want)) <= 1e-6

    def test_mean_preserved_and_contractive(self, rng):
        for make in (random_field_1d, random_field_2d):
            f = make(rng)
            for r in (0.05, 0.2):
                g = ball_average_field(f, r)
                assert abs(g.mean() - f.mean()) <= 1e-10 * max(1.0, abs(f.mean()))
                assert g.max_norm() <= f.max_norm() * (1 + 1e-8)


class TestLargeScaleRemoval:
    def test_constant_gives_zero(self):
        f = GridFunction(np.full(64, 3.0), (0.0, 1.0))
        assert np.max(np.abs(large_scale_removal(f, 0.1).values)) <= 1e-12

    def test_single_mode_closed_form(self):
        n = 1024
        x = np.arange(n) / n
        m, r0 = 11, 0.05
        f = GridFunction(np.sin(2 * math.pi * m * x), (0.0, 1.0))
        got = large_scale_removal(f, r0)
        factor = 1.0 - ball_symbol(r0 * 2 * math.pi * m, 1)
        assert np.max(np.abs(got.values - factor * f.values)) <= 1e-12

    def test_oscillating_family_rate(self):
        # frozen: k * ||rho_k - sgn/2||_{H^-1} measured at 0.2056
        for k in (16, 32, 64):
            f = make_oscillating_sign(k)
            x = f.axes()[0]
            vk = f.with_values(f.values - 0.5 * np.sign(x + 1e-15))
            norm = sobolev_norm(vk, -1.0, homogeneous=True)
            assert norm <= 0.25 / k

    def test_mean_zero_and_linear_bound(self, rng):
        for _ in range(20):
            f = random_field_1d(rng, 512)
            for r in (0.02, 0.1, 0.4):
                g = large_scale_removal(f, r)
                assert abs(g.mean()) <= 1e-12 * f.max_norm()
                h = sobolev_norm(g, -1.0, homogeneous=True)
                assert h <= 10.0 * r * f.l2_norm()

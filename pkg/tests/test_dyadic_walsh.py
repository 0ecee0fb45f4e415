import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mixscale.dyadic_walsh import (
    DyadicSignal,
    Tile,
    dyadic_analytic,
    dyadic_geometric,
    haar_averages,
    make_packet_sum,
    project,
    read_signal_csv,
    tile_overlap,
    walsh_coefficients,
    walsh_synthesize,
    wave_packet,
    write_signal_csv,
)

from oracles import walsh_matrix


def random_signal(rng, J):
    return DyadicSignal(rng.standard_normal(2 ** J))


tiles = st.integers(0, 4).flatmap(
    lambda j: st.tuples(st.just(j), st.integers(0, 2 ** j - 1), st.integers(0, 8)))


class TestTile:
    def test_position_range(self):
        with pytest.raises(ValueError):
            Tile(2, 4, 0)

    @given(tiles)
    @settings(max_examples=100, deadline=None)
    def test_area_one(self, tkl):
        p = Tile(*tkl)
        (a, b), (c, d) = p.interval, p.freq_interval
        assert (b - a) * (d - c) == pytest.approx(1.0, rel=1e-12)


class TestWavePacket:
    def test_base_case_constant(self):
        w = wave_packet(Tile(0, 0, 0), 4)
        assert np.all(w.values == 1.0)

    def test_first_oscillation(self):
        w = wave_packet(Tile(0, 0, 1), 1)
        assert np.array_equal(w.values, [1.0, -1.0])

    def test_unit_norm_and_value_magnitudes(self):
        for (j, k, l) in [(0, 0, 5), (2, 3, 4), (3, 1, 7), (5, 17, 8)]:
            p = Tile(j, k, l)
            w = wave_packet(p, 10)
            assert w.l2_norm() == pytest.approx(1.0, abs=1e-12)
            support = np.abs(w.values) > 0
            a, b = p.interval
            cells = np.arange(2 ** 10) / 2 ** 10
            assert np.array_equal(support, (cells >= a) & (cells < b))
            assert np.all(np.abs(w.values[support]) == 2.0 ** (j / 2.0))

    def test_insufficient_resolution(self):
        with pytest.raises(ValueError, match="need J >= 5"):
            wave_packet(Tile(2, 0, 5), 4)


class TestTileOverlap:
    def test_identical(self):
        p = Tile(3, 2, 5)
        assert tile_overlap(p, p) == pytest.approx(1.0)

    def test_disjoint_frequencies(self):
        assert tile_overlap(Tile(0, 0, 0), Tile(0, 0, 3)) == 0.0

    def test_half_overlap_by_hand(self):
        assert tile_overlap(Tile(0, 0, 0), Tile(1, 0, 0)) == pytest.approx(0.5)

    @given(tiles, tiles)
    @settings(max_examples=200, deadline=None)
    def test_symmetric_and_bounded(self, a, b):
        p, q = Tile(*a), Tile(*b)
        v = tile_overlap(p, q)
        assert v == tile_overlap(q, p)
        assert 0.0 <= v <= 1.0

    @given(tiles, tiles)
    @settings(max_examples=100, deadline=None)
    def test_orthogonality_lemma(self, a, b):
        p, q = Tile(*a), Tile(*b)
        J = 9
        ip = float(np.mean(wave_packet(p, J).values * wave_packet(q, J).values))
        assert abs(abs(ip) - math.sqrt(tile_overlap(p, q))) <= 1e-12


class TestWalshCoefficients:
    def test_packet_gives_unit_vector(self):
        J = 6
        for l in (0, 1, 5, 31, 63):
            c = walsh_coefficients(wave_packet(Tile(0, 0, l), J))
            want = np.zeros(2 ** J)
            want[l] = 1.0
            assert np.max(np.abs(c - want)) <= 1e-12

    def test_constant_signal(self):
        c = walsh_coefficients(DyadicSignal(np.ones(16)))
        assert c[0] == pytest.approx(1.0) and np.max(np.abs(c[1:])) <= 1e-15

    def test_matches_direct_inner_products(self, rng):
        J = 10
        f = random_signal(rng, J)
        direct = walsh_matrix(J) @ f.values / 2 ** J
        assert np.max(np.abs(walsh_coefficients(f) - direct)) <= 1e-12

    def test_parseval(self, rng):
        for _ in range(50):
            f = random_signal(rng, 8)
            c = walsh_coefficients(f)
            assert abs(np.linalg.norm(c) - f.l2_norm()) <= 1e-12

    def test_synthesize_inverts(self, rng):
        f = random_signal(rng, 9)
        g = walsh_synthesize(walsh_coefficients(f))
        assert np.max(np.abs(g.values - f.values)) <= 1e-12


class TestHaarAverages:
    def test_constant(self):
        d = haar_averages(DyadicSignal(np.ones(16)), 2)
        assert np.allclose(d, 0.5, rtol=0, atol=1e-15)

    def test_mean_zero_packet(self):
        d = haar_averages(wave_packet(Tile(0, 0, 1), 4), 0)
        assert np.array_equal(d, [0.0])

    def test_matches_direct_sum(self, rng):
        f = random_signal(rng, 8)
        for j in (0, 3, 8):
            got = haar_averages(f, j)
            cells = f.values.reshape(2 ** j, -1)
            want = np.array([2.0 ** (j / 2.0) * np.sum(row) * 2.0 ** -8
                             for row in cells])
            assert np.max(np.abs(got - want)) <= 1e-12

    def test_basis_norm_equivalence(self, rng):
        for _ in range(50):
            f = random_signal(rng, 7)
            J = f.resolution
            a = np.linalg.norm(haar_averages(f, J))
            b = np.linalg.norm(walsh_coefficients(f))
            assert abs(a - f.l2_norm()) <= 1e-12 and abs(b - f.l2_norm()) <= 1e-12

    def test_scale_out_of_range(self):
        with pytest.raises(ValueError):
            haar_averages(DyadicSignal(np.ones(8)), 4)


class TestProject:
    def test_identity_at_native_resolution(self, rng):
        f = random_signal(rng, 6)
        assert np.array_equal(project(f, 6).values, f.values)

    def test_kills_high_packets(self):
        J = 8
        for j in (1, 3, 5):
            for l in (2 ** j, 2 ** j + 3, 2 ** (j + 1) - 1):
                g = project(wave_packet(Tile(0, 0, l), J), j)
                assert np.max(np.abs(g.values)) <= 1e-12

    def test_projection_to_mean(self, rng):
        f = random_signal(rng, 6)
        g = project(f, 0)
        assert np.allclose(g.values, f.values.mean(), rtol=0, atol=1e-12)

    def test_idempotent_and_contractive(self, rng):
        f = random_signal(rng, 8)
        for j in (2, 5):
            g = project(f, j)
            assert np.max(np.abs(project(g, j).values - g.values)) <= 1e-14
            assert g.l2_norm() <= f.l2_norm() * (1 + 1e-12)


class TestDyadicGeometric:
    def test_constant(self):
        f = DyadicSignal(np.ones(32))
        for j in range(6):
            assert dyadic_geometric(f, j) == pytest.approx(1.0)

    def test_haar_packet(self):
        f = wave_packet(Tile(0, 0, 1), 4)
        assert dyadic_geometric(f, 0) == 0.0
        assert dyadic_geometric(f, 1) == pytest.approx(1.0)

    def test_two_scale_closed_form(self):
        # integer cutoff: sum of packets from 2^m to 2^{j0}-1 collapses to
        # 2^{j0} 1_{[0,2^{-j0})} - 2^m 1_{[0,2^{-m})}
        j0, m = 8, 4
        coeffs = np.zeros(2 ** j0)
        coeffs[2 ** m: 2 ** j0] = 1.0
        f = walsh_synthesize(coeffs)
        for j in range(m + 1, j0 + 1):
            assert dyadic_geometric(f, j) == pytest.approx(2.0 ** j - 2.0 ** m)

    def test_projection_invariance(self, rng):
        f = random_signal(rng, 8)
        for j in (0, 2, 4, 7):
            a = dyadic_geometric(f, j)
            b = dyadic_geometric(project(f, j), j)
            # re-averaging constant blocks drifts by one ulp in numpy's mean
            assert a == pytest.approx(b, abs=1e-14)


class TestDyadicAnalytic:
    def test_constant_packet_any_order(self):
        f = wave_packet(Tile(0, 0, 0), 5)
        for s in (-1.0, -0.5, 0.0, 1.0):
            assert dyadic_analytic(f, s, 5) == pytest.approx(1.0, abs=1e-12)

    def test_single_packet_weight(self):
        J = 6
        for l in (1, 5, 20):
            f = wave_packet(Tile(0, 0, l), J)
            want = (1.0 + l * l) ** -0.5
            assert dyadic_analytic(f, -1.0, J) == pytest.approx(want, abs=1e-12)

    def test_l2_case(self, rng):
        f = random_signal(rng, 7)
        assert dyadic_analytic(f, 0.0, 7) == pytest.approx(f.l2_norm(), abs=1e-12)

    def test_sandwich_against_geometric(self, rng):
        for _ in range(50):
            f = random_signal(rng, 8)
            for j in range(9):
                h = dyadic_analytic(f, -1.0, j)
                g = dyadic_geometric(f, j)
                assert h <= g + 1e-10
                assert g <= 2.0 ** (1.5 * j) * h + 1e-10

    def test_projection_invariance(self, rng):
        f = random_signal(rng, 8)
        for j in (1, 4, 6):
            a = dyadic_analytic(f, -1.0, j)
            b = dyadic_analytic(project(f, j), -1.0, j)
            assert a == pytest.approx(b, abs=1e-13)


class TestMakePacketSum:
    def test_resolution_too_small(self):
        with pytest.raises(ValueError):
            make_packet_sum(8, 0.5, 7)

    def test_coefficients_vanish_below_cutoff(self):
        j0, alpha, J = 10, 0.37, 12
        f = make_packet_sum(j0, alpha, J)
        c = walsh_coefficients(f)
        lmin = math.ceil(2.0 ** (alpha * j0)) - 1
        assert np.max(np.abs(c[:lmin])) <= 1e-15
        assert np.max(np.abs(c[2 ** j0:])) <= 1e-15

    def test_integer_cutoff_closed_form(self):
        j0, alpha = 8, 0.5
        f = make_packet_sum(j0, alpha, j0)
        scale = 2.0 ** (-j0 * (1 - alpha / 2))
        m = int(alpha * j0)
        boundary = wave_packet(Tile(0, 0, 2 ** m - 1), j0)
        cells = np.arange(2 ** j0) / 2 ** j0
        two_scale = (2.0 ** j0 * (cells < 2.0 ** -j0)
                     - 2.0 ** m * (cells < 2.0 ** -m))
        want = scale * (two_scale + boundary.values)
        assert np.max(np.abs(f.values - want)) <= 1e-10

    def test_seminorm_normalization(self):
        f = make_packet_sum(10, 0.5, 12)
        h = dyadic_analytic(f, -1.0, 10)
        assert 0.25 <= h / 2.0 ** -10 <= 4.0


class TestSerialization:
    def test_roundtrip(self, rng, tmp_path):
        f = random_signal(rng, 5)
        path = tmp_path / "signal.csv"
        write_signal_csv(f, path)
        g = read_signal_csv(path)
        assert g.resolution == 5
        assert np.array_equal(g.values, f.values)

"""Morrey / Besov-Morrey estimator tests against exhaustive oracles."""

import math

import numpy as np
import pytest

from fhw.errors import DomainError, ModuloPolynomialsError, PreconditionError
from fhw.grid import BoxGrid, GridFunction, SpectralField, forward, inverse
from fhw.norms import (
    LPPartition,
    SpaceParams,
    ball_radii_int,
    besov_morrey_norm,
    check_holder,
    lp_block,
    morrey_norm,
    sobolev_morrey_norm,
    xqp_norm,
)
from oracles import brute_force_morrey


class TestMorrey:
    def test_exhaustive_equality(self, rng):
        cases = [
            (BoxGrid(1, (16,), 1.5), 1, [(1.0, 0.0), (2.0, 0.5), (3.0, 0.9)]),
            (BoxGrid(1, (32,), 2.0), 1, [(2.0, 0.3)]),
            (BoxGrid(2, (16, 16), 2.0), 2, [(2.0, 0.0), (2.0, 1.0), (1.5, 1.7)]),
            (BoxGrid(3, (8, 8, 8), 1.0), 2, [(2.0, 1.4)]),
        ]
        for grid, stride, exponents in cases:
            f = GridFunction(grid, rng.standard_normal(grid.sizes))
            for p, mu in exponents:
                assert morrey_norm(f, p, mu).value == brute_force_morrey(f, p, mu, stride)

    def test_mu_zero_is_global_lp(self, rng):
        g = BoxGrid(2, (16, 16), 2.0)
        f = GridFunction(g, rng.standard_normal((16, 16)))
        for p in (1.0, 2.0, 3.2):
            expect = float(np.sum(g.cell_volume * np.abs(f.values) ** p) ** (1.0 / p))
            assert morrey_norm(f, p, 0.0).value == expect

    def test_indicator_ball_volume(self):
        g = BoxGrid(2, (64, 64), 2.0)
        xx, yy = g.meshgrid()
        ind = GridFunction(g, (xx**2 + yy**2 < 1.0).astype(float))
        v = morrey_norm(ind, 1.0, 0.0).value
        assert abs(v - math.pi) < 2 * g.spacings[0] * (2 * math.pi)

    def test_scaling_law(self, rng):
        g = BoxGrid(2, (32, 32), 2.0)
        f = GridFunction(g, rng.standard_normal((32, 32)))
        gb = BoxGrid(2, (32, 32), 1.0)
        fb = GridFunction(gb, f.values)  # same samples = f(2x) on the half box
        for p, mu in ((2.0, 1.0), (3.0, 0.5), (1.5, 1.9)):
            a = morrey_norm(f, p, mu).value
            b = morrey_norm(fb, p, mu).value
            assert abs(b - 2.0 ** (-(2 - mu) / p) * a) / a < 1e-2

    def test_fft_path_matches_direct(self, rng):
        import fhw.norms as N

        g = BoxGrid(2, (32, 32), 2.0)
        f = GridFunction(g, rng.standard_normal((32, 32)))
        direct = morrey_norm(f, 2.0, 1.0).value
        saved = N.DIRECT_WORK_LIMIT
        try:
            N.DIRECT_WORK_LIMIT = 1
            fast = morrey_norm(f, 2.0, 1.0).value
        finally:
            N.DIRECT_WORK_LIMIT = saved
        assert abs(fast - direct) / direct < 1e-12

    def test_witness_structure(self, rng):
        g = BoxGrid(1, (16,), 1.0)
        f = GridFunction(g, rng.standard_normal(16))
        rep = morrey_norm(f, 2.0, 0.5)
        assert rep.value == max(w[2] for w in rep.witnesses)
        assert len(rep.witnesses) == len(ball_radii_int(g))

    def test_domain(self, rng):
        g = BoxGrid(2, (16, 16), 1.0)
        f = GridFunction(g, rng.standard_normal((16, 16)))
        with pytest.raises(DomainError):
            morrey_norm(f, 0.5, 0.0)
        with pytest.raises(DomainError):
            morrey_norm(f, 2.0, 2.0)


class TestSobolevMorrey:
    def test_s_zero_reduces(self, rng):
        g = BoxGrid(1, (32,), 1.0)
        f = GridFunction(g, rng.standard_normal(32))
        assert abs(sobolev_morrey_norm(f, 0.0, 2.0, 0.3).value - morrey_norm(f, 2.0, 0.3).value) < 1e-12

    def test_single_mode_scaling(self):
        g = BoxGrid(1, (64,), math.pi)
        x = g.axis(0)
        f = GridFunction(g, np.cos(4 * x))
        for s in (0.5, 1.0, -1.0):
            v = sobolev_morrey_norm(f, s, 2.0, 0.0).value
            base = morrey_norm(f, 2.0, 0.0).value
            assert abs(v - 4.0**s * base) / (4.0**s * base) < 1e-12

    def test_composition_shift(self, rng):
        # (-Lap)^{l/2} then norm at s equals norm at s + l
        g = BoxGrid(1, (64,), 1.0)
        vals = rng.standard_normal(64)
        vals -= vals.mean()
        f = GridFunction(g, vals)
        from fhw.grid import apply_symbol, fractional_symbol

        lshift = 0.8
        g1 = inverse(apply_symbol(forward(f), fractional_symbol(g, lshift)))
        a = sobolev_morrey_norm(g1, 0.4, 2.0, 0.2).value
        b = sobolev_morrey_norm(f, 0.4 + lshift, 2.0, 0.2).value
        assert abs(a - b) / b < 1e-10

    def test_negative_order_needs_mean_free(self):
        g = BoxGrid(1, (32,), 1.0)
        f = GridFunction(g, np.ones(32))
        with pytest.raises(ModuloPolynomialsError):
            sobolev_morrey_norm(f, -0.5, 2.0, 0.0)


class TestLPPartition:
    def test_residue(self):
        for sizes, L in (((64,), 2.0), ((32, 32), 4.0)):
            g = BoxGrid(len(sizes), sizes, L)
            part = LPPartition.for_grid(g)
            assert part.residue() < 1e-10

    def test_reconstruction(self, rng):
        g = BoxGrid(1, (64,), 2.0)
        vals = rng.standard_normal(64)
        vals -= vals.mean()
        f = GridFunction(g, vals)
        part = LPPartition.for_grid(g)
        rec = sum(lp_block(f, j, part).values for j in part.masks)
        assert np.max(np.abs(rec - f.values)) < 1e-8

    def test_single_mode_block_weight(self):
        g = BoxGrid(1, (64,), math.pi)
        part = LPPartition.for_grid(g)
        # mode with |xi| = 4 = 2^2 lands entirely in block j = 2
        x = g.axis(0)
        f = GridFunction(g, np.cos(4 * x))
        b2 = lp_block(f, 2, part)
        assert np.max(np.abs(b2.values - f.values)) < 1e-10
        for j in part.masks:
            if j != 2:
                assert np.max(np.abs(lp_block(f, j, part).values)) < 1e-10

    def test_out_of_range_block(self, rng):
        g = BoxGrid(1, (32,), 1.0)
        f = GridFunction(g, rng.standard_normal(32))
        part = LPPartition.for_grid(g)
        with pytest.raises(PreconditionError):
            lp_block(f, part.j_max + 5, part)


class TestBesovMorrey:
    def test_band_limited_single_block(self):
        g = BoxGrid(1, (64,), math.pi)
        x = g.axis(0)
        f = GridFunction(g, np.cos(4 * x))
        rep = besov_morrey_norm(f, -0.5, 2.0, 0.0)
        nonzero = {j: v for j, v in rep.block_values.items() if v > 1e-12}
        assert set(nonzero) == {2}
        expect = 2.0 ** (2 * -0.5) * morrey_norm(f, 2.0, 0.0).value
        assert abs(rep.value - expect) / expect < 1e-12

    def test_l1_dominates_sup(self, rng):
        g = BoxGrid(1, (64,), 1.0)
        vals = rng.standard_normal(64)
        vals -= vals.mean()
        f = GridFunction(g, vals)
        sup = besov_morrey_norm(f, 0.3, 2.0, 0.4, math.inf).value
        l1 = besov_morrey_norm(f, 0.3, 2.0, 0.4, 1.0).value
        assert l1 >= sup

    def test_mu_zero_matches_classical_besov(self, rng):
        # N^s_{q,0,inf} built from the same masks with the global norm
        g = BoxGrid(1, (64,), 2.0)
        vals = rng.standard_normal(64)
        vals -= vals.mean()
        f = GridFunction(g, vals)
        part = LPPartition.for_grid(g)
        s, q = 0.4, 2.5
        classical = max(
            2.0 ** (j * s)
            * float(np.sum(g.cell_volume * np.abs(lp_block(f, j, part).values) ** q) ** (1 / q))
            for j in part.masks
        )
        mine = besov_morrey_norm(f, s, q, 0.0, math.inf, partition=part).value
        assert abs(mine - classical) / classical < 1e-12

    def test_range_widening_stability(self):
        g = BoxGrid(1, (128,), 4.0)
        x = g.axis(0)
        f = GridFunction(g, np.exp(-(x**2)))
        f = GridFunction(g, f.values - f.values.mean())
        base = besov_morrey_norm(f, 0.3, 2.0, 0.0).value
        part = LPPartition.for_grid(g)
        wide = LPPartition.for_grid(g, part.j_min - 2, part.j_max + 2)
        wider = besov_morrey_norm(f, 0.3, 2.0, 0.0, partition=wide).value
        assert abs(wider - base) / base < 0.02

    def test_mean_reported(self):
        g = BoxGrid(1, (32,), 1.0)
        f = GridFunction(g, np.full(32, 3.0))
        rep = besov_morrey_norm(f, 0.0, 2.0, 0.0)
        assert rep.mean_removed == 3.0
        assert rep.value == 0.0


class TestEmbedding:
    def test_inclusion_with_discrete_constant(self, rng):
        # (n-mu1)/p1 = (n-mu2)/p2, p2 <= p1:
        # ||f||_{p2,mu2} <= V^{1/p2 - 1/p1} ||f||_{p1,mu1},
        # V = max over family balls of (discrete ball measure) / r^n
        g = BoxGrid(2, (16, 16), 2.0)
        from fhw.norms import _offset_dist2_int

        h = g.spacings[0]
        d2 = _offset_dist2_int(g)
        V = max(
            g.cell_volume * int(np.sum(d2 < r * r)) / (r * h) ** 2 for r in ball_radii_int(g)
        )
        p1, mu1 = 3.0, 1.0
        p2 = 2.0
        mu2 = g.n - p2 * (g.n - mu1) / p1
        delta = 1.0 / p2 - 1.0 / p1
        for _ in range(20):
            f = GridFunction(g, rng.standard_normal(g.sizes))
            lhs = morrey_norm(f, p2, mu2).value
            rhs = V**delta * morrey_norm(f, p1, mu1).value
            assert lhs <= rhs * (1 + 1e-12)


class TestHolder:
    def test_random_sweep(self, rng):
        g = BoxGrid(2, (16, 16), 2.0)
        checked = 0
        while checked < 100:
            p1, p2 = rng.uniform(1.5, 4.0, 2)
            if 1 / p1 + 1 / p2 > 1:
                continue
            mu1, mu2 = rng.uniform(0.0, 1.9, 2)
            p3 = 1 / (1 / p1 + 1 / p2)
            if p3 * (mu1 / p1 + mu2 / p2) >= 2.0:
                continue
            f = GridFunction(g, rng.standard_normal((16, 16)))
            h = GridFunction(g, rng.standard_normal((16, 16)))
            lhs, rhs, ok = check_holder(f, h, p1, mu1, p2, mu2)
            assert ok, (lhs, rhs)
            checked += 1

    def test_conjugate_pair_rejected(self):
        g = BoxGrid(1, (16,), 1.0)
        f = GridFunction(g, np.ones(16))
        with pytest.raises(DomainError):
            check_holder(f, f, 1.2, 0.0, 2.0, 0.0)  # p3 < 1

    def test_indicator_near_equality(self):
        g = BoxGrid(1, (64,), 2.0)
        x = g.axis(0)
        ind = GridFunction(g, (np.abs(x) < 0.5).astype(float))
        lhs, rhs, ok = check_holder(ind, ind, 2.0, 0.5, 2.0, 0.5)
        assert ok
        assert lhs > 0.5 * rhs  # equality up to discretization for p1 = p2


class TestXqpNorm:
    def test_zero_trajectory(self):
        from fhw.analysis import DerivedExponents
        from fhw.solver import TimeGrid, Trajectory

        g = BoxGrid(1, (32,), 1.0)
        tg = TimeGrid(1.0, 8)
        traj = Trajectory(tg, [GridFunction(g, np.zeros(32))] * 9)
        exps = DerivedExponents.from_params(2, 1.5, 3.0, 3.0, 3.2, 0.0)
        assert xqp_norm(traj, SpaceParams(p=3.0, q=3.2, mu=0.0), exps) == 0.0

    def test_linear_trajectory_finite(self, rng):
        from fhw.analysis import DerivedExponents
        from fhw.propagator import PropagatorContext
        from fhw.solver import TimeGrid, Trajectory

        g = BoxGrid(1, (64,), math.pi)
        x = g.axis(0)
        u0 = GridFunction(g, np.cos(3 * x) * np.exp(-(x**2)))
        ctx = PropagatorContext(1.5, 1.0, g)
        tg = TimeGrid(2.0, 8)
        traj = Trajectory(tg, [ctx.linear_propagate(u0, float(t)) for t in tg.nodes])
        exps = DerivedExponents.from_params(2, 1.5, 3.0, 3.0, 3.2, 0.0)
        val = xqp_norm(traj, SpaceParams(p=3.0, q=3.2, mu=0.0), exps)
        assert np.isfinite(val) and val > 0

    def test_besov_scaling_under_dilation(self, rng):
        # first term scales by lam^{sigma - (n-mu)/p} under f -> f(2x)
        g = BoxGrid(1, (64,), 2.0)
        xi = g.xi_axis(0)
        band = (np.abs(np.abs(xi) - 8.0) < 4.0).astype(complex)
        f = inverse(SpectralField(g, band))
        gb = BoxGrid(1, (64,), 1.0)
        fb = GridFunction(gb, f.values)
        sigma, p, mu = -0.4, 2.0, 0.3
        a = besov_morrey_norm(f, sigma, p, mu).value
        b = besov_morrey_norm(fb, sigma, p, mu).value
        expect = 2.0 ** (sigma - (1 - mu) / p) * a
        assert abs(b - expect) / expect < 1e-2

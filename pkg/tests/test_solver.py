"""Mild-solver tests: product integration, Picard, marching, diagnostics."""

import math

import numpy as np
import pytest

from fhw.errors import BlowUpError, DomainError, NonconvergenceError, PreconditionError
from fhw.grid import BoxGrid, GridFunction, forward
from fhw.propagator import PropagatorContext
from fhw.solver import (
    ModelParams,
    TimeGrid,
    Trajectory,
    duhamel_term,
    march_solve,
    nonlinearity_eval,
    picard_solve,
)
from fhw.special import gamma
from oracles import etd_heat_oracle, nested_duhamel_oracle


@pytest.fixture
def grid1d():
    return BoxGrid(1, (64,), math.pi)


@pytest.fixture
def smooth_data(grid1d):
    x = grid1d.axis(0)
    return GridFunction(grid1d, 0.1 * np.exp(-2 * x**2) * np.cos(x))


class TestTypes:
    def test_model_validation(self):
        with pytest.raises(DomainError):
            ModelParams(2.0, 3.0, 1)
        with pytest.raises(DomainError):
            ModelParams(1.5, 1.0, 1)
        with pytest.raises(DomainError):
            ModelParams(1.5, 3.0, 2)
        with pytest.raises(DomainError):
            ModelParams(1.5, 3.0, 1, nu=0.0)

    def test_timegrid(self):
        tg = TimeGrid(2.0, 16)
        assert tg.dt == 0.125
        assert tg.nodes[0] == 0.0 and tg.nodes[-1] == 2.0
        with pytest.raises(DomainError):
            TimeGrid(1.0, 4)

    def test_timegrid_from_dt_shares_nodes(self):
        tg = TimeGrid(1.0, 16)
        tg2 = TimeGrid.from_dt(tg.dt, 12)
        assert np.array_equal(tg.nodes[:13], tg2.nodes)


class TestNonlinearity:
    def test_zero_fixed_point(self, grid1d):
        model = ModelParams(1.5, 3.0, 1)
        z = GridFunction(grid1d, np.zeros(64))
        assert np.all(nonlinearity_eval(z, model).values == 0.0)

    def test_cubic_signed(self, grid1d):
        # rho = 3 signed on u = 2: integer powers go through dealiasing of u;
        # a constant field is unaffected by the mask
        model = ModelParams(1.5, 3.0, -1)
        u = GridFunction(grid1d, np.full(64, 2.0))
        out = nonlinearity_eval(u, model)
        assert np.max(np.abs(out.values + 8.0)) < 1e-12

    def test_unsigned_form(self, grid1d):
        model = ModelParams(1.5, 2.5, 1, form="unsigned")
        u = GridFunction(grid1d, np.full(64, -2.0))
        out = nonlinearity_eval(u, model)
        assert np.max(np.abs(out.values - 2.0**2.5)) < 1e-12

    def test_lipschitz_bound(self, rng):
        # |f(a)-f(b)| <= rho |a-b| (|a|^{rho-1} + |b|^{rho-1})
        rho = 3.0
        for _ in range(200):
            a, b = rng.uniform(-3, 3, 2)
            lhs = abs(abs(a) ** (rho - 1) * a - abs(b) ** (rho - 1) * b)
            rhs = rho * abs(a - b) * (abs(a) ** (rho - 1) + abs(b) ** (rho - 1))
            assert lhs <= rhs + 1e-12


class TestDuhamelTerm:
    def test_zero_history(self, grid1d):
        model = ModelParams(1.5, 3.0, 1)
        tg = TimeGrid(1.0, 8)
        hist = Trajectory(tg, [GridFunction(grid1d, np.zeros(64))] * 9)
        out = duhamel_term(hist, 8, model)
        assert np.all(out.values == 0.0)

    def test_constant_forcing_zero_mode(self, grid1d):
        model = ModelParams(1.5, 2.0, 1, nu=2.0)
        tg = TimeGrid(1.0, 16)
        c = 0.7
        hist = Trajectory(tg, [GridFunction(grid1d, np.full(64, c))] * 17)
        out = duhamel_term(hist, 16, model)
        expect = model.nu * c / gamma(2.5)
        assert abs(out.values[0] - expect) < 1e-8

    def test_nested_oracle_agreement(self, grid1d):
        tg = TimeGrid(1.0, 16)
        x = grid1d.axis(0)
        fvals = np.cos(np.linspace(0.0, 2.0, 17))
        for alpha in (1.25, 1.5, 1.75):
            model = ModelParams(alpha, 3.0, 1, nu=1.0)
            hist = Trajectory(tg, [GridFunction(grid1d, fv * np.cos(x)) for fv in fvals])
            out = duhamel_term(hist, 16, model)
            amp = forward(out).coeffs[1].real / math.pi
            oracle = nested_duhamel_oracle(alpha, 1.0, 1.0, fvals, tg)
            assert abs(amp - oracle) / abs(oracle) < 1e-3

    def test_short_history_rejected(self, grid1d):
        model = ModelParams(1.5, 3.0, 1)
        tg = TimeGrid(1.0, 8)
        hist = Trajectory(tg, [GridFunction(grid1d, np.zeros(64))] * 9)
        with pytest.raises(PreconditionError):
            duhamel_term(hist, 9, model)


class TestMarch:
    def test_linear_equals_propagator(self, grid1d, smooth_data):
        model = ModelParams(1.5, 3.0, 0)
        tg = TimeGrid(1.0, 16)
        traj = march_solve(smooth_data, model, tg)
        ctx = PropagatorContext(1.5, 1.0, grid1d)
        for k, state in enumerate(traj.states):
            ref = ctx.linear_propagate(smooth_data, float(tg.nodes[k]))
            assert np.max(np.abs(state.values - ref.values)) < 1e-12

    def test_alpha_one_oracle(self, grid1d, smooth_data):
        model = ModelParams(1.0, 3.0, -1)
        tg = TimeGrid(1.0, 128)
        traj = march_solve(smooth_data, model, tg, corrector_iters=2)
        oracle = etd_heat_oracle(smooth_data.values, grid1d, model, tg)
        err = max(np.max(np.abs(a.values - b)) for a, b in zip(traj.states, oracle))
        assert err < 1e-6

    def test_causality_bitwise(self, grid1d, smooth_data):
        model = ModelParams(1.5, 3.0, -1)
        tg = TimeGrid(1.0, 16)
        full = march_solve(smooth_data, model, tg)
        short = march_solve(smooth_data, model, TimeGrid.from_dt(tg.dt, 10))
        for a, b in zip(full.states[:11], short.states):
            assert np.array_equal(a.values, b.values)

    def test_zero_data(self, grid1d):
        model = ModelParams(1.5, 3.0, 1)
        tg = TimeGrid(1.0, 8)
        traj = march_solve(GridFunction(grid1d, np.zeros(64)), model, tg)
        assert all(np.all(s.values == 0.0) for s in traj.states)

    def test_blowup_detection(self, grid1d):
        x = grid1d.axis(0)
        big = GridFunction(grid1d, 50.0 * np.exp(-(x**2)))
        model = ModelParams(1.5, 3.0, 1)
        tg = TimeGrid(2.0, 32)
        with pytest.raises(BlowUpError) as err:
            march_solve(big, model, tg)
        assert 0 <= err.value.last_valid_index < 32

    def test_dt_refinement_order(self, grid1d, smooth_data):
        # halving dt shrinks the solution change consistent with order >= 1.5
        model = ModelParams(1.5, 3.0, -1)
        sup = {}
        for nt in (16, 32, 64):
            traj = march_solve(smooth_data, model, TimeGrid(1.0, nt), corrector_iters=3)
            sup[nt] = traj.states[-1].values
        e1 = np.max(np.abs(sup[16] - sup[64]))
        e2 = np.max(np.abs(sup[32] - sup[64]))
        assert e1 / e2 > 2.0**1.5


class TestPicard:
    def test_linear_one_iteration(self, grid1d, smooth_data):
        model = ModelParams(1.5, 3.0, 0)
        tg = TimeGrid(1.0, 8)
        traj, report = picard_solve(smooth_data, model, tg)
        assert report.converged and report.iterate_count == 1
        ctx = PropagatorContext(1.5, 1.0, grid1d)
        ref = ctx.linear_propagate(smooth_data, 1.0)
        assert np.max(np.abs(traj.states[-1].values - ref.values)) < 1e-12

    def test_matches_march(self, grid1d, smooth_data):
        model = ModelParams(1.5, 3.0, -1)
        tg = TimeGrid(1.0, 32)
        mtraj = march_solve(smooth_data, model, tg, corrector_iters=3)
        ptraj, report = picard_solve(smooth_data, model, tg, tol=1e-12)
        assert report.converged
        err = max(
            np.max(np.abs(a.values - b.values)) for a, b in zip(ptraj.states, mtraj.states)
        )
        assert err < 10 * 1e-6

    def test_alpha_one_picard_vs_heat_oracle(self, grid1d, smooth_data):
        model = ModelParams(1.0, 3.0, -1)
        tg = TimeGrid(1.0, 128)
        traj, report = picard_solve(smooth_data, model, tg, tol=1e-12)
        assert report.converged
        oracle = etd_heat_oracle(smooth_data.values, grid1d, model, tg)
        err = max(np.max(np.abs(a.values - b)) for a, b in zip(traj.states, oracle))
        assert err < 1e-6

    def test_contraction_ratios_small_data(self):
        g = BoxGrid(2, (32, 32), 4.0)
        xx, yy = g.meshgrid()
        u0 = GridFunction(g, 0.2 * np.exp(-(xx**2 + yy**2)))
        model = ModelParams(1.5, 3.0, -1)
        _, report = picard_solve(u0, model, TimeGrid(2.0, 16), tol=1e-10)
        assert report.converged
        assert report.ratios and all(r <= 0.5 for r in report.ratios)

    def test_nonconvergence_large_data(self):
        g = BoxGrid(2, (32, 32), 4.0)
        xx, yy = g.meshgrid()
        u0 = GridFunction(g, 20.0 * np.exp(-(xx**2 + yy**2)))
        model = ModelParams(1.5, 3.0, 1)
        with pytest.raises(NonconvergenceError) as err:
            picard_solve(u0, model, TimeGrid(2.0, 16))
        assert err.value.report.diff_norms

    def test_symmetry_preservation(self):
        from fhw.analysis import symmetry_check

        g = BoxGrid(2, (32, 32), math.pi)
        xx, yy = g.meshgrid()
        u0 = GridFunction(g, 0.2 * np.sin(xx) * np.exp(-(yy**2)))
        model = ModelParams(1.5, 3.0, -1)
        traj = march_solve(u0, model, TimeGrid(1.0, 16))
        M = np.array([[-1, 0], [0, 1]])
        assert symmetry_check(traj, M, "odd") < 1e-8


class TestContinuousDependence:
    def test_linear_ratio_one(self, grid1d, smooth_data):
        from fhw.analysis import DerivedExponents
        from fhw.norms import SpaceParams
        from fhw.solver import continuous_dependence_check

        model = ModelParams(1.5, 3.0, 0)
        tg = TimeGrid(1.0, 8)
        u0b = GridFunction(grid1d, 0.5 * smooth_data.values)
        exps = DerivedExponents.from_params(2, 1.5, 3.0, 3.0, 3.2, 0.0)
        space = SpaceParams(p=3.0, q=3.2, mu=0.0)
        ratio, bound = continuous_dependence_check(smooth_data, u0b, model, tg, space, exps)
        assert abs(ratio - 1.0) < 1e-10

    def test_identical_data(self, grid1d, smooth_data):
        from fhw.analysis import DerivedExponents
        from fhw.norms import SpaceParams
        from fhw.solver import continuous_dependence_check

        model = ModelParams(1.5, 3.0, -1)
        tg = TimeGrid(1.0, 8)
        exps = DerivedExponents.from_params(2, 1.5, 3.0, 3.0, 3.2, 0.0)
        space = SpaceParams(p=3.0, q=3.2, mu=0.0)
        ratio, _ = continuous_dependence_check(smooth_data, smooth_data, model, tg, space, exps)
        assert ratio == 0.0

    def test_small_perturbation_bounded(self):
        from fhw.analysis import DerivedExponents
        from fhw.norms import SpaceParams
        from fhw.solver import continuous_dependence_check

        g = BoxGrid(2, (16, 16), 4.0)
        xx, yy = g.meshgrid()
        u0 = GridFunction(g, 0.1 * np.exp(-(xx**2 + yy**2)))
        u0b = GridFunction(g, u0.values * 1.02)
        model = ModelParams(1.5, 3.0, -1)
        tg = TimeGrid(1.0, 8)
        exps = DerivedExponents.from_params(2, 1.5, 3.0, 3.0, 3.2, 0.0)
        space = SpaceParams(p=3.0, q=3.2, mu=0.0)
        ratio, bound = continuous_dependence_check(u0, u0b, model, tg, space, exps)
        assert np.isfinite(ratio) and ratio > 0
        assert ratio <= bound

"""Desk-scale verification suites behind the CLI ``verify`` subcommand.

Each suite returns a list of (name, value, threshold, passed) rows; a check
passes when value <= threshold.  The suites mirror the acceptance battery
at reduced cost so a run finishes in tens of seconds.
"""

import math
from dataclasses import dataclass

import numpy as np

from .analysis import (
    asymptotic_equivalence_check,
    decay_fit_curve,
    linear_decay_curve,
    self_similarity_check,
    symmetry_check,
    validate_params,
)
from .errors import NonconvergenceError
from .fields import cosine, gaussian, sine
from .grid import BoxGrid, GridFunction, SpectralField, inverse
from .norms import LPPartition, SpaceParams, ball_radii_int, check_holder, morrey_norm
from .propagator import PropagatorContext, kernel_sample_1d, ml_symbol
from .solver import ModelParams, TimeGrid, march_solve, picard_solve
from .special import l_alpha, ml_one


@dataclass
class VerdictRow:
    name: str
    value: float
    threshold: float
    passed: bool


def _row(name, value, threshold):
    return VerdictRow(name, float(value), float(threshold), bool(value <= threshold))


def suite_mlf(rng):
    rows = []
    xs = np.linspace(0.0, 40.0, 200)
    rows.append(_row("ml_exp_identity", np.max(np.abs(ml_one(1.0, xs) - np.exp(-xs))), 1e-10))
    rows.append(
        _row("ml_cos_identity", np.max(np.abs(ml_one(2.0, xs) - np.cos(np.sqrt(xs)))), 1e-10)
    )
    alphas = rng.uniform(1.0, 2.0, 2000)
    samples = rng.uniform(0.0, 100.0, 2000)
    worst = max(abs(ml_one(a, x)) for a, x in zip(alphas, samples))
    rows.append(_row("ml_bounded", worst, 1.0))
    # series vs decomposition across the switch
    xs = np.linspace(2.5, 10.0, 40)
    worst = 0.0
    for a in (1.1, 1.5, 1.9):
        ser = np.array([ml_one(a, x, params=None) for x in xs])
        from .special import MLParams

        dec = ml_one(a, xs, params=MLParams(alpha=a, x_switch=2.0))
        worst = max(worst, float(np.max(np.abs(ser - dec) / np.abs(ser))))
    rows.append(_row("ml_path_agreement", worst, 1e-8))
    rows.append(_row("l_alpha_zero_value", abs(l_alpha(1.5, 0.0) + 1.0 / 3.0), 1e-14))
    return rows


def suite_propagator(rng):
    rows = []
    g = BoxGrid(1, (64,), math.pi)
    x = g.axis(0)
    ctx = PropagatorContext(1.0, 1.0, g)
    u0 = GridFunction(g, np.sin(x))
    ut = ctx.linear_propagate(u0, 0.5)
    rows.append(
        _row("heat_single_mode", np.max(np.abs(ut.values - math.exp(-0.5) * np.sin(x))), 1e-12)
    )
    worst = 0.0
    for a in (1.0, 1.25, 1.5, 1.75):
        for t in (0.1, 1.0, 10.0):
            worst = max(worst, float(np.max(np.abs(ml_symbol(a, t, g)))))
    rows.append(_row("multiplier_bound", worst, 1.0))
    xs = np.linspace(-40.0, 40.0, 32769)
    kv = kernel_sample_1d(1.5, 1.0, xs)
    rows.append(_row("kernel_mass", abs(np.trapezoid(kv, xs) - 1.0), 1e-6))
    rows.append(_row("kernel_min", -float(kv.min()), 1e-6))
    xs = np.linspace(-20.0, 20.0, 2001)
    t = 2.0
    lhs = kernel_sample_1d(1.5, t, xs)
    rhs = t ** (-0.75) * kernel_sample_1d(1.5, 1.0, t ** (-0.75) * xs)
    rows.append(_row("kernel_selfsimilar", np.max(np.abs(lhs - rhs)), 1e-6))
    return rows


def _brute_force_morrey(f, p, mu, stride):
    import itertools

    g = f.grid
    h = g.spacings[0]
    w = g.cell_volume * np.abs(f.values) ** p
    best = -1.0
    for c in itertools.product(*[range(0, s, stride) for s in g.sizes]):
        d2 = np.zeros(g.sizes, dtype=np.int64)
        for i in range(g.n):
            j = np.abs(np.arange(g.sizes[i]) - c[i])
            j = np.minimum(j, g.sizes[i] - j)
            sh = [1] * g.n
            sh[i] = g.sizes[i]
            d2 = d2 + (j**2).reshape(sh)
        for r_int in ball_radii_int(g):
            val = (r_int * h) ** (-mu / p) * np.sum(w[d2 < r_int * r_int]) ** (1.0 / p)
            best = max(best, val)
    return best


def suite_norms(rng, grid_size=16):
    rows = []
    g = BoxGrid(2, (grid_size, grid_size), 2.0)
    f = GridFunction(g, rng.standard_normal(g.sizes))
    worst = 0.0
    for p, mu in ((1.0, 0.0), (2.0, 0.9), (3.0, 1.5)):
        mine = morrey_norm(f, p, mu).value
        brute = _brute_force_morrey(f, p, mu, 2)
        worst = max(worst, abs(mine - brute) / brute)
    rows.append(_row("morrey_brute_force", worst, 1e-13))
    gb = BoxGrid(2, g.sizes, g.half_length / 2)
    fb = GridFunction(gb, f.values)
    a = morrey_norm(f, 2.0, 1.0).value
    b = morrey_norm(fb, 2.0, 1.0).value
    rows.append(_row("morrey_scaling_law", abs(b - 2.0 ** (-0.5) * a) / a, 1e-2))
    part = LPPartition.for_grid(g)
    rows.append(_row("lp_partition_residue", part.residue(), 1e-10))
    viol = 0
    tried = 0
    while tried < 50:
        p1, p2 = rng.uniform(1.5, 4.0, 2)
        if 1.0 / p1 + 1.0 / p2 > 1.0:
            continue
        mu1, mu2 = rng.uniform(0.0, 1.8, 2)
        p3 = 1.0 / (1.0 / p1 + 1.0 / p2)
        if p3 * (mu1 / p1 + mu2 / p2) >= 2.0:
            continue
        tried += 1
        fa = GridFunction(g, rng.standard_normal(g.sizes))
        fbb = GridFunction(g, rng.standard_normal(g.sizes))
        _, _, ok = check_holder(fa, fbb, p1, mu1, p2, mu2)
        viol += 0 if ok else 1
    rows.append(_row("holder_violations", viol, 0))
    return rows


def contraction_setup(scale=1.0):
    g = BoxGrid(2, (32, 32), 4.0)
    xx, yy = g.meshgrid()
    u0 = GridFunction(g, scale * 0.2 * np.exp(-(xx**2 + yy**2)))
    model = ModelParams(alpha=1.5, rho=3.0, gamma_sign=-1, nu=1.0)
    tgrid = TimeGrid(2.0, 16)
    return u0, model, tgrid


def suite_contraction(rng):
    rows = []
    u0, model, tgrid = contraction_setup()
    _, rep = picard_solve(u0, model, tgrid, max_iter=20, tol=1e-10)
    rows.append(_row("picard_ratio", max(rep.ratios) if rep.ratios else 0.0, 0.5))
    rows.append(_row("picard_converged", 0.0 if rep.converged else 1.0, 0.0))
    u0big, _, _ = contraction_setup(scale=100.0)
    model_plus = ModelParams(alpha=1.5, rho=3.0, gamma_sign=1, nu=1.0)
    try:
        picard_solve(u0big, model_plus, tgrid, max_iter=20, tol=1e-10)
        rows.append(_row("picard_nonconvergence_detected", 1.0, 0.0))
    except NonconvergenceError:
        rows.append(_row("picard_nonconvergence_detected", 0.0, 0.0))
    return rows


def suite_symmetry(rng):
    rows = []
    g = BoxGrid(2, (32, 32), math.pi)
    model = ModelParams(alpha=1.5, rho=3.0, gamma_sign=-1, nu=1.0)
    tgrid = TimeGrid(1.0, 16)
    refl = np.array([[-1, 0], [0, 1]])
    odd = sine(g, amplitude=0.2)
    traj = march_solve(odd, model, tgrid)
    rows.append(_row("odd_parity_violation", symmetry_check(traj, refl, "odd"), 1e-8))
    even = cosine(g, amplitude=0.2)
    traj = march_solve(even, model, tgrid)
    rows.append(_row("even_parity_violation", symmetry_check(traj, refl, "even"), 1e-8))
    return rows


def suite_selfsim(rng, size=128):
    rows = []
    g = BoxGrid(2, (size, size), 4.0)
    tg = TimeGrid(8.0, 8)
    h = g.spacings[0]
    lin = ModelParams(alpha=1.0, rho=3.0, gamma_sign=0, nu=1.0)
    nl = ModelParams(alpha=1.5, rho=3.0, gamma_sign=-1, nu=1.0)
    d_lin = self_similarity_check(lin, g, tg, 2.0, amplitude=1.0, moll_scale=h)
    d_half = self_similarity_check(lin, g, tg, 2.0, amplitude=1.0, moll_scale=h / 2)
    d_nl = self_similarity_check(nl, g, tg, 2.0, amplitude=0.01, moll_scale=h)
    rows.append(_row("selfsim_linear_defect", d_lin, 0.05))
    rows.append(_row("selfsim_nonlinear_defect", d_nl, 0.05))
    rows.append(_row("selfsim_halving_ratio", d_half / d_lin, 0.7))
    return rows


def decay_setup(size=512, half_length=4.0):
    g = BoxGrid(2, (size, size), half_length)
    xi2 = g.xi_sq()
    mag = np.zeros(g.sizes)
    nz = xi2 > 0
    mag[nz] = xi2[nz] ** (-0.5)  # uhat = |xi|^{-1}: degree -2/(rho-1), rho=3
    u0 = inverse(SpectralField(g, mag.astype(complex)))
    # self-similar window: active scale R(t) = t^{-alpha/2} well inside the
    # resolved band, R in [60 xi_1, 0.44 xi_max]
    xi1 = math.pi / half_length
    ximax = (size // 2) * math.pi / half_length
    alpha = 1.5
    t_lo = (0.44 * ximax) ** (-2.0 / alpha)
    t_hi = (60.0 * xi1) ** (-2.0 / alpha)
    ts = np.geomspace(t_lo, t_hi, 15)
    return u0, ts


def suite_decay(rng):
    rows = []
    ok, exps, _ = validate_params(2, 1.5, 3.0, 3.0, 3.2, 0.0)
    rows.append(_row("decay_config_admissible", 0.0 if ok else 1.0, 0.0))
    u0, ts = decay_setup()
    model = ModelParams(alpha=1.5, rho=3.0, gamma_sign=0, nu=1.0)
    space = SpaceParams(p=3.0, q=3.2, mu=0.0)
    ts2, vals = linear_decay_curve(u0, model, ts, space)
    fit = decay_fit_curve(ts2, vals, exps)
    rows.append(_row("decay_slope_deviation", fit.rel_dev, 0.10))
    return rows


def suite_asymptotic(rng):
    rows = []
    ok, exps, _ = validate_params(2, 1.5, 3.0, 3.0, 3.2, 0.0)
    g = BoxGrid(2, (32, 32), 4.0)
    model = ModelParams(alpha=1.5, rho=3.0, gamma_sign=-1, nu=1.0)
    tgrid = TimeGrid(4.0, 32)
    space = SpaceParams(p=3.0, q=3.2, mu=0.0)
    u0 = gaussian(g, amplitude=0.1, width=0.8)
    xx, yy = g.meshgrid()
    bump = 0.05 * np.cos(8.0 * math.pi * xx / g.half_length) * np.exp(-(xx**2 + yy**2))
    v0 = GridFunction(g, u0.values + bump)
    out = asymptotic_equivalence_check(u0, v0, model, tgrid, space, exps, tol=1e-3)
    dfin = max(out["diff_besov"][-1], out["diff_morrey"][-1])
    lfin = max(out["lin_besov"][-1], out["lin_morrey"][-1])
    rows.append(_row("difference_final", dfin, 1e-3))
    rows.append(_row("linear_final", lfin, 1e-3))
    rows.append(_row("decay_together", 0.0 if out["equivalent"] else 1.0, 0.0))
    # gamma = 0: the nonlinear difference IS the linear flow of the data gap
    model0 = ModelParams(alpha=1.5, rho=3.0, gamma_sign=0, nu=1.0)
    out0 = asymptotic_equivalence_check(u0, v0, model0, tgrid, space, exps, tol=1e-3)
    gap = max(
        np.max(np.abs(out0["diff_besov"] - out0["lin_besov"])),
        np.max(np.abs(out0["diff_morrey"] - out0["lin_morrey"])),
    )
    rows.append(_row("linear_case_exact_match", gap, 1e-12))
    return rows


SUITES = {
    "mlf": suite_mlf,
    "propagator": suite_propagator,
    "norms": suite_norms,
    "contraction": suite_contraction,
    "symmetry": suite_symmetry,
    "selfsim": suite_selfsim,
    "decay": suite_decay,
    "asymptotic": suite_asymptotic,
}


def run_suites(names, seed=0, jobs=1, grid_size=None):
    """Run the named suites; returns list of (suite, VerdictRow).

    grid_size overrides the per-axis sample count of the norms suite (the
    exhaustive-oracle scans).
    """

    def call(name):
        rng = np.random.default_rng(seed)
        if name == "norms" and grid_size is not None:
            return SUITES[name](rng, grid_size=grid_size)
        return SUITES[name](rng)

    results = []
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for name, rows in zip(names, pool.map(call, names)):
                results.extend((name, r) for r in rows)
    else:
        for name in names:
            results.extend((name, r) for r in call(name))
    return results

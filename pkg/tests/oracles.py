"""Independent reference implementations used as test oracles.

These deliberately avoid the library's evaluation paths: extended-precision
series for the Mittag-Leffler functions, nested product quadrature for the
double Duhamel integral, a classical exponential integrator for the alpha=1
heat reduction, and exhaustive loops for the Morrey ball family.
"""

import itertools
import math

import mpmath as mp
import numpy as np
from numpy.polynomial.legendre import leggauss

from fhw.grid import GridFunction, dealias, forward
from fhw.norms import ball_radii_int
from fhw.solver import nonlinearity_eval


def ml_series_reference(alpha, b, x, min_terms=200):
    """E_{alpha,b}(-x) by extended-precision direct summation."""
    hump = x ** (1.0 / alpha) if x > 0 else 0.0
    mp.mp.dps = 40 + int(hump / 2.0)
    am, bm, xm = mp.mpf(repr(alpha)), mp.mpf(repr(b)), mp.mpf(repr(x))
    kmax = max(min_terms, int(3 * hump + 120))
    total = mp.mpf(0)
    for k in range(kmax):
        total += (-xm) ** k / mp.gamma(am * k + bm)
    return float(total)


def l_alpha_reference(alpha, x, b=1.0):
    """Branch-cut remainder by subtracting the pole pair at high precision."""
    hump = x ** (1.0 / alpha) if x > 0 else 0.0
    mp.mp.dps = 40 + int(hump / 2.0)
    am, bm, xm = mp.mpf(repr(alpha)), mp.mpf(repr(b)), mp.mpf(repr(x))
    kmax = max(200, int(3 * hump + 120))
    series = sum((-xm) ** k / mp.gamma(am * k + bm) for k in range(kmax))
    r = xm ** (1 / am)
    ang = mp.pi / am
    pole = (
        (2 / am)
        * xm ** ((1 - bm) / am)
        * mp.exp(r * mp.cos(ang))
        * mp.cos(r * mp.sin(ang) + mp.pi * (1 - bm) / am)
    )
    return float(series - pole)


def nested_duhamel_oracle(alpha, nu, lam, fvals, tgrid, npanel=64, nnode=32):
    """Direct product quadrature of the nested double Duhamel integral.

    Outer integral in s by panelized Gauss-Legendre; inner weakly singular
    integral of (s-tau)^{alpha-2} against the piecewise-linear forcing done
    with exact per-piece moments.
    """
    from fhw.special import ml_one

    tn, wn = leggauss(nnode)
    tn = 0.5 * (tn + 1.0)
    wn = 0.5 * wn
    t = float(tgrid.nodes[-1])
    dt = tgrid.dt
    ga = math.gamma(alpha - 1.0)

    def inner(s):
        acc = 0.0
        kmax = int(math.floor(s / dt + 1e-12))
        for j in range(kmax + 1):
            lo = j * dt
            hi = min((j + 1) * dt, s)
            if hi <= lo:
                continue
            fa = fvals[j]
            fb = fvals[min(j + 1, len(fvals) - 1)]
            u1 = s - lo
            u2 = s - hi
            m0 = (u1 ** (alpha - 1.0) - u2 ** (alpha - 1.0)) / (alpha - 1.0)
            m1 = u1 * m0 - (u1**alpha - u2**alpha) / alpha
            acc += fa * m0 + (fb - fa) / dt * m1
        return nu * acc / ga

    total = 0.0
    for j in range(npanel):
        lo = j * t / npanel
        hi = (j + 1) * t / npanel
        for tt, ww in zip(tn, wn):
            s = lo + (hi - lo) * tt
            total += ww * (hi - lo) * float(ml_one(alpha, (t - s) ** alpha * lam)) * inner(s)
    return total


def etd_heat_oracle(u0_vals, grid, model, tgrid, corrector=3):
    """Classical heat mild solution by exponential-integrator time stepping.

    Local variation-of-constants steps with linearly interpolated forcing
    (phi1/phi2 weights), fully independent of the global history solver.
    """
    lam = grid.xi_sq()
    dt = tgrid.dt
    z = lam * dt

    def phi1(z):
        zsafe = np.where(z == 0.0, 1.0, z)
        big = -np.expm1(-z) / zsafe
        small = 1.0 - z / 2.0 + z**2 / 6.0 - z**3 / 24.0
        return np.where(z > 1e-5, big, small)

    def phi2(z):
        small_mask = z < 0.1
        zs = np.where(small_mask, z, 1.0)
        ser = 0.5 - zs / 3.0 + zs**2 / 8.0 - zs**3 / 30.0 + zs**4 / 144.0
        zb = np.where(small_mask, 1.0, z)
        big = (z - 1.0 + np.exp(-z)) / zb**2
        return np.where(small_mask, ser, big)

    E = np.exp(-z)
    P1 = phi1(z)
    P2 = phi2(z)
    phase = grid._phase()
    vol = grid.cell_volume

    def fft(v):
        return vol * phase * np.fft.fftn(v)

    def ifft(c):
        return (np.fft.ifftn(c * phase) / vol).real

    def fhat(v):
        f = nonlinearity_eval(GridFunction(grid, v), model)
        F = forward(f)
        if float(model.rho).is_integer():
            F = dealias(F)
        return F.coeffs

    u = u0_vals.copy()
    states = [u.copy()]
    uh = fft(u)
    for _ in range(tgrid.nsteps):
        Fk = fhat(u)
        uh1 = E * uh + dt * model.nu * P1 * Fk
        u1 = ifft(uh1)
        for _ in range(corrector):
            Fk1 = fhat(u1)
            uh1 = E * uh + dt * model.nu * ((P1 - P2) * Fk + P2 * Fk1)
            u1 = ifft(uh1)
        uh = uh1
        u = u1
        states.append(u.copy())
    return states


def brute_force_morrey(f, p, mu, stride):
    """Exhaustive scan over all family centers and radii, dumbest loops."""
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


def beta_integral_reference(x, y):
    """B(x, y) by QUADPACK algebraic-weight quadrature of the defining integral."""
    from scipy.integrate import quad

    val, _ = quad(lambda t: 1.0, 0.0, 1.0, weight="alg", wvar=(x - 1.0, y - 1.0))
    return val

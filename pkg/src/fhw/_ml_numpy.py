"""Pure-numpy Mittag-Leffler kernels.

Evaluates E_{a,b}(-x) for x >= 0 and orders 1 <= a <= 2, via the power
series for small x and, for 1 < a <= 2, the pole/branch-cut decomposition

    E_{a,b}(-x) = (2/a) x^{(1-b)/a} exp(r cos(pi/a)) cos(r sin(pi/a)
                  + pi(1-b)/a) + l_{a,b}(x),      r = x^{1/a},

where l_{a,b} is a damped real integral along the branch cut:

    l_{a,b}(x) = (1/pi) int_0^inf e^{-s} s^{a-b}
                 [s^a sin(pi(1-b)) + x sin(pi(a+1-b))]
                 / (s^{2a} + 2 x s^a cos(a pi) + x^2) ds.

For b = 1 this is the classical remainder with the (1 - 2/a) value at x = 0;
for b = a it is the Duhamel forcing kernel.  Validity requires b < a + 1
(the cut integral is otherwise divergent at s = 0); the dispatch layer in
``special`` reduces larger b by the recurrence
E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z before calling in here.

The branch-cut integral is computed on panels [0, b1], [b1, b2], [b2, s0]
and a mapped tail, s0 = max(1, x^{1/a}), with a Gauss-Legendre ladder
doubling 64 -> 512 nodes until two levels agree.  The first panel uses the
power substitution s = b1 v^p, p = 2/(1 + a - b), which removes the
s^{a-b} endpoint cusp (for b = 1 the transformed integrand is analytic).
For large x the divergent asymptotic series sum_k (-1)^{k+1} x^{-k} /
Gamma(b - a k) is tried first and accepted only when it terminates below
1e-11 relative, so the expensive quadrature runs only where it is needed.

The numba twin in ``_ml_numba`` implements the same logic scalar-wise;
both must stay in lockstep.
"""

import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln

SERIES_KMAX = 400
QUAD_LEVELS = (64, 128, 256, 512)
ASYM_MIN_X = 60.0
ASYM_RTOL = 1e-11
ASYM_KMAX = 60
_CHUNK = 8192

# Gauss-Legendre ladders mapped to [0, 1].
_GL01 = {}
for _n in QUAD_LEVELS:
    _t, _w = leggauss(_n)
    _GL01[_n] = (0.5 * (_t + 1.0), 0.5 * _w)


def ml_series_arr(a, b, x, tol):
    """Compensated (Neumaier) summation of sum_k (-x)^k / Gamma(a k + b).

    Termination per element: |term| < tol * |partial| once k*a has passed
    the hump at x^(1/a); hard cap at SERIES_KMAX terms.
    """
    x = np.asarray(x, dtype=np.float64)
    invgb = math.exp(-math.lgamma(b))
    s = np.full(x.shape, invgb)
    comp = np.zeros_like(s)
    done = np.zeros(x.shape, dtype=bool)
    with np.errstate(divide="ignore"):
        lnx = np.log(x)
    hump = x ** (1.0 / a)
    sign = -1.0
    for k in range(1, SERIES_KMAX + 1):
        if done.all():
            break
        t = sign * np.exp(k * lnx - gammaln(a * k + b))
        t[done] = 0.0
        s_new = s + t
        swap = np.abs(s) >= np.abs(t)
        comp += np.where(swap, (s - s_new) + t, (t - s_new) + s)
        s = s_new
        total = s + comp
        done |= (np.abs(t) <= tol * np.abs(total)) & (k * a > hump)
        done |= np.abs(t) < 1e-300
        sign = -sign
    return s + comp


def _pole_arr(a, b, x):
    r = x ** (1.0 / a)
    ang = math.pi / a
    amp = (2.0 / a) * x ** ((1.0 - b) / a) * np.exp(r * math.cos(ang))
    return amp * np.cos(r * math.sin(ang) + math.pi * (1.0 - b) / a)


def _asym_arr(a, b, x):
    """Optimally truncated large-x expansion of l_{a,b}; (values, accepted).

    Terms with b - a k at a Gamma pole vanish identically and are skipped:
    they carry no information about convergence.
    """
    s = np.zeros_like(x)
    ok = np.zeros(x.shape, dtype=bool)
    active = np.ones(x.shape, dtype=bool)
    prev = np.full(x.shape, np.inf)
    lnx = np.log(x)
    for k in range(1, ASYM_KMAX + 1):
        z = b - a * k
        if abs(z - round(z)) < 1e-8:
            continue
        # 1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi, z < 0 here
        recip = math.sin(math.pi * z) / math.pi * math.exp(math.lgamma(1.0 - z))
        t = (-1.0) ** (k + 1) * np.exp(-k * lnx) * recip
        mag = np.abs(t)
        grew = active & (mag >= prev)
        active &= ~grew
        s = np.where(active, s + t, s)
        conv = active & (mag <= ASYM_RTOL * np.abs(s))
        ok |= conv
        active &= ~conv
        prev = np.where(active, mag, prev)
        if not active.any():
            break
    return s, ok


def _l_level(a, b, x, n):
    """One ladder level of the branch-cut integral, vectorized over x > 0."""
    xg, wg = _GL01[n]
    sin1 = math.sin(math.pi * (1.0 - b))
    sin2 = math.sin(math.pi * (a + 1.0 - b))
    cosap = math.cos(a * math.pi)
    xc = x[:, None]

    def sab(sm, pa):
        # s^{a-b} with the hot cases (b = 1, b = a) avoiding a second pow
        if b == 1.0:
            return pa / sm
        if b == a:
            return 1.0
        return sm ** (a - b)

    def core(sm):
        pa = sm**a
        num = np.exp(-sm) * sab(sm, pa) * (pa * sin1 + xc * sin2)
        den = pa * pa + 2.0 * xc * pa * cosap + xc * xc
        return num / den

    s0 = np.maximum(1.0, x ** (1.0 / a))
    b1 = np.minimum(8.0, s0)
    b2 = np.minimum(45.0, s0)
    total = np.zeros_like(x)

    # panel [0, b1], s = b1 v^p: integrand becomes v * e^{-s} N(s)/D(s)
    p = 2.0 / (1.0 + a - b)
    sm = b1[:, None] * xg[None, :] ** p
    pa = sm**a
    num = np.exp(-sm) * (pa * sin1 + xc * sin2)
    den = pa * pa + 2.0 * xc * pa * cosap + xc * xc
    total += b1 ** (a - b + 1.0) * p * ((xg * num / den) @ wg)

    for lo, hi in ((b1, b2), (b2, s0)):
        width = hi - lo
        sm = lo[:, None] + width[:, None] * xg[None, :]
        total += width * (core(sm) @ wg)

    # tail [s0, inf): s = s0 + u/(1-u)
    u = xg
    sm = s0[:, None] + (u / (1.0 - u))[None, :]
    jac = wg / (1.0 - u) ** 2
    total += core(sm) @ jac

    return total / math.pi


def _l_quad(a, b, x, tol):
    out = np.empty_like(x)
    active = np.arange(x.size)
    prev = None
    for n in QUAD_LEVELS:
        cur = _l_level(a, b, x[active], n)
        if prev is None:
            prev = cur
            continue
        okm = np.abs(cur - prev) <= tol * np.maximum(1.0, np.abs(cur))
        out[active[okm]] = cur[okm]
        active = active[~okm]
        prev = cur[~okm]
        if active.size == 0:
            break
    if active.size:
        out[active] = prev
    return out


def l_arr(a, b, x, tol):
    """Branch-cut remainder l_{a,b}(x) on an array of x > 0."""
    x = np.asarray(x, dtype=np.float64).ravel()
    out = np.empty_like(x)
    for lo in range(0, x.size, _CHUNK):
        xs = x[lo : lo + _CHUNK]
        res = np.empty_like(xs)
        need = np.ones(xs.shape, dtype=bool)
        big = xs >= ASYM_MIN_X
        if big.any():
            vals, ok = _asym_arr(a, b, xs[big])
            idx = np.flatnonzero(big)[ok]
            res[idx] = vals[ok]
            need[idx] = False
        if need.any():
            res[need] = _l_quad(a, b, xs[need], tol)
        out[lo : lo + _CHUNK] = res
    return out


def ml_decomp_arr(a, b, x, tol):
    x = np.asarray(x, dtype=np.float64)
    return _pole_arr(a, b, x) + l_arr(a, b, x, tol).reshape(x.shape)


def ml_arr(a, b, x, x_switch, series_tol, quad_tol):
    """E_{a,b}(-x) for 1 < a <= 2, 0 < b < a + 1, x >= 0 (array)."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    small = x <= x_switch
    if small.any():
        out[small] = ml_series_arr(a, b, x[small], series_tol)
    large = ~small
    if large.any():
        out[large] = ml_decomp_arr(a, b, x[large], quad_tol)
    return out

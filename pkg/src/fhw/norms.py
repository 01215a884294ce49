"""Discrete Morrey, Sobolev-Morrey and Besov-Morrey norm estimators.

The Morrey estimator takes a sup over a periodic ball family: centers on a
stride net, dyadic radii r = 2h, 4h, ... extended one step past the box
half-length to the covering radius (so that mu = 0 reduces exactly to the
global Lebesgue norm on the torus).  Ball membership is decided in integer
lattice units, so the included point set is exact and an exhaustive
brute-force scan over the same family reproduces the estimator bitwise.

Littlewood-Paley masks come from the standard exp(-1/t) annular bump,
normalized on the lattice so the dyadic sum is exactly one away from the
zero mode.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ModuloPolynomialsError, PreconditionError
from .grid import (
    BoxGrid,
    GridFunction,
    SpectralField,
    apply_symbol,
    forward,
    fractional_symbol,
    inverse,
)

DIRECT_WORK_LIMIT = 1 << 25  # centers * points threshold for the direct path


@dataclass(frozen=True)
class SpaceParams:
    """Ball family and Littlewood-Paley block range controls."""

    p: float = 2.0
    q: float = 2.0
    mu: float = 0.0
    s: float = None
    j_min: int = None
    j_max: int = None
    center_stride: int = None
    r_index: float = math.inf

    def __post_init__(self):
        if self.p < 1.0 or self.q < 1.0:
            raise DomainError("integrability exponents must be >= 1")
        if self.mu < 0.0:
            raise DomainError("mu must be nonnegative")


def default_center_stride(grid: BoxGrid) -> int:
    return 1 if grid.n == 1 else 2


def _require_cubic(grid: BoxGrid):
    if len(set(grid.sizes)) != 1:
        raise PreconditionError("ball-family norms require equal per-axis sizes")


def ball_radii_int(grid: BoxGrid):
    """Dyadic radii in lattice units, 2 -> first radius covering the torus."""
    _require_cubic(grid)
    half = grid.sizes[0] // 2
    max_d2 = grid.n * half * half
    radii = []
    r = 2
    while True:
        radii.append(r)
        if r * r > max_d2:
            break
        r *= 2
    return radii


def _offset_dist2_int(grid: BoxGrid):
    """Squared periodic lattice distance from the origin, integer units."""
    axes = []
    for i in range(grid.n):
        j = np.arange(grid.sizes[i])
        axes.append(np.minimum(j, grid.sizes[i] - j) ** 2)
    out = np.zeros(grid.sizes, dtype=np.int64)
    for i, ax in enumerate(axes):
        shape = [1] * grid.n
        shape[i] = grid.sizes[i]
        out = out + ax.reshape(shape)
    return out


@dataclass
class NormReport:
    kind: str
    value: float
    params: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)  # (radius, center_flat_index, value)
    block_values: dict = field(default_factory=dict)
    mean_removed: float = 0.0
    warning: str = None


def morrey_norm(f: GridFunction, p: float, mu: float, params: SpaceParams = None) -> NormReport:
    """sup over centers and radii of r^{-mu/p} ||f||_{L^p(ball)}, periodic balls."""
    grid = f.grid
    if p < 1.0:
        raise DomainError("p must be >= 1")
    if not 0.0 <= mu < grid.n:
        raise DomainError("mu must lie in [0, n)")
    vol = grid.cell_volume
    h = grid.spacings[0]

    if mu == 0.0:
        # covering ball == whole torus, so the sup is the global norm
        # (same elementwise summand as the ball path, for bitwise parity)
        value = float(np.sum(vol * np.abs(f.values) ** p) ** (1.0 / p))
        r_cov = ball_radii_int(f.grid)[-1] * h if len(set(grid.sizes)) == 1 else None
        rep = NormReport("morrey", value, {"p": p, "mu": mu})
        rep.witnesses = [(r_cov, 0, value)]
        return rep

    _require_cubic(grid)
    stride = params.center_stride if params and params.center_stride else default_center_stride(grid)
    radii = ball_radii_int(grid)
    w = vol * np.abs(f.values) ** p
    dist2 = _offset_dist2_int(grid)

    centers_per_axis = [np.arange(0, s, stride) for s in grid.sizes]
    ncenters = int(np.prod([c.size for c in centers_per_axis]))
    witnesses = []
    use_fft = ncenters * grid.npoints > DIRECT_WORK_LIMIT

    if use_fft:
        what = np.fft.fftn(w)
    for r_int in radii:
        mask = dist2 < r_int * r_int
        r = r_int * h
        weight = r ** (-mu / p)
        if use_fft:
            sums = np.fft.ifftn(what * np.conj(np.fft.fftn(mask.astype(np.float64)))).real
            sums = np.maximum(sums[np.ix_(*centers_per_axis)], 0.0)
            vals = weight * sums ** (1.0 / p)
            flat = np.argmax(vals)
            cidx = np.unravel_index(flat, vals.shape)
            center = tuple(int(centers_per_axis[i][cidx[i]]) for i in range(grid.n))
            best = float(vals[cidx])
        else:
            best = -1.0
            center = None
            for cflat in np.ndindex(*[c.size for c in centers_per_axis]):
                c = tuple(int(centers_per_axis[i][cflat[i]]) for i in range(grid.n))
                m = np.roll(mask, shift=c, axis=tuple(range(grid.n)))
                val = weight * float(np.sum(w[m]) ** (1.0 / p))
                if val > best:
                    best = val
                    center = c
        cflat_idx = int(np.ravel_multi_index(center, grid.sizes)) if center is not None else 0
        witnesses.append((r, cflat_idx, best))

    value = max(v for _, _, v in witnesses)
    rep = NormReport("morrey", value, {"p": p, "mu": mu, "stride": stride})
    rep.witnesses = witnesses
    return rep


def sobolev_morrey_norm(f: GridFunction, s: float, p: float, mu: float, params: SpaceParams = None) -> NormReport:
    """Morrey norm of (-Delta)^{s/2} f; s < 0 requires a mean-free field."""
    if s < 0.0 and abs(f.mean()) > 1e-10 * max(f.linf(), 1e-300):
        raise ModuloPolynomialsError("negative-order norm of a field with nonzero mean")
    g = inverse(apply_symbol(forward(f), fractional_symbol(f.grid, s)))
    rep = morrey_norm(g, p, mu, params)
    rep.kind = "sobolev-morrey"
    rep.params["s"] = s
    return rep


def _bump(t):
    out = np.zeros_like(t)
    inside = (t > 0.5) & (t < 2.0)
    ti = t[inside]
    out[inside] = np.exp(-1.0 / ((ti - 0.5) * (2.0 - ti)))
    return out


@dataclass
class LPPartition:
    """Dyadic annular partition of unity on the frequency lattice."""

    grid: BoxGrid
    j_min: int
    j_max: int
    masks: dict = field(default_factory=dict, repr=False)

    @classmethod
    def for_grid(cls, grid: BoxGrid, j_min: int = None, j_max: int = None):
        xi_min = math.pi / grid.half_length
        xi_max = math.sqrt(grid.n) * (max(grid.sizes) // 2) * math.pi / grid.half_length
        auto_lo = math.floor(math.log2(xi_min)) - 1
        auto_hi = math.ceil(math.log2(xi_max)) + 1
        # a range narrower than [auto_lo, auto_hi] is legal; norms computed
        # over it are lower bounds and besov_morrey_norm flags the deficit
        j_min = auto_lo if j_min is None else j_min
        j_max = auto_hi if j_max is None else j_max
        part = cls(grid, j_min, j_max)
        part._build()
        return part

    def _build(self):
        absxi = np.sqrt(self.grid.xi_sq())
        den = np.zeros(self.grid.sizes)
        num = {}
        for j in range(self.j_min, self.j_max + 1):
            num[j] = _bump(absxi * 2.0**-j)
            den += num[j]
        nz = den > 0.0
        for j, v in num.items():
            mask = np.zeros(self.grid.sizes)
            mask[nz] = v[nz] / den[nz]
            self.masks[j] = mask

    def residue(self) -> float:
        """Max |sum_j mask_j - 1| over covered lattice points xi != 0."""
        total = sum(self.masks.values())
        absxi = np.sqrt(self.grid.xi_sq())
        covered = (absxi > 2.0 ** (self.j_min - 1)) & (absxi < 2.0 ** (self.j_max + 1)) & (absxi > 0)
        if not covered.any():
            return 0.0
        return float(np.max(np.abs(total[covered] - 1.0)))


def lp_block(f: GridFunction, j: int, partition: LPPartition) -> GridFunction:
    if j not in partition.masks:
        raise PreconditionError(f"block {j} outside partition range")
    return inverse(apply_symbol(forward(f), partition.masks[j]))


def besov_morrey_norm(
    f: GridFunction,
    s: float,
    q: float,
    mu: float,
    r_index: float = math.inf,
    params: SpaceParams = None,
    partition: LPPartition = None,
) -> NormReport:
    """sup_j (or l^r sum) of 2^{js} ||phi_j * f||_{q,mu} on the mean-free part.

    The mean is removed and reported separately (S'/P surrogate); a warning
    flags spectral mass outside the covered annuli (value is a lower bound).
    """
    grid = f.grid
    if partition is None:
        j_min = params.j_min if params else None
        j_max = params.j_max if params else None
        partition = LPPartition.for_grid(grid, j_min, j_max)
    mean = f.mean()
    f0 = GridFunction(grid, f.values - mean)

    F = forward(f0)
    total_energy = float(np.sum(np.abs(F.coeffs) ** 2))
    covered = sum(partition.masks.values()) > 1e-12
    outside = float(np.sum(np.abs(F.coeffs[~covered]) ** 2))
    warning = None
    if total_energy > 0 and outside > 1e-12 * total_energy:
        warning = "spectral mass outside the covered annuli; value is a lower bound"

    block_values = {}
    field_scale = float(np.max(np.abs(F.coeffs)))
    for j, mask in sorted(partition.masks.items()):
        coeffs = F.coeffs * mask
        # blocks at transform-roundoff level carry no Hermitian structure
        if not np.any(np.abs(coeffs) > 1e-14 * field_scale):
            continue
        block = inverse(SpectralField(grid, coeffs))
        block_values[j] = 2.0 ** (j * s) * morrey_norm(block, q, mu, params).value

    if not block_values:
        value = 0.0
    elif math.isinf(r_index):
        value = max(block_values.values())
    else:
        value = float(sum(v**r_index for v in block_values.values()) ** (1.0 / r_index))
    rep = NormReport("besov-morrey", value, {"s": s, "q": q, "mu": mu, "r": r_index})
    rep.block_values = block_values
    rep.mean_removed = mean
    rep.warning = warning
    rep.witnesses = [(j, 0, v) for j, v in block_values.items()]
    return rep


def check_holder(f: GridFunction, g: GridFunction, p1, mu1, p2, mu2, params: SpaceParams = None):
    """Both sides of ||fg||_{p3,mu3} <= ||f||_{p1,mu1} ||g||_{p2,mu2}.

    p3, mu3 follow from 1/p3 = 1/p1 + 1/p2 and mu3/p3 = mu1/p1 + mu2/p2;
    returns (lhs, rhs, pass) with a 1e-9 slack.
    """
    if f.grid != g.grid:
        raise PreconditionError("fields must share a grid")
    inv_p3 = 1.0 / p1 + 1.0 / p2
    p3 = 1.0 / inv_p3
    if p3 < 1.0:
        raise DomainError(f"derived exponent p3={p3} < 1 (conjugate pair unsupported)")
    mu3 = p3 * (mu1 / p1 + mu2 / p2)
    if mu3 >= f.grid.n:
        raise DomainError(f"derived mu3={mu3} outside [0, n)")
    fg = GridFunction(f.grid, f.values * g.values)
    lhs = morrey_norm(fg, p3, mu3, params).value
    rhs = morrey_norm(f, p1, mu1, params).value * morrey_norm(g, p2, mu2, params).value
    return lhs, rhs, lhs <= rhs * (1.0 + 1e-9)


def xqp_norm(traj, space: SpaceParams, exponents) -> float:
    """Discrete solution-space norm: sup_t ||u||_{N^sigma_{p,mu,inf}} + sup_t t^eta ||u||_{M_{q,mu}}.

    Suprema run over the positive-time nodes of the trajectory.
    """
    grid = traj.states[0].grid
    partition = LPPartition.for_grid(grid, space.j_min, space.j_max)
    sup_besov = 0.0
    sup_morrey = 0.0
    for k in range(1, len(traj.states)):
        t = float(traj.tgrid.nodes[k])
        u = traj.states[k]
        b = besov_morrey_norm(u, exponents.sigma, space.p, space.mu, math.inf, space, partition).value
        m = morrey_norm(u, space.q, space.mu, space).value
        sup_besov = max(sup_besov, b)
        sup_morrey = max(sup_morrey, t**exponents.eta * m)
    return sup_besov + sup_morrey


def write_norm_reports(path, reports, config_hash=""):
    """CSV report: (kind, s, p, q, mu, r, value, j_or_radius_witness)."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# config_hash={config_hash}\n")
        writer = csv.writer(fh)
        writer.writerow(["kind", "s", "p", "q", "mu", "r", "value", "j_or_radius_witness"])
        for rep in reports:
            prm = rep.params
            best = max(rep.witnesses, key=lambda wit: wit[2])[0] if rep.witnesses else ""
            writer.writerow(
                [
                    rep.kind,
                    prm.get("s", ""),
                    prm.get("p", ""),
                    prm.get("q", ""),
                    prm.get("mu", ""),
                    prm.get("r", ""),
                    repr(rep.value),
                    best,
                ]
            )

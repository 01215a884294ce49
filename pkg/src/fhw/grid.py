"""Periodic box discretization, scaled DFT, multipliers, dealiasing, file io.

Conventions: the box is [-L, L)^n sampled on a regular lattice, and the
discrete transform approximates the continuum Fourier integral,

    forward(f)(xi_k) = h^n sum_j e^{-i xi_k . x_j} f(x_j),
    xi_k = (pi / L) k,   k in [-N/2, N/2)^n,

so a mass-one function has coefficient 1 at xi = 0 and continuum multiplier
symbols apply unchanged.  Fields are immutable after construction; every
operation returns a new field.
"""

import logging
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, DomainError, MultiplierError, PreconditionError

log = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-8
FHWG_MAGIC = b"FHWG"
FHWG_VERSION = 1


def _is_pow2(k: int) -> bool:
    return k >= 1 and (k & (k - 1)) == 0


@dataclass(frozen=True)
class BoxGrid:
    """Cubic periodic box [-L, L)^n with per-axis sample counts."""

    n: int
    sizes: tuple
    half_length: float

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise DomainError("spatial dimension must be 1, 2 or 3")
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if len(sizes) != self.n:
            raise DomainError("sizes must have one entry per dimension")
        for s in sizes:
            if not _is_pow2(s) or s < 8:
                raise DomainError("sizes must be powers of two with at least 8 samples")
        if not self.half_length > 0.0:
            raise DomainError("half_length must be positive")

    @property
    def spacings(self):
        return tuple(2.0 * self.half_length / s for s in self.sizes)

    @property
    def cell_volume(self):
        v = 1.0
        for h in self.spacings:
            v *= h
        return v

    @property
    def npoints(self):
        p = 1
        for s in self.sizes:
            p *= s
        return p

    def axis(self, i):
        h = self.spacings[i]
        return -self.half_length + h * np.arange(self.sizes[i])

    def meshgrid(self):
        return np.meshgrid(*[self.axis(i) for i in range(self.n)], indexing="ij")

    def k_int_axis(self, i):
        s = self.sizes[i]
        return np.rint(np.fft.fftfreq(s) * s).astype(np.int64)

    def xi_axis(self, i):
        return (np.pi / self.half_length) * self.k_int_axis(i)

    def xi_meshgrid(self):
        return np.meshgrid(*[self.xi_axis(i) for i in range(self.n)], indexing="ij")

    def xi_sq(self):
        out = np.zeros(self.sizes)
        for i in range(self.n):
            ax = self.xi_axis(i) ** 2
            shape = [1] * self.n
            shape[i] = self.sizes[i]
            out = out + ax.reshape(shape)
        return out

    def _phase(self):
        # e^{i pi k} = (-1)^k per axis, from the -L grid offset
        out = np.ones(self.sizes)
        for i in range(self.n):
            ph = np.where(self.k_int_axis(i) % 2 == 0, 1.0, -1.0)
            shape = [1] * self.n
            shape[i] = self.sizes[i]
            out = out * ph.reshape(shape)
        return out


@dataclass(frozen=True)
class GridFunction:
    """Real samples on a BoxGrid (row-major layout)."""

    grid: BoxGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != tuple(self.grid.sizes):
            raise DomainError(f"values shape {vals.shape} != grid sizes {self.grid.sizes}")
        if not np.all(np.isfinite(vals)):
            raise DomainError("values must be finite")
        object.__setattr__(self, "values", vals)

    def mean(self):
        return float(self.values.mean())

    def l2(self):
        return float(np.sqrt(self.grid.cell_volume * np.sum(self.values**2)))

    def linf(self):
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True)
class SpectralField:
    """Complex Fourier coefficients on the frequency lattice (fft layout)."""

    grid: BoxGrid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != tuple(self.grid.sizes):
            raise DomainError(f"coeffs shape {c.shape} != grid sizes {self.grid.sizes}")
        object.__setattr__(self, "coeffs", c)

    def norm(self):
        return float(np.max(np.abs(self.coeffs)))


def forward(f: GridFunction) -> SpectralField:
    """Scaled DFT approximating the continuum Fourier transform.

    The output is symmetrized to exact Hermitian symmetry (real input), so
    multiplier chains stay exactly symmetric down to the roundoff floor.
    """
    g = f.grid
    coeffs = g.cell_volume * g._phase() * np.fft.fftn(f.values)
    idx = [(-np.arange(s)) % s for s in g.sizes]
    coeffs = 0.5 * (coeffs + np.conj(coeffs[np.ix_(*idx)]))
    return SpectralField(g, coeffs)


def hermitian_defect(F: SpectralField) -> float:
    """Max |coeff(-k) - conj(coeff(k))| over the lattice."""
    c = F.coeffs
    idx = [(-np.arange(s)) % s for s in F.grid.sizes]
    rev = c[np.ix_(*idx)]
    return float(np.max(np.abs(rev - np.conj(c))))


def inverse(F: SpectralField, check: bool = True) -> GridFunction:
    """Exact inverse of ``forward``; reports and discards the imaginary residue."""
    g = F.grid
    scale = F.norm()
    if check and scale > 0.0:
        defect = hermitian_defect(F)
        if defect > HERMITIAN_TOL * scale:
            raise ConsistencyError(
                f"Hermitian symmetry violated: defect {defect:.3e} vs scale {scale:.3e}"
            )
    vals = np.fft.ifftn(F.coeffs * g._phase()) / g.cell_volume
    residue = float(np.max(np.abs(vals.imag))) if scale > 0.0 else 0.0
    if residue > 1e-10 * scale:
        log.debug("inverse: imaginary residue %.3e (field scale %.3e)", residue, scale)
    return GridFunction(g, vals.real)


def apply_multiplier(F: SpectralField, m) -> SpectralField:
    """coeff'(k) = m(xi_k) coeff(k); m is called on the xi meshgrid arrays."""
    g = F.grid
    sym = np.asarray(m(*g.xi_meshgrid()), dtype=np.float64)
    return apply_symbol(F, sym)


def apply_symbol(F: SpectralField, sym: np.ndarray) -> SpectralField:
    """Multiplier application from a precomputed symbol table."""
    g = F.grid
    sym = np.broadcast_to(sym, tuple(g.sizes))
    bad = np.isnan(sym)
    if bad.any():
        where = np.argwhere(bad)[0]
        xi = tuple(g.xi_axis(i)[where[i]] for i in range(g.n))
        raise MultiplierError(f"multiplier produced NaN at xi={xi}", xi=xi)
    return SpectralField(g, F.coeffs * sym)


def fractional_symbol(grid: BoxGrid, s: float) -> np.ndarray:
    """|xi|^s on the lattice; the zero mode maps to 0 for s != 0.

    For s < 0 the result is only defined modulo polynomials (the caller is
    responsible for checking the mean); for s = 0 this is the identity.
    """
    if s == 0.0:
        return np.ones(grid.sizes)
    xi2 = grid.xi_sq()
    out = np.zeros(grid.sizes)
    nz = xi2 > 0.0
    out[nz] = xi2[nz] ** (0.5 * s)
    return out


def dealias(F: SpectralField) -> SpectralField:
    """2/3-rule mask: zero every coefficient with any |k| > N/3; idempotent."""
    g = F.grid
    keep = np.ones(g.sizes, dtype=bool)
    for i in range(g.n):
        k = np.abs(g.k_int_axis(i))
        shape = [1] * g.n
        shape[i] = g.sizes[i]
        keep &= (k <= g.sizes[i] // 3).reshape(shape)
    return SpectralField(g, np.where(keep, F.coeffs, 0.0))


def apply_signed_permutation(f: GridFunction, M: np.ndarray) -> GridFunction:
    """Compose a grid function with a signed permutation matrix: (f o M)(x) = f(Mx).

    M must have exactly one +-1 entry per row and column (axis reflections
    and coordinate swaps), which maps the periodic lattice onto itself.
    """
    g = f.grid
    M = np.asarray(M, dtype=np.int64)
    if M.shape != (g.n, g.n):
        raise PreconditionError("matrix shape must match the grid dimension")
    if np.any(np.sum(np.abs(M), axis=0) != 1) or np.any(np.sum(np.abs(M), axis=1) != 1):
        raise PreconditionError("matrix must be a signed permutation")
    perm = [int(np.flatnonzero(M[i])[0]) for i in range(g.n)]
    signs = [int(M[i, perm[i]]) for i in range(g.n)]
    for i in range(g.n):
        if g.sizes[i] != g.sizes[perm[i]]:
            raise PreconditionError("axis swap requires equal sample counts")
    # out[j] = f[m(j)] with m_i = s_i-signed index of j_{perm[i]}:
    # remap signs per axis first, then permute axes
    idx = []
    for i in range(g.n):
        j = np.arange(g.sizes[i])
        idx.append(j if signs[i] == 1 else (-j) % g.sizes[i])
    remapped = f.values[np.ix_(*idx)]
    out = np.transpose(remapped, axes=perm)
    return GridFunction(g, out)


def write_grid_function(path, f: GridFunction) -> None:
    """FHWG binary: magic, version u32, n u32, sizes n*u32, L f64, values f64 LE."""
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(FHWG_MAGIC)
        fh.write(struct.pack("<I", FHWG_VERSION))
        fh.write(struct.pack("<I", g.n))
        fh.write(struct.pack(f"<{g.n}I", *g.sizes))
        fh.write(struct.pack("<d", g.half_length))
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_grid_function(path) -> GridFunction:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != FHWG_MAGIC:
            raise ConsistencyError(f"bad magic {magic!r}, expected {FHWG_MAGIC!r}")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != FHWG_VERSION:
            raise ConsistencyError(f"unsupported FHWG version {version}")
        (n,) = struct.unpack("<I", fh.read(4))
        sizes = struct.unpack(f"<{n}I", fh.read(4 * n))
        (half_length,) = struct.unpack("<d", fh.read(8))
        grid = BoxGrid(n, sizes, half_length)
        count = grid.npoints
        vals = np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(sizes)
        return GridFunction(grid, vals.copy())

"""Named initial-data generators for runs and tests."""

import numpy as np

from .analysis import homogeneous_data
from .errors import DomainError
from .grid import BoxGrid, GridFunction, read_grid_function


def gaussian(grid: BoxGrid, amplitude=1.0, width=1.0, center=None) -> GridFunction:
    mesh = grid.meshgrid()
    if center is None:
        center = [0.0] * grid.n
    r2 = sum((x - c) ** 2 for x, c in zip(mesh, center))
    return GridFunction(grid, amplitude * np.exp(-r2 / (2.0 * width**2)))


def sine(grid: BoxGrid, amplitude=1.0, modes=None) -> GridFunction:
    """Product of sin(pi k_i x_i / L) per axis; odd under each axis reflection."""
    if modes is None:
        modes = [1] * grid.n
    mesh = grid.meshgrid()
    out = np.full(grid.sizes, amplitude)
    for x, k in zip(mesh, modes):
        out = out * np.sin(np.pi * k * x / grid.half_length)
    return GridFunction(grid, out)


def cosine(grid: BoxGrid, amplitude=1.0, modes=None) -> GridFunction:
    if modes is None:
        modes = [1] * grid.n
    mesh = grid.meshgrid()
    out = np.full(grid.sizes, amplitude)
    for x, k in zip(mesh, modes):
        out = out * np.cos(np.pi * k * x / grid.half_length)
    return GridFunction(grid, out)


def indicator(grid: BoxGrid, amplitude=1.0, radius=1.0) -> GridFunction:
    mesh = grid.meshgrid()
    r2 = sum(x**2 for x in mesh)
    return GridFunction(grid, amplitude * (r2 < radius**2).astype(np.float64))


def broadband(grid: BoxGrid, degree: float, amplitude=1.0, seed=None) -> GridFunction:
    """Field with power-law spectrum |xi|^{degree - n}: discretely homogeneous data.

    degree = -2/(rho-1) gives the self-similar scaling class.  With seed=None
    the phases are all +1 (a radial profile); otherwise random signs.
    """
    from .grid import SpectralField, inverse

    xi2 = grid.xi_sq()
    mag = np.zeros(grid.sizes)
    nz = xi2 > 0
    # u ~ |x|^{degree} pairs with uhat ~ |xi|^{-degree - n}
    mag[nz] = xi2[nz] ** (-0.5 * (degree + grid.n))
    if seed is not None:
        rng = np.random.default_rng(seed)
        signs = np.where(rng.random(grid.sizes) < 0.5, -1.0, 1.0)
        signs_sym = 0.5 * (signs + signs[np.ix_(*[(-np.arange(s)) % s for s in grid.sizes])])
        mag = mag * np.where(signs_sym == 0.0, 1.0, np.sign(signs_sym))
    return inverse(SpectralField(grid, amplitude * mag.astype(np.complex128)))


GENERATORS = {
    "gaussian": gaussian,
    "sine": sine,
    "cosine": cosine,
    "indicator": indicator,
    "homogeneous": lambda grid, amplitude=1.0, rho=3.0, moll_scale=None: homogeneous_data(
        grid, rho, amplitude, moll_scale
    ),
    "broadband": broadband,
}


def make_initial_data(kind: str, grid: BoxGrid, **kwargs) -> GridFunction:
    if kind == "file":
        path = kwargs.get("path")
        if path is None:
            raise DomainError("file data requires a 'path'")
        f = read_grid_function(path)
        if tuple(f.grid.sizes) != tuple(grid.sizes) or f.grid.half_length != grid.half_length:
            raise DomainError("file grid does not match the run grid")
        return f
    try:
        gen = GENERATORS[kind]
    except KeyError:
        raise DomainError(f"unknown initial data kind {kind!r}") from None
    return gen(grid, **kwargs)

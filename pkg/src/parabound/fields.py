"""Field generators for the verification suites.

Random fields are built from a fixed number of low-order Fourier modes
whose coefficients are drawn once from a seeded generator, so the same
seed evaluates the same continuous function on any grid resolution.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid, SpaceTimeField


def zero_field(grid: Grid) -> SpaceTimeField:
    return SpaceTimeField(grid, np.zeros(grid.shape), nonneg=True)


def constant_field(grid: Grid, c: float) -> SpaceTimeField:
    return SpaceTimeField(grid, np.full(grid.shape, float(c)),
                          nonneg=bool(c >= 0))


def hat_field(grid: Grid, amplitude: float = 1.0,
              width: float | None = None) -> SpaceTimeField:
    """Tensor hat profile amplitude * prod_d max(0, 1 - |x_d|/width)
    times the temporal hat max(0, 1 - |t|/t_half).  Vanishes on the
    lateral boundary; kinks sit on grid nodes whenever width is a
    multiple of h."""
    if width is None:
        width = grid.extent
    x = grid.x_axis()
    hat_x = np.maximum(0.0, 1.0 - np.abs(x) / width)
    hat_t = np.maximum(0.0, 1.0 - np.abs(grid.t_axis()) / grid.t_half)
    if grid.dim == 1:
        vals = amplitude * hat_x[:, None] * hat_t[None, :]
    else:
        vals = amplitude * hat_x[:, None, None] * hat_x[None, :, None] \
            * hat_t[None, None, :]
    return SpaceTimeField(grid, vals, nonneg=bool(amplitude >= 0))


def bump_field(grid: Grid, amplitude: float = 1.0,
               width: float | None = None) -> SpaceTimeField:
    """Smooth cosine bump peaked at the space-time origin."""
    if width is None:
        width = 0.75 * grid.extent
    r = grid.radius()
    prof = np.where(r < width, 0.5 * (1.0 + np.cos(np.pi * r / width)), 0.0)
    tprof = 0.5 * (1.0 + np.cos(np.pi * grid.t_axis() / grid.t_half))
    vals = amplitude * prof[..., None] * tprof
    return SpaceTimeField(grid, vals, nonneg=bool(amplitude >= 0))


def _mode_sum(grid: Grid, amps: np.ndarray, freqs: np.ndarray,
              phases: np.ndarray, tfreqs: np.ndarray,
              tphases: np.ndarray, basis: str) -> np.ndarray:
    """Superpose len(amps) separable modes.  basis='sin' uses
    sin(pi f (x+L)/(2L)) factors that vanish at x = -L and, for integer
    f, at x = +L as well; basis='cos' uses free cosines."""
    L, Th = grid.extent, grid.t_half
    x = grid.x_axis()
    t = grid.t_axis()
    out = np.zeros(grid.shape)
    for m in range(len(amps)):
        if basis == "sin":
            fac_x = np.sin(np.pi * freqs[m, 0] * (x + L) / (2 * L))
        else:
            fac_x = np.cos(np.pi * freqs[m, 0] * x / L + phases[m, 0])
        mode = fac_x
        if grid.dim == 2:
            if basis == "sin":
                fac_y = np.sin(np.pi * freqs[m, 1] * (x + L) / (2 * L))
            else:
                fac_y = np.cos(np.pi * freqs[m, 1] * x / L + phases[m, 1])
            mode = mode[:, None] * fac_y[None, :]
        fac_t = np.cos(np.pi * tfreqs[m] * t / Th + tphases[m])
        out += amps[m] * mode[..., None] * fac_t
    return out


def random_nonneg(grid: Grid, rng: np.random.Generator,
                  amplitude: float = 1.0, modes: int = 4) -> SpaceTimeField:
    """Non-negative random field: a positive offset plus bounded cosine
    modes, clipped at zero for safety.  Resolution-independent for a
    fixed generator state."""
    amps = amplitude * rng.uniform(0.05, 0.4, size=modes)
    freqs = rng.integers(1, 4, size=(modes, 2)).astype(float)
    phases = rng.uniform(0, 2 * np.pi, size=(modes, 2))
    tfreqs = rng.integers(0, 3, size=modes).astype(float)
    tphases = rng.uniform(0, 2 * np.pi, size=modes)
    offset = amplitude * rng.uniform(0.4, 1.0)
    vals = offset + _mode_sum(grid, amps, freqs, phases, tfreqs, tphases,
                              "cos")
    return SpaceTimeField(grid, np.maximum(vals, 0.0), nonneg=True)


def random_zero_lateral(grid: Grid, rng: np.random.Generator,
                        amplitude: float = 1.0,
                        modes: int = 4) -> SpaceTimeField:
    """Random field vanishing identically on the lateral boundary
    (integer sine modes), for embedding-constant fits."""
    amps = amplitude * rng.uniform(-0.5, 0.5, size=modes)
    freqs = rng.integers(1, 5, size=(modes, 2)).astype(float) * 2.0
    phases = np.zeros((modes, 2))
    tfreqs = rng.integers(0, 3, size=modes).astype(float)
    tphases = rng.uniform(0, 2 * np.pi, size=modes)
    vals = _mode_sum(grid, amps, freqs, phases, tfreqs, tphases, "sin")
    return SpaceTimeField(grid, vals)


def smooth_positive_initial(grid: Grid, amplitude: float = 1.0) -> np.ndarray:
    """Deterministic smooth positive initial slice for solver scenarios:
    an offset cosine bump, strictly positive up to the boundary."""
    r = grid.radius()
    prof = np.cos(0.5 * np.pi * np.clip(r / grid.extent, 0.0, 1.0))
    return amplitude * (0.25 + 0.75 * prof)

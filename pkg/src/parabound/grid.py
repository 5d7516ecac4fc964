"""Uniform space-time tensor grids and discrete scalar fields.

Grids are centered at the origin: the spatial axis runs over
[-extent, extent] with nx nodes per axis (nx odd, so x = 0 is a node)
and the time axis runs symmetrically over [-t_half, t_half] with nt
nodes, t_half = (nt - 1) * dt / 2.

Field values are stored with shape (nx,) * dim + (nt,), so values[..., m]
is the spatial slice at time index m.
"""

from __future__ import annotations

import csv
import io
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionError

# binary layout: dim, nx, nt as little-endian int64, then extent, dt as
# little-endian float64, then the values row-major as float64
_HEADER = struct.Struct("<3q2d")


@dataclass(frozen=True)
class Grid:
    dim: int
    extent: float
    nx: int
    nt: int
    dt: float

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise DimensionError(f"dim must be 1 or 2, got {self.dim}")
        if self.nx < 3 or self.nx % 2 == 0:
            raise ConfigError(f"nx must be odd and >= 3, got {self.nx}")
        if self.nt < 2:
            raise ConfigError(f"nt must be >= 2, got {self.nt}")
        if not (self.dt > 0 and self.extent > 0):
            raise ConfigError("dt and extent must be positive")

    @property
    def h(self) -> float:
        return 2.0 * self.extent / (self.nx - 1)

    @property
    def t_half(self) -> float:
        return 0.5 * (self.nt - 1) * self.dt

    @property
    def shape(self) -> tuple:
        return (self.nx,) * self.dim + (self.nt,)

    @property
    def node_weight(self) -> float:
        # midpoint-rule weight of one space-time node
        return self.h ** self.dim * self.dt

    def x_axis(self) -> np.ndarray:
        return np.linspace(-self.extent, self.extent, self.nx)

    def t_axis(self) -> np.ndarray:
        return np.linspace(-self.t_half, self.t_half, self.nt)

    def radius(self) -> np.ndarray:
        """Euclidean distance of every spatial node from the origin."""
        x = self.x_axis()
        if self.dim == 1:
            return np.abs(x)
        xx, yy = np.meshgrid(x, x, indexing="ij")
        return np.sqrt(xx * xx + yy * yy)

    def refine(self) -> "Grid":
        """Halve h and dt (doubles the resolution, same physical box)."""
        return Grid(self.dim, self.extent, 2 * self.nx - 1,
                    2 * self.nt - 1, 0.5 * self.dt)


@dataclass(frozen=True)
class SpaceTimeField:
    grid: Grid
    values: np.ndarray
    nonneg: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != self.grid.shape:
            raise ConfigError(
                f"values shape {vals.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ConfigError("field contains non-finite values")
        if self.nonneg and vals.min() < 0:
            raise ConfigError(f"field flagged non-negative has min {vals.min()}")
        object.__setattr__(self, "values", vals)

    def spatial_gradient(self) -> list:
        """One array per spatial axis: centered differences at interior
        nodes, one-sided at the boundary."""
        g = self.grid
        return [np.gradient(self.values, g.h, axis=d, edge_order=1)
                for d in range(g.dim)]

    def grad_magnitude(self) -> np.ndarray:
        comps = self.spatial_gradient()
        out = comps[0] ** 2
        for c in comps[1:]:
            out += c ** 2
        return np.sqrt(out)

    def time_derivative(self) -> np.ndarray:
        return np.gradient(self.values, self.grid.dt, axis=-1, edge_order=1)

    # ---- serialization -------------------------------------------------

    def to_bytes(self) -> bytes:
        g = self.grid
        head = _HEADER.pack(g.dim, g.nx, g.nt, g.extent, g.dt)
        return head + np.ascontiguousarray(self.values, dtype="<f8").tobytes()

    @classmethod
    def from_bytes(cls, raw: bytes) -> "SpaceTimeField":
        dim, nx, nt, extent, dt = _HEADER.unpack_from(raw, 0)
        grid = Grid(dim, extent, nx, nt, dt)
        count = nx ** dim * nt
        vals = np.frombuffer(raw, dtype="<f8", count=count,
                             offset=_HEADER.size).reshape(grid.shape)
        vals = np.array(vals, dtype=np.float64)
        return cls(grid, vals, nonneg=bool(vals.min() >= 0))

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "SpaceTimeField":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())

    def to_csv(self) -> str:
        """Row-per-node CSV for small grids; first row is the header
        metadata, then index columns plus the value."""
        g = self.grid
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["dim", "nx", "nt", "extent", "dt"])
        w.writerow([g.dim, g.nx, g.nt, repr(g.extent), repr(g.dt)])
        idx_cols = ["ix", "iy"][: g.dim] + ["it", "value"]
        w.writerow(idx_cols)
        for idx in np.ndindex(g.shape):
            w.writerow(list(idx) + [repr(float(self.values[idx]))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SpaceTimeField":
        rows = list(csv.reader(io.StringIO(text)))
        dim, nx, nt = (int(v) for v in rows[1][:3])
        extent, dt = float(rows[1][3]), float(rows[1][4])
        grid = Grid(dim, extent, nx, nt, dt)
        vals = np.empty(grid.shape)
        for row in rows[3:]:
            if not row:
                continue
            idx = tuple(int(v) for v in row[:-1])
            vals[idx] = float(row[-1])
        return cls(grid, vals, nonneg=bool(vals.min() >= 0))

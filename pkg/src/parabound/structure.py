"""Structure parameters of the nonlinearity c(x,t)|grad u|^(p-2) grad u
and the exponent bookkeeping shared by the estimate machinery."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AdmissibilityError, ConfigError, DimensionError


def sobolev_q(p: float, n_dim: int) -> float:
    """Integrability exponent q = p(N+2)/N gained from the embedding of
    L^inf(L^2) intersect L^p(W^{1,p})."""
    return p * (n_dim + 2) / n_dim


def default_eps0(n_dim: int) -> float:
    """Gap exponent 4/(N+2): keeps q > p + eps0 for every p > 2N/(N+2)
    while p + eps0 > 2 holds on the same range."""
    return 4.0 / (n_dim + 2)


def second_eps0(n_dim: int) -> float:
    """Gap exponent 2/(N+1) used by the expanding-cylinder iteration;
    valid for p > 2N/(N+1)."""
    return 2.0 / (n_dim + 1)


def eps0_window_ok(p: float, n_dim: int, eps0: float) -> bool:
    """Admissibility of the gap exponent: q > p + eps0 and p + eps0 > 2."""
    return sobolev_q(p, n_dim) > p + eps0 and p + eps0 > 2.0


@dataclass(frozen=True)
class StructureParams:
    n_dim: int
    p: float
    eps0: float
    lambda0: float = 1.0
    lambda1: float = 1.0

    def __post_init__(self):
        if self.n_dim not in (1, 2):
            raise DimensionError(f"n_dim must be 1 or 2, got {self.n_dim}")
        if self.p <= 1:
            raise ConfigError(f"p must exceed 1, got {self.p}")
        if not (0 < self.lambda0 <= self.lambda1):
            raise ConfigError("need 0 < lambda0 <= lambda1")
        if self.eps0 < 0:
            raise ConfigError(f"eps0 must be >= 0, got {self.eps0}")

    @property
    def q(self) -> float:
        return sobolev_q(self.p, self.n_dim)

    @property
    def admissible(self) -> bool:
        return eps0_window_ok(self.p, self.n_dim, self.eps0)

    def require_admissible(self) -> None:
        if not self.admissible:
            raise AdmissibilityError(
                f"eps0={self.eps0} outside window for p={self.p}, "
                f"N={self.n_dim}: need q={self.q} > p+eps0={self.p + self.eps0} > 2")

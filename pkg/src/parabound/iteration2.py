"""Second iteration over expanding cylinders: sup-recursion constants,
the resulting improved bound, the classical degenerate/singular
comparators with their 1/|p-2| blowup, and the admissible-eps0 window
analysis with its quadratic root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cylinders import (Cylinder, ExpandSchedule, average, scale_factor_A,
                        sup_over)
from .degiorgi import BoundReport
from .errors import ConfigError, RangeError
from .grid import SpaceTimeField
from .structure import second_eps0, sobolev_q


@dataclass(frozen=True)
class SecondIterationConstants:
    """Constants of the sup recursion M_n <= eta M_{n+1} + bb d^{n+1}."""

    d: float
    eta: float
    bb: float
    mu: float
    nu: float

    def __post_init__(self):
        if not (self.nu < 1):
            raise ConfigError("need nu < 1")
        if not (0 < self.eta < 1):
            raise ConfigError("need eta in (0,1)")
        if not (self.d > 1):
            raise ConfigError("need d > 1")


def second_exponents(p: float, N: int, eps0: float | None = None):
    """(mu, nu, d, eta) with mu = p/(N(q-(p+eps0))),
    nu = eps0 p/(N(q-(p+eps0))), d = 2^{p(N+p)/(N(q-(p+eps0))-eps0 p)},
    and eta chosen so eta*d = 1/2 exactly."""
    if eps0 is None:
        eps0 = second_eps0(N)
    q = sobolev_q(p, N)
    gap = N * (q - (p + eps0))
    if gap <= 0:
        raise RangeError(f"need q > p + eps0, got q={q}, p+eps0={p + eps0}")
    mu = p / gap
    nu = eps0 * p / gap
    if nu >= 1:
        raise RangeError(f"need eps0 p < N(q-(p+eps0)), got nu={nu}")
    d = 2.0 ** (p * (N + p) / (gap - eps0 * p))
    eta = 0.5 / d
    return mu, nu, d, eta


def bb_display(avg_p: float, p: float, N: int, sigma: float, rho: float,
               theta: float, C: float = 1.0,
               eps0: float | None = None) -> float:
    """The closed-form driving constant of the sup recursion:
    eta^{-nu/(1-nu)} [C A^mu / (sigma^{mu(N+1)} (1-sigma)^{mu(N+p)})
    avg_p^mu]^{1/(1-nu)}."""
    if avg_p < 0:
        raise ConfigError("moment average must be >= 0")
    mu, nu, d, eta = second_exponents(p, N, eps0)
    a_cap = scale_factor_A(rho, theta, N, p)
    bracket = C * a_cap ** mu * avg_p ** mu \
        / (sigma ** (mu * (N + 1)) * (1.0 - sigma) ** (mu * (N + p)))
    return eta ** (-nu / (1.0 - nu)) * bracket ** (1.0 / (1.0 - nu))


def eps0_admissible(p: float, N: int, eps0: float):
    """Three admissibility flags for the moment gap eps0: positivity of
    p+eps0-2, of 2p-N eps0, and eps0 p < N(q-(p+eps0)).  Together they
    pin eps0 to the window (2-p, 2p/(N+p))."""
    if p <= 1:
        raise RangeError("need p > 1")
    q = sobolev_q(p, N)
    cond1 = p + eps0 - 2.0 > 0
    cond2 = 2.0 * p - N * eps0 > 0
    cond3 = eps0 * p < N * (q - (p + eps0))
    return cond1, cond2, cond3


def mn_value(field: SpaceTimeField, schedule: ExpandSchedule,
             n: int) -> float:
    """Sup of the field over the n-th expanding cylinder."""
    cyl = schedule.cylinder(n)
    cyl.require_fits(field.grid)
    return sup_over(field.grid, field.values, cyl)


def volume_ratio_bound(sigma: float, N: int) -> float:
    """Outer-to-inner cylinder volume ratio bound 1/sigma^{N+1}; the
    constant in front is exactly 1, realized at the innermost step."""
    if not (0 < sigma <= 1):
        raise ConfigError("sigma must be in (0,1]")
    return 1.0 / sigma ** (N + 1)


@dataclass(frozen=True)
class SecondIterationResult:
    m_trace: tuple
    constants: SecondIterationConstants
    limit: float
    bb_lsq: float
    c_fit: float
    satisfied: bool

    @property
    def eta(self) -> float:
        return self.constants.eta

    @property
    def d(self) -> float:
        return self.constants.d

    @property
    def bb(self) -> float:
        return self.constants.bb


def second_iteration(field: SpaceTimeField, p: float, N: int, sigma: float,
                     rho: float, theta: float, C: float = 1.0,
                     n_max: int = 9) -> SecondIterationResult:
    """Runs the expanding-cylinder sup recursion on a field.

    Records M_n = sup over Q_n for n = 0..n_max and fits the driving
    constant two ways: bb is the smallest value making
    M_n <= eta M_{n+1} + bb d^{n+1} hold at every recorded step (a max
    over step requirements, so the telescoped limit 2 bb d genuinely
    dominates M_0), and bb_lsq is the log-space least-squares fit of
    the same step requirements, reported as a diagnostic.  c_fit
    inverts the closed-form display at bb.
    """
    if p <= 2.0 * N / (N + 1):
        raise RangeError(f"need p > 2N/(N+1) = {2 * N / (N + 1)}")
    if N != field.grid.dim:
        raise ConfigError(f"N={N} does not match grid dim {field.grid.dim}")
    eps0 = second_eps0(N)
    mu, nu, d, eta = second_exponents(p, N, eps0)
    schedule = ExpandSchedule(sigma, rho, theta)
    schedule.outer().require_fits(field.grid)

    m = [mn_value(field, schedule, n) for n in range(n_max + 1)]

    # smallest bb with M_n <= eta M_{n+1} + bb d^{n+1} for all n
    reqs = [max(m[n] - eta * m[n + 1], 0.0) / d ** (n + 1)
            for n in range(n_max)]
    bb = max(reqs) if reqs else 0.0
    pos = [r for r in reqs if r > 0]
    bb_lsq = math.exp(sum(math.log(r) for r in pos) / len(pos)) \
        if pos else 0.0

    avg_p = average(field.grid, np.abs(field.values) ** p,
                    Cylinder(rho, theta))
    a_cap = scale_factor_A(rho, theta, N, p)
    x = a_cap ** mu * avg_p ** mu \
        / (sigma ** (mu * (N + 1)) * (1.0 - sigma) ** (mu * (N + p)))
    if x > 0:
        c_fit = bb ** (1.0 - nu) * eta ** nu / x
    else:
        c_fit = 0.0 if bb == 0.0 else math.nan

    limit = 2.0 * bb * d
    constants = SecondIterationConstants(d=d, eta=eta, bb=bb, mu=mu, nu=nu)
    return SecondIterationResult(
        m_trace=tuple(m),
        constants=constants,
        limit=limit,
        bb_lsq=bb_lsq,
        c_fit=c_fit,
        satisfied=bool(m[0] <= limit + 1e-9),
    )


def thm2_exponent(p: float, N: int) -> float:
    """Moment-to-sup exponent p(N+1)/(2N(p-1)); finite and continuous
    through p = 2 on p > 2N/(N+1)."""
    if p <= 2.0 * N / (N + 1):
        raise RangeError(f"exponent needs p > 2N/(N+1) = {2 * N / (N + 1)}")
    return p * (N + 1) / (2.0 * N * (p - 1.0))


def thm2_bound(avg_p: float, p: float, N: int, sigma: float, rho: float,
               theta: float, C: float = 1.0) -> BoundReport:
    """Sup bound from the p-moment average:
    C A^E / (sigma^{E(N+1)} (1-sigma)^{E(N+p)}) avg^E capped at 1,
    E = thm2_exponent."""
    if avg_p < 0:
        raise ConfigError("moment average must be >= 0")
    e = thm2_exponent(p, N)
    a_cap = scale_factor_A(rho, theta, N, p)
    main = C * a_cap ** e * avg_p ** e \
        / (sigma ** (e * (N + 1)) * (1.0 - sigma) ** (e * (N + p)))
    return BoundReport(main=main, cap=1.0)


def degenerate_bound(avg_eps: float, p: float, N: int, sigma: float,
                     rho: float, theta: float, eps: float = 2.0,
                     C: float = 1.0) -> BoundReport:
    """Classical sup bound for p > 2 from the (p-2+eps)-moment average:
    C (theta/rho^p)^{1/eps} / (1-sigma)^{(N+p)/eps} avg^{1/eps} capped
    at (rho^p/theta)^{1/(p-2)}.  The cap exponent blows up as p -> 2+."""
    if p <= 2:
        raise RangeError("degenerate branch needs p > 2")
    if not (0 < eps <= 2):
        raise RangeError("need eps in (0,2]")
    if avg_eps < 0:
        raise ConfigError("moment average must be >= 0")
    main = C * (theta / rho ** p) ** (1.0 / eps) \
        / (1.0 - sigma) ** ((N + p) / eps) * avg_eps ** (1.0 / eps)
    return BoundReport(main=main, cap=(rho ** p / theta) ** (1.0 / (p - 2.0)))


def lambda_r(p: float, N: int, r: float) -> float:
    """N(p-2) + rp, the singular-branch scaling denominator."""
    return N * (p - 2.0) + r * p


def singular_bound(avg_r: float, p: float, N: int, sigma: float,
                   rho: float, theta: float, r: float = 2.0,
                   C: float = 1.0) -> BoundReport:
    """Classical sup bound for 1 < p < 2 from the r-moment average:
    C (rho^p/theta)^{N/lam} / (1-sigma)^{p(N+p)/lam} avg^{p/lam} capped
    at (theta/rho^p)^{1/(2-p)}, lam = N(p-2)+rp > 0.  The cap exponent
    blows up as p -> 2-."""
    if not (1 < p < 2):
        raise RangeError("singular branch needs 1 < p < 2")
    if r < 1:
        raise RangeError("need r >= 1")
    lam = lambda_r(p, N, r)
    if lam <= 0:
        raise RangeError(f"need N(p-2)+rp > 0, got {lam}")
    if avg_r < 0:
        raise ConfigError("moment average must be >= 0")
    main = C * (rho ** p / theta) ** (N / lam) \
        / (1.0 - sigma) ** (p * (N + p) / lam) * avg_r ** (p / lam)
    return BoundReport(main=main, cap=(theta / rho ** p) ** (1.0 / (2.0 - p)))


@dataclass(frozen=True)
class ClassicalBounds:
    deg: BoundReport | None
    sing: BoundReport | None
    deg_exponent_blowup: float
    sing_exponent_blowup: float


def classical_bounds(avg_r: float, p: float, N: int, sigma: float,
                     rho: float, theta: float, r: float = 2.0,
                     eps: float = 2.0, C: float = 1.0) -> ClassicalBounds:
    """Evaluates whichever classical branch applies at this p and
    reports the 1/|p-2| exponent magnitude for both; at p = 2 neither
    branch is defined and the magnitude is infinite."""
    blowup = math.inf if p == 2 else 1.0 / abs(p - 2.0)
    deg = sing = None
    if p > 2:
        deg = degenerate_bound(avg_r, p, N, sigma, rho, theta, eps, C)
    elif 1 < p < 2 and lambda_r(p, N, r) > 0:
        sing = singular_bound(avg_r, p, N, sigma, rho, theta, r, C)
    return ClassicalBounds(deg=deg, sing=sing,
                           deg_exponent_blowup=blowup,
                           sing_exponent_blowup=blowup)


def g_window(eps0: float, N: int) -> float:
    """(2-eps0)^2 - N eps0; positive exactly on the workable eps0
    range, with sign anchors g(2/(N+1)) = 2N(N-1)/(N+1)^2 >= 0 and
    g(4/(N+2)) = -8N/(N+2)^2 < 0."""
    return (2.0 - eps0) ** 2 - N * eps0


def delta0_root(N: int) -> float:
    """The root of g in [2/(N+1), 4/(N+2)], in closed form: g is a
    quadratic in eps0 with roots ((N+4) +- sqrt((N+4)^2 - 16))/2, and
    the smaller one is the crossing.  At N = 1 the root sits exactly
    on the left endpoint."""
    if N < 1:
        raise ConfigError("need N >= 1")
    disc = (N + 4.0) ** 2 - 16.0
    return ((N + 4.0) - math.sqrt(disc)) / 2.0


def delta0_bisect(N: int, tol: float = 1e-14) -> float:
    """Bisection cross-check for delta0_root on the bracketing
    interval; the endpoints have opposite g signs (left one possibly
    zero, in which case it is the root)."""
    lo, hi = 2.0 / (N + 1), 4.0 / (N + 2)
    g_lo = g_window(lo, N)
    if g_lo == 0.0:
        return lo
    if not (g_lo > 0 and g_window(hi, N) < 0):
        raise ConfigError("bracket does not straddle a sign change")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g_window(mid, N) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)

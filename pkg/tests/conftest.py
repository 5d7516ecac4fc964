"""Shared fixtures: one solved scenario suite reused across test modules."""

import pytest

import parabound as pb

# (p, N) cross used by the iteration and bound tests
SUITE_PN = ((1.9, 1), (2.0, 1), (2.5, 1), (3.0, 1),
            (1.9, 2), (2.0, 2), (2.5, 2), (3.0, 2))

SIGMA = 0.5


def suite_geometry(n_dim):
    """Grid and verification cylinder for the suite scenarios."""
    if n_dim == 1:
        return pb.Grid(dim=1, extent=1.5, nx=61, nt=41, dt=0.01), 1.0, 0.15
    return pb.Grid(dim=2, extent=1.2, nx=31, nt=21, dt=0.01), 0.8, 0.08


def solve_suite_case(p, n_dim, amplitude=2.0):
    grid, rho, theta = suite_geometry(n_dim)
    params = pb.StructureParams(n_dim, p, pb.default_eps0(n_dim))
    field = pb.solve(pb.smooth_positive_initial(grid, amplitude),
                     pb.SolverConfig(params=params), grid)
    return pb.clipped_nonneg(field), grid, rho, theta


@pytest.fixture(scope="session")
def solved_suite():
    """(p, N) -> (nonnegative solved field, grid, rho, theta)."""
    return {pn: solve_suite_case(*pn) for pn in SUITE_PN}

import math

import numpy as np
import pytest

from breatherlab import lax
from breatherlab.grid import SpaceTimeGrid
from breatherlab.lax import BoundaryClass, Domain, SpectralPoint

GRID = SpaceTimeGrid(-2.0, 2.0, 16, -1.0, 1.0, 9)
U1 = lax.constant_field()


@pytest.mark.parametrize("lam", [0.3, 0.99, 1.0, -0.6, -1.0, 0.7j, -1.3j, 0.0])
def test_background_solutions_solve_the_lax_pair(lam):
    sols = lax.background_solutions(lam)
    for s in sols:
        chain = ()
        if s.role is lax.Role.GENERALIZED:
            chain = (sols[0] if s.label == "phi_g" else sols[1],)
        assert max(lax.lax_residual(U1, lam, s, GRID, chain)) < 1e-9


def test_off_spectrum_rejected():
    with pytest.raises(ValueError, match="off the background spectrum"):
        lax.background_solutions(1.5)
    with pytest.raises(ValueError):
        lax.background_solutions(0.3 + 0.2j)


def test_lambda_one_second_solution_grows_linearly():
    phi, psi = lax.background_solutions(1.0)
    assert psi.boundary_class is BoundaryClass.UNBOUNDED
    w = lax.wronskian(phi, psi, *GRID.mesh())
    assert np.allclose(w, w.flat[0])           # trace-free U: Wronskian is constant
    assert abs(w.flat[0]) > 0.5


@pytest.mark.parametrize("lam", [0.6, 0.8j])
def test_boundary_class_antiperiodic(lam):
    phi = lax.background_solutions(lam)[0]
    assert lax.certify_boundary_class(phi) is BoundaryClass.ANTIPERIODIC


def test_symmetry_partner_maps_lambda():
    phi = lax.background_solutions(0.4 + 0j)[0]
    partner = lax.symmetry_partner(phi)
    assert partner.lam == pytest.approx(-0.4)
    assert max(lax.lax_residual(U1, -0.4, partner, GRID)) < 1e-9


@pytest.mark.parametrize("m, L, expected", [(0, 3.0, 1.0), (1, 2 * math.pi, math.sqrt(0.75)),
                                            (2, math.pi, 1j * math.sqrt(3.0)), (1, math.pi, 0.0)])
def test_lambda_m(m, L, expected):
    assert lax.lambda_m(m, L) == pytest.approx(expected)


@pytest.mark.parametrize("pt, expected", [
    (SpectralPoint(0.0), (2, 4)),
    (SpectralPoint(1.0), (1, 1)),
    (SpectralPoint(0.5j), (2, 2)),
    (SpectralPoint(0.0, Domain.ANTIPERIODIC, math.pi), (2, 4)),
    (SpectralPoint(lax.lambda_m(1, 2 * math.pi), Domain.ANTIPERIODIC, 2 * math.pi), (2, 2)),
    (SpectralPoint(1.0, Domain.PERIODIC, 5.0), (1, 1)),
])
def test_background_multiplicity(pt, expected):
    rec = lax.classify_background_lambda(pt)
    assert (rec.geometric, rec.algebraic) == expected


def test_background_multiplicity_parity_checked():
    # lambda_1 belongs to the antiperiodic space, not the periodic one
    with pytest.raises(ValueError, match="even m"):
        lax.classify_background_lambda(
            SpectralPoint(lax.lambda_m(1, 2 * math.pi), Domain.PERIODIC, 2 * math.pi))
    with pytest.raises(ValueError):
        SpectralPoint(0.1, Domain.PERIODIC)


def test_multiplicity_record_invariants():
    with pytest.raises(ValueError):
        lax.MultiplicityRecord(0.0, 3, 2)
    assert not lax.MultiplicityRecord(0.0, None, None).determinate


def test_fredholm_inner_product_known_value():
    # conj((e^{-ix}, 0)) . (x e^{-ix}, 0) = x, integral over [0, 2] is 2
    a = lax.VectorSolution(lambda x, t: np.stack([np.exp(-1j * x), 0 * x]), 0.0,
                           BoundaryClass.UNBOUNDED)
    b = lax.VectorSolution(lambda x, t: np.stack([x * np.exp(-1j * x), 0 * x]), 0.0,
                           BoundaryClass.UNBOUNDED)
    assert lax.fredholm_inner_product(a, b, (0.0, 2.0)) == pytest.approx(2.0, abs=1e-12)
    g = lax.VectorSolution(lambda x, t: np.stack([np.exp(-x * x / 2), 1j * np.exp(-x * x / 2)]),
                           0.0, BoundaryClass.LOCALIZED)
    assert lax.fredholm_inner_product(g, g, (-np.inf, np.inf)) == pytest.approx(
        2 * math.sqrt(math.pi), rel=1e-10)

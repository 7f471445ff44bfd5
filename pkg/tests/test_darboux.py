import math

import numpy as np
import pytest

from breatherlab import darboux, lax
from breatherlab.acceptance import chain_grid
from breatherlab.exact import BreatherSpec, Kind, default_grid

SEEDS = [("ab", 0.3), ("ab", 0.6), ("ab", 0.85), ("kmb", 1.25), ("kmb", 2.0)]


@pytest.fixture(params=SEEDS, ids=[f"{k}-{l}" for k, l in SEEDS])
def seed(request):
    return darboux.build_seed(*request.param)


def test_seed_kinds():
    with pytest.raises(ValueError):
        darboux.DarbouxSeed(BreatherSpec(Kind.PEREGRINE))


def relative_residual(u, lam, member, grid, lower=()):
    """Lax residual scaled by the size of the solution (the KMB seed grows like e^{beta0 |x|/2})."""
    x, t = grid.mesh()
    scale = max(1.0, float(np.max(np.abs(member(x, t)))))
    return max(lax.lax_residual(u, lam, member, grid, lower)) / scale


def test_seed_solves_background_lax_pair(seed):
    grid = chain_grid(seed.spec)
    assert relative_residual(lax.constant_field(), seed.lambda0, seed.as_solution(), grid) < 1e-10


def test_seed_identities(seed):
    x, t = default_grid(seed.spec, 16).mesh()
    p, q = seed.pq(x, t)
    ids = darboux.seed_identities(seed, x, t)
    scale = np.max(ids["sum"])
    assert np.max(np.abs(abs(p) ** 2 + abs(q) ** 2 - ids["sum"])) < 1e-12 * scale
    assert np.max(np.abs(abs(p) ** 2 - abs(q) ** 2 - ids["diff"])) < 1e-12 * scale
    assert np.max(np.abs(p * np.conj(q) - ids["cross"])) < 1e-12 * scale


def test_transformed_potential_matches_closed_form(seed):
    x, t = default_grid(seed.spec, 32).mesh()
    u_hat = darboux.transform_potential(seed)
    assert np.max(np.abs(u_hat(x, t) - seed.spec(x, t))) < 1e-12


def test_transformed_potential_far_tails_finite():
    s = darboux.build_seed("kmb", 1.25)
    far = darboux.transform_potential(s)(np.array([-800.0, 800.0]), 0.3)
    assert np.allclose(far, -1.0)


def test_transformed_eigenfunction_solves_new_lax_pair(seed):
    grid = chain_grid(seed.spec)
    u_hat = darboux.transform_potential(seed)
    phi0 = darboux.transform_eigenfunction(seed)
    assert max(lax.lax_residual(u_hat, seed.lambda0, phi0, grid)) < 1e-8


@pytest.mark.parametrize("lam", [0.3 + 0.4j, -1.7, 2j, 0.05])
def test_determinant(seed, lam):
    if min(abs(lam - seed.lambda0), abs(lam + seed.lambda0)) < 0.1:
        pytest.skip("too close to a pole")
    D = darboux.DarbouxMatrix(seed)
    x, t = np.meshgrid(np.linspace(-3, 3, 5), np.linspace(-1, 1, 3))
    closed = D.det_closed_form(lam)
    assert closed == pytest.approx((lam + seed.lambda0) / (lam - seed.lambda0))
    assert np.max(np.abs(D.det(lam, x, t) - closed)) < 1e-12 * abs(closed)
    ident = np.einsum("ij...,jk...->ik...", D(lam, x, t), D.inverse(lam, x, t))
    assert np.allclose(ident[0, 0], 1) and np.allclose(ident[0, 1], 0, atol=1e-12)


def test_pole_guard():
    D = darboux.DarbouxMatrix(darboux.build_seed("ab", 0.6))
    with pytest.raises(ValueError, match="singular"):
        D(0.6 + 1e-8, 0.0, 0.0)
    with pytest.raises(ValueError):
        D.inverse(-0.6, 0.0, 0.0)


def test_transformed_solution_other_lambda(seed):
    lam = 0.5j
    phi = lax.background_solutions(lam)[0]
    D = darboux.DarbouxMatrix(seed)
    out = darboux.transform_solution(D, phi, lam)
    u_hat = darboux.transform_potential(seed)
    assert max(lax.lax_residual(u_hat, lam, out, chain_grid(seed.spec))) < 1e-8
    with pytest.raises(ValueError):
        darboux.transform_solution(D, phi, 0.3j)


def test_laurent_chain(seed):
    grid = chain_grid(seed.spec)
    u_hat = darboux.transform_potential(seed)
    for name, member, lower in darboux.laurent_expansion(seed).chain():
        assert relative_residual(u_hat, seed.lambda0, member, grid, lower) < 1e-10, name


def test_laurent_coefficients_three_ways(seed):
    x, t = np.meshgrid(np.linspace(-2, 2, 7), np.linspace(-0.5, 0.5, 3))
    ex = darboux.laurent_expansion(seed)
    structural = darboux.structural_coefficients(seed, x, t)
    contour = darboux.contour_coefficients(seed, x, t)
    for n, S in zip((-1, 0, 1), structural):
        closed = ex.coefficient(n, x, t)
        scale = max(1.0, np.max(np.abs(closed)))
        assert np.max(np.abs(closed - S)) < 1e-12 * scale
        tol = 1e-9 if n < 1 else 1e-6          # Phi_1 carries an r^16/r aliasing error
        assert np.max(np.abs(contour[n] - S)) < tol * scale
    with pytest.raises(ValueError):
        ex.coefficient(2, x, t)


def test_ab_phi1_antiperiodic():
    s = darboux.build_seed("ab", 0.6)
    ex = darboux.laurent_expansion(s)
    assert lax.certify_boundary_class(ex.phi0) is lax.BoundaryClass.ANTIPERIODIC
    assert lax.certify_boundary_class(ex.phi1) is lax.BoundaryClass.ANTIPERIODIC
    assert lax.certify_boundary_class(ex.psi0) is lax.BoundaryClass.UNBOUNDED


def test_kmb_phi0_localized():
    s = darboux.build_seed("kmb", 1.25)
    assert lax.certify_boundary_class(darboux.transform_eigenfunction(s)) is lax.BoundaryClass.LOCALIZED


def test_lambda_one_solutions(seed):
    phi, psi = darboux.lambda_one_solutions(seed)
    u_hat = darboux.transform_potential(seed)
    grid = chain_grid(seed.spec)
    assert max(lax.lax_residual(u_hat, 1.0, phi, grid)) < 1e-8
    assert max(lax.lax_residual(u_hat, 1.0, psi, grid)) < 1e-8
    if seed.kind is Kind.AKHMEDIEV:
        assert lax.certify_boundary_class(phi) is lax.BoundaryClass.PERIODIC


# [PAPER] pairings: <phi0*, phi0> = 0 and <phi0*, phi1> = 2 lambda0^2 L / k0^2 for AB;
# <phi_hat*, phi_hat> = -2(1 + lambda0) L / (1 - lambda0) at lambda = 1;
# <phi0*, phi0> = -2 lambda0 / beta0 for KMB.
@pytest.mark.parametrize("lam", [0.3, 0.6, 0.85])
def test_ab_certificates(lam):
    spec = BreatherSpec.ab(lam)
    L, k = spec.period_x, spec.k0
    certs = darboux.fredholm_certificates(darboux.build_seed("ab", lam), t=0.37)
    assert [c.passed for c in certs] == [True, True, True]
    assert abs(certs[0].computed) < 1e-10
    assert certs[1].computed == pytest.approx(2 * lam ** 2 * L / k ** 2, rel=1e-8)
    assert certs[2].computed == pytest.approx(-2 * (1 + lam) * L / (1 - lam), rel=1e-8)


@pytest.mark.parametrize("lam", [1.25, 2.0])
def test_kmb_certificate(lam):
    (cert,) = darboux.fredholm_certificates(darboux.build_seed("kmb", lam))
    assert cert.computed == pytest.approx(-2 * lam / BreatherSpec.kmb(lam).beta0, rel=1e-8)
    assert cert.as_dict()["passed"]


def test_certificate_verdicts():
    assert not darboux.Certificate("q", 1.0, 1.0 + 1e-6, "").passed
    assert darboux.Certificate("q", 0.0, 1e-11, "").passed
    assert not darboux.Certificate("q", 0.0, 1e-9, "").passed


def test_wronskian_at_lambda0_constant():
    s = darboux.build_seed("ab", 0.6)
    ex = darboux.laurent_expansion(s)
    w = darboux.wronskian_series(ex.phi0, ex.psi0, default_grid(s.spec, 16))
    assert np.allclose(w, w.flat[0], atol=1e-10)
    assert abs(w.flat[0]) > 1e-3

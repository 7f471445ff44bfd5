import math

import numpy as np
import pytest

from breatherlab import spectral as sp
from breatherlab.exact import BreatherSpec, Kind

CONSTANT = BreatherSpec(Kind.CONSTANT)
AB = BreatherSpec.ab(0.6)
KMB = BreatherSpec.kmb(1.25)


@pytest.mark.parametrize("name, cls", [("periodic", sp.FourierInteger),
                                       ("half-integer", sp.FourierHalfInteger),
                                       ("line", sp.Line)])
def test_basis_from_name(name, cls):
    assert isinstance(sp.basis_from_name(name, 16, 4.0), cls)


def test_unknown_basis():
    with pytest.raises(ValueError, match="unknown basis"):
        sp.basis_from_name("chebyshev", 16, 1.0)


def test_default_bases():
    assert sp.default_basis(KMB) == sp.Line(832, 30.0)
    assert isinstance(sp.default_basis(AB), sp.FourierHalfInteger)
    with pytest.raises(ValueError):
        sp.default_basis(KMB, "periodic")


def test_wavenumbers():
    np.testing.assert_allclose(sp.FourierInteger(2, 2 * math.pi).wavenumbers(), [-2, -1, 0, 1, 2])
    np.testing.assert_allclose(sp.FourierHalfInteger(2, 2 * math.pi).wavenumbers(),
                               [-1.5, -0.5, 0.5, 1.5])


def test_constant_targets_half_integer():
    # lambda_m^2 = 1 - (m pi / L)^2 with L = pi
    targets = sp.analytic_targets(CONSTANT, sp.FourierHalfInteger(16, math.pi), 5)
    assert targets[0] == 0
    assert targets[1] == pytest.approx(math.sqrt(8) * 1j)
    assert targets[3] == pytest.approx(math.sqrt(24) * 1j)


def test_kmb_line_targets():
    assert sp.analytic_targets(KMB, sp.Line(64, 10.0)) == [1.25, -1.25]


@pytest.mark.parametrize("basis, lam, expected", [
    (sp.FourierInteger(8, 2 * math.pi), 0.0, (2, 4)),
    (sp.FourierInteger(8, AB.period_x), 1.0, (1, 1)),
    (sp.FourierHalfInteger(8, AB.period_x), 0.6, (1, 2)),
    (sp.FourierHalfInteger(8, AB.period_x), 0.3j, (2, 2)),
    (sp.Line(64, 10.0), 1.25, (1, 1)),
])
def test_analytic_multiplicity(basis, lam, expected):
    spec = KMB if isinstance(basis, sp.Line) else AB
    if lam == 0.0:
        spec = CONSTANT
    assert sp.analytic_multiplicity(spec, basis, lam) == expected


def test_constant_spectrum_and_zero_multiplicity():
    report = sp.spectrum_for(CONSTANT, sp.FourierHalfInteger(16, math.pi), probe=[0.0])
    assert report.max_match_distance < 1e-10
    rec = report.multiplicities[0]
    assert (rec.geometric, rec.algebraic) == (2, 4)


def test_ab_antiperiodic_double_point():
    report = sp.spectrum_for(AB, sp.FourierHalfInteger(32, AB.period_x), probe=[0.6])
    assert report.max_match_distance < 1e-10
    rec = report.multiplicities[0]
    assert (rec.geometric, rec.algebraic) == (1, 2)
    assert report.symmetry_defect < 1e-10


def test_ab_periodic_simple_edge():
    report = sp.spectrum_for(AB, sp.FourierInteger(32, AB.period_x), probe=[1.0, -1.0])
    assert report.max_match_distance < 1e-10
    for rec in report.multiplicities:
        assert (rec.geometric, rec.algebraic) == (1, 1)


def test_probe_off_spectrum():
    op = sp.discretize(sp.spec_evaluator(AB), 0.0, sp.FourierInteger(16, AB.period_x))
    rec = sp.multiplicity_probe(op, 0.37 + 0.21j)
    assert rec.geometric is None and rec.note.startswith("not an eigenvalue")


def test_under_resolved_fourier():
    with pytest.raises(sp.UnderResolvedError) as err:
        sp.discretize(sp.spec_evaluator(AB), 0.0, sp.FourierInteger(4, AB.period_x))
    assert err.value.suggested_n > 4


def test_under_resolved_line_suggests_even_size():
    with pytest.raises(sp.UnderResolvedError) as err:
        sp.discretize(sp.spec_evaluator(KMB), 0.0, sp.Line(256, 12.0))
    assert err.value.suggested_n > 256 and err.value.suggested_n % 2 == 0


def test_ab_isospectral():
    assert sp.isospectral_drift(AB, sp.FourierHalfInteger(32, AB.period_x)) < 1e-10


def test_cluster_means():
    w = np.array([1.0, 1.0 + 1e-7, 1.0 - 1e-7j, 3.0])
    c = sp.clusters(w)
    assert len(c) == 2
    assert sp.nearest_cluster(w, 0.9) == pytest.approx(1.0 + (1e-7 - 1e-7j) / 3)


def test_symmetry_defect_detects_asymmetry():
    assert sp.symmetry_defect(np.array([1 + 1j, -1 + 1j])) == 0.0
    assert sp.symmetry_defect(np.array([1 + 1j, -1 - 1j])) == pytest.approx(2.0)


def test_band_labels():
    labels = sp.band_labels(np.array([1.0, 0.5j]), [np.array([1.0, 0.6j])])
    assert labels == ["point", "band"]


@pytest.mark.slow
def test_kmb_line_point_spectrum():
    report = sp.spectrum_for(KMB, sp.Line(384, 12.0))
    assert report.max_match_distance < 1e-6
    points = report.point_candidates()
    np.testing.assert_allclose(np.sort(points.real), [-1.25, 1.25], atol=1e-6)


def test_truncation_slope():
    # the isolated eigenvalue feels the box through exp(-beta0 X)
    fit = sp.truncation_convergence(KMB)
    assert fit.slope == pytest.approx(-KMB.beta0 / 2, rel=0.05)
    assert np.all(np.diff(fit.distances) < 0)
    with pytest.raises(ValueError):
        sp.truncation_convergence(AB)

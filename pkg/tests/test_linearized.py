import json
import math

import numpy as np
import pytest

from breatherlab import darboux, exact, linearized as lin
from breatherlab.exact import BreatherSpec
from breatherlab.grid import SpaceTimeGrid
from breatherlab.linearized import Growth


@pytest.fixture(scope="module")
def ab():
    return lin.ab_family(0.6)


@pytest.fixture(scope="module")
def kmb():
    return lin.kmb_family(1.25)


@pytest.mark.parametrize("k", [0.0, 0.7, 1.5, 2.0, 2.5])
def test_constant_basis_solves_linearization(k):
    period = 2 * math.pi / k if k else 2 * math.pi
    grid = SpaceTimeGrid(0.0, period, 16, 0.0, 1.0, 16)
    for v in lin.constant_basis(k):
        assert lin.lin_nls_residual(lin.CONSTANT, v, grid) < 1e-8, v.label


@pytest.mark.parametrize("k, expected", [
    (0.0, [Growth.BOUNDED, Growth.LINEAR_T]),
    (1.5, [Growth.EXP_GROWING, Growth.EXP_GROWING, Growth.EXP_DECAYING, Growth.EXP_DECAYING]),
    (2.0, [Growth.BOUNDED, Growth.BOUNDED, Growth.LINEAR_T, Growth.LINEAR_T]),
    (2.5, [Growth.BOUNDED] * 4),
])
def test_constant_basis_growth(k, expected):
    assert [v.growth_class.kind for v in lin.constant_basis(k)] == expected


def test_constant_basis_rate_is_dispersion_relation():
    k = 1.5
    rate = k * math.sqrt(4 - k * k) / 2
    plus = lin.constant_basis(k)[0]
    assert plus.growth_class.rate == pytest.approx(rate)
    assert lin.growth_rate(plus, (0.0, 4.0), 0.3) == pytest.approx(rate, rel=1e-9)
    with pytest.raises(ValueError):
        lin.constant_basis(-1.0)


def test_growth_rate_moves_off_zeros():
    # sin(kx) vanishes at x = 0; the probe is shifted and the fit still works
    v = lin.constant_basis(1.0)[1]
    assert lin.growth_rate(v, (0.0, 3.0), 0.0) == pytest.approx(math.sqrt(3) / 2, rel=1e-9)
    with pytest.raises(ValueError, match="zero"):
        lin.growth_rate(lambda x, t: np.zeros(np.broadcast(x, t).shape), (0, 1), 0.0)


@pytest.mark.parametrize("func, kind", [
    (lambda x, t: np.exp(1.2 * t) * np.cos(x), Growth.EXP_GROWING),
    (lambda x, t: np.exp(-1.2 * t) * np.cos(x), Growth.EXP_DECAYING),
    (lambda x, t: (1 + t) * np.cos(x) + 0j, Growth.LINEAR_T),
    (lambda x, t: np.cos(x - t) + 0j, Growth.BOUNDED),
])
def test_classify_in_t(func, kind):
    g = lin.classify_in_t(func, (4.0, 8.0), np.linspace(0, 2 * math.pi, 16))
    assert g.kind is kind


def test_modal_rate_ignores_secular_mean():
    v = lambda x, t: 5.0 * t + np.exp(0.5 * t) * np.cos(x)
    assert lin.modal_growth_rate(v, (1.0, 6.0), 2 * math.pi) == pytest.approx(0.5, rel=1e-9)


def test_squared_map_pair_checks():
    seed = darboux.build_seed("ab", 0.6)
    phi, psi = darboux.lambda_one_solutions(seed)
    ex = darboux.laurent_expansion(seed)
    with pytest.raises(ValueError, match="second"):
        lin.squared_map(phi, None, "II", "real")
    with pytest.raises(ValueError, match="one lambda"):
        lin.squared_map(phi, ex.psi0, "II", "real")


def test_ab_catalog_labels_and_classes(ab):
    assert ab.labels == ["v1", "v2", "w2", "element_basis", "new_plus", "new_minus"]
    kinds = {e.label: e.solution.growth_class.kind for e in ab}
    assert kinds == {"v1": Growth.EXP_DECAYING, "v2": Growth.BOUNDED,
                     "w2": Growth.EXP_DECAYING, "element_basis": Growth.LINEAR_T,
                     "new_plus": Growth.EXP_GROWING, "new_minus": Growth.EXP_GROWING}
    sigma = ab.about.sigma0
    for lab in ("new_plus", "new_minus"):
        assert ab[lab].growth_class.rate == pytest.approx(sigma, rel=0.02)
    for lab in ("v1", "w2"):
        assert ab[lab].growth_class.rate == pytest.approx(-sigma, rel=0.02)


def test_ab_catalog_solves_and_is_periodic(ab):
    spec = ab.about
    grid = SpaceTimeGrid.periodic(spec.period_x, 64, -2.0, 2.0, 33)
    x, t = grid.mesh()
    for e in ab:
        v = e.solution
        scale = max(1.0, float(np.max(np.abs(v(x, t)))))
        assert lin.lin_nls_residual(spec, v, grid) / scale < 1e-8, e.label
        shift = np.max(np.abs(v(x + spec.period_x, t) - v(x, t)))
        assert shift / scale < 1e-9, e.label


def test_ab_catalog_independent(ab):
    # [DERIVED] frozen from the catalog on the default sample grid
    assert ab.gram_min_singular() == pytest.approx(0.09215833908723854, rel=1e-6)


def test_ab_intermediates_grow_in_x(ab):
    L = ab.about.period_x
    v3 = ab["v3"]
    assert abs(v3(3 * L + 0.2, 0.3) - v3(0.2, 0.3)) > 1e-3


def test_kmb_catalog_classes(kmb):
    kinds = {e.label: e.solution.growth_class.kind for e in kmb}
    assert kinds == {"w1": Growth.EXP_DECAYING, "w2": Growth.EXP_DECAYING,
                     "w3": Growth.EXP_DECAYING, "w4": Growth.BOUNDED,
                     "v1": Growth.EXP_DECAYING, "v2": Growth.BOUNDED, "v3": Growth.LINEAR_T}
    assert kmb.independent_labels == ["w1", "w2", "w3", "w4", "v2", "v3"]
    assert kmb["w2"].growth_class.rate == pytest.approx(-1.5, rel=1e-3)


@pytest.mark.parametrize("lam", [1.25, 2.0])
def test_kmb_v1_is_multiple_of_w1(lam):
    cat = lin.kmb_family(lam, classify=False)
    x = np.linspace(-4, 4, 33)[:, None]
    t = np.linspace(0, cat.about.period_t, 9)[None, :]
    factor = lin.v1_w1_factor(lam)
    assert cat.relations == (("v1", "w1", factor),)
    w1 = cat["w1"](x, t)
    assert np.max(np.abs(cat["v1"](x, t) - factor * w1)) < 1e-12 * np.max(np.abs(factor * w1))


@pytest.mark.parametrize("lam", [1.25, 2.0])
def test_kmb_derivative_oracles(lam):
    # translation and phase-rotation generators of the breather
    cat = lin.kmb_family(lam, classify=False)
    spec = cat.about
    b2 = spec.beta0 ** 2
    x = np.linspace(-6, 6, 25)[:, None]
    t = np.linspace(0, spec.period_t, 7)[None, :]
    h = 1e-4
    ux = (spec(x + h, t) - spec(x - h, t)) / (2 * h)
    ut = (spec(x, t + h) - spec(x, t - h)) / (2 * h)
    scale = np.max(np.abs(ux)) + np.max(np.abs(ut))
    assert np.max(np.abs(cat["w1"](x, t) - lam / b2 * ux)) < 1e-6 * scale
    assert np.max(np.abs(cat["w2"](x, t) - ut / b2)) < 1e-6 * scale


def test_kmb_tails(kmb):
    lam, b = 1.25, 1.5
    assert kmb["w4"](30.0, 0.2) == pytest.approx(4j * lam / b, abs=1e-9)
    assert kmb["w4"](-30.0, 0.2) == pytest.approx(-4j * lam / b, abs=1e-9)
    # [DERIVED] v2 tends to -2i(1+lam)/(1-lam)
    assert kmb["v2"](30.0, 0.2) == pytest.approx(18j, abs=1e-9)


def test_family_dispatch():
    assert lin.family(BreatherSpec.kmb(1.25), classify=False).about.lambda0 == 1.25
    with pytest.raises(ValueError):
        lin.family(BreatherSpec(exact.Kind.PEREGRINE))


def test_export_catalog(tmp_path, kmb):
    manifest = lin.export_catalog(kmb, tmp_path, debug=False)
    on_disk = json.loads((tmp_path / "manifest.json").read_text())
    assert on_disk["relations"][0]["multiple_of"] == "w1"
    assert [r["label"] for r in manifest["entries"]] == kmb.labels
    for row in manifest["entries"]:
        assert (tmp_path / row["file"]).exists()


def test_export_debug_writes_intermediates(tmp_path, ab):
    manifest = lin.export_catalog(ab, tmp_path, debug=True)
    labels = [r["label"] for r in manifest["entries"]]
    assert "v+" in labels and "w3" in labels
    assert (tmp_path / "v3.csv").exists()

import math

import numpy as np
import pytest

from breatherlab import exact
from breatherlab.exact import BreatherSpec, Direction, Kind
from breatherlab.grid import SpaceTimeGrid


@pytest.mark.parametrize("kind, lam", [("ab", 0.0), ("ab", 1.0), ("ab", -0.3),
                                       ("kmb", 1.0), ("kmb", 0.5), ("kmb", float("nan")),
                                       ("prw", 0.5), ("constant", 1.0)])
def test_invalid_parameters_rejected(kind, lam):
    with pytest.raises(ValueError):
        BreatherSpec(kind, lam)


def test_kind_aliases():
    assert Kind.parse("Akhmediev") is Kind.AKHMEDIEV
    assert Kind.parse("kuznetsov-ma") is Kind.KUZNETSOV_MA
    assert Kind.parse("PRW") is Kind.PEREGRINE
    with pytest.raises(ValueError, match="unknown breather kind"):
        Kind.parse("soliton")


def test_ab_constants():
    s = BreatherSpec.ab(0.6)
    assert s.k0 == pytest.approx(1.6)
    assert s.sigma0 == pytest.approx(0.96)
    assert s.period_x == pytest.approx(2 * math.pi / 1.6)
    with pytest.raises(ValueError):
        s.beta0


def test_kmb_constants():
    s = BreatherSpec.kmb(1.25)
    assert s.beta0 == pytest.approx(1.5)
    assert s.alpha0 == pytest.approx(1.875)
    assert s.period_t == pytest.approx(2 * math.pi / 1.875)


def test_spec_dict_round_trip():
    for s in (BreatherSpec.ab(0.3), BreatherSpec.kmb(2.0), BreatherSpec(Kind.PEREGRINE)):
        assert BreatherSpec.from_dict(s.as_dict()) == s


@pytest.mark.parametrize("lam", [0.2, 0.6, 0.9])
def test_ab_peak_at_origin(lam):
    # cosh 0 = cos 0 = 1: u(0,0) = -1 + 2(1-lam^2)/(1-lam) = 1 + 2 lam
    assert BreatherSpec.ab(lam)(0.0, 0.0) == pytest.approx(1 + 2 * lam)


@pytest.mark.parametrize("lam", [1.1, 1.25, 2.0])
def test_kmb_peak_at_origin(lam):
    assert BreatherSpec.kmb(lam)(0.0, 0.0) == pytest.approx(1 + 2 * lam)


def test_peregrine_values():
    prw = BreatherSpec(Kind.PEREGRINE)
    assert prw(0.0, 0.0) == pytest.approx(3.0)
    # |u| -> 1 like 1/r^2
    assert abs(prw(100.0, 0.0) + 1.0) < 1e-3


def test_periodicity():
    ab = BreatherSpec.ab(0.6)
    x = np.linspace(0, 3, 17)
    assert np.allclose(ab(x + ab.period_x, 0.4), ab(x, 0.4), atol=1e-13)
    kmb = BreatherSpec.kmb(1.25)
    assert np.allclose(kmb(x, 0.3 + kmb.period_t), kmb(x, 0.3), atol=1e-12)


def test_ab_time_limits_and_overflow_guard():
    ab = BreatherSpec.ab(0.6)
    far = ab(np.array([0.1, 1.3]), 1e4)
    assert np.all(np.isfinite(far))
    assert np.allclose(far, exact.asymptotic_value(ab, Direction.T_PLUS_INF))
    assert exact.asymptotic_value(ab, "t-inf") == pytest.approx(complex(1 - 2 * 0.36, -0.96))
    # near the guard the closed form already equals the tail to round-off
    assert abs(ab(0.3, 40.0) - exact.asymptotic_value(ab, "t+inf")) < 1e-14


def test_kmb_space_limits():
    kmb = BreatherSpec.kmb(1.25)
    assert np.allclose(kmb(np.array([-1e4, 1e4]), 0.2), -1.0)
    with pytest.raises(ValueError):
        exact.asymptotic_value(kmb, "t+inf")


def test_constant_is_one():
    c = BreatherSpec(Kind.CONSTANT)
    assert np.array_equal(c(np.zeros(3), 1.0), np.ones(3, complex))


def test_longdouble_evaluation_is_kept():
    ab = BreatherSpec.ab(0.6)
    x = np.array([0.3], dtype=np.longdouble)
    v = ab(x, np.longdouble(0.2))
    assert v.dtype == np.clongdouble
    assert abs(complex(v[0]) - ab(0.3, 0.2)) < 1e-15


@pytest.mark.parametrize("spec", [BreatherSpec.ab(0.6), BreatherSpec.kmb(1.25)])
def test_modulus_identity(spec):
    assert exact.modulus_identity_residual(spec, exact.default_grid(spec, 48)) < 1e-12


@pytest.mark.parametrize("spec", [BreatherSpec.ab(0.6), BreatherSpec.kmb(1.25),
                                  BreatherSpec(Kind.PEREGRINE)])
def test_residual_fourth_order(spec):
    res = [exact.nls_residual(exact.WaveField.sample(spec, exact.default_grid(spec, n))).value
           for n in (64, 128)]
    assert math.log2(res[0] / res[1]) > 3.5


def test_modulus_identity_only_for_darboux_solutions():
    with pytest.raises(ValueError):
        exact.modulus_squared_closed_form(BreatherSpec(Kind.PEREGRINE), 0.0, 0.0)


def test_under_resolution_flag():
    ab = BreatherSpec.ab(0.6)
    coarse = SpaceTimeGrid.periodic(ab.period_x, 8, -3, 3, 8)
    assert exact.nls_residual(exact.WaveField.sample(ab, coarse)).under_resolved
    fine = exact.default_grid(ab, 128)
    assert not exact.nls_residual(exact.WaveField.sample(ab, fine)).under_resolved


# [DERIVED] frozen from the closed forms: deviation at the origin is 2 * gap to first order
@pytest.mark.parametrize("kind, gap, frozen", [("ab", 1e-2, 0.05162362999460298),
                                               ("kmb", 1e-2, 0.05363158358869979),
                                               ("ab", 1e-3, 0.0052499315942471595)])
def test_peregrine_deviation_frozen(kind, gap, frozen):
    assert exact.peregrine_deviation(kind, gap) == pytest.approx(frozen, rel=1e-9)


def test_peregrine_deviation_is_first_order():
    d = [exact.peregrine_deviation("kmb", g) for g in (1e-2, 1e-3, 1e-4)]
    assert d[0] / d[1] == pytest.approx(10, rel=0.05)
    assert d[1] / d[2] == pytest.approx(10, rel=0.01)
    assert d[1] > 2e-3           # bounded below by the peak difference 2 * gap
    with pytest.raises(ValueError):
        exact.peregrine_deviation("prw", 1e-2)

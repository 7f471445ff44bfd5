import math

import numpy as np
import pytest

from breatherlab import evolution as ev
from breatherlab import linearized as lin
from breatherlab.exact import BreatherSpec, Kind

CONSTANT = BreatherSpec(Kind.CONSTANT)


def box(length=2 * math.pi, n=64, dt=1e-3, t_end=1.0, t_start=0.0, **kw):
    return ev.EvolutionConfig(dt, t_end, n, ev.Boundary.periodic(length), t_start, **kw)


@pytest.mark.parametrize("kwargs", [dict(dealias=0.3), dict(dt=-1e-3), dict(n=2),
                                    dict(dt=1.0, n=256)])
def test_config_rejected(kwargs):
    with pytest.raises(ValueError):
        box(**kwargs)


def test_budget_message_suggests_dt():
    with pytest.raises(ValueError, match="reduce dt"):
        box(dt=1.0, n=256)


def test_boundary_validation():
    with pytest.raises(ValueError):
        ev.Boundary(0.0, 1.0, "dirichlet")
    with pytest.raises(ValueError):
        ev.Boundary(1.0, 1.0)
    assert ev.Boundary.line(5.0).length == 10.0


def test_grid_and_steps():
    cfg = box(n=8, dt=0.1, t_end=1.0)
    assert cfg.steps == 10
    assert cfg.x[1] == pytest.approx(2 * math.pi / 8)
    assert cfg.k_retained == pytest.approx(2.0)


def test_background_is_fixed_point():
    cfg = box(t_end=2.0)
    traj = ev.evolve_nls(np.ones(cfg.n), cfg)
    assert np.max(np.abs(traj.final - 1.0)) < 1e-14


@pytest.mark.parametrize("k, a", [(1.0, 0.5), (3.0, 1.2)])
def test_plane_wave_exact(k, a):
    # u = a exp(i(kx - wt)), w = k^2/2 - a^2 + 1; the splitting is exact for it
    cfg = box(dt=1e-2, t_end=1.0, n=32)
    x = cfg.x
    traj = ev.evolve_nls(a * np.exp(1j * k * x), cfg)
    w = k * k / 2 - a * a + 1
    assert np.max(np.abs(traj.final - a * np.exp(1j * (k * x - w * 1.0)))) < 1e-11


def test_shape_checked():
    cfg = box(n=16)
    with pytest.raises(ValueError, match="shape"):
        ev.evolve_nls(np.ones(8), cfg)


def test_ab_tracking_and_invariants():
    ab = BreatherSpec.ab(0.6)
    cfg = ev.EvolutionConfig(5e-4, 0.0, 128, ev.Boundary.periodic(ab.period_x), -2.0)
    traj = ev.evolve_nls(ab(cfg.x, -2.0), cfg)
    assert np.max(np.abs(traj.final - ab(cfg.x, 0.0))) < 1e-5
    assert traj.mass_drift() < 1e-10
    # the splitting conserves energy only to O(dt^2); the AB energy itself is zero
    e = traj.diagnostic("energy")
    assert np.max(np.abs(e - e[0])) < 1e-5


def test_strang_is_second_order():
    ab = BreatherSpec.ab(0.6)
    cfg = ev.EvolutionConfig(0.02, 0.0, 64, ev.Boundary.periodic(ab.period_x), -1.0)
    diffs, order = ev.self_convergence(lambda c: ev.evolve_nls(ab(c.x, -1.0), c), cfg)
    assert order == pytest.approx(2.0, abs=0.1)
    assert diffs[1] < diffs[0]


def test_linearized_bounded_mode():
    k = 2.5
    v = lin.constant_basis(k)[0]
    cfg = box(length=2 * math.pi / k, n=32, dt=1e-3, t_end=1.0)
    traj = ev.evolve_linearized(CONSTANT, v(cfg.x, 0.0), cfg)
    assert np.max(np.abs(traj.final - v(cfg.x, 1.0))) < 1e-5


def test_linearized_growing_mode_about_ab():
    ab = BreatherSpec.ab(0.6)
    v = lin.ab_family(0.6, classify=False)["w2"]
    cfg = ev.EvolutionConfig(1e-3, 0.5, 128, ev.Boundary.periodic(ab.period_x), -0.5)
    traj = ev.evolve_linearized(ab, v(cfg.x, -0.5), cfg)
    ref = v(cfg.x, 0.5)
    assert np.max(np.abs(traj.final - ref)) < 1e-5 * max(1.0, np.max(np.abs(ref)))


def test_potential_sampler_matches_closed_form():
    x = np.linspace(-8, 8, 33)
    for spec in (BreatherSpec.ab(0.6), BreatherSpec.kmb(1.25)):
        sample = ev.potential_sampler(spec, x)
        for t in (-1.3, 0.0, 0.77):
            np.testing.assert_allclose(sample(t), spec(x, t), atol=1e-12)


@pytest.mark.parametrize("k, rate", [(math.sqrt(2), 1.0), (1.0, math.sqrt(3) / 2),
                                     (2.0, 0.0), (2.5, 0.0)])
def test_mi_rate(k, rate):
    assert ev.mi_rate(k) == pytest.approx(rate)


def test_stationary_window_finds_linear_stretch():
    t = np.linspace(0, 10, 101)
    y = np.where(t < 3, 0.0, 2.0 * (t - 3))
    y = np.where(t > 8, 10.0, y)
    i, j = ev.stationary_window(t, y)
    assert t[i] == pytest.approx(3.0) and t[j] == pytest.approx(8.0)
    with pytest.raises(ev.LinearRegimeError):
        ev.stationary_window(t, np.zeros_like(t))


def test_modal_amplitude():
    cfg = box(n=32)
    d = 0.3 * np.cos(2 * cfg.x) + 0.1 * np.sin(5 * cfg.x)
    assert ev.modal_amplitude(d, cfg.k, 2.0) == pytest.approx(0.3)


def test_background_instability_rate():
    k = math.sqrt(2)
    cfg = ev.EvolutionConfig(1e-3, 20.0, 64, ev.Boundary.periodic(2 * math.pi / k))
    report = ev.instability_experiment(CONSTANT, k, cfg)
    assert report.measured == pytest.approx(1.0, rel=0.02)
    assert report.times.shape == report.amplitudes.shape


def test_instability_needs_box_mode():
    cfg = box(length=5.0)
    with pytest.raises(ValueError, match="not a mode"):
        ev.instability_experiment(CONSTANT, 1.0, cfg)

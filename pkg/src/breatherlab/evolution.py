"""Split-step Fourier integration of the NLS equation and its linearization.

Both integrators use Strang splitting on a periodic box. The dispersive
substep is diagonal in Fourier space; the potential substep is solved exactly
pointwise:

* NLS: u -> u exp(i (|u|^2 - 1) dt), which leaves |u| unchanged;
* linearized NLS about a closed-form u0: the real-linear 2x2 system for
  (v, conj(v)) with matrix i [[a, b], [-conj(b), -a]], a = 2|u0|^2 - 1,
  b = u0^2, whose square is -(a^2 - |b|^2) times the identity, so the
  exponential is cos(w dt) I + sin(w dt)/w M with u0 frozen at the midpoint.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.fft as sfft

from .exact import OVERFLOW_GUARD, BreatherSpec, Kind

log = logging.getLogger(__name__)

STABILITY_BUDGET = 50.0     # dt * k_max^2 over the retained modes
BLOWUP_AMPLITUDE = 1e6
LINEAR_REGIME = 1e-2
SLOPE_STATIONARITY = 0.01
KMB_SAMPLES_PER_PERIOD = 8


class BlowUpError(RuntimeError):
    def __init__(self, message: str, trajectory: "Trajectory"):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass(frozen=True)
class Boundary:
    """Periodic box [x_min, x_max); ``kind`` records whether it stands in for the line."""

    x_min: float
    x_max: float
    kind: str = "periodic"

    def __post_init__(self):
        if self.kind not in ("periodic", "truncated-line"):
            raise ValueError(f"boundary kind must be periodic or truncated-line, got {self.kind!r}")
        if not self.x_max > self.x_min:
            raise ValueError("empty spatial span")

    @classmethod
    def periodic(cls, length: float, x_min: float = 0.0) -> "Boundary":
        return cls(x_min, x_min + length, "periodic")

    @classmethod
    def line(cls, half_width: float) -> "Boundary":
        return cls(-half_width, half_width, "truncated-line")

    @property
    def length(self) -> float:
        return self.x_max - self.x_min


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float
    t_end: float
    n: int
    boundary: Boundary
    t_start: float = 0.0
    dealias: float = 2.0 / 3.0
    monitor_every: int = 10
    store_every: Optional[int] = None     # None stores only the first and last fields

    def __post_init__(self):
        if not 0.5 <= self.dealias <= 1.0:
            raise ValueError(f"dealias fraction must lie in [1/2, 1], got {self.dealias}")
        if self.dt <= 0 or self.n < 4 or self.monitor_every < 1:
            raise ValueError("dt must be positive, n >= 4 and monitor_every >= 1")
        if self.budget > STABILITY_BUDGET:
            raise ValueError(f"dt * k_max^2 = {self.budget:.3g} exceeds the stability budget "
                             f"{STABILITY_BUDGET}; reduce dt below "
                             f"{STABILITY_BUDGET / self.k_retained ** 2:.3g}")

    @property
    def x(self) -> np.ndarray:
        return self.boundary.x_min + self.boundary.length * np.arange(self.n) / self.n

    @property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.boundary.length / self.n)

    @property
    def mask(self) -> np.ndarray:
        kk = np.abs(self.k)
        return kk <= self.dealias * kk.max() + 1e-12

    @property
    def k_retained(self) -> float:
        return float(np.abs(self.k[self.mask]).max())

    @property
    def budget(self) -> float:
        return self.dt * self.k_retained ** 2

    @property
    def steps(self) -> int:
        return int(round((self.t_end - self.t_start) / self.dt))

    def as_dict(self) -> dict:
        b = self.boundary
        return {"dt": self.dt, "t_start": self.t_start, "t_end": self.t_end, "n": self.n,
                "boundary": {"kind": b.kind, "x_min": b.x_min, "x_max": b.x_max},
                "dealias": self.dealias, "monitor_every": self.monitor_every,
                "store_every": self.store_every}

    def with_dt(self, dt: float) -> "EvolutionConfig":
        return EvolutionConfig(dt, self.t_end, self.n, self.boundary, self.t_start,
                               self.dealias, self.monitor_every, self.store_every)


@dataclass
class Trajectory:
    x: np.ndarray
    times: list[float] = field(default_factory=list)
    fields: list[np.ndarray] = field(default_factory=list, repr=False)
    diagnostics: list[dict] = field(default_factory=list)

    @property
    def final(self) -> np.ndarray:
        return self.fields[-1]

    def diagnostic(self, name: str) -> np.ndarray:
        return np.array([d[name] for d in self.diagnostics])

    def mass_drift(self) -> float:
        m = self.diagnostic("mass")
        return float(np.max(np.abs(m - m[0])) / abs(m[0]))

    def diagnostic_rows(self) -> list[tuple]:
        return [(d["t"], d["mass"], d["energy"], d["max_amp"]) for d in self.diagnostics]


def mass(u: np.ndarray, dx: float) -> float:
    return float(np.sum(np.abs(u) ** 2) * dx)


def energy(u: np.ndarray, k: np.ndarray, dx: float) -> float:
    """Hamiltonian  int |u_x|^2 / 2 - (|u|^2 - 1)^2 / 2 dx  of the normalized NLS."""
    ux = np.fft.ifft(1j * k * np.fft.fft(u))
    return float(np.sum(0.5 * np.abs(ux) ** 2 - 0.5 * (np.abs(u) ** 2 - 1.0) ** 2) * dx)


def _record(traj: Trajectory, t: float, u: np.ndarray, cfg: EvolutionConfig, store: bool):
    dx = cfg.boundary.length / cfg.n
    amp = float(np.max(np.abs(u)))
    traj.diagnostics.append({"t": t, "mass": mass(u, dx), "energy": energy(u, cfg.k, dx),
                             "max_amp": amp})
    if store:
        traj.times.append(t)
        traj.fields.append(u.copy())
    if not math.isfinite(amp) or amp > BLOWUP_AMPLITUDE:
        raise BlowUpError(f"max |u| = {amp:.3g} at t = {t:.6g}; integration halted", traj)


def _run(u0, cfg: EvolutionConfig, potential_step: Callable[[np.ndarray, float], np.ndarray]
         ) -> Trajectory:
    u = np.asarray(u0, dtype=complex).copy()
    if u.shape != (cfg.n,):
        raise ValueError(f"initial data has shape {u.shape}, config expects ({cfg.n},)")
    half = np.exp(-0.25j * cfg.k ** 2 * cfg.dt) * cfg.mask
    traj = Trajectory(cfg.x)
    steps = cfg.steps
    _record(traj, cfg.t_start, u, cfg, True)
    for i in range(1, steps + 1):
        t_mid = cfg.t_start + (i - 0.5) * cfg.dt
        u = sfft.ifft(half * sfft.fft(u))
        u = potential_step(u, t_mid)
        u = sfft.ifft(half * sfft.fft(u))
        t = cfg.t_start + i * cfg.dt
        store = i == steps or (cfg.store_every is not None and i % cfg.store_every == 0)
        if store or i % cfg.monitor_every == 0:
            _record(traj, t, u, cfg, store)
    return traj


def evolve_nls(u0, cfg: EvolutionConfig) -> Trajectory:
    """Strang split-step integration of  i u_t + u_xx/2 + (|u|^2 - 1) u = 0."""
    dt = cfg.dt

    def phase(u, _t):
        return u * np.exp(1j * (np.abs(u) ** 2 - 1.0) * dt)

    return _run(u0, cfg, phase)


def _linear_flow(u0: np.ndarray, dt: float):
    """cos(w dt) and sin(w dt)/w for w^2 = a^2 - |b|^2 of either sign."""
    a = 2.0 * (u0.real ** 2 + u0.imag ** 2) - 1.0
    b = u0 * u0
    w2 = a * a - (b.real ** 2 + b.imag ** 2)
    r = np.sqrt(np.abs(w2))
    rdt = r * dt
    osc = w2 >= 0
    c = np.where(osc, np.cos(rdt), np.cosh(rdt))
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(osc, np.sin(rdt), np.sinh(rdt)) / r
    s = np.where(rdt < 1e-8, dt, s)
    return c, s, a, b


def potential_sampler(about: BreatherSpec, x: np.ndarray) -> Callable[[float], np.ndarray]:
    """Fast ``t -> about(x, t)`` on fixed nodes, reusing the x-dependent factors."""
    x = np.asarray(x, dtype=float)
    lam = about.lambda0
    if about.kind is Kind.KUZNETSOV_MA:
        arg = about.beta0 * x
        far = np.abs(arg) > OVERFLOW_GUARD
        ch = lam * np.cosh(np.where(far, 0.0, arg))
        al, amp = about.alpha0, 2.0 * (lam ** 2 - 1.0)

        def sample(t):
            c, s = math.cos(al * t), math.sin(al * t)
            return np.where(far, -1.0 + 0.0j, -1.0 + (amp * c + 1j * al * s) / (ch - c))
        return sample
    if about.kind is Kind.AKHMEDIEV and abs(about.sigma0) > 0:
        cs = lam * np.cos(about.k0 * x)
        sg, amp = about.sigma0, 2.0 * (1.0 - lam ** 2)

        def sample(t):
            if abs(sg * t) > OVERFLOW_GUARD:
                return about(x, t)
            c, s = math.cosh(sg * t), math.sinh(sg * t)
            return -1.0 + (amp * c + 1j * sg * s) / (c - cs)
        return sample
    return lambda t: about(x, t)


def evolve_linearized(about: BreatherSpec, v0, cfg: EvolutionConfig) -> Trajectory:
    """Strang splitting for  i v_t + v_xx/2 + (2|u0|^2 - 1) v + u0^2 conj(v) = 0.

    The closed-form potential ``u0 = about(x, t)`` is sampled at the midpoint
    of each step.
    """
    dt = cfg.dt
    potential = potential_sampler(about, cfg.x)

    def step(v, t_mid):
        c, s, a, b = _linear_flow(potential(t_mid), dt)
        return c * v + s * 1j * (a * v + b * np.conj(v))

    return _run(v0, cfg, step)


def self_convergence(run: Callable[[EvolutionConfig], Trajectory], cfg: EvolutionConfig,
                     levels: int = 3) -> tuple[list[float], float]:
    """Differences of terminal fields under dt halving and the observed order."""
    finals = [run(cfg.with_dt(cfg.dt / 2 ** j)).final for j in range(levels)]
    diffs = [float(np.max(np.abs(finals[j] - finals[j + 1]))) for j in range(levels - 1)]
    order = math.log2(diffs[-2] / diffs[-1]) if len(diffs) >= 2 and diffs[-1] > 0 else float("nan")
    return diffs, order


# ---------------------------------------------------------------------------
# modulation instability experiments

def mi_rate(k: float) -> float:
    """Growth rate k lambda(k) = k sqrt(4 - k^2) / 2 of the background mode k."""
    return 0.5 * k * math.sqrt(4.0 - k * k) if 0.0 < k < 2.0 else 0.0


@dataclass(frozen=True)
class RateReport:
    predicted: float
    measured: float
    window: tuple[float, float]
    amplitude: float
    retried: bool = False
    wavenumber: Optional[float] = None
    times: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    amplitudes: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def rel_err(self) -> float:
        return abs(self.measured - self.predicted) / abs(self.predicted)

    def as_dict(self) -> dict:
        return {"predicted": self.predicted, "measured": self.measured, "rel_err": self.rel_err,
                "window": list(self.window), "amplitude": self.amplitude,
                "retried": self.retried, "wavenumber": self.wavenumber}


class LinearRegimeError(RuntimeError):
    pass


def modal_amplitude(deviation: np.ndarray, k_grid: np.ndarray, k: float) -> float:
    """|c_k| + |c_-k| of the deviation at the grid wavenumber nearest to k."""
    c = np.fft.fft(deviation) / deviation.size
    ip = int(np.argmin(np.abs(k_grid - k)))
    im = int(np.argmin(np.abs(k_grid + k)))
    return float(abs(c[ip]) + abs(c[im]))


def stationary_window(t: np.ndarray, y: np.ndarray, lag: int = 1,
                      tol: float = SLOPE_STATIONARITY, min_slopes: int = 3) -> tuple[int, int]:
    """Longest run [i, j) of lagged slopes (y[m+lag]-y[m])/(t[m+lag]-t[m]) within tol of their median."""
    s = (y[lag:] - y[:-lag]) / (t[lag:] - t[:-lag])
    best = (0, 0)
    for i in range(s.size):
        for j in range(s.size, i + min_slopes - 1, -1):
            if j - i <= best[1] - best[0]:
                break
            seg = s[i:j]
            med = np.median(seg)
            if med > 0 and np.all(np.abs(seg - med) <= tol * med):
                best = (i, j)
                break
    if best[1] - best[0] < min_slopes:
        raise LinearRegimeError("no window with a stationary growth rate")
    return best


def _measure(about: BreatherSpec, k: float, amplitude: float, cfg: EvolutionConfig,
             stride: int, core_radius: Optional[float] = None) -> tuple[np.ndarray, np.ndarray]:
    """Modal amplitude of (perturbed run - unperturbed run) at every ``stride`` steps.

    Differencing two runs of the same scheme cancels the splitting error of
    the breather itself, leaving only the evolved perturbation. With
    ``core_radius`` the deviation is first multiplied by a smooth window
    vanishing for |x| < core_radius, so that only the far field counts.
    """
    x = cfg.x
    window = 1.0 if core_radius is None else 0.5 * (1.0 + np.tanh(np.abs(x) - core_radius))
    base = about(x, cfg.t_start)
    store = EvolutionConfig(cfg.dt, cfg.t_end, cfg.n, cfg.boundary, cfg.t_start, cfg.dealias,
                            cfg.monitor_every, stride)
    ref = evolve_nls(base, store)
    pert = evolve_nls(base + amplitude * np.cos(k * x), store)
    t = np.array(pert.times)
    amp = np.array([modal_amplitude((u - r) * window, cfg.k, k)
                    for u, r in zip(pert.fields, ref.fields)])
    return t, amp


def instability_experiment(about: BreatherSpec, k: float, cfg: EvolutionConfig,
                           amplitude: float = 1e-6, predicted: Optional[float] = None,
                           core_radius: Optional[float] = None) -> RateReport:
    """Perturb ``about`` by amplitude*cos(kx), evolve the full NLS and fit ln|c_k|.

    For the time-periodic Kuznetsov-Ma breather the amplitude is sampled
    ``KMB_SAMPLES_PER_PERIOD`` times per period and slopes are taken over one
    full period, so that the periodic modulation of the growing mode drops out,
    and the deviation is measured away from the core (|x| > 15/beta0 unless
    ``core_radius`` is given), where the perturbation sees the background.
    The fit window is the longest run of stationary local slopes while the
    deviation stays below ``LINEAR_REGIME``; if the linear regime is left
    before such a window appears, the amplitude is reduced 100-fold once.
    """
    L = cfg.boundary.length
    if abs(k * L / (2 * math.pi) - round(k * L / (2 * math.pi))) > 1e-9:
        raise ValueError(f"wavenumber {k} is not a mode of a box of length {L}")
    predicted = mi_rate(k) if predicted is None else predicted
    lag = 1
    if about.kind is Kind.KUZNETSOV_MA:
        lag = KMB_SAMPLES_PER_PERIOD
        stride = int(round(about.period_t / cfg.dt / lag))
        if abs(stride * lag * cfg.dt - about.period_t) > 1e-9 * about.period_t:
            raise ValueError(f"dt must divide the Kuznetsov-Ma period into multiples of {lag} steps")
        if core_radius is None:
            core_radius = 15.0 / about.beta0
    else:
        stride = max(1, int(round(0.05 / cfg.dt)))
    retried = False
    for attempt in range(2):
        t, amp = _measure(about, k, amplitude, cfg, stride, core_radius)
        linear = amp < LINEAR_REGIME
        n_lin = int(np.argmin(linear)) if not linear.all() else linear.size
        try:
            i, j = stationary_window(t[:n_lin], np.log(amp[:n_lin]), lag)
        except LinearRegimeError:
            if attempt == 0:
                log.info("linear regime left before a fit window; shrinking amplitude")
                amplitude /= 100.0
                retried = True
                continue
            raise
        y = np.log(amp)
        slopes = (y[lag:] - y[:-lag]) / (t[lag:] - t[:-lag])
        rate = float(np.mean(slopes[i:j]))
        return RateReport(predicted, rate, (float(t[i]), float(t[j - 1 + lag])), amplitude,
                          retried, k, t, amp)
    raise LinearRegimeError("unreachable")


def linear_growth_fit(traj: Trajectory, window: tuple[float, float], period: float,
                      mode: int = 1) -> float:
    """Slope of ln|c_mode| of the stored fields over ``window`` (time units)."""
    t = np.array(traj.times)
    sel = (t >= window[0]) & (t <= window[1])
    c = np.array([np.abs(np.fft.fft(f)[mode]) for f in np.array(traj.fields)[sel]])
    return float(np.polyfit(t[sel], np.log(c), 1)[0])

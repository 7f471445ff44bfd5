"""Solutions of the linearized NLS equation built from Lax solutions.

The linearized equation about a solution u_hat is

    i v_t + v_xx / 2 + (2 |u_hat|^2 - 1) v + u_hat^2 conj(v) = 0.

Two Lax solutions phi, psi at the same lambda give the quadratic
("squared eigenfunction") solutions

    Pair I    phi_1^2 - conj(phi_2)^2           i (phi_1^2 + conj(phi_2)^2)
    Pair II   phi_1 psi_1 - conj(phi_2 psi_2)   i (phi_1 psi_1 + conj(phi_2 psi_2))
    Pair III  psi_1^2 - conj(psi_2)^2           i (psi_1^2 + conj(psi_2)^2)

and a Jordan pair (phi, phi_g) gives 2 phi_1 phi_g1 - 2 conj(phi_2 phi_g2)
and its i-variant.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from . import darboux, fd, lax
from .exact import BreatherSpec, Kind, eval_breather, is_resolved
from .grid import SpaceTimeGrid
from .lax import VectorSolution


class Pair(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"


class Variant(str, enum.Enum):
    REAL = "real"
    IMAG = "imag"


class Provenance(str, enum.Enum):
    PAIR_I = "PairI"
    PAIR_II = "PairII"
    PAIR_III = "PairIII"
    GENERALIZED = "Generalized"
    COMBINATION = "Combination"


class Growth(str, enum.Enum):
    DECAYING = "Decaying"
    BOUNDED = "Bounded"
    LINEAR_T = "LinearT"
    EXP_GROWING = "ExpGrowing"
    EXP_DECAYING = "ExpDecaying"
    UNBOUNDED_X = "UnboundedX"


@dataclass(frozen=True)
class GrowthClass:
    """Growth behaviour; ``axis`` is the variable the rate refers to."""

    kind: Growth
    rate: Optional[float] = None
    axis: str = "t"

    def as_dict(self) -> dict:
        return {"class": self.kind.value, "rate": self.rate, "axis": self.axis}

    def __str__(self) -> str:
        if self.rate is None:
            return self.kind.value
        return f"{self.kind.value}({self.rate:.6g})"


@dataclass(frozen=True)
class LinearizedSolution:
    """A solution v(x, t) of the linearized NLS equation about ``about``."""

    func: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    about: BreatherSpec
    provenance: Provenance
    growth_class: Optional[GrowthClass] = None
    label: str = ""
    combination: Optional[str] = None

    def __call__(self, x, t) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        out = np.asarray(self.func(x, t), dtype=complex)
        return np.broadcast_to(out, np.broadcast(x, t).shape)

    evaluate = __call__

    def with_growth(self, g: GrowthClass) -> "LinearizedSolution":
        return replace(self, growth_class=g)

    def relabel(self, label: str) -> "LinearizedSolution":
        return replace(self, label=label)

    def scaled(self, c: complex) -> "LinearizedSolution":
        f = self.func
        return replace(self, func=lambda x, t: c * f(x, t))


def combine(about: BreatherSpec, terms: Sequence[tuple[complex, LinearizedSolution]],
            label: str, description: str) -> LinearizedSolution:
    """Linear combination sum c_j v_j (the equation is real-linear, so c_j must be real
    unless every v_j comes with its i-multiple)."""
    terms = list(terms)

    def f(x, t):
        return sum(c * v(x, t) for c, v in terms)

    return LinearizedSolution(f, about, Provenance.COMBINATION, None, label, description)


def _quad(a1, a2, b1, b2, variant: Variant):
    if variant is Variant.REAL:
        return a1 * b1 - np.conj(a2 * b2)
    return 1j * (a1 * b1 + np.conj(a2 * b2))


_PROVENANCE = {Pair.I: Provenance.PAIR_I, Pair.II: Provenance.PAIR_II,
               Pair.III: Provenance.PAIR_III}

CONSTANT = BreatherSpec(Kind.CONSTANT)


def squared_map(phi: VectorSolution, psi: Optional[VectorSolution], pair, variant,
                about: BreatherSpec = CONSTANT, label: str = "") -> LinearizedSolution:
    """Quadratic solution of the linearized equation from one or two Lax solutions."""
    pair, variant = Pair(pair), Variant(variant)
    if pair is not Pair.I and psi is None:
        raise ValueError(f"pair {pair.value} needs a second Lax solution")
    if pair is Pair.II and abs(complex(phi.lam) - complex(psi.lam)) > lax.SPECTRUM_TOL:
        raise ValueError(f"pair II needs both solutions at one lambda, got {phi.lam} and {psi.lam}")
    a = phi if pair is not Pair.III else psi
    b = psi if pair is Pair.II else a

    def f(x, t):
        A = a(x, t)
        B = A if b is a else b(x, t)
        return _quad(A[0], A[1], B[0], B[1], variant)

    return LinearizedSolution(f, about, _PROVENANCE[pair], None, label)


CHAIN_TOL = 1e-6


def _check_grid(phi: VectorSolution) -> SpaceTimeGrid:
    span = phi.period if phi.period else 2.0 * math.pi
    return SpaceTimeGrid(0.0, span, 24, 0.0, 1.0, 24)


def chain_residual(phi: VectorSolution, phi_g: VectorSolution, about: BreatherSpec = CONSTANT,
                   grid: Optional[SpaceTimeGrid] = None) -> float:
    """Largest Lax residual of phi and of phi_g with phi_g chained to phi."""
    grid = grid or _check_grid(phi)
    u = about.__call__
    r0 = lax.lax_residual(u, phi.lam, phi, grid)
    r1 = lax.lax_residual(u, phi.lam, phi_g, grid, chain=(phi,))
    return float(max(*r0, *r1))


def generalized_map(phi: VectorSolution, phi_g: VectorSolution, variant,
                    about: BreatherSpec = CONSTANT, label: str = "",
                    grid: Optional[SpaceTimeGrid] = None) -> LinearizedSolution:
    """2 phi_1 phi_g1 - 2 conj(phi_2 phi_g2) (or the i-variant) for a Jordan pair.

    The chain relations are residual-checked first; a violated chain raises.
    """
    variant = Variant(variant)
    res = chain_residual(phi, phi_g, about, grid)
    if not res < CHAIN_TOL:
        raise ValueError(f"(phi, phi_g) is not a Jordan chain: Lax residual {res:.3g}")

    def f(x, t):
        A, B = phi(x, t), phi_g(x, t)
        return 2.0 * _quad(A[0], A[1], B[0], B[1], variant)

    return LinearizedSolution(f, about, Provenance.GENERALIZED, None, label)


# ---------------------------------------------------------------------------
# residuals and growth fits


# Sixth-order stencils (three Richardson levels). Solutions reach |v| ~ 1e2
# near the Kuznetsov-Ma peak, where a fourth-order stencil stalls near 1e-7
# between truncation and round-off; the step is therefore tied to the
# potential's length scales, not to the sampling grid.
LIN_LEVELS = 3


def stencil_steps(about: BreatherSpec) -> tuple[float, float]:
    """(hx, ht) giving a ~1e-9 relative sixth-order derivative error."""
    if about.kind is Kind.AKHMEDIEV:
        return about.period_x / 512.0, 2.0 / about.sigma0 / 160.0
    if about.kind is Kind.KUZNETSOV_MA:
        return 2.0 / about.beta0 / 128.0, about.period_t / 512.0
    return 0.01, 0.01


def lin_nls_residual(about: BreatherSpec, v: LinearizedSolution, grid: SpaceTimeGrid,
                     steps: Optional[tuple[float, float]] = None,
                     levels: int = LIN_LEVELS) -> float:
    """Max-norm of i v_t + v_xx/2 + (2|u|^2-1) v + u^2 conj(v) at the grid points.

    Derivatives are Richardson-extrapolated central differences of order
    2 * ``levels``; ``steps`` overrides the default (hx, ht).
    """
    if not is_resolved(about.feature_scales(), grid.dx, grid.dt):
        warnings.warn(f"grid {grid.nx}x{grid.nt} under-resolves the {about.kind.value} "
                      "potential; the residual may not reflect the solution", stacklevel=2)
    x, t = grid.mesh()
    hx, ht = steps or stencil_steps(about)
    u = eval_breather(about, x, t)
    f = v.__call__
    val = f(x, t)
    res = (1j * fd.derivative(f, x, t, ht, "t", 1, levels)
           + 0.5 * fd.derivative(f, x, t, hx, "x", 2, levels)
           + (2.0 * np.abs(u) ** 2 - 1.0) * val + u * u * np.conj(val))
    return float(np.max(np.abs(res)))


ZERO_FRACTION = 1e-6
PROBE_SHIFT = 0.1234567
MAX_PROBE_ATTEMPTS = 5


def growth_rate(v, window: tuple[float, float], x_probe: float, n: int = 64,
                axis: str = "t", t_probe: float = 0.0) -> float:
    """Least-squares slope of ln|v| along ``axis`` over ``window``.

    Along t the probe is the point x_probe; along x it is the time t_probe.
    A probe where |v| comes close to zero is shifted by a fixed step and the
    fit retried, up to five attempts.
    """
    s = np.linspace(window[0], window[1], n)
    probe = x_probe if axis == "t" else t_probe
    for _ in range(MAX_PROBE_ATTEMPTS):
        vals = np.abs(v(probe, s) if axis == "t" else v(s, probe))
        top = np.max(vals)
        if top > 0 and np.min(vals) > ZERO_FRACTION * top:
            return float(np.polyfit(s, np.log(vals), 1)[0])
        probe += PROBE_SHIFT
    raise ValueError(f"|v| passes through zero at every probe tried along {axis} "
                     f"over {window}")


RATE_TOL = 0.05
# thresholds on the power-law exponent d ln|v| / d ln t over a window [t0, t1]
EXP_POWER = 2.5
LINEAR_POWER = (0.5, 1.5)


def modal_growth_rate(v, window: tuple[float, float], period: float, mode: int = 1,
                      n: int = 64, nx: int = 64) -> float:
    """Slope of ln(|c_m| + |c_-m|) in t, c_m the Fourier coefficients over one period."""
    x = np.linspace(0.0, period, nx, endpoint=False)
    ts = np.linspace(window[0], window[1], n)
    amp = []
    for t in ts:
        c = np.fft.fft(v(x, t)) / nx
        amp.append(abs(c[mode]) + abs(c[-mode]))
    amp = np.asarray(amp)
    if np.min(amp) <= 0:
        raise ValueError(f"mode {mode} vanishes on the window {window}")
    return float(np.polyfit(ts, np.log(amp), 1)[0])


def power_exponent(v, window: tuple[float, float], x_samples: Sequence[float],
                   n: int = 64) -> tuple[float, float]:
    """(d ln N / d ln t, d ln N / dt) for N(t) = max over x_samples of |v(x, t)|."""
    if window[0] <= 0:
        raise ValueError("power-law fits need a window inside t > 0")
    ts = np.linspace(window[0], window[1], n)
    xs = np.asarray(x_samples, dtype=float)
    norm = np.array([np.max(np.abs(v(xs, t))) for t in ts])
    logn = np.log(norm)
    return float(np.polyfit(np.log(ts), logn, 1)[0]), float(np.polyfit(ts, logn, 1)[0])


def classify_in_t(v, window: tuple[float, float], x_samples: Sequence[float],
                  period: Optional[float] = None) -> GrowthClass:
    """Growth class from the power-law exponent of sup_x |v| over ``window``.

    An exponential e^{rt} has exponent r t across the window, a linear term
    exponent 1. The reported rate is the sup-norm slope, or, with ``period``,
    the slope of the first Fourier mode, which separates the exponential part
    from secular mean terms.
    """
    p, r = power_exponent(v, window, x_samples)
    if abs(p) >= EXP_POWER:
        if period is not None:
            r = modal_growth_rate(v, window, period)
        return GrowthClass(Growth.EXP_GROWING if p > 0 else Growth.EXP_DECAYING, r, "t")
    if LINEAR_POWER[0] <= p <= LINEAR_POWER[1]:
        return GrowthClass(Growth.LINEAR_T, None, "t")
    if p < -LINEAR_POWER[0]:
        return GrowthClass(Growth.DECAYING, None, "t")
    return GrowthClass(Growth.BOUNDED, None, "t")


def _linear_in_t(v, x_probes, window) -> bool:
    p, _ = power_exponent(v, window, x_probes)
    return LINEAR_POWER[0] <= p <= LINEAR_POWER[1]


def classify_in_x(v, x_window: tuple[float, float], t_probes: Sequence[float],
                  t_window: tuple[float, float], rate_tol: float = RATE_TOL) -> GrowthClass:
    """Decay in |x| (both tails), falling back to the t-behaviour of the tails."""
    rates = []
    for tp in t_probes:
        rates.append(growth_rate(v, x_window, 0.0, axis="x", t_probe=tp))
        rates.append(growth_rate(lambda x, t: v(-x, t), x_window, 0.0, axis="x", t_probe=tp))
    r = float(np.max(rates))
    if r < -rate_tol:
        return GrowthClass(Growth.EXP_DECAYING, r, "x")
    if r > rate_tol:
        return GrowthClass(Growth.UNBOUNDED_X, r, "x")
    tails = (x_window[1], -x_window[1])
    if _linear_in_t(v, tails, t_window):
        return GrowthClass(Growth.LINEAR_T, None, "t")
    return GrowthClass(Growth.BOUNDED, None, "x")


# ---------------------------------------------------------------------------
# constant background


def constant_basis(k: float) -> list[LinearizedSolution]:
    """Separated solutions v_k(t) cos(kx), v_k(t) sin(kx) about u = 1.

    Returns [v+ cos, v+ sin, v- cos, v- sin] for k > 0 and [v+, v-] for k = 0.
    """
    k = float(k)
    if k < 0:
        raise ValueError("wavenumber must be nonnegative")
    tol = lax.SPECTRUM_TOL
    if k <= tol:
        plus = lambda t: 2j * np.ones_like(t)
        minus = lambda t: 1.0 + 2j * t
        g_plus, g_minus = GrowthClass(Growth.BOUNDED), GrowthClass(Growth.LINEAR_T)
    elif abs(k - 2.0) <= tol:
        plus = lambda t: 2.0 * np.ones_like(t) + 0j
        minus = lambda t: 1j + 2.0 * t
        g_plus, g_minus = GrowthClass(Growth.BOUNDED), GrowthClass(Growth.LINEAR_T)
    elif k < 2.0:
        lam = 0.5 * math.sqrt(4.0 - k * k)
        r = k * lam
        plus = lambda t: (2j * lam + k) * np.exp(r * t)
        minus = lambda t: (2j * lam - k) * np.exp(-r * t)
        g_plus, g_minus = GrowthClass(Growth.EXP_GROWING, r), GrowthClass(Growth.EXP_DECAYING, -r)
    else:
        gam = 0.5 * math.sqrt(k * k - 4.0)
        w = k * gam
        plus = lambda t: k * np.cos(w * t) - 2j * gam * np.sin(w * t)
        minus = lambda t: 2j * gam * np.cos(w * t) + k * np.sin(w * t)
        g_plus = g_minus = GrowthClass(Growth.BOUNDED)

    def mk(temporal, spatial, g, label):
        def f(x, t):
            return temporal(np.asarray(t, float)) * spatial(np.asarray(x, float))
        return LinearizedSolution(f, CONSTANT, Provenance.COMBINATION, g, label, f"k={k:g}")

    if k <= tol:
        one = lambda x: np.ones_like(x)
        return [mk(plus, one, g_plus, "v+"), mk(minus, one, g_minus, "v-")]
    c = lambda x: np.cos(k * x)
    s = lambda x: np.sin(k * x)
    return [mk(plus, c, g_plus, "v+cos"), mk(plus, s, g_plus, "v+sin"),
            mk(minus, c, g_minus, "v-cos"), mk(minus, s, g_minus, "v-sin")]


# ---------------------------------------------------------------------------
# catalogs


@dataclass(frozen=True)
class CatalogEntry:
    label: str
    solution: LinearizedSolution = field(repr=False)
    asymptotic_partner: Optional[str] = None


@dataclass(frozen=True)
class FamilyCatalog:
    """Labelled solutions about one breather.

    ``relations`` lists entries that are constant multiples of others, as
    (label, other, factor); they are excluded from the independence check.
    ``intermediates`` holds the x-unbounded building blocks.
    """

    about: BreatherSpec
    entries: tuple[CatalogEntry, ...]
    relations: tuple[tuple[str, str, float], ...] = ()
    intermediates: dict = field(default_factory=dict, repr=False)

    @property
    def labels(self) -> list[str]:
        return [e.label for e in self.entries]

    def __getitem__(self, label: str) -> LinearizedSolution:
        for e in self.entries:
            if e.label == label:
                return e.solution
        if label in self.intermediates:
            return self.intermediates[label]
        raise KeyError(label)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def independent_labels(self) -> list[str]:
        dependent = {r[0] for r in self.relations}
        return [lab for lab in self.labels if lab not in dependent]

    def gram_min_singular(self, grid: Optional[SpaceTimeGrid] = None,
                          labels: Optional[Sequence[str]] = None) -> float:
        """Smallest singular value of the column-normalized sample Gram matrix."""
        grid = grid or independence_grid(self.about)
        labels = list(labels) if labels is not None else self.independent_labels
        x, t = grid.mesh()
        cols = [self[lab](x, t).ravel() for lab in labels]
        A = np.stack([c / np.linalg.norm(c) for c in cols], axis=1)
        G = A.conj().T @ A
        return float(np.linalg.svd(G, compute_uv=False)[-1])

    def manifest(self) -> list[dict]:
        rows = []
        for e in self.entries:
            g = e.solution.growth_class
            rows.append({"label": e.label, "provenance": e.solution.provenance.value,
                         "combination": e.solution.combination,
                         "growth_class": g.kind.value if g else None,
                         "rate": g.rate if g else None,
                         "axis": g.axis if g else None,
                         "partner": e.asymptotic_partner})
        return rows


def independence_grid(about: BreatherSpec) -> SpaceTimeGrid:
    if about.kind is Kind.AKHMEDIEV:
        return SpaceTimeGrid.periodic(about.period_x, 32, -2.0, 2.0, 33)
    if about.kind is Kind.KUZNETSOV_MA:
        return SpaceTimeGrid(-10.0, 10.0, 81, 0.0, about.period_t, 33)
    return SpaceTimeGrid(-5.0, 5.0, 41, -1.0, 1.0, 21)


def ab_growth_window(spec: BreatherSpec) -> tuple[float, float]:
    s = spec.sigma0
    return 3.0 / s, 6.0 / s


def _cross(a: VectorSolution, b: VectorSolution, variant: Variant):
    """Pair II form of two vector functions without the equal-lambda check."""
    def f(x, t):
        A, B = a(x, t), b(x, t)
        return _quad(A[0], A[1], B[0], B[1], variant)
    return f


def ab_family(lambda0: float, classify: bool = True) -> FamilyCatalog:
    """The six L-periodic solutions about the Akhmediev breather.

    v1, v2 come from the bounded eigenfunction at lambda = 1, w1, w2 from the
    lambda0 eigenfunction, and the remaining three are combinations in which
    the linear-in-x parts of the Pair II solutions cancel.
    """
    spec = BreatherSpec(Kind.AKHMEDIEV, lambda0)
    seed = darboux.build_seed(Kind.AKHMEDIEV, lambda0)
    lam, k = spec.lambda0, spec.k0
    ex = darboux.laurent_expansion(seed)
    phi_hat, psi_hat = darboux.lambda_one_solutions(seed)
    R, I = Variant.REAL, Variant.IMAG

    def sol(func, prov, label):
        return LinearizedSolution(func, spec, prov, None, label)

    v1 = squared_map(phi_hat, None, Pair.I, R, spec, "v1")
    v2 = squared_map(phi_hat, None, Pair.I, I, spec, "v2")
    w1 = squared_map(ex.phi0, None, Pair.I, R, spec, "w1")
    w2 = squared_map(ex.phi0, None, Pair.I, I, spec, "w2")
    v3 = squared_map(phi_hat, psi_hat, Pair.II, R, spec, "v3")
    v4 = squared_map(phi_hat, psi_hat, Pair.II, I, spec, "v4")
    w3 = squared_map(ex.phi0, ex.psi0, Pair.II, R, spec, "w3")
    w4 = squared_map(ex.phi0, ex.psi0, Pair.II, I, spec, "w4")

    def expansion_term(variant):
        f0, f1 = _cross(ex.phi0, ex.psi1, variant), _cross(ex.phi1, ex.psi0, variant)
        return lambda x, t: f0(x, t) + f1(x, t)

    v_plus = sol(expansion_term(R), Provenance.PAIR_II, "v+")
    v_minus = sol(expansion_term(I), Provenance.PAIR_II, "v-")
    ratio = (1.0 - lam) / (1.0 + lam)
    element = combine(spec, [(lam ** 2 * ratio, v3), (-1.0, w3)], "element_basis",
                      "lambda0^2 (1-lambda0)/(1+lambda0) v3 - w3")
    new_plus = combine(spec, [(k ** 2, v_plus), (-2.0 * lam * (3.0 - 2.0 * lam ** 2) * ratio, v3)],
                       "new_plus", "k0^2 v+ - 2 lambda0 (3-2 lambda0^2)(1-lambda0)/(1+lambda0) v3")
    new_minus = combine(spec, [(k ** 2, v_minus), (-2.0 * (1.0 - 4.0 * lam ** 2) / lam, w4),
                               (-8.0 * lam ** 2 * ratio, v4)],
                        "new_minus",
                        "k0^2 v- - 2(1-4 lambda0^2)/lambda0 w4 - 8 lambda0^2 (1-lambda0)/(1+lambda0) v4")
    six = [("v1", v1, "v_{lambda(k1)}^-"), ("v2", v2, "v~_0^+"),
           ("w2", w2, "v_{-lambda(k1)}^-"), ("element_basis", element, "v~_0^-"),
           ("new_plus", new_plus, "v_{-lambda(k1)}^+"), ("new_minus", new_minus, "v_{lambda(k1)}^+")]
    if classify:
        window = ab_growth_window(spec)
        L = spec.period_x
        xs = np.linspace(0.0, L, 64, endpoint=False)
        six = [(lab, v.with_growth(classify_in_t(v, window, xs, L)), p) for lab, v, p in six]
    entries = tuple(CatalogEntry(lab, v.relabel(lab), p) for lab, v, p in six)
    inter = {"w1": w1, "v3": v3, "v4": v4, "w3": w3, "w4": w4, "v+": v_plus, "v-": v_minus}
    return FamilyCatalog(spec, entries, (), inter)


def v1_w1_factor(lambda0: float) -> float:
    """v1 = factor * w1 for both breathers."""
    return -4.0 * (1.0 + lambda0) / (lambda0 * (1.0 - lambda0))


def kmb_family(lambda0: float, classify: bool = True) -> FamilyCatalog:
    """Solutions about the Kuznetsov-Ma breather generated by lambda0 and lambda = 1.

    w1, w2, w3 decay exponentially in |x|; w4 and v2 tend to constants; v3
    grows linearly in t; v1 is a multiple of w1 and is recorded as a relation.
    """
    spec = BreatherSpec(Kind.KUZNETSOV_MA, lambda0)
    seed = darboux.build_seed(Kind.KUZNETSOV_MA, lambda0)
    ex = darboux.laurent_expansion(seed)
    phi_hat, psi_hat = darboux.lambda_one_solutions(seed)
    R, I = Variant.REAL, Variant.IMAG
    sols = [
        ("w1", squared_map(ex.phi0, None, Pair.I, R, spec)),
        ("w2", squared_map(ex.phi0, None, Pair.I, I, spec)),
        ("w3", squared_map(ex.phi0, ex.psi0, Pair.II, R, spec)),
        ("w4", squared_map(ex.phi0, ex.psi0, Pair.II, I, spec)),
        ("v1", squared_map(phi_hat, None, Pair.I, R, spec)),
        ("v2", squared_map(phi_hat, None, Pair.I, I, spec)),
        ("v3", squared_map(phi_hat, psi_hat, Pair.II, R, spec)),
    ]
    if classify:
        b, T = spec.beta0, spec.period_t
        x_window = (10.0 / b, 20.0 / b)
        t_probes = [0.1 * T, 0.37 * T, 0.71 * T]
        t_window = (T, 6.0 * T)
        sols = [(lab, v.with_growth(classify_in_x(v, x_window, t_probes, t_window)))
                for lab, v in sols]
    entries = tuple(CatalogEntry(lab, v.relabel(lab), None) for lab, v in sols)
    return FamilyCatalog(spec, entries, (("v1", "w1", v1_w1_factor(lambda0)),))


def family(spec: BreatherSpec, classify: bool = True) -> FamilyCatalog:
    if spec.kind is Kind.AKHMEDIEV:
        return ab_family(spec.lambda0, classify)
    if spec.kind is Kind.KUZNETSOV_MA:
        return kmb_family(spec.lambda0, classify)
    raise ValueError(f"solution families are available for ab and kmb, not {spec.kind.value}")


def export_catalog(catalog: FamilyCatalog, out_dir, grid: Optional[SpaceTimeGrid] = None,
                   debug: bool = False) -> dict:
    """Per-entry field CSVs in the WaveField layout plus a JSON manifest.

    With ``debug`` the x-unbounded intermediates are written as well.
    """
    from pathlib import Path

    from . import io

    out = Path(out_dir)
    grid = grid or independence_grid(catalog.about)
    x, t = grid.mesh()
    rows = catalog.manifest()
    items = [(e.label, e.solution) for e in catalog.entries]
    if debug:
        items += sorted(catalog.intermediates.items())
        rows += [{"label": k, "provenance": v.provenance.value, "combination": v.combination,
                  "growth_class": None, "rate": None, "axis": None, "partner": None,
                  "intermediate": True} for k, v in sorted(catalog.intermediates.items())]
    files = {}
    for label, sol in items:
        path, _ = io.write_field_csv(out / f"{label}.csv", grid, sol(x, t),
                                     {"label": label, "about": catalog.about.as_dict()})
        files[label] = path.name
    for row in rows:
        row["file"] = files[row["label"]]
    manifest = {"about": catalog.about.as_dict(), "grid": grid.as_dict(), "entries": rows,
                "relations": [{"label": a, "multiple_of": b, "factor": f}
                              for a, b, f in catalog.relations],
                "gram_min_singular": catalog.gram_min_singular()}
    io.write_json(out / "manifest.json", manifest)
    return manifest

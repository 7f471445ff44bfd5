"""Closed-form background, Akhmediev, Kuznetsov-Ma and Peregrine solutions.

All solutions are of the normalized NLS equation

    i u_t + u_xx / 2 + (|u|^2 - 1) u = 0,

i.e. with the background phase factor exp(it) removed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import fd
from .grid import SpaceTimeGrid

# |argument| beyond which cosh/sinh are replaced by the analytic asymptote
OVERFLOW_GUARD = 300.0


class Kind(str, enum.Enum):
    CONSTANT = "constant"
    AKHMEDIEV = "ab"
    KUZNETSOV_MA = "kmb"
    PEREGRINE = "prw"

    @classmethod
    def parse(cls, value) -> "Kind":
        if isinstance(value, cls):
            return value
        aliases = {
            "akhmediev": cls.AKHMEDIEV, "kuznetsovma": cls.KUZNETSOV_MA,
            "kuznetsov-ma": cls.KUZNETSOV_MA, "km": cls.KUZNETSOV_MA,
            "peregrine": cls.PEREGRINE, "background": cls.CONSTANT,
        }
        key = str(value).strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown breather kind {value!r}; "
                             f"expected one of {[k.value for k in cls]}") from None


class Direction(str, enum.Enum):
    T_PLUS_INF = "t+inf"
    T_MINUS_INF = "t-inf"
    X_PLUS_INF = "x+inf"
    X_MINUS_INF = "x-inf"


@dataclass(frozen=True)
class BreatherSpec:
    """Breather kind plus its spectral parameter.

    ``lambda0`` lives in the open interval (0, 1) for the Akhmediev breather
    and (1, inf) for Kuznetsov-Ma; it is ``None`` for the constant background
    and the Peregrine wave.
    """

    kind: Kind
    lambda0: Optional[float] = None

    def __post_init__(self):
        kind = Kind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        lam = self.lambda0
        if kind in (Kind.CONSTANT, Kind.PEREGRINE):
            if lam is not None:
                raise ValueError(f"{kind.value} takes no lambda0")
            return
        if lam is None or not math.isfinite(lam):
            raise ValueError(f"{kind.value} requires a finite lambda0")
        lam = float(lam)
        object.__setattr__(self, "lambda0", lam)
        if kind is Kind.AKHMEDIEV and not 0.0 < lam < 1.0:
            raise ValueError(f"Akhmediev breather needs lambda0 in (0, 1), got {lam}")
        if kind is Kind.KUZNETSOV_MA and not lam > 1.0:
            raise ValueError(f"Kuznetsov-Ma breather needs lambda0 in (1, inf), got {lam}")

    @classmethod
    def ab(cls, lambda0: float) -> "BreatherSpec":
        return cls(Kind.AKHMEDIEV, lambda0)

    @classmethod
    def kmb(cls, lambda0: float) -> "BreatherSpec":
        return cls(Kind.KUZNETSOV_MA, lambda0)

    # AB constants
    @property
    def k0(self) -> float:
        self._require(Kind.AKHMEDIEV)
        return 2.0 * math.sqrt(1.0 - self.lambda0 ** 2)

    @property
    def sigma0(self) -> float:
        return self.lambda0 * self.k0

    @property
    def period_x(self) -> float:
        return 2.0 * math.pi / self.k0

    # KMB constants
    @property
    def beta0(self) -> float:
        self._require(Kind.KUZNETSOV_MA)
        return 2.0 * math.sqrt(self.lambda0 ** 2 - 1.0)

    @property
    def alpha0(self) -> float:
        return self.lambda0 * self.beta0

    @property
    def period_t(self) -> float:
        return 2.0 * math.pi / self.alpha0

    def _require(self, kind: Kind):
        if self.kind is not kind:
            raise ValueError(f"constant only defined for {kind.value}, not {self.kind.value}")

    def constants(self) -> dict:
        if self.kind is Kind.AKHMEDIEV:
            return {"k0": self.k0, "sigma0": self.sigma0, "L": self.period_x}
        if self.kind is Kind.KUZNETSOV_MA:
            return {"beta0": self.beta0, "alpha0": self.alpha0, "T": self.period_t}
        return {}

    def as_dict(self) -> dict:
        return {"kind": self.kind.value, "lambda0": self.lambda0, **self.constants()}

    @classmethod
    def from_dict(cls, d: dict) -> "BreatherSpec":
        return cls(Kind.parse(d["kind"]), d.get("lambda0"))

    def feature_scales(self) -> tuple[float, float]:
        """Shortest oscillation or width in x and in t, for resolution checks."""
        if self.kind is Kind.AKHMEDIEV:
            return self.period_x, 2.0 / self.sigma0
        if self.kind is Kind.KUZNETSOV_MA:
            return 2.0 / self.beta0, self.period_t
        if self.kind is Kind.PEREGRINE:
            return 1.0, 1.0
        return math.inf, math.inf

    def __call__(self, x, t):
        return eval_breather(self, x, t)


def eval_breather(spec: BreatherSpec, x, t):
    """Evaluate the closed-form solution at ``(x, t)`` (numpy broadcasting).

    Inputs in ``np.longdouble`` are evaluated in extended precision.
    """
    x = np.asarray(x)
    t = np.asarray(t)
    real = np.result_type(x, t, np.float64)
    x = x.astype(real, copy=False)
    t = t.astype(real, copy=False)
    kind = spec.kind
    if kind is Kind.CONSTANT:
        return np.ones(np.broadcast(x, t).shape, dtype=np.result_type(real, np.complex128))
    if kind is Kind.PEREGRINE:
        return -1.0 + 4.0 * (1.0 + 2.0j * t) / (1.0 + 4.0 * (x * x + t * t))
    lam = spec.lambda0
    if kind is Kind.AKHMEDIEV:
        k, s = spec.k0, spec.sigma0
        arg = s * t
        big = np.abs(arg) > OVERFLOW_GUARD
        a = np.where(big, 0.0, arg)
        ch, sh = np.cosh(a), np.sinh(a)
        u = -1.0 + (2.0 * (1.0 - lam ** 2) * ch + 1j * s * sh) / (ch - lam * np.cos(k * x))
        tail = (1.0 - 2.0 * lam ** 2) + 1j * s * np.sign(arg)
        return np.where(big, tail, u)
    b, al = spec.beta0, spec.alpha0
    arg = b * x
    big = np.abs(arg) > OVERFLOW_GUARD
    a = np.where(big, 0.0, arg)
    c, sn = np.cos(al * t), np.sin(al * t)
    u = -1.0 + (2.0 * (lam ** 2 - 1.0) * c + 1j * al * sn) / (lam * np.cosh(a) - c)
    return np.where(big, -1.0 + 0.0j, u)


def asymptotic_value(spec: BreatherSpec, direction) -> complex:
    """Analytic limit of the breather as t or x goes to +-infinity."""
    d = Direction(direction)
    if spec.kind is Kind.AKHMEDIEV and d in (Direction.T_PLUS_INF, Direction.T_MINUS_INF):
        sign = 1.0 if d is Direction.T_PLUS_INF else -1.0
        return complex(1.0 - 2.0 * spec.lambda0 ** 2, sign * spec.k0 * spec.lambda0)
    if spec.kind is Kind.KUZNETSOV_MA and d in (Direction.X_PLUS_INF, Direction.X_MINUS_INF):
        return -1.0 + 0.0j
    raise ValueError(f"no limit {d.value} for a {spec.kind.value} solution")


def modulus_squared_closed_form(spec: BreatherSpec, x, t):
    """Right-hand side of the |u|^2 identity from the Darboux construction."""
    lam = spec.lambda0
    if spec.kind is Kind.AKHMEDIEV:
        ch, cs = np.cosh(spec.sigma0 * t), np.cos(spec.k0 * x)
        return 1.0 + lam * spec.k0 ** 2 * (ch * cs - lam) / (ch - lam * cs) ** 2
    if spec.kind is Kind.KUZNETSOV_MA:
        ch, cs = np.cosh(spec.beta0 * x), np.cos(spec.alpha0 * t)
        return 1.0 + spec.alpha0 * spec.beta0 * (lam - ch * cs) / (lam * ch - cs) ** 2
    raise ValueError("the modulus identity holds only for Darboux-transformed solutions "
                     f"(ab, kmb), not {spec.kind.value}")


def modulus_identity_residual(spec: BreatherSpec, grid: SpaceTimeGrid) -> float:
    x, t = grid.mesh()
    rhs = modulus_squared_closed_form(spec, x, t)
    return float(np.max(np.abs(np.abs(eval_breather(spec, x, t)) ** 2 - rhs)))


@dataclass
class WaveField:
    """Breather sampled on a grid; ``values`` has shape ``(nt, nx)``."""

    spec: BreatherSpec
    grid: SpaceTimeGrid
    values: np.ndarray = field(repr=False)

    @classmethod
    def sample(cls, spec: BreatherSpec, grid: SpaceTimeGrid) -> "WaveField":
        x, t = grid.mesh()
        return cls(spec, grid, eval_breather(spec, x, t))


@dataclass(frozen=True)
class ResidualReport:
    value: float
    under_resolved: bool
    hx: float
    ht: float

    def as_dict(self) -> dict:
        return {"value": self.value, "under_resolved": self.under_resolved,
                "hx": self.hx, "ht": self.ht}


POINTS_PER_FEATURE = 16
# Stencil step along each axis = spacing * min(1, feature / span) / STENCIL_DIVISOR.
# Tying the step to the spacing makes the residual fall at fourth order; the
# feature/span factor keeps windows holding many features (KMB, PRW) as
# accurate as one-period AB windows.
STENCIL_DIVISOR = 8


def is_resolved(scales: tuple[float, float], hx: float, ht: float) -> bool:
    sx, st = scales
    return hx <= sx / POINTS_PER_FEATURE and ht <= st / POINTS_PER_FEATURE


def stencil_steps(spec: BreatherSpec, grid: SpaceTimeGrid,
                  divisor: float = STENCIL_DIVISOR) -> tuple[float, float]:
    sx, st = spec.feature_scales()
    fx = min(1.0, sx / (grid.x_max - grid.x_min))
    ft = min(1.0, st / (grid.t_max - grid.t_min))
    return grid.dx * fx / divisor, grid.dt * ft / divisor


def nls_residual(wave: WaveField, divisor: float = STENCIL_DIVISOR) -> ResidualReport:
    """Max-norm of ``i u_t + u_xx/2 + (|u|^2 - 1) u`` over the field's grid.

    Derivatives are fourth-order Richardson-extrapolated central differences
    of the analytic solution with steps from ``stencil_steps``. The solution
    is re-evaluated in extended precision so that round-off in the second
    difference stays far below the truncation error; the residual therefore
    converges as ``O(spacing**4)`` under grid refinement.
    """
    spec, grid = wave.spec, wave.grid
    x, t = (a.astype(np.longdouble) for a in grid.mesh())
    hx, ht = stencil_steps(spec, grid, divisor)
    f = spec.__call__
    u = eval_breather(spec, x, t)
    u_t = fd.derivative(f, x, t, np.longdouble(ht), "t", 1)
    u_xx = fd.derivative(f, x, t, np.longdouble(hx), "x", 2)
    res = 1j * u_t + 0.5 * u_xx + (np.abs(u) ** 2 - 1.0) * u
    resolved = is_resolved(spec.feature_scales(), grid.dx, grid.dt)
    return ResidualReport(float(np.max(np.abs(res))), not resolved, hx, ht)


def default_grid(spec: BreatherSpec, n: int = 64) -> SpaceTimeGrid:
    """One spatial period (AB), one temporal period (KMB), or a box around the origin."""
    if spec.kind is Kind.AKHMEDIEV:
        return SpaceTimeGrid.periodic(spec.period_x, n, -3.0, 3.0, n)
    if spec.kind is Kind.KUZNETSOV_MA:
        return SpaceTimeGrid(-8.0, 8.0, n, 0.0, spec.period_t, n)
    return SpaceTimeGrid(-4.0, 4.0, n, -2.0, 2.0, n)


def peregrine_deviation(kind, gap: float, x_half: float = 5.0, t_half: float = 3.0,
                        n: int = 201) -> float:
    """Max |u - u_PRW| on [-x_half, x_half] x [-t_half, t_half] for lambda0 = 1 -+ gap.

    The Akhmediev breather approaches from below (1 - gap), Kuznetsov-Ma from
    above (1 + gap). The deviation is first order in the gap: at the origin
    the breathers peak at 1 + 2 lambda0 against 3 for the Peregrine wave.
    """
    kind = Kind.parse(kind)
    if not gap > 0:
        raise ValueError("gap must be positive")
    if kind is Kind.AKHMEDIEV:
        spec = BreatherSpec.ab(1.0 - gap)
    elif kind is Kind.KUZNETSOV_MA:
        spec = BreatherSpec.kmb(1.0 + gap)
    else:
        raise ValueError(f"only ab and kmb have a Peregrine limit, not {kind.value}")
    x = np.linspace(-x_half, x_half, n)
    t = np.linspace(-t_half, t_half, n)
    X, T = np.meshgrid(x, t)
    prw = BreatherSpec(Kind.PEREGRINE)
    return float(np.max(np.abs(eval_breather(spec, X, T) - eval_breather(prw, X, T))))

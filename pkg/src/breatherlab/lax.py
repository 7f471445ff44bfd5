"""Lax system at the constant background and residual checks for any potential.

The Lax pair of the normalized NLS equation is

    phi_x = U(u, lam) phi,   phi_t = V(u, lam) phi,

with U = [[lam, u], [-conj(u), -lam]] and
V = i [[lam^2 + (|u|^2-1)/2, lam u + u_x/2], [-lam conj(u) + conj(u_x)/2, -lam^2 - (|u|^2-1)/2]].
Writing the x-equation as (Lop - lam) phi = 0 with Lop = [[d/dx, -u], [-conj(u), -d/dx]]
makes generalized eigenfunctions available: (Lop - lam) phi_g = phi is
phi_g,x = U phi_g + sigma3 phi.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from . import fd
from .grid import SpaceTimeGrid

# absolute distance within which a lambda counts as lying on an analytic set
SPECTRUM_TOL = 1e-9
SIGMA3 = np.array([1.0, -1.0])

FieldEvaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]


class BoundaryClass(str, enum.Enum):
    PERIODIC = "periodic"
    ANTIPERIODIC = "antiperiodic"
    LOCALIZED = "localized"
    UNBOUNDED = "unbounded"


class Role(str, enum.Enum):
    EIGENFUNCTION = "eigenfunction"
    GENERALIZED = "generalized_eigenfunction"
    SECOND_SOLUTION = "second_solution"


class Domain(str, enum.Enum):
    WHOLE_LINE = "whole_line"
    PERIODIC = "periodic"
    ANTIPERIODIC = "antiperiodic"


@dataclass(frozen=True)
class VectorSolution:
    """A 2-vector function of (x, t) solving (or chained into) the Lax system.

    ``func(x, t)`` returns an array of shape ``(2, *broadcast(x, t).shape)``.
    ``period`` is the L for the periodic and antiperiodic classes; ``None``
    there means the function is constant in x (periodic for every L).
    """

    func: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    lam: complex
    boundary_class: BoundaryClass
    role: Role = Role.EIGENFUNCTION
    label: str = ""
    period: Optional[float] = None

    def __call__(self, x, t) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        out = np.asarray(self.func(x, t), dtype=complex)
        shape = np.broadcast(x, t).shape
        return np.broadcast_to(out, (2,) + shape)

    evaluate = __call__

    def component(self, i: int) -> FieldEvaluator:
        return lambda x, t: self(x, t)[i]

    def scaled(self, c: complex, label: Optional[str] = None) -> "VectorSolution":
        f = self.func
        return VectorSolution(lambda x, t: c * np.asarray(f(x, t)), self.lam,
                              self.boundary_class, self.role, label or self.label, self.period)


def constant_field(value: complex = 1.0) -> FieldEvaluator:
    def u(x, t):
        return np.full(np.broadcast(np.asarray(x), np.asarray(t)).shape, value, dtype=complex)
    return u


# ---------------------------------------------------------------------------
# closed-form solutions at u = 1


def _k_real(lam: float) -> float:
    return 2.0 * math.sqrt(max(0.0, 1.0 - lam * lam))


def _on_sigma0(lam: complex, tol: float = SPECTRUM_TOL) -> bool:
    lam = complex(lam)
    return abs(lam.real) <= tol or (abs(lam.imag) <= tol and abs(lam.real) <= 1.0 + tol)


def _real_branch(lam: float) -> list[VectorSolution]:
    """Solutions for lam in (0, 1) and lam = 1."""
    if abs(lam - 1.0) <= SPECTRUM_TOL:
        def phi(x, t):
            one = np.ones(np.broadcast(x, t).shape, dtype=complex)
            return np.stack([one, -one])

        def psi(x, t):
            z = x + 1j * t
            return np.stack([z + 1.0, -z])

        return [VectorSolution(phi, 1.0, BoundaryClass.PERIODIC, Role.EIGENFUNCTION, "phi"),
                VectorSolution(psi, 1.0, BoundaryClass.UNBOUNDED, Role.SECOND_SOLUTION, "psi")]
    k = _k_real(lam)
    sm = cmath.sqrt(lam - 0.5j * k)
    sp = cmath.sqrt(lam + 0.5j * k)
    L = 2.0 * math.pi / k

    def phi(x, t):
        e = np.exp(-0.5j * k * (x + 1j * lam * t))
        return np.stack([sm * e, -sp * e])

    def psi(x, t):
        e = np.exp(0.5j * k * (x + 1j * lam * t))
        return np.stack([sp * e, -sm * e])

    return [VectorSolution(phi, lam, BoundaryClass.ANTIPERIODIC, Role.EIGENFUNCTION, "phi", L),
            VectorSolution(psi, lam, BoundaryClass.ANTIPERIODIC, Role.EIGENFUNCTION, "psi", L)]


def _imaginary_branch(gamma: float) -> list[VectorSolution]:
    """Solutions for lam = i*gamma, gamma != 0 (both signs use the same closed form)."""
    k = 2.0 * math.sqrt(1.0 + gamma * gamma)
    a = math.sqrt(0.5 * k - gamma)
    b = math.sqrt(0.5 * k + gamma)
    L = 2.0 * math.pi / k
    lam = 1j * gamma

    def phi(x, t):
        e = np.exp(-0.5j * k * (x - gamma * t))
        return np.stack([a * e, -1j * b * e])

    def psi(x, t):
        e = np.exp(0.5j * k * (x - gamma * t))
        return np.stack([b * e, 1j * a * e])

    return [VectorSolution(phi, lam, BoundaryClass.ANTIPERIODIC, Role.EIGENFUNCTION, "phi", L),
            VectorSolution(psi, lam, BoundaryClass.ANTIPERIODIC, Role.EIGENFUNCTION, "psi", L)]


def _zero_branch() -> list[VectorSolution]:
    def phi(x, t):
        e = np.exp(-1j * x) * np.ones_like(t)
        return np.stack([e, -1j * e])

    def psi(x, t):
        e = np.exp(1j * x) * np.ones_like(t)
        return np.stack([e, 1j * e])

    def phi_g(x, t):
        e = np.exp(-1j * x)
        return np.stack([t * e, (-1.0 - 1j * t) * e])

    def psi_g(x, t):
        e = np.exp(1j * x)
        return np.stack([-t * e, (-1.0 - 1j * t) * e])

    L = math.pi
    A = BoundaryClass.ANTIPERIODIC
    return [VectorSolution(phi, 0.0, A, Role.EIGENFUNCTION, "phi", L),
            VectorSolution(psi, 0.0, A, Role.EIGENFUNCTION, "psi", L),
            VectorSolution(phi_g, 0.0, A, Role.GENERALIZED, "phi_g", L),
            VectorSolution(psi_g, 0.0, A, Role.GENERALIZED, "psi_g", L)]


def background_solutions(lam: complex) -> list[VectorSolution]:
    """Closed-form Lax solutions at u = 1 for lam in iR or [-1, 1].

    Returns two solutions for lam != 0 (for lam = +-1 the second one grows
    linearly) and, for lam = 0, the two eigenfunctions followed by the two
    generalized eigenfunctions. Negative real lam is reached through
    ``symmetry_partner``.
    """
    lam = complex(lam)
    if not _on_sigma0(lam):
        raise ValueError(f"lambda={lam} is off the background spectrum iR u [-1, 1]; "
                         "only bounded closed forms are provided")
    if abs(lam) <= SPECTRUM_TOL:
        return _zero_branch()
    if abs(lam.imag) <= SPECTRUM_TOL:
        re = lam.real
        if re > 0:
            return _real_branch(min(re, 1.0))
        return [symmetry_partner(s) for s in _real_branch(min(-re, 1.0))]
    return _imaginary_branch(lam.imag)


def symmetry_partner(phi: VectorSolution) -> VectorSolution:
    """(p, q) at lam -> (-conj(q), conj(p)) at -conj(lam)."""
    f = phi.func

    def g(x, t):
        p, q = np.asarray(f(x, t), dtype=complex)
        return np.stack([-np.conj(q), np.conj(p)])

    lam = -np.conj(complex(phi.lam))
    return VectorSolution(g, complex(lam), phi.boundary_class, phi.role,
                          (phi.label + "~") if phi.label else "", phi.period)


def adjoint_solution(phi: VectorSolution) -> VectorSolution:
    """Adjoint-problem partner phi* = (conj(phi_2), conj(phi_1))."""
    f = phi.func

    def g(x, t):
        p, q = np.asarray(f(x, t), dtype=complex)
        return np.stack([np.conj(q), np.conj(p)])

    return VectorSolution(g, complex(np.conj(complex(phi.lam))), phi.boundary_class,
                          phi.role, (phi.label + "*") if phi.label else "", phi.period)


def wronskian(phi: VectorSolution, psi: VectorSolution, x, t) -> np.ndarray:
    a, b = phi(x, t), psi(x, t)
    return a[0] * b[1] - a[1] * b[0]


# ---------------------------------------------------------------------------
# residuals


def lax_matrices(u, u_x, lam: complex):
    """U and V as arrays of shape (2, 2, ...)."""
    u = np.asarray(u, dtype=complex)
    ub = np.conj(u)
    m = 0.5 * (np.abs(u) ** 2 - 1.0)
    lam_arr = np.full(u.shape, lam, dtype=complex)
    U = np.array([[lam_arr, u], [-ub, -lam_arr]])
    V = 1j * np.array([[lam ** 2 + m, lam * u + 0.5 * u_x],
                       [-lam * ub + 0.5 * np.conj(u_x), -lam ** 2 - m]])
    return U, V


def _apply(M, v):
    return np.einsum("ij...,j...->i...", M, v)


def lax_residual(u_eval: FieldEvaluator, lam: complex, phi: VectorSolution,
                 grid: SpaceTimeGrid, chain: Sequence[VectorSolution] = (),
                 refine: int = fd.REFINEMENT) -> tuple[float, float]:
    """Max-norm residuals of the x- and t-equations of the Lax pair on ``grid``.

    ``chain`` holds lower members of a Jordan chain at the same ``lam``:
    ``chain[0]`` is the solution one step down (so phi solves
    (Lop - lam) phi = chain[0]), ``chain[1]`` two steps down. The equations
    checked are the Taylor coefficients of the lam-dependent Lax pair,

        phi_x = U phi + sigma3 c1,
        phi_t = V phi + V' c1 + (V''/2) c2,

    with V' = i [[2 lam, u], [-conj(u), -2 lam]] and V''/2 = i sigma3.
    Derivatives are Richardson central differences with steps equal to the
    grid spacing over ``refine``.
    """
    x, t = grid.mesh()
    hx, ht = grid.dx / refine, grid.dt / refine
    u = u_eval(x, t)
    u_x = fd.derivative(u_eval, x, t, hx, "x", 1)
    U, V = lax_matrices(u, u_x, lam)
    v = phi(x, t)
    phi_x = np.stack([fd.derivative(phi.component(i), x, t, hx, "x", 1) for i in range(2)])
    phi_t = np.stack([fd.derivative(phi.component(i), x, t, ht, "t", 1) for i in range(2)])
    rx = phi_x - _apply(U, v)
    rt = phi_t - _apply(V, v)
    if len(chain) >= 1:
        c1 = chain[0](x, t)
        rx = rx - SIGMA3[:, None, None] * c1
        V1 = 1j * np.array([[np.full(u.shape, 2 * lam, dtype=complex), u],
                            [-np.conj(u), np.full(u.shape, -2 * lam, dtype=complex)]])
        rt = rt - _apply(V1, c1)
    if len(chain) >= 2:
        rt = rt - 1j * SIGMA3[:, None, None] * chain[1](x, t)
    return float(np.max(np.abs(rx))), float(np.max(np.abs(rt)))


def certify_boundary_class(phi: VectorSolution, t: float = 0.0, n: int = 64,
                           tol: float = 1e-8, span: float = 40.0) -> BoundaryClass:
    """Sampled classification: shift test against +-phi, then a decay test."""
    L = phi.period
    if L is not None:
        x = np.linspace(0.0, L, n, endpoint=False)
        a = phi(x, t)
        b = phi(x + L, t)
        scale = max(np.max(np.abs(a)), 1e-300)
        if np.max(np.abs(b - a)) <= tol * scale:
            return BoundaryClass.PERIODIC
        if np.max(np.abs(b + a)) <= tol * scale:
            return BoundaryClass.ANTIPERIODIC
    x = np.linspace(-span, span, 8 * n + 1)
    amp = np.max(np.abs(phi(x, t)), axis=0)
    centre = np.max(amp[np.abs(x) <= 1.0])
    edge = max(amp[0], amp[-1])
    if edge <= 1e-6 * centre:
        return BoundaryClass.LOCALIZED
    if L is None and np.ptp(amp) <= tol * max(centre, 1e-300):
        return BoundaryClass.PERIODIC
    return BoundaryClass.UNBOUNDED


# ---------------------------------------------------------------------------
# spectrum classification


@dataclass(frozen=True)
class SpectralPoint:
    lam: complex
    domain: Domain = Domain.WHOLE_LINE
    period: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "domain", Domain(self.domain))
        if self.domain is not Domain.WHOLE_LINE and not (self.period and self.period > 0):
            raise ValueError(f"{self.domain.value} domain needs a positive period L")


@dataclass(frozen=True)
class MultiplicityRecord:
    lam: complex
    geometric: Optional[int]
    algebraic: Optional[int]
    index: Optional[int] = None
    note: str = ""

    def __post_init__(self):
        g, a = self.geometric, self.algebraic
        if g is not None and a is not None and not a >= g >= 1:
            raise ValueError(f"invalid multiplicities geometric={g}, algebraic={a}")

    @property
    def determinate(self) -> bool:
        return self.geometric is not None and self.algebraic is not None

    def as_dict(self) -> dict:
        lam = complex(self.lam)
        return {"lambda": [lam.real, lam.imag], "geometric": self.geometric,
                "algebraic": self.algebraic, "index": self.index, "note": self.note}


def lambda_m(m: int, L: float) -> complex:
    """sqrt(1 - pi^2 m^2 / L^2); purely imaginary (positive part) once pi m > L."""
    r = 1.0 - (math.pi * m / L) ** 2
    return complex(math.sqrt(r)) if r >= 0 else 1j * math.sqrt(-r)


def _multiplicity_on_sigma0(lam: complex) -> tuple[int, int]:
    if abs(lam) <= SPECTRUM_TOL:
        return 2, 4
    if abs(abs(lam) - 1.0) <= SPECTRUM_TOL and abs(lam.imag) <= SPECTRUM_TOL:
        return 1, 1
    return 2, 2


def classify_background_lambda(pt: SpectralPoint) -> MultiplicityRecord:
    """Geometric and algebraic multiplicity of ``pt.lam`` for u = 1."""
    lam = complex(pt.lam)
    if not _on_sigma0(lam):
        raise ValueError(f"lambda={lam} is not in the background spectrum iR u [-1, 1]")
    g, a = _multiplicity_on_sigma0(lam)
    if pt.domain is Domain.WHOLE_LINE:
        return MultiplicityRecord(lam, g, a)
    L = pt.period
    # lam = +-lambda_m  <=>  k(lam) = 2 sqrt(1 - lam^2) = 2 pi m / L
    k = 2.0 * cmath.sqrt(1.0 - lam * lam)
    m = int(round((k.real * L) / (2.0 * math.pi)))
    want_even = pt.domain is Domain.PERIODIC
    target = lambda_m(m, L)
    hit = min(abs(lam - target), abs(lam + target))
    if hit > SPECTRUM_TOL or (m % 2 == 0) != want_even:
        kind = "even m (or m = 0)" if want_even else "odd m"
        raise ValueError(f"lambda={lam} is not +-lambda_m for {kind} with L={L}")
    return MultiplicityRecord(lam, g, a, index=m)


def fredholm_inner_product(phi_star: VectorSolution, phi: VectorSolution,
                           domain: tuple[float, float], t: float = 0.0,
                           rtol: float = 1e-10, atol: float = 1e-12) -> complex:
    """L2 inner product <phi_star, phi> = integral of conj(phi_star) . phi over ``domain``.

    ``phi_star`` is the adjoint-problem function, e.g. from
    ``adjoint_solution``. Real and imaginary parts are integrated separately
    by adaptive Gauss-Kronrod quadrature; infinite endpoints are allowed.
    """
    a, b = domain

    def integrand(x):
        v = np.sum(np.conj(phi_star(x, t)) * phi(x, t), axis=0)
        return complex(v)

    parts = []
    for take in (np.real, np.imag):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err, info = integrate.quad(lambda s: float(take(integrand(s))), a, b,
                                            epsabs=atol, epsrel=rtol, limit=400,
                                            full_output=1)[:3]
        if err > max(atol, rtol * abs(val)) * 10:
            raise RuntimeError(f"quadrature did not converge: achieved {err:.3g} "
                               f"(value {val:.6g}, requested rel {rtol:g})")
        parts.append(val)
    return complex(parts[0], parts[1])

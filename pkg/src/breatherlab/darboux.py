"""One-fold Darboux transformation from u = 1 to the Akhmediev and Kuznetsov-Ma breathers.

The seed is the second column (p_-, q_-) of the background fundamental matrix
at lambda0. The Kuznetsov-Ma case reuses the Akhmediev algebra through
k0 = i beta0, sigma0 = i alpha0; only analytic (conjugation-free) expressions
are continued that way, while the transformed eigenfunction is always built
from the actual seed values.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import lax
from .exact import BreatherSpec, Kind
from .grid import SpaceTimeGrid
from .lax import BoundaryClass, Role, VectorSolution

POLE_GUARD = 1e-6


def _k_of(kind: Kind, lam: complex) -> complex:
    """k(lam) = 2 sqrt(1 - lam^2), on the branch continuous through lambda0."""
    lam = complex(lam)
    if kind is Kind.AKHMEDIEV:
        return 2.0 * cmath.sqrt(1.0 - lam * lam)
    return 2j * cmath.sqrt(lam * lam - 1.0)


def fundamental_matrix(kind: Kind, lam: complex, x, t, order: int = 0) -> np.ndarray:
    """Background matrix solution [[p+, p-], [q+, q-]] or its lam-derivative.

    Returns shape (2, 2, ...). ``order`` 1 and 2 give d/dlam and d^2/dlam^2,
    computed from p'_pm = A_p p_mp / k and q'_pm = A_q q_mp / k with
    A_p = i + 2 i lam x + 2 (1 - 2 lam^2) t and A_q = A_p - 2i.
    """
    kind = Kind.parse(kind)
    lam = complex(lam)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    k = _k_of(kind, lam)
    s_m = cmath.sqrt(lam - 0.5j * k)
    s_p = cmath.sqrt(lam + 0.5j * k)
    e = np.exp(-0.5j * k * x + 0.5 * lam * k * t)
    ei = 1.0 / e

    def base():
        p_plus, p_minus = s_m * e + s_p * ei, s_m * e - s_p * ei
        q_plus, q_minus = -s_p * e - s_m * ei, -s_p * e + s_m * ei
        return p_plus, p_minus, q_plus, q_minus

    pp, pm, qp, qm = base()
    if order == 0:
        return np.array([[pp, pm], [qp, qm]])
    a_p = 1j + 2j * lam * x + 2.0 * (1.0 - 2.0 * lam * lam) * t
    a_q = a_p - 2j
    d_pp, d_pm = a_p * pm / k, a_p * pp / k
    d_qp, d_qm = a_q * qm / k, a_q * qp / k
    if order == 1:
        return np.array([[d_pp, d_pm], [d_qp, d_qm]])
    if order == 2:
        dk_inv = 4.0 * lam / k ** 3
        da = 2j * x - 8.0 * lam * t
        dd_pp = dk_inv * a_p * pm + da * pm / k + a_p * d_pm / k
        dd_pm = dk_inv * a_p * pp + da * pp / k + a_p * d_pp / k
        dd_qp = dk_inv * a_q * qm + da * qm / k + a_q * d_qm / k
        dd_qm = dk_inv * a_q * qp + da * qp / k + a_q * d_qp / k
        return np.array([[dd_pp, dd_pm], [dd_qp, dd_qm]])
    raise ValueError("order must be 0, 1 or 2")


@dataclass(frozen=True)
class DarbouxSeed:
    """Background Lax solution (p0, q0) at u = 1, lam = lambda0."""

    spec: BreatherSpec

    def __post_init__(self):
        if self.spec.kind not in (Kind.AKHMEDIEV, Kind.KUZNETSOV_MA):
            raise ValueError("Darboux seeds exist for the ab and kmb kinds only")

    @property
    def kind(self) -> Kind:
        return self.spec.kind

    @property
    def lambda0(self) -> float:
        return self.spec.lambda0

    @property
    def k0(self) -> complex:
        """Real k0 for AB, i*beta0 for KMB."""
        return _k_of(self.kind, self.lambda0)

    @property
    def sigma0(self) -> complex:
        return self.lambda0 * self.k0

    def pq(self, x, t) -> np.ndarray:
        return fundamental_matrix(self.kind, self.lambda0, x, t)[:, 1]

    def as_solution(self) -> VectorSolution:
        cls = BoundaryClass.ANTIPERIODIC if self.kind is Kind.AKHMEDIEV else BoundaryClass.UNBOUNDED
        period = self.spec.period_x if self.kind is Kind.AKHMEDIEV else None
        return VectorSolution(self.pq, self.lambda0, cls, Role.EIGENFUNCTION, "seed", period)

    def norm2(self, x, t) -> np.ndarray:
        p, q = self.pq(x, t)
        return np.abs(p) ** 2 + np.abs(q) ** 2

    def scaled_pq(self, x, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(p0, q0) * exp(-r) and r, with r = |Re log E| for E the seed exponential.

        Keeps ratios such as p0 conj(q0) / (|p0|^2 + |q0|^2) finite far out in
        the Kuznetsov-Ma tails, where p0 and q0 themselves overflow.
        """
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        lam, k = complex(self.lambda0), self.k0
        s_m = cmath.sqrt(lam - 0.5j * k)
        s_p = cmath.sqrt(lam + 0.5j * k)
        log_e = -0.5j * k * x + 0.5 * lam * k * t
        r = np.abs(log_e.real)
        e, ei = np.exp(log_e - r), np.exp(-log_e - r)
        return s_m * e - s_p * ei, -s_p * e + s_m * ei, r


def build_seed(kind, lambda0: float) -> DarbouxSeed:
    return DarbouxSeed(BreatherSpec(Kind.parse(kind), lambda0))


def seed_identities(seed: DarbouxSeed, x, t) -> dict:
    """Closed-form right-hand sides of |p0|^2+|q0|^2, |p0|^2-|q0|^2 and p0 conj(q0)."""
    lam = seed.lambda0
    if seed.kind is Kind.AKHMEDIEV:
        k, s = seed.spec.k0, seed.spec.sigma0
        ch, sh, c, sn = np.cosh(s * t), np.sinh(s * t), np.cos(k * x), np.sin(k * x)
        return {"sum": 4.0 * (ch - lam * c), "diff": 2.0 * k * sn,
                "cross": 2.0 * c - 2.0 * lam * ch + 1j * k * sh}
    b, a = seed.spec.beta0, seed.spec.alpha0
    ch, sh, c, sn = np.cosh(b * x), np.sinh(b * x), np.cos(a * t), np.sin(a * t)
    return {"sum": 4.0 * (lam * ch - c), "diff": 2.0 * b * sh,
            "cross": -2.0 * ch + 2.0 * lam * c + 1j * b * sn}


def transform_potential(seed: DarbouxSeed, u0: complex = 1.0) -> Callable:
    """u0 + 2 (lambda0 + conj lambda0) p0 conj(q0) / (|p0|^2 + |q0|^2)."""
    lam = seed.lambda0

    def u_hat(x, t):
        p, q, _ = seed.scaled_pq(x, t)
        den = np.abs(p) ** 2 + np.abs(q) ** 2
        if np.any(den <= 0):
            raise FloatingPointError("vanishing Darboux denominator")
        return u0 + 4.0 * lam * p * np.conj(q) / den

    return u_hat


def _balanced_seed(seed: DarbouxSeed, x, t):
    """Scaled (p0, q0) and phi0_hat times the inverse scale; products of the two are exact."""
    p, q, _ = seed.scaled_pq(x, t)
    c = 2.0 * seed.lambda0 / (np.abs(p) ** 2 + np.abs(q) ** 2)
    return p, q, np.stack([-c * np.conj(q), c * np.conj(p)])


def transform_eigenfunction(seed: DarbouxSeed) -> VectorSolution:
    """(p0_hat, q0_hat) = 2 lambda0 / (|p0|^2 + |q0|^2) (-conj q0, conj p0)."""
    lam = seed.lambda0

    def f(x, t):
        p, q, r = seed.scaled_pq(x, t)
        c = 2.0 * lam * np.exp(-r) / (np.abs(p) ** 2 + np.abs(q) ** 2)
        return np.stack([-c * np.conj(q), c * np.conj(p)])

    if seed.kind is Kind.AKHMEDIEV:
        return VectorSolution(f, lam, BoundaryClass.ANTIPERIODIC, Role.EIGENFUNCTION, "phi0",
                              seed.spec.period_x)
    return VectorSolution(f, lam, BoundaryClass.LOCALIZED, Role.EIGENFUNCTION, "phi0")


@dataclass(frozen=True)
class DarbouxMatrix:
    """D(lam) = I + phi0_hat [-q0, p0] / (lam - lambda0)."""

    seed: DarbouxSeed

    def _check(self, lam: complex):
        lam0 = self.seed.lambda0
        for pole in (lam0, -lam0):
            if abs(complex(lam) - pole) < POLE_GUARD:
                raise ValueError(f"D(lambda) is singular near lambda={pole}; use the "
                                 "Laurent expansion at the pole instead")

    def _outer(self, x, t):
        p, q, a = _balanced_seed(self.seed, x, t)
        return a[:, None] * np.stack([-q, p])[None, :]

    def __call__(self, lam: complex, x, t) -> np.ndarray:
        self._check(lam)
        R = self._outer(np.asarray(x, float), np.asarray(t, float))
        eye = np.eye(2).reshape((2, 2) + (1,) * (R.ndim - 2))
        return eye + R / (complex(lam) - self.seed.lambda0)

    evaluate = __call__

    def inverse(self, lam: complex, x, t) -> np.ndarray:
        self._check(lam)
        R = self._outer(np.asarray(x, float), np.asarray(t, float))
        eye = np.eye(2).reshape((2, 2) + (1,) * (R.ndim - 2))
        return eye - R / (complex(lam) + self.seed.lambda0)

    def det(self, lam: complex, x, t) -> np.ndarray:
        D = self(lam, x, t)
        return D[0, 0] * D[1, 1] - D[0, 1] * D[1, 0]

    def det_closed_form(self, lam: complex) -> complex:
        lam0 = self.seed.lambda0
        return (complex(lam) + lam0) / (complex(lam) - lam0)


def darboux_matrix(seed: DarbouxSeed) -> DarbouxMatrix:
    return DarbouxMatrix(seed)


def transform_solution(D: DarbouxMatrix, phi: VectorSolution, lam: complex) -> VectorSolution:
    """D(lam) phi: a Lax solution for the transformed potential at the same lam."""
    D._check(lam)
    if abs(complex(lam) - complex(phi.lam)) > lax.SPECTRUM_TOL:
        raise ValueError(f"solution belongs to lambda={phi.lam}, not {lam}")

    def f(x, t):
        M = D(lam, x, t)
        return np.einsum("ij...,j...->i...", M, phi(x, t))

    return VectorSolution(f, complex(lam), phi.boundary_class, phi.role,
                          ("D" + phi.label) if phi.label else "", phi.period)


def transform_matrix_solution(seed: DarbouxSeed, lam: complex, x, t) -> np.ndarray:
    """Phi_hat(lam) = D(lam) Phi(lam) sampled at (x, t), shape (2, 2, ...)."""
    D = DarbouxMatrix(seed)(lam, x, t)
    P = fundamental_matrix(seed.kind, lam, x, t)
    return np.einsum("ij...,jk...->ik...", D, P)


# ---------------------------------------------------------------------------
# Laurent expansion at lambda0


@dataclass(frozen=True)
class LaurentExpansion:
    """Columns of Phi_hat(lam) = [2 i k0 phi(lam), psi(lam)] around lambda0.

    phi(lam) = phi0/(lam-lambda0) + phi1 + phi2 (lam-lambda0) + ...,
    psi(lam) = psi0 + psi1 (lam-lambda0) + ...
    """

    seed: DarbouxSeed
    phi0: VectorSolution = field(repr=False)
    phi1: VectorSolution = field(repr=False)
    phi2: VectorSolution = field(repr=False)
    psi0: VectorSolution = field(repr=False)
    psi1: VectorSolution = field(repr=False)

    def chain(self) -> list[tuple[str, VectorSolution, tuple[VectorSolution, ...]]]:
        """(name, member, lower members) for each Jordan-chain relation."""
        return [("phi0", self.phi0, ()),
                ("phi1", self.phi1, (self.phi0,)),
                ("phi2", self.phi2, (self.phi1, self.phi0)),
                ("psi0", self.psi0, ()),
                ("psi1", self.psi1, (self.psi0,))]

    def coefficient(self, n: int, x, t) -> np.ndarray:
        """Phi_hat_n for n in {-1, 0, 1}, shape (2, 2, ...)."""
        c = 2j * self.seed.k0
        x = np.asarray(x, float)
        t = np.asarray(t, float)
        if n == -1:
            a = c * self.phi0(x, t)
            return np.stack([a, np.zeros_like(a)], axis=1)
        if n == 0:
            return np.stack([c * self.phi1(x, t), self.psi0(x, t)], axis=1)
        if n == 1:
            return np.stack([c * self.phi2(x, t), self.psi1(x, t)], axis=1)
        raise ValueError("only n = -1, 0, 1 are available")


def _hyperbolic(seed: DarbouxSeed, x, t):
    z = seed.sigma0 * t - 1j * seed.k0 * x
    return np.cosh(z), np.sinh(z)


def laurent_expansion(seed: DarbouxSeed) -> LaurentExpansion:
    """Closed forms of phi0, phi1, phi2, psi0, psi1."""
    lam = seed.lambda0
    k = seed.k0
    phi_hat = transform_eigenfunction(seed)
    ab = seed.kind is Kind.AKHMEDIEV
    L = seed.spec.period_x if ab else None

    def pm(x, t):
        """(p0, q0), (p+, q+) and phi0_hat at (x, t)."""
        F = fundamental_matrix(seed.kind, lam, x, t)
        return F[:, 1], F[:, 0], phi_hat(x, t)

    def theta(x, t):
        return 1j * lam * x + (1.0 - 2.0 * lam * lam) * t

    def f_phi1(x, t):
        _, plus, h = pm(x, t)
        ch, _ = _hyperbolic(seed, x, t)
        return plus / (2j * k) + (2.0 / k ** 2) * (ch - lam) * h

    def f_psi0(x, t):
        seed_v, _, h = pm(x, t)
        _, sh = _hyperbolic(seed, x, t)
        return seed_v + 4.0 * (-lam * x + 1j * (1.0 - 2.0 * lam * lam) * t + 1j / k * sh) * h

    def f_phi2(x, t):
        seed_v, _, h = pm(x, t)
        ch, sh = _hyperbolic(seed, x, t)
        th = theta(x, t)
        p0, q0 = seed_v
        return ((lam * x - 1j * (1.0 - 2.0 * lam * lam) * t) / k ** 2 * seed_v
                + np.stack([p0, -q0]) / (2.0 * k ** 2)
                + (4.0 * th ** 2 - 1.0) / (2.0 * k ** 2) * h
                + 4.0 / k ** 3 * th * sh * h
                + 4.0 * lam / k ** 4 * (ch - lam) * h)

    def f_psi1(x, t):
        _, plus, h = pm(x, t)
        ch, sh = _hyperbolic(seed, x, t)
        th = theta(x, t)
        pp, qp = plus
        return (2.0 / k * th * plus
                + 1j / k * np.stack([pp, -qp])
                + 8j / k ** 2 * th * ch * h
                + 8j * lam / k ** 3 * sh * h
                + 2j * (1j * x - 4.0 * lam * t) * h)

    A = BoundaryClass.ANTIPERIODIC if ab else BoundaryClass.LOCALIZED
    U = BoundaryClass.UNBOUNDED
    G = Role.GENERALIZED
    return LaurentExpansion(
        seed,
        phi0=phi_hat,
        phi1=VectorSolution(f_phi1, lam, A if ab else U, G, "phi1", L),
        phi2=VectorSolution(f_phi2, lam, U, G, "phi2", L),
        psi0=VectorSolution(f_psi0, lam, U, Role.SECOND_SOLUTION, "psi0", L),
        psi1=VectorSolution(f_psi1, lam, U, G, "psi1", L),
    )


def structural_coefficients(seed: DarbouxSeed, x, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Phi_hat_{-1,0,1} from R Phi(lambda0), Phi + R Phi', Phi' + R Phi''/2 with R = phi0_hat [-q0, p0]."""
    lam = seed.lambda0
    F0, F1, F2 = (fundamental_matrix(seed.kind, lam, x, t, n) for n in range(3))
    p, q, a = _balanced_seed(seed, x, t)
    R = a[:, None] * np.stack([-q, p])[None, :]

    def mul(A, B):
        return np.einsum("ij...,jk...->ik...", A, B)

    return mul(R, F0), F0 + mul(R, F1), F1 + 0.5 * mul(R, F2)


def contour_coefficients(seed: DarbouxSeed, x, t, radius: float = 1e-3,
                         n_angles: int = 16) -> dict[int, np.ndarray]:
    """Laurent coefficients of Phi_hat at lambda0 by the discrete Cauchy integral.

    Phi_hat_n is approximated by the mean over the circle of
    Phi_hat(lambda0 + r e^{i theta}) (r e^{i theta})^{-n}; the aliasing
    error is O(r^{n_angles}).
    """
    lam0 = seed.lambda0
    theta = 2.0 * np.pi * np.arange(n_angles) / n_angles
    acc = {-1: 0.0, 0: 0.0, 1: 0.0}
    for th in theta:
        z = radius * np.exp(1j * th)
        val = transform_matrix_solution(seed, lam0 + z, x, t)
        for n in acc:
            acc[n] = acc[n] + val * z ** (-n)
    return {n: v / n_angles for n, v in acc.items()}


# ---------------------------------------------------------------------------
# eigenfunctions at lam = 1 (bounded) and the Fredholm certificates


def lambda_one_solutions(seed: DarbouxSeed) -> tuple[VectorSolution, VectorSolution]:
    """D(1) applied to the background solutions (1, -1) and (x+it+1, -x-it)."""
    lam = seed.lambda0
    ab = seed.kind is Kind.AKHMEDIEV
    L = seed.spec.period_x if ab else None

    def phi(x, t):
        p, q, h = _balanced_seed(seed, x, t)
        base = np.stack([np.ones_like(p), -np.ones_like(p)])
        return base - (p + q) / (1.0 - lam) * h

    def psi(x, t):
        p, q, h = _balanced_seed(seed, x, t)
        z = x + 1j * t
        base = np.stack([z + 1.0, -z])
        return base - (z * (p + q) + q) / (1.0 - lam) * h

    bounded = BoundaryClass.PERIODIC if ab else BoundaryClass.UNBOUNDED
    # for KMB the lam = 1 eigenfunction tends to constants at both ends
    return (VectorSolution(phi, 1.0, bounded, Role.EIGENFUNCTION, "phi_hat", L),
            VectorSolution(psi, 1.0, BoundaryClass.UNBOUNDED, Role.SECOND_SOLUTION, "psi_hat", L))


@dataclass(frozen=True)
class Certificate:
    quantity: str
    analytic: complex
    computed: complex
    conclusion: str
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10

    @property
    def abs_err(self) -> float:
        return abs(complex(self.computed) - complex(self.analytic))

    @property
    def passed(self) -> bool:
        a = abs(complex(self.analytic))
        if a == 0.0:
            return self.abs_err < self.abs_tol
        return self.abs_err <= self.rel_tol * a

    def as_dict(self) -> dict:
        a, c = complex(self.analytic), complex(self.computed)
        return {"quantity": self.quantity, "analytic": [a.real, a.imag],
                "computed": [c.real, c.imag], "abs_err": self.abs_err,
                "passed": self.passed, "conclusion": self.conclusion}


def fredholm_certificates(seed: DarbouxSeed, t: float = 0.0) -> list[Certificate]:
    """Solvability pairings that fix the algebraic multiplicity of lambda0 (and of 1 for AB)."""
    lam = seed.lambda0
    phi0 = transform_eigenfunction(seed)
    star = lax.adjoint_solution(phi0)
    if seed.kind is Kind.AKHMEDIEV:
        L, k = seed.spec.period_x, seed.spec.k0
        ex = laurent_expansion(seed)
        one, _ = lambda_one_solutions(seed)
        dom = (0.0, L)
        return [
            Certificate("<phi0*, phi0>", 0.0, lax.fredholm_inner_product(star, phi0, dom, t),
                        "zero: a generalized eigenfunction phi1 exists in the antiperiodic space"),
            Certificate("<phi0*, phi1>", 2.0 * lam ** 2 * L / k ** 2,
                        lax.fredholm_inner_product(star, ex.phi1, dom, t),
                        "nonzero: no second generalized eigenfunction, lambda0 is algebraically double"),
            Certificate("<phi_hat*, phi_hat> at lambda=1", -2.0 * (1.0 + lam) * L / (1.0 - lam),
                        lax.fredholm_inner_product(lax.adjoint_solution(one), one, dom, t),
                        "nonzero: lambda=1 is algebraically simple in the periodic space"),
        ]
    b = seed.spec.beta0
    # the integrand decays like exp(-beta0 |x|); beyond 50/beta0 it is below 1e-21
    span = 50.0 / b
    return [
        Certificate("<phi0*, phi0>", -2.0 * lam / b,
                    lax.fredholm_inner_product(star, phi0, (-span, span), t),
                    "nonzero: lambda0 is algebraically simple in L2(R)"),
    ]


def wronskian_series(a: VectorSolution, b: VectorSolution, grid: SpaceTimeGrid) -> np.ndarray:
    x, t = grid.mesh()
    return lax.wronskian(a, b, x, t)

"""Numerical Lax spectra of the Zakharov-Shabat operator.

The operator acts on pairs (phi1, phi2) as

    L phi = [[d/dx, -u], [-conj(u), -d/dx]] phi,

and eigenvalues of ``L phi = lam phi`` are computed from a dense matrix
representation at a frozen time. Three discretizations are available:

* ``FourierInteger``: Galerkin on exp(i 2 pi j x / L), j = -N..N
  (L-periodic functions);
* ``FourierHalfInteger``: Galerkin on exp(i 2 pi (j + 1/2) x / L),
  j = -N..N-1 (L-antiperiodic functions);
* ``Line``: Fourier collocation on the truncated line [-X, X).

Both Fourier mode sets are symmetric under j -> -j (resp. j+1/2 -> -(j+1/2)),
which keeps the discrete spectrum invariant under lam -> -conj(lam).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
import scipy.linalg as sla

from .exact import BreatherSpec, Kind
from .lax import MultiplicityRecord, lambda_m

FieldEvaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]

COEFF_TOL = 1e-12          # relative size of the top 10% of Fourier coefficients of u
LINE_COEFF_TOL = 1e-8      # same test for the collocation grid, see ``Line``
TAIL_BAND = 0.9
MATCH_TOL = 1e-8
DRIFT_TOL = 1e-4
CLUSTER_TOL = 1e-5
GAP_RATIO = 1e3
NULL_TOL = 1e-6


class UnderResolvedError(ValueError):
    """Raised when the basis is too small for the potential."""

    def __init__(self, message: str, suggested_n: int):
        super().__init__(message)
        self.suggested_n = suggested_n


@dataclass(frozen=True)
class FourierInteger:
    n: int
    period: float
    name = "fourier-integer"
    boundary = "periodic"

    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(-self.n, self.n + 1) / self.period

    def mode_offsets(self) -> np.ndarray:
        return np.arange(-self.n, self.n + 1)

    def as_dict(self) -> dict:
        return {"name": self.name, "N": self.n, "L": self.period, "boundary": self.boundary}


@dataclass(frozen=True)
class FourierHalfInteger:
    n: int
    period: float
    name = "fourier-half-integer"
    boundary = "antiperiodic"

    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * (np.arange(-self.n, self.n) + 0.5) / self.period

    def mode_offsets(self) -> np.ndarray:
        return np.arange(-self.n, self.n)

    def as_dict(self) -> dict:
        return {"name": self.name, "N": self.n, "L": self.period, "boundary": self.boundary}


@dataclass(frozen=True)
class Line:
    """Fourier collocation with ``n`` points on [-half_width, half_width).

    Suitable for potentials that approach the same constant at both ends
    faster than any power, such as the Kuznetsov-Ma breather. The
    resolution check on the coefficients of u uses ``LINE_COEFF_TOL``:
    eigenvalues converge faster than the pointwise potential tail, so a
    looser test keeps the dense solve affordable.
    """

    n: int
    half_width: float
    name = "line"
    boundary = "truncated-line"

    def __post_init__(self):
        if self.n % 2:
            raise ValueError("Line basis needs an even number of points")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.n

    def nodes(self) -> np.ndarray:
        return -self.half_width + self.dx * np.arange(self.n)

    def wavenumbers(self) -> np.ndarray:
        k = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)
        k[self.n // 2] = 0.0    # drop the Nyquist mode so d/dx stays real
        return k

    def with_half_width(self, half_width: float) -> "Line":
        """Same spacing on a wider (or narrower) box."""
        n = 2 * int(round(half_width / self.dx))
        return Line(n, n * self.dx / 2.0)

    def as_dict(self) -> dict:
        return {"name": self.name, "N": self.n, "X": self.half_width, "boundary": self.boundary}


Basis = Union[FourierInteger, FourierHalfInteger, Line]


def basis_from_name(name: str, n: int, length: float) -> Basis:
    """``length`` is the period for Fourier bases and the half-width X for the line."""
    key = name.strip().lower()
    if key in ("periodic", "fourier-integer", "integer"):
        return FourierInteger(n, length)
    if key in ("antiperiodic", "fourier-half-integer", "half-integer"):
        return FourierHalfInteger(n, length)
    if key in ("line", "truncated-line"):
        return Line(n, length)
    raise ValueError(f"unknown basis {name!r}; expected periodic, antiperiodic or line")


def default_basis(spec: BreatherSpec, name: Optional[str] = None) -> Basis:
    kind = spec.kind
    if name is None:
        name = "line" if kind in (Kind.KUZNETSOV_MA, Kind.PEREGRINE) else "antiperiodic"
    if name == "line":
        return Line(832, 30.0)
    if kind is Kind.AKHMEDIEV:
        return basis_from_name(name, 128, spec.period_x)
    if kind is Kind.CONSTANT:
        return basis_from_name(name, 128, 2.0 * math.pi / 1.6)
    raise ValueError(f"{kind.value} is not periodic in x; use the line basis")


@dataclass(frozen=True)
class DiscretizedOperator:
    matrix: np.ndarray = field(repr=False)
    basis: Basis
    t: float
    coefficient_tail: float

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def as_dict(self) -> dict:
        return {"basis": self.basis.as_dict(), "size": self.size, "t": self.t,
                "coefficient_tail": self.coefficient_tail}


def _tail(coeffs: np.ndarray, k: np.ndarray) -> float:
    kmax = np.max(np.abs(k))
    scale = np.max(np.abs(coeffs))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(coeffs[np.abs(k) >= TAIL_BAND * kmax])) / scale)


def _suggest(coeffs: np.ndarray, k: np.ndarray, n: int, tol: float) -> int:
    """Extrapolate the exponential decay of |c_k| to the size meeting ``tol``."""
    a = np.abs(k)
    scale = np.max(np.abs(coeffs))
    upper = (a >= 0.5 * a.max()) & (np.abs(coeffs) > 0)
    slope = -1.0
    if upper.sum() >= 2:
        slope = np.polyfit(a[upper], np.log(np.abs(coeffs[upper]) / scale), 1)[0]
    if slope >= 0:
        return 2 * n
    k_needed = math.log(tol) / slope / TAIL_BAND
    return max(int(math.ceil(n * k_needed / a.max())), n + 2)


def _fourier_coefficients(u_eval: FieldEvaluator, t: float, basis) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients c_m of u on [0, L), m = -2N..2N, from oversampled FFT."""
    m_max = 2 * basis.n + 1
    p = 2 * m_max + 2
    x = basis.period * np.arange(p) / p
    c = np.fft.fft(np.asarray(u_eval(x, np.full_like(x, t)), dtype=complex)) / p
    m = np.fft.fftfreq(p, d=1.0 / p).astype(int)
    return c, m


def discretize(u_eval: FieldEvaluator, t: float, basis: Basis,
               check: bool = True) -> DiscretizedOperator:
    """Matrix of the ZS operator for the potential ``u_eval(x, t)`` at time ``t``."""
    if isinstance(basis, Line):
        x = basis.nodes()
        u = np.asarray(u_eval(x, np.full_like(x, t)), dtype=complex)
        k = basis.wavenumbers()
        coeffs = np.fft.fft(u) / basis.n
        tail = _tail(coeffs, k)
        if check and tail > LINE_COEFF_TOL:
            n_new = _suggest(coeffs, k, basis.n, LINE_COEFF_TOL)
            n_new += n_new % 2
            raise UnderResolvedError(
                f"potential not resolved on {basis.n} points (tail {tail:.1e}); "
                f"try n >= {n_new}", n_new)
        eye = np.eye(basis.n)
        d = np.real(np.fft.ifft(1j * k[:, None] * np.fft.fft(eye, axis=0), axis=0))
        mat = np.block([[d, -np.diag(u)], [-np.diag(np.conj(u)), -d]])
        return DiscretizedOperator(mat.astype(complex), basis, float(t), tail)

    c, m = _fourier_coefficients(u_eval, t, basis)
    tail = _tail(c, m.astype(float))
    if check and tail > COEFF_TOL:
        n_new = _suggest(c, m.astype(float), 2 * basis.n + 1, COEFF_TOL) // 2
        raise UnderResolvedError(
            f"potential not resolved with N={basis.n} modes (tail {tail:.1e}); "
            f"try N >= {n_new}", n_new)
    lookup = dict(zip(m.tolist(), c))
    j = basis.mode_offsets()
    diff = j[:, None] - j[None, :]
    conv = np.vectorize(lambda d: lookup.get(int(d), 0.0), otypes=[complex])(diff)
    d = np.diag(1j * basis.wavenumbers())
    mat = np.block([[d, -conv], [-conv.conj().T, -d]])
    return DiscretizedOperator(mat, basis, float(t), tail)


def spec_evaluator(spec: BreatherSpec) -> FieldEvaluator:
    return lambda x, t: spec(x, t)


# ---------------------------------------------------------------------------
# analytic eigenvalue lists

def analytic_targets(spec: BreatherSpec, basis: Basis, m_max: int = 9) -> list[complex]:
    """Point spectrum predicted for the constant background and AB, m <= m_max.

    Periodic bases use m in {0, 2, 4, ...}, antiperiodic ones m odd; for KMB
    on the line the isolated eigenvalues are +-lambda0.
    """
    if isinstance(basis, Line):
        if spec.kind is Kind.KUZNETSOV_MA:
            return [complex(spec.lambda0), complex(-spec.lambda0)]
        return []
    if spec.kind not in (Kind.CONSTANT, Kind.AKHMEDIEV):
        raise ValueError(f"no periodic targets for {spec.kind.value}")
    start = 0 if isinstance(basis, FourierInteger) else 1
    out: list[complex] = []
    for m in range(start, m_max + 1, 2):
        lam = lambda_m(m, basis.period)
        out.extend([lam, -lam] if lam != 0 else [lam])
    return out


def analytic_multiplicity(spec: BreatherSpec, basis: Basis, lam: complex) -> tuple[int, int]:
    """(geometric, algebraic) multiplicity predicted at an analytic target."""
    if isinstance(basis, Line):
        return (1, 1)
    lam = complex(lam)
    if abs(lam) < 1e-12:
        return (2, 4)
    if abs(abs(lam) - 1.0) < 1e-12 and isinstance(basis, FourierInteger):
        return (1, 1)
    if spec.kind is Kind.AKHMEDIEV and abs(abs(lam) - spec.lambda0) < 1e-12:
        return (1, 2)
    return (2, 2)


# ---------------------------------------------------------------------------
# spectrum

@dataclass(frozen=True)
class Match:
    target: complex
    nearest: complex
    distance: float

    def as_dict(self) -> dict:
        return {"target": self.target, "nearest": self.nearest, "distance": self.distance}


@dataclass
class SpectrumReport:
    basis: dict
    t: float
    eigenvalues: np.ndarray
    matches: list[Match] = field(default_factory=list)
    multiplicities: list[MultiplicityRecord] = field(default_factory=list)
    labels: Optional[list[str]] = None
    symmetry_defect: float = 0.0

    @property
    def analytic_targets(self) -> list[complex]:
        return [mt.target for mt in self.matches]

    @property
    def max_match_distance(self) -> float:
        return max((mt.distance for mt in self.matches), default=0.0)

    def point_candidates(self) -> np.ndarray:
        if self.labels is None:
            return self.eigenvalues
        return self.eigenvalues[np.array([lb == "point" for lb in self.labels], dtype=bool)]

    def as_dict(self) -> dict:
        order = np.lexsort((self.eigenvalues.imag, self.eigenvalues.real))
        artifacts = []
        if self.labels is not None:
            artifacts = [{"lambda": self.eigenvalues[i], "label": self.labels[i]} for i in order]
        return {
            "basis": self.basis, "N": self.basis.get("N"), "t": self.t,
            "eigenvalues": self.eigenvalues[order],
            "matches": [mt.as_dict() for mt in self.matches],
            "max_match_distance": self.max_match_distance,
            "multiplicities": [r.as_dict() for r in self.multiplicities],
            "symmetry_defect": self.symmetry_defect,
            "artifacts": artifacts,
        }


def eigenvalues(op: DiscretizedOperator) -> np.ndarray:
    try:
        w = sla.eigvals(op.matrix, overwrite_a=False, check_finite=True)
    except (sla.LinAlgError, ValueError) as exc:
        raise RuntimeError(f"eigensolver failed: {exc}") from exc
    return np.asarray(w, dtype=complex)


def nearest_cluster(w: np.ndarray, target: complex, tol: float = CLUSTER_TOL) -> complex:
    """Mean of the eigenvalues within ``tol`` of the one nearest to ``target``.

    A defective eigenvalue of algebraic multiplicity m is computed as m points
    spread by about eps**(1/m); their mean is accurate to round-off.
    """
    i = int(np.argmin(np.abs(w - target)))
    near = w[np.abs(w - w[i]) < tol]
    return complex(np.mean(near))


def clusters(w: np.ndarray, tol: float = CLUSTER_TOL) -> np.ndarray:
    """Means of groups of eigenvalues closer than ``tol`` (single linkage)."""
    w = np.asarray(w, dtype=complex)
    label = -np.ones(w.size, dtype=int)
    close = np.abs(w[:, None] - w[None, :]) < tol
    n_groups = 0
    for i in range(w.size):
        if label[i] >= 0:
            continue
        stack = [i]
        label[i] = n_groups
        while stack:
            j = stack.pop()
            for k in np.flatnonzero(close[j] & (label < 0)):
                label[k] = n_groups
                stack.append(k)
        n_groups += 1
    return np.array([w[label == g].mean() for g in range(n_groups)])


def symmetry_defect(w: np.ndarray, radius: Optional[float] = None) -> float:
    """Max distance from -conj(lam) to the spectrum, over cluster means with |lam| <= radius."""
    sel = w if radius is None else w[np.abs(w) <= radius]
    if sel.size == 0:
        return 0.0
    c = clusters(sel)
    inner = c if radius is None else c[np.abs(c) <= 0.9 * radius]
    d = np.abs(-np.conj(inner)[:, None] - c[None, :]).min(axis=1)
    return float(d.max()) if d.size else 0.0


def resolved_radius(basis: Basis) -> float:
    """Eigenvalues beyond this modulus are dominated by truncation."""
    return 0.5 * float(np.max(np.abs(basis.wavenumbers())))


def band_labels(w: np.ndarray, refined: Sequence[np.ndarray], tol: float = DRIFT_TOL) -> list[str]:
    """'point' if an eigenvalue stays within ``tol`` under every refinement, else 'band'."""
    labels = []
    for lam in w:
        still = all(np.min(np.abs(r - lam)) <= tol for r in refined)
        labels.append("point" if still else "band")
    return labels


REFINEMENT_FACTORS = (1.0 + 1.0 / (2.0 * math.pi), 1.0 + 1.0 / math.e)


def compute_spectrum(op: DiscretizedOperator, targets: Sequence[complex] = (),
                     u_eval: Optional[FieldEvaluator] = None,
                     refine: bool = True) -> SpectrumReport:
    """Dense eigensolve plus target matching.

    On the line basis with ``u_eval`` given and ``refine`` set, the box is
    widened by the factors in ``REFINEMENT_FACTORS`` at fixed spacing and each
    eigenvalue is labeled 'point' (stationary within ``DRIFT_TOL``) or 'band'.
    """
    w = eigenvalues(op)
    matches = [Match(complex(tg), nearest_cluster(w, tg), 0.0) for tg in targets]
    matches = [Match(mt.target, mt.nearest, abs(mt.nearest - mt.target)) for mt in matches]
    labels = None
    if isinstance(op.basis, Line) and u_eval is not None and refine:
        refined = []
        for f in REFINEMENT_FACTORS:
            wider = discretize(u_eval, op.t, op.basis.with_half_width(f * op.basis.half_width),
                               check=False)
            refined.append(eigenvalues(wider))
        labels = band_labels(w, refined)
    return SpectrumReport(op.basis.as_dict(), op.t, w, matches, [], labels,
                          symmetry_defect(w, resolved_radius(op.basis)))


# ---------------------------------------------------------------------------
# multiplicities

def _nullity(sv: np.ndarray, window: int = 16) -> Optional[int]:
    """Count of singular values below a gap of ``GAP_RATIO``, or None if no clean gap.

    Only the ``window`` smallest values are inspected; the near-kernel must
    sit below ``NULL_TOL`` and be separated from the rest by three orders of
    magnitude.
    """
    sv = np.sort(sv)[:window + 1]
    if sv[0] >= NULL_TOL:
        return 0
    for q in range(1, sv.size):
        lo, hi = sv[q - 1], sv[q]
        if lo >= NULL_TOL:
            break
        if lo == 0.0 or hi / lo >= GAP_RATIO:
            return q
    return None


def multiplicity_probe(op: DiscretizedOperator, lam: complex, max_power: int = 3) -> MultiplicityRecord:
    """Geometric and algebraic multiplicity of ``lam`` from near-kernels of (A - lam)^k."""
    a = op.matrix - complex(lam) * np.eye(op.size)
    power = np.eye(op.size, dtype=complex)
    nullities = []
    for _ in range(max_power):
        power = a @ power
        nullities.append(_nullity(sla.svdvals(power)))
    note = f"nullities of powers 1..{max_power}: {nullities}"
    if any(n is None for n in nullities):
        return MultiplicityRecord(lam, None, None, note="indeterminate: " + note)
    if nullities[0] == 0:
        return MultiplicityRecord(lam, None, None, note="not an eigenvalue: " + note)
    if nullities[-1] != nullities[-2]:
        return MultiplicityRecord(lam, nullities[0], None,
                                  note="indeterminate: chain longer than probed; " + note)
    return MultiplicityRecord(lam, nullities[0], nullities[-1], note=note)


def spectrum_for(spec: BreatherSpec, basis: Optional[Basis] = None, t: float = 0.0,
                 probe: Sequence[complex] = (), m_max: int = 9,
                 refine: bool = True) -> SpectrumReport:
    """Discretize, solve, match analytic targets and probe multiplicities."""
    basis = basis if basis is not None else default_basis(spec)
    u_eval = spec_evaluator(spec)
    op = discretize(u_eval, t, basis)
    targets = analytic_targets(spec, basis, m_max)
    report = compute_spectrum(op, targets, u_eval, refine=refine)
    report.multiplicities = [multiplicity_probe(op, lam) for lam in probe]
    return report


def isospectral_drift(spec: BreatherSpec, basis: Basis, t1: float = 0.0, t2: float = 0.7,
                      radius: Optional[float] = None) -> float:
    """Max distance between the cluster-averaged spectra at two snapshot times."""
    u_eval = spec_evaluator(spec)
    radius = radius if radius is not None else 0.5 * resolved_radius(basis)
    sets = []
    for t in (t1, t2):
        w = eigenvalues(discretize(u_eval, t, basis))
        sets.append(clusters(w[np.abs(w) <= radius]))
    a, b = sets
    inner = a[np.abs(a) <= 0.9 * radius]
    return float(np.abs(inner[:, None] - b[None, :]).min(axis=1).max())


@dataclass(frozen=True)
class TruncationFit:
    half_widths: np.ndarray
    distances: np.ndarray
    slope: float        # d log(distance) / d(box length 2X)

    def as_dict(self) -> dict:
        return {"half_widths": self.half_widths, "distances": self.distances,
                "slope_per_box_length": self.slope}


def truncation_convergence(spec: BreatherSpec, half_widths: Sequence[float] = (3, 4, 5, 6, 7, 8),
                           dx: float = 0.07) -> TruncationFit:
    """Distance of the isolated KMB eigenvalue to lambda0 as the box [-X, X) grows."""
    if spec.kind is not Kind.KUZNETSOV_MA:
        raise ValueError("truncation convergence applies to the Kuznetsov-Ma breather")
    u_eval = spec_evaluator(spec)
    xs = np.asarray(half_widths, dtype=float)
    dist = []
    for half in xs:
        n = 2 * int(round(half / dx))
        w = eigenvalues(discretize(u_eval, 0.0, Line(n, n * dx / 2.0), check=False))
        dist.append(float(np.min(np.abs(w - spec.lambda0))))
    dist = np.array(dist)
    ok = dist > 1e-13
    slope = float(np.polyfit(2.0 * xs[ok], np.log(dist[ok]), 1)[0])
    return TruncationFit(xs, dist, slope)

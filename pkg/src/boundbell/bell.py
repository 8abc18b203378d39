"""Recursive multi-qubit Bell operator, evaluation, and settings search.

The operator family is normalized so local hidden variable models obey
|<B>| <= 1 while the quantum bound is 2^((N-1)/2).  The recursion appends
one party at a time; with every party measuring along x and y it collapses
to a rank-2 operator coupling |0...0> and |1...1>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tensor import DensityOperator, PartyLayout

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

UNIT_TOL = 1e-12

DEFAULT_RESTARTS = 16
DEFAULT_OPT_TOL = 1e-10
MAX_SWEEPS = 500
_ZERO_GRADIENT = 1e-14


def _sigma(vec: np.ndarray) -> np.ndarray:
    return vec[0] * SIGMA_X + vec[1] * SIGMA_Y + vec[2] * SIGMA_Z


def pauli_along(a) -> np.ndarray:
    """Spin observable a_x*sx + a_y*sy + a_z*sz for a unit 3-vector."""
    v = np.asarray(a, dtype=float)
    if v.shape != (3,):
        raise ValueError("direction must be a 3-vector")
    if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise ValueError(f"direction must be a unit vector, |a| = {np.linalg.norm(v)!r}")
    return _sigma(v)


@dataclass(frozen=True, eq=False)
class BellSettings:
    """Two measurement directions (unit 3-vectors) per party."""

    a: tuple[tuple[float, float, float], ...]
    a_prime: tuple[tuple[float, float, float], ...]

    def __post_init__(self) -> None:
        a = tuple(tuple(float(x) for x in v) for v in self.a)
        ap = tuple(tuple(float(x) for x in v) for v in self.a_prime)
        if len(a) != len(ap) or len(a) < 1:
            raise ValueError("need one (a, a') pair of directions per party")
        for vecs in (a, ap):
            for v in vecs:
                if len(v) != 3:
                    raise ValueError("directions must be 3-vectors")
                if abs(math.sqrt(v[0] ** 2 + v[1] ** 2 + v[2] ** 2) - 1.0) > UNIT_TOL:
                    raise ValueError(f"direction {v} is not a unit vector")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "a_prime", ap)

    @classmethod
    def xy(cls, n: int) -> "BellSettings":
        """Every party measures along x and y (the closed-form configuration)."""
        return cls(((1.0, 0.0, 0.0),) * n, ((0.0, 1.0, 0.0),) * n)

    @property
    def num_parties(self) -> int:
        return len(self.a)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.a, dtype=float), np.array(self.a_prime, dtype=float)


@dataclass(frozen=True, eq=False)
class BellOperator:
    """Hermitian Bell operator over an all-qubit layout."""

    layout: PartyLayout
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        d = self.layout.dim
        if m.shape != (d, d):
            raise ValueError(f"matrix must have shape {(d, d)}")
        if any(dim != 2 for dim in self.layout.dims):
            raise ValueError("Bell operators are defined on all-qubit layouts")
        dev = np.max(np.abs(m - m.conj().T))
        if dev > 1e-12:
            raise ValueError(f"Bell operator deviates from Hermiticity by {dev:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def operator_norm(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvalsh(self.matrix))))


def _bell_matrix(avecs: np.ndarray, apvecs: np.ndarray) -> np.ndarray:
    """Recursion over parties; earlier parties occupy more significant digits.

    Base case is the single-party observable itself; the primed branch swaps
    the two direction lists.  Directions are not required to be normalized
    here, which keeps the map multilinear for the coordinate optimizer.
    """
    n = avecs.shape[0]
    b = _sigma(avecs[0])
    bp = _sigma(apvecs[0])
    for j in range(1, n):
        s = _sigma(avecs[j])
        sp = _sigma(apvecs[j])
        plus = s + sp
        minus = s - sp
        if j == n - 1:  # the primed operator of the last level is never used
            return 0.5 * (np.kron(b, plus) + np.kron(bp, minus))
        b, bp = (
            0.5 * (np.kron(b, plus) + np.kron(bp, minus)),
            0.5 * (np.kron(bp, plus) - np.kron(b, minus)),
        )
    return b


def build_bell(settings: BellSettings) -> BellOperator:
    """Bell operator for the given settings via the party-appending recursion."""
    avecs, apvecs = settings.as_arrays()
    layout = PartyLayout.qubits(settings.num_parties)
    return BellOperator(layout, _bell_matrix(avecs, apvecs))


def closed_form_xy(n: int) -> BellOperator:
    """Rank-2 closed form of the all-x/all-y operator.

    The only nonzero entries couple the extremal basis states with magnitude
    2^((N-1)/2) and phase pi*(N-1)/4, i.e. the Gaussian-integer power (1+i)^(N-1).
    """
    if n < 2:
        raise ValueError("closed form needs at least two parties")
    layout = PartyLayout.qubits(n)
    d = layout.dim
    m = np.zeros((d, d), dtype=complex)
    corner = (1.0 + 1.0j) ** (n - 1)
    m[d - 1, 0] = corner
    m[0, d - 1] = np.conj(corner)
    return BellOperator(layout, m)


def _trace_product(bell_matrix: np.ndarray, rho_matrix: np.ndarray) -> complex:
    return complex(np.einsum("ij,ji->", bell_matrix, rho_matrix))


def bell_value(rho: DensityOperator, settings: BellSettings) -> float:
    """Expectation tr(B rho); |value| > 1 signals a Bell violation."""
    if any(d != 2 for d in rho.layout.dims):
        raise ValueError("Bell evaluation requires an all-qubit layout")
    if settings.num_parties != rho.layout.num_parties:
        raise ValueError(
            f"settings cover {settings.num_parties} parties, state has "
            f"{rho.layout.num_parties}"
        )
    value = _trace_product(build_bell(settings).matrix, rho.matrix)
    if abs(value.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary residue {value.imag:.3e}")
    return float(value.real)


def _coordinate_gradient(
    avecs: np.ndarray, apvecs: np.ndarray, j: int, primed: bool, rho: np.ndarray
) -> np.ndarray:
    """Gradient of tr(B rho) in one direction vector.

    The expectation is affine in each direction vector (the terms carrying
    the other observable of the same party are constant in it), so the exact
    gradient is the three axis values minus the offset at the zero vector.
    """
    grad = np.empty(3)
    target = apvecs if primed else avecs
    saved = target[j].copy()
    target[j] = np.zeros(3)
    offset = _trace_product(_bell_matrix(avecs, apvecs), rho).real
    for i in range(3):
        axis = np.zeros(3)
        axis[i] = 1.0
        target[j] = axis
        grad[i] = _trace_product(_bell_matrix(avecs, apvecs), rho).real - offset
    target[j] = saved
    return grad


def optimize_settings(
    rho: DensityOperator,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_OPT_TOL,
    seed: int = 0,
    max_sweeps: int = MAX_SWEEPS,
) -> tuple[BellSettings, float]:
    """Maximize tr(B rho) over measurement directions by coordinate ascent.

    Each per-coordinate update is exact (the objective is multilinear in the
    2N direction vectors): evaluate the three axis values, then point the
    direction along the resulting gradient.  Restarts draw seeded random
    initial directions; the best value wins, ties going to the earliest
    restart.  A coordinate with vanishing gradient is left untouched for
    that sweep.
    """
    layout = rho.layout
    if any(d != 2 for d in layout.dims):
        raise ValueError("optimizer requires an all-qubit layout")
    n = layout.num_parties
    if n > 10:
        raise ValueError("optimizer supports at most 10 parties")
    if restarts < 1:
        raise ValueError("need at least one restart")

    rng = np.random.default_rng(int(seed))
    best_value = -np.inf
    best: tuple[np.ndarray, np.ndarray] | None = None
    for _ in range(restarts):
        vecs = rng.standard_normal((2 * n, 3))
        norms = np.linalg.norm(vecs, axis=1)
        norms[norms < 1e-12] = 1.0
        vecs /= norms[:, None]
        avecs = vecs[:n].copy()
        apvecs = vecs[n:].copy()

        value = _trace_product(_bell_matrix(avecs, apvecs), rho.matrix).real
        for _sweep in range(max_sweeps):
            for j in range(n):
                for primed in (False, True):
                    grad = _coordinate_gradient(avecs, apvecs, j, primed, rho.matrix)
                    gnorm = np.linalg.norm(grad)
                    if gnorm < _ZERO_GRADIENT:
                        continue
                    if primed:
                        apvecs[j] = grad / gnorm
                    else:
                        avecs[j] = grad / gnorm
            new_value = _trace_product(_bell_matrix(avecs, apvecs), rho.matrix).real
            improvement = new_value - value
            value = new_value
            if improvement < tol:
                break
        if value > best_value:
            best_value = value
            best = (avecs.copy(), apvecs.copy())

    assert best is not None
    settings = BellSettings(
        tuple(tuple(v) for v in best[0]), tuple(tuple(v) for v in best[1])
    )
    return settings, float(best_value)

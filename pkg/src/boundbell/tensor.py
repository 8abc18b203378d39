"""Dense multi-party linear algebra over mixed-radix product bases.

Conventions used throughout the package:

* Parties are numbered 1..N.  The global basis index is mixed radix with
  party 1 as the most significant digit, so for an all-qubit layout the
  basis state with a single 1 at party k sits at index 2**(N-k).
* Arrays are complex128 and treated as immutable after construction; every
  operation here is a pure function and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_GLOBAL_DIM = 4096

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
DEFAULT_SCHMIDT_CUTOFF = 1e-10

_PHASE_TOL = 1e-12
_TIE_TOL = 1e-12


@dataclass(frozen=True)
class PartyLayout:
    """Ordered local dimensions of the parties sharing a state."""

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) < 1:
            raise ValueError("a layout needs at least one party")
        if any(d < 2 for d in dims):
            raise ValueError(f"every local dimension must be >= 2, got {dims}")
        if self.dim > MAX_GLOBAL_DIM:
            raise ValueError(
                f"global dimension {self.dim} exceeds the dense cap {MAX_GLOBAL_DIM}"
            )

    @classmethod
    def qubits(cls, n: int) -> "PartyLayout":
        if n < 1:
            raise ValueError("need at least one qubit")
        return cls((2,) * n)

    @property
    def num_parties(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        out = 1
        for d in self.dims:
            out *= d
        return out

    def dim_of(self, party: int) -> int:
        self._check_party(party)
        return self.dims[party - 1]

    def _check_party(self, party: int) -> None:
        if not 1 <= party <= self.num_parties:
            raise ValueError(
                f"party index {party} out of range 1..{self.num_parties}"
            )

    def check_subset(
        self, parties, *, nonempty: bool = False, proper: bool = False
    ) -> tuple[int, ...]:
        """Validate a collection of party indices, returning them sorted."""
        subset = tuple(sorted({int(p) for p in parties}))
        for p in subset:
            self._check_party(p)
        if nonempty and not subset:
            raise ValueError("subset of parties must not be empty")
        if proper and len(subset) == self.num_parties:
            raise ValueError("subset must be a proper subset of the parties")
        return subset

    def index_to_digits(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.dim:
            raise ValueError(f"basis index {index} out of range 0..{self.dim - 1}")
        digits = []
        rem = int(index)
        for d in reversed(self.dims):
            digits.append(rem % d)
            rem //= d
        return tuple(reversed(digits))

    def digits_to_index(self, digits) -> int:
        digits = tuple(int(x) for x in digits)
        if len(digits) != self.num_parties:
            raise ValueError("one digit per party required")
        index = 0
        for dig, d in zip(digits, self.dims):
            if not 0 <= dig < d:
                raise ValueError(f"digit {dig} out of range for local dimension {d}")
            index = index * d + dig
        return index

    def drop(self, parties) -> "PartyLayout":
        """Layout with the given parties removed."""
        subset = self.check_subset(parties, proper=True)
        gone = set(subset)
        return PartyLayout(
            tuple(d for p, d in enumerate(self.dims, start=1) if p not in gone)
        )


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over the product basis of a layout."""

    layout: PartyLayout
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.layout.dim,):
            raise ValueError(
                f"amplitude vector must have length {self.layout.dim}, got {amps.shape}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm!r} deviates from 1 beyond {NORM_TOL}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.layout.dim


def basis_state(layout: PartyLayout, index: int) -> PureState:
    """Computational basis state |index> in the mixed-radix encoding."""
    if not 0 <= index < layout.dim:
        raise ValueError(f"basis index {index} out of range")
    amps = np.zeros(layout.dim, dtype=complex)
    amps[index] = 1.0
    return PureState(layout, amps)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian operator over a layout.

    Physical states are trace 1 and PSD; partial-transpose outputs stay
    Hermitian and trace 1 but may fail positivity, tracked through
    ``psd_certified`` (True / False / None = unchecked).
    """

    layout: PartyLayout
    matrix: np.ndarray
    psd_certified: bool | None = None

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        d = self.layout.dim
        if m.shape != (d, d):
            raise ValueError(f"matrix must have shape {(d, d)}, got {m.shape}")
        dev = np.max(np.abs(m - m.conj().T))
        if dev > HERMITIAN_TOL:
            raise ValueError(
                f"matrix deviates from Hermiticity by {dev:.3e} (> {HERMITIAN_TOL})"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_pure(cls, psi: PureState) -> "DensityOperator":
        outer = np.outer(psi.amplitudes, psi.amplitudes.conj())
        return cls(psi.layout, outer, psd_certified=True)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """Bi-orthonormal expansion of a pure state across a bipartition.

    ``coefficients`` are real, descending, each above the rank cutoff, and
    their squares sum to one.  Left vectors follow the first-nonzero-real-
    positive phase convention; right vectors carry the compensating phase so
    that ``sum_k c_k |left_k>|right_k>`` reconstructs the input.
    """

    coefficients: np.ndarray
    left_vectors: tuple[PureState, ...]
    right_vectors: tuple[PureState, ...]
    bipartition: tuple[int, ...]

    def __post_init__(self) -> None:
        c = np.array(self.coefficients, dtype=float)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("need at least one Schmidt coefficient")
        if np.any(np.diff(c) > _TIE_TOL):
            raise ValueError("coefficients must be sorted in descending order")
        if np.any(c <= 0.0):
            raise ValueError("coefficients must be positive")
        total = float(np.sum(c**2))
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"squared coefficients sum to {total!r}, expected 1")
        if not len(self.left_vectors) == len(self.right_vectors) == c.size:
            raise ValueError("one left and one right vector per coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def rank(self) -> int:
        return int(self.coefficients.size)


def tensor_product(factors) -> PureState:
    """Kronecker product of pure states; party order follows factor order."""
    factors = list(factors)
    if not factors:
        raise ValueError("need at least one factor")
    dims: tuple[int, ...] = ()
    amps = np.ones(1, dtype=complex)
    for f in factors:
        dims = dims + f.layout.dims
        amps = np.kron(amps, f.amplitudes)
    return PureState(PartyLayout(dims), amps)


def partial_transpose(rho: DensityOperator, parties) -> DensityOperator:
    """Transpose the matrix indices belonging to the given parties.

    The output keeps trace and Hermiticity; positivity is left unchecked.
    Applying the same transpose twice returns the input bit-exactly.
    """
    layout = rho.layout
    subset = layout.check_subset(parties)
    n = layout.num_parties
    t = rho.matrix.reshape(layout.dims + layout.dims)
    axes = list(range(2 * n))
    for p in subset:
        i = p - 1
        axes[i], axes[n + i] = axes[n + i], axes[i]
    m = t.transpose(axes).reshape(layout.dim, layout.dim)
    return DensityOperator(layout, m, psd_certified=None)


def partial_trace(rho: DensityOperator, traced_out) -> DensityOperator:
    """Trace out the given parties, returning the marginal operator."""
    layout = rho.layout
    n = layout.num_parties
    traced = layout.check_subset(traced_out)
    if len(traced) == n:
        raise ValueError("cannot trace out every party")
    if not traced:
        return DensityOperator(layout, rho.matrix, rho.psd_certified)
    gone = set(traced)
    keep = [p for p in range(1, n + 1) if p not in gone]
    t = rho.matrix.reshape(layout.dims + layout.dims)
    subs = list(range(2 * n))
    for p in traced:
        subs[n + p - 1] = subs[p - 1]
    out_subs = [p - 1 for p in keep] + [subs[n + p - 1] for p in keep]
    reduced = np.einsum(t, subs, out_subs)
    new_layout = layout.drop(traced)
    m = reduced.reshape(new_layout.dim, new_layout.dim)
    m = 0.5 * (m + m.conj().T)  # fp drift from summing near-Hermitian entries
    psd = True if rho.psd_certified else None
    return DensityOperator(new_layout, m, psd_certified=psd)


def _as_matrix(op) -> np.ndarray:
    if isinstance(op, DensityOperator):
        return op.matrix
    m = np.asarray(op, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    return m


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate a vector so its first nonzero component is real positive."""
    idx = np.flatnonzero(np.abs(vec) > _PHASE_TOL)
    if idx.size == 0:
        return vec
    pivot = vec[idx[0]]
    return vec * (abs(pivot) / pivot)


def hermitian_eigenvalues(op, return_vectors: bool = False, hermitian_tol: float = 1e-10):
    """Eigenvalues of a Hermitian operator, sorted ascending.

    With ``return_vectors`` also returns the eigenvector matrix (columns),
    each column phase-fixed to a real positive leading component.
    Raises on input that is not Hermitian within ``hermitian_tol``.
    """
    m = _as_matrix(op)
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > hermitian_tol:
        raise ValueError(f"matrix deviates from Hermiticity by {dev:.3e}")
    if not return_vectors:
        return np.linalg.eigvalsh(m)
    vals, vecs = np.linalg.eigh(m)
    vecs = vecs.copy()
    for i in range(vecs.shape[1]):
        vecs[:, i] = _fix_phase(vecs[:, i])
    return vals, vecs


def _axis_aligned_basis(cols: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(cols), greedily aligned to
    the computational axes (lowest axis index first)."""
    dl, g = cols.shape
    remaining = cols.copy()
    chosen: list[np.ndarray] = []
    for j in range(dl):
        if remaining.shape[1] == 0 or len(chosen) == g:
            break
        w = remaining @ np.conj(remaining[j, :])  # projection of axis j
        nw = np.linalg.norm(w)
        if nw <= 1e-9:
            continue
        w = w / nw
        chosen.append(w)
        remaining = remaining - np.outer(w, np.conj(w) @ remaining)
        q, r = np.linalg.qr(remaining)
        keep = np.abs(np.diag(r)) > 1e-9
        remaining = q[:, keep]
    if len(chosen) != g:
        return cols  # no axis structure to exploit; keep the solver's basis
    return np.column_stack(chosen)


def _tie_groups(values: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i in range(values.size):
        if groups and abs(values[i] - values[groups[-1][-1]]) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _lex_key(vec: np.ndarray) -> tuple:
    return tuple((-z.real, -z.imag) for z in vec)


def schmidt(
    psi: PureState, bipartition, cutoff: float = DEFAULT_SCHMIDT_CUTOFF
) -> SchmidtDecomposition:
    """Schmidt decomposition of ``psi`` across ``bipartition`` vs the rest.

    Coefficients are sorted descending and truncated at ``cutoff``.  Within
    groups of degenerate coefficients the left basis is re-canonicalized to
    align with computational axes and ordered lexicographically, making the
    output deterministic (an aligned-axis basis state always maps to itself).
    """
    layout = psi.layout
    left = layout.check_subset(bipartition, nonempty=True, proper=True)
    gone = set(left)
    right = tuple(p for p in range(1, layout.num_parties + 1) if p not in gone)
    perm = [p - 1 for p in left] + [p - 1 for p in right]
    dl = 1
    for p in left:
        dl *= layout.dims[p - 1]
    dr = layout.dim // dl
    m = psi.amplitudes.reshape(layout.dims).transpose(perm).reshape(dl, dr)

    u, s, vh = np.linalg.svd(m, full_matrices=False)
    kept = s > cutoff
    s = s[kept]
    u = u[:, kept].copy()
    vh = vh[kept, :].copy()
    if s.size == 0:
        raise ValueError("state has no Schmidt coefficient above the cutoff")

    for group in _tie_groups(s, _TIE_TOL):
        if len(group) < 2:
            continue
        new_cols = _axis_aligned_basis(u[:, group])
        u[:, group] = new_cols
        vh[group, :] = (new_cols.conj().T @ m) / s[group, None]

    for i in range(s.size):
        col = u[:, i]
        idx = np.flatnonzero(np.abs(col) > _PHASE_TOL)
        if idx.size:
            phase = col[idx[0]] / abs(col[idx[0]])
            u[:, i] = col * np.conj(phase)
            vh[i, :] = vh[i, :] * phase

    order: list[int] = []
    for group in _tie_groups(s, _TIE_TOL):
        order.extend(sorted(group, key=lambda i: _lex_key(u[:, i])))
    s = s[order]
    u = u[:, order]
    vh = vh[order, :]

    left_layout = PartyLayout(tuple(layout.dims[p - 1] for p in left))
    right_layout = PartyLayout(tuple(layout.dims[p - 1] for p in right))
    left_states = tuple(PureState(left_layout, u[:, i]) for i in range(s.size))
    right_states = tuple(PureState(right_layout, vh[i, :]) for i in range(s.size))
    return SchmidtDecomposition(s, left_states, right_states, left)


def apply_local(psi: PureState, party: int, operator) -> tuple[np.ndarray, float]:
    """Apply a local measurement filter to one party.

    Returns the unnormalized output vector together with its squared norm,
    interpreted as the success probability of the filter outcome.  A weight
    of zero signals an annihilated branch and is returned, not raised.  The
    operator must be a valid measurement element (largest singular value
    at most 1).
    """
    layout = psi.layout
    d = layout.dim_of(party)
    m = np.asarray(operator, dtype=complex)
    if m.shape != (d, d):
        raise ValueError(f"operator must act on dimension {d}, got shape {m.shape}")
    smax = np.linalg.norm(m, 2)
    if smax > 1.0 + 1e-12:
        raise ValueError(f"operator norm {smax!r} exceeds 1; not a measurement filter")
    t = psi.amplitudes.reshape(layout.dims)
    out = np.moveaxis(np.tensordot(m, t, axes=(1, party - 1)), 0, party - 1)
    vec = np.ascontiguousarray(out).reshape(layout.dim)
    weight = float(np.vdot(vec, vec).real)
    return vec, weight

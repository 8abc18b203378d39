"""Local filtering extraction of a maximally entangled pair.

Given any entangled multipartite pure state (arbitrary local dimensions),
a sequence of local filters, projections, and +/- measurements produces a
two-party state with equal Schmidt coefficients, with nonzero success
probability.  The protocol:

1. Pick the lowest-index party whose one-vs-rest Schmidt rank is >= 2.
2. Equalize: filter in that party's Schmidt basis, keeping the top two
   coefficients (mapped onto the party's computational levels 0/1) and
   annihilating the rest.
3. Classify the two branch states.  If both are products (case A), map the
   differing local factors onto computational 0/1 with biorthogonal filters;
   the result is a GHZ state over the pivot and the differing sites, from
   which +/- measurements leave any chosen pair maximally entangled, with
   certainty.  Otherwise (case B) project the pivot onto an entangled
   branch and repeat on the strictly smaller entangled system.

Parties are never dropped from the step log; spent parties simply hold
pure local factors that are split off when the final pair state is built.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import (
    DEFAULT_SCHMIDT_CUTOFF,
    PartyLayout,
    PureState,
    _fix_phase,
    apply_local,
    schmidt,
)

FILTER_KINDS = ("equalize", "biorthogonal", "project", "measure_pm")

PURITY_TOL = 1e-8
OVERLAP_TOL = 1e-8
BALANCE_TOL = 1e-8


class NotEntangledError(ValueError):
    """The input carries no entanglement to extract."""


class PairUnavailableError(ValueError):
    """The requested pair is not contained in the surviving parties."""


class NumericDegeneracyError(RuntimeError):
    """The state is numerically inconsistent with the protocol's case logic."""


@dataclass(frozen=True, eq=False)
class FilterOperator:
    """One local measurement element of the protocol."""

    party: int
    matrix: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in FILTER_KINDS:
            raise ValueError(f"unknown filter kind {self.kind!r}")
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("filter matrix must be square")
        smax = np.linalg.norm(m, 2)
        if smax > 1.0 + 1e-12:
            raise ValueError(f"filter has singular value {smax!r} > 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True, eq=False)
class ExtractionStep:
    op: FilterOperator
    weight: float


@dataclass(frozen=True, eq=False)
class BranchClassification:
    """Case split of a balanced state at a pivot party.

    Branches are labeled by the pivot's computational levels 0/1 (the output
    labels of the equalize filter).  For case A, per-party local factors of
    the two branches are reported with their overlap moduli: overlap >= 1-tol
    counts as the same factor, <= tol as locally orthogonal.
    """

    case: str
    branches: tuple[PureState, PureState]
    branch_product: tuple[bool, bool]
    factors: dict[int, tuple[np.ndarray, np.ndarray]] | None = None
    overlaps: dict[int, float] | None = None
    same_parties: tuple[int, ...] | None = None
    distinct_parties: tuple[int, ...] | None = None
    orthogonal_parties: tuple[int, ...] | None = None


@dataclass(frozen=True, eq=False)
class ExtractionResult:
    """Full trace of one protocol run.

    ``probability`` is the product of the recorded branch weights along the
    executed path (the +/- measurement steps count weight 1 since either
    outcome yields a maximally entangled pair).
    """

    pair: tuple[int, int]
    probability: float
    steps: tuple[ExtractionStep, ...]
    final_state: PureState
    schmidt_coeffs: tuple[float, float]
    surviving_parties: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 0.0 < self.probability <= 1.0 + 1e-9:
            raise ValueError(f"success probability {self.probability!r} outside (0, 1]")


def _single_party_rank(psi: PureState, party: int, cutoff: float) -> int:
    return schmidt(psi, (party,), cutoff).rank


def schmidt_profile(
    psi: PureState, cutoff: float = DEFAULT_SCHMIDT_CUTOFF
) -> list[tuple[int, int]]:
    """One-vs-rest Schmidt rank for every party; any rank >= 2 means entangled."""
    if psi.layout.num_parties < 2:
        return [(1, 1)]
    return [
        (party, _single_party_rank(psi, party, cutoff))
        for party in range(1, psi.layout.num_parties + 1)
    ]


def equalize_filter(
    psi: PureState, party: int, cutoff: float = DEFAULT_SCHMIDT_CUTOFF
) -> tuple[FilterOperator, PureState, float]:
    """Filter that balances the party's top two Schmidt coefficients.

    The filter maps the two leading Schmidt vectors onto the party's
    computational levels 0/1 with relative weight lambda_1/lambda_0,
    annihilates the remaining local directions, and is scaled to unit
    operator norm (maximal success probability).  The returned weight is
    2*lambda_1**2; the post state carries coefficients 1/sqrt(2) each.
    """
    decomp = schmidt(psi, (party,), cutoff)
    if decomp.rank < 2:
        raise ValueError(f"party {party} has Schmidt rank < 2; nothing to balance")
    lam0 = float(decomp.coefficients[0])
    lam1 = float(decomp.coefficients[1])
    u0 = decomp.left_vectors[0].amplitudes
    u1 = decomp.left_vectors[1].amplitudes

    d = psi.layout.dim_of(party)
    op = np.zeros((d, d), dtype=complex)
    op[0, :] = (lam1 / lam0) * u0.conj()
    op[1, :] = u1.conj()
    fop = FilterOperator(party, op, "equalize")

    vec, weight = apply_local(psi, party, op)
    if weight <= 0.0:
        raise NumericDegeneracyError("equalize filter annihilated the state")
    post = PureState(psi.layout, vec / np.sqrt(weight))
    return fop, post, weight


def _local_factor(phi: PureState, axis: int) -> tuple[np.ndarray, float]:
    """Top eigenvector and purity of one party's reduced operator."""
    dims = phi.layout.dims
    t = np.moveaxis(phi.amplitudes.reshape(dims), axis, 0)
    m = t.reshape(dims[axis], -1)
    red = m @ m.conj().T
    purity = float(np.einsum("ij,ji->", red, red).real)
    vals, vecs = np.linalg.eigh(red)
    factor = _fix_phase(vecs[:, -1])
    return factor, purity


def _product_factors(phi: PureState) -> tuple[bool, list[np.ndarray]]:
    """Product test: every single-party reduced operator must be pure."""
    if phi.layout.num_parties == 1:
        return True, [_fix_phase(phi.amplitudes.copy())]
    factors = []
    is_product = True
    for axis in range(phi.layout.num_parties):
        factor, purity = _local_factor(phi, axis)
        factors.append(factor)
        if purity < 1.0 - PURITY_TOL:
            is_product = False
    return is_product, factors


def classify_branch(psi: PureState, party: int) -> BranchClassification:
    """Split a balanced state into its two pivot branches and classify them.

    Requires the pivot's weight to sit on computational levels 0/1 with
    equal (1/2) probability and orthogonal branches, as produced by
    :func:`equalize_filter`.  Raises :class:`NumericDegeneracyError` when
    both branches test as products yet no remaining party is locally
    orthogonal (case A demands one).
    """
    layout = psi.layout
    n = layout.num_parties
    if n < 2:
        raise ValueError("classification needs at least two parties")
    layout.check_subset((party,), nonempty=True)

    t = psi.amplitudes.reshape(layout.dims)
    b0 = np.take(t, 0, axis=party - 1).reshape(-1)
    b1 = np.take(t, 1, axis=party - 1).reshape(-1)
    w0 = float(np.vdot(b0, b0).real)
    w1 = float(np.vdot(b1, b1).real)
    cross = abs(complex(np.vdot(b0, b1)))
    if abs(w0 - 0.5) > BALANCE_TOL or abs(w1 - 0.5) > BALANCE_TOL or cross > BALANCE_TOL:
        raise ValueError(
            "state is not balanced over the pivot's computational levels "
            f"(weights {w0:.6f}/{w1:.6f}, overlap {cross:.2e})"
        )

    rest = layout.drop((party,))
    others = tuple(p for p in range(1, n + 1) if p != party)
    phi0 = PureState(rest, b0 / np.sqrt(w0))
    phi1 = PureState(rest, b1 / np.sqrt(w1))

    prod0, factors0 = _product_factors(phi0)
    prod1, factors1 = _product_factors(phi1)
    if not (prod0 and prod1):
        return BranchClassification("B", (phi0, phi1), (prod0, prod1))

    factors: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    overlaps: dict[int, float] = {}
    same, distinct, orthogonal = [], [], []
    for i, p in enumerate(others):
        chi, tau = factors0[i], factors1[i]
        factors[p] = (chi, tau)
        g = abs(complex(np.vdot(chi, tau)))
        overlaps[p] = g
        if g >= 1.0 - OVERLAP_TOL:
            same.append(p)
        else:
            distinct.append(p)
            if g <= OVERLAP_TOL:
                orthogonal.append(p)
    if not orthogonal:
        raise NumericDegeneracyError(
            "product branches without a locally orthogonal site; overlaps "
            f"{sorted(overlaps.items())}"
        )
    return BranchClassification(
        "A",
        (phi0, phi1),
        (prod0, prod1),
        factors=factors,
        overlaps=overlaps,
        same_parties=tuple(same),
        distinct_parties=tuple(distinct),
        orthogonal_parties=tuple(orthogonal),
    )


def target_pair_choice(surviving_parties, requested=None) -> tuple[int, int]:
    """Pick the pair to keep: the two lowest survivors, unless overridden."""
    survivors = tuple(sorted({int(p) for p in surviving_parties}))
    if len(survivors) < 2:
        raise ValueError("need at least two surviving parties")
    if requested is None:
        return survivors[0], survivors[1]
    pair = tuple(sorted({int(p) for p in requested}))
    if len(pair) != 2 or not set(pair) <= set(survivors):
        raise PairUnavailableError(
            f"requested pair {requested} not contained in survivors {survivors}"
        )
    return pair[0], pair[1]


def _biorthogonal_filter(
    state: PureState, party: int, chi: np.ndarray, tau: np.ndarray
) -> tuple[FilterOperator, PureState, float]:
    """Filter mapping the two branch factors at ``party`` onto levels 0/1.

    Rows are the biorthonormal duals of (chi, tau) — each row has unit
    overlap with its own factor and kills the other — scaled to unit
    operator norm.
    """
    v = np.stack([chi, tau], axis=1)
    dual = np.linalg.pinv(v)  # rows: <chi'|, <tau'|
    d = state.layout.dim_of(party)
    op = np.zeros((d, d), dtype=complex)
    op[0, :] = dual[0]
    op[1, :] = dual[1]
    smax = np.linalg.norm(op, 2)
    op /= smax
    fop = FilterOperator(party, op, "biorthogonal")
    vec, weight = apply_local(state, party, op)
    if weight <= 0.0:
        raise NumericDegeneracyError(f"biorthogonal filter at party {party} annihilated the state")
    return fop, PureState(state.layout, vec / np.sqrt(weight)), weight


def _plus_projection(state: PureState, party: int) -> tuple[FilterOperator, PureState, float]:
    """Projector onto |+> on the party's two computational levels."""
    d = state.layout.dim_of(party)
    op = np.zeros((d, d), dtype=complex)
    op[np.ix_([0, 1], [0, 1])] = 0.5
    fop = FilterOperator(party, op, "measure_pm")
    vec, weight = apply_local(state, party, op)
    if weight <= 1e-15:
        raise NumericDegeneracyError(f"+/- measurement at party {party} annihilated the state")
    return fop, PureState(state.layout, vec / np.sqrt(weight)), weight


def reduce_to_parties(state: PureState, keep) -> PureState:
    """Split off every party outside ``keep`` as a pure local factor.

    Each discarded party must be in (numerically) a product state with the
    rest; it is contracted against its own reduced-state eigenvector.
    """
    layout = state.layout
    kept = layout.check_subset(keep, nonempty=True)
    labels = list(range(1, layout.num_parties + 1))
    dims = list(layout.dims)
    t = state.amplitudes.reshape(layout.dims)
    for party in sorted(set(labels) - set(kept), reverse=True):
        axis = labels.index(party)
        m = np.moveaxis(t, axis, 0).reshape(dims[axis], -1)
        red = m @ m.conj().T
        _, vecs = np.linalg.eigh(red)
        factor = _fix_phase(vecs[:, -1])
        t = np.tensordot(factor.conj(), t, axes=(0, axis))
        labels.pop(axis)
        dims.pop(axis)
    vec = t.reshape(-1)
    norm = np.linalg.norm(vec)
    if norm <= 1e-12:
        raise NumericDegeneracyError("discarded parties were not in product form")
    return PureState(PartyLayout(tuple(dims)), vec / norm)


def replay(psi: PureState, steps) -> PureState:
    """Re-apply a recorded step list to the input state, renormalizing.

    Returns the full-layout post state; spectator parties keep their pure
    local factors (compare against a result's ``final_state`` after
    :func:`reduce_to_parties`).
    """
    state = psi
    for step in steps:
        vec, weight = apply_local(state, step.op.party, step.op.matrix)
        if weight <= 0.0:
            raise NumericDegeneracyError("replayed step annihilated the state")
        state = PureState(state.layout, vec / np.sqrt(weight))
    return state


def extract(
    psi: PureState, pair=None, cutoff: float = DEFAULT_SCHMIDT_CUTOFF
) -> ExtractionResult:
    """Run the full protocol on an entangled pure state.

    Returns the executed step list, the product of branch weights (the
    success probability of the recorded path; +/- measurement steps count
    weight 1 since both outcomes succeed), the surviving parties and the
    final two-party state with its Schmidt coefficients.

    Raises :class:`NotEntangledError` on product input, and
    :class:`PairUnavailableError` when ``pair`` requests a party that does
    not survive.
    """
    layout = psi.layout
    n = layout.num_parties
    if n < 2:
        raise NotEntangledError("need at least two parties")

    state = psi
    steps: list[ExtractionStep] = []
    probability = 1.0

    first_round = True
    while True:
        entangled = [
            p
            for p in range(1, n + 1)
            if _single_party_rank(state, p, cutoff) >= 2
        ]
        if not entangled:
            if first_round:
                raise NotEntangledError("state is a product state across every party")
            raise NumericDegeneracyError("entanglement vanished mid-protocol")
        if len(entangled) == 1:
            raise NumericDegeneracyError(
                f"exactly one party ({entangled[0]}) reports Schmidt rank >= 2"
            )
        first_round = False
        pivot = entangled[0]

        fop, state, weight = equalize_filter(state, pivot, cutoff)
        steps.append(ExtractionStep(fop, weight))
        probability *= weight

        branch_info = classify_branch(state, pivot)
        if branch_info.case == "B":
            index = 0 if not branch_info.branch_product[0] else 1
            d = layout.dim_of(pivot)
            proj = np.zeros((d, d), dtype=complex)
            proj[index, index] = 1.0
            fop = FilterOperator(pivot, proj, "project")
            vec, weight = apply_local(state, pivot, proj)
            if weight <= 0.0:
                raise NumericDegeneracyError("branch projection annihilated the state")
            state = PureState(layout, vec / np.sqrt(weight))
            steps.append(ExtractionStep(fop, weight))
            probability *= weight
            continue

        assert branch_info.factors is not None
        for p in branch_info.distinct_parties:
            chi, tau = branch_info.factors[p]
            fop, state, weight = _biorthogonal_filter(state, p, chi, tau)
            steps.append(ExtractionStep(fop, weight))
            probability *= weight

        survivors = tuple(sorted((pivot,) + branch_info.distinct_parties))
        chosen = target_pair_choice(survivors, pair)
        for p in survivors:
            if p in chosen:
                continue
            fop, state, _actual = _plus_projection(state, p)
            steps.append(ExtractionStep(fop, 1.0))  # both outcomes succeed

        final = reduce_to_parties(state, chosen)
        decomp = schmidt(final, (1,), cutoff)
        c0 = float(decomp.coefficients[0])
        c1 = float(decomp.coefficients[1]) if decomp.rank > 1 else 0.0
        return ExtractionResult(
            pair=chosen,
            probability=probability,
            steps=tuple(steps),
            final_state=final,
            schmidt_coeffs=(c0, c1),
            surviving_parties=survivors,
        )

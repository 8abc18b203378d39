"""Partial-transpose positivity certification across bipartitions.

Positivity of every partial transpose is necessary for full separability;
a negative two-party transpose certifies entanglement.  Non-distillability
follows from single-party PPT by theorem (filtering extraction plus
monotonicity of the partial-transpose sign under local operations) and is
reported as a derived verdict, never re-proved numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .states import RhoFamilySpec, rho_family
from .tensor import DensityOperator, MAX_GLOBAL_DIM, hermitian_eigenvalues, partial_transpose

PSD = "PSD"
NOT_PSD = "NOT_PSD"

DEFAULT_PPT_TOL = 1e-9

DERIVED_BY_THEOREM = "derived-by-theorem"
NOT_INFERRED = "not-inferred"


@dataclass(frozen=True)
class PptReport:
    """Positivity verdict for one partial transpose."""

    subset: tuple[int, ...]
    min_eigenvalue: float
    verdict: str
    tolerance_used: float


@dataclass(frozen=True)
class BipartitionScan:
    """PPT reports over all subsets of size 1..floor(N/2).

    Complementary subsets share the transpose spectrum, so larger subsets
    are redundant and skipped.  Report order is by size, then lexicographic.
    """

    reports: tuple[PptReport, ...]
    all_ppt: bool


@dataclass(frozen=True)
class RhoClassification:
    """Family verdict record: single-cut PPT, pair-cut NPT, and the claim.

    ``npt_pairs`` is None when no two-party cut exists (N = 2).  The
    non-distillability entry is a theorem-level corollary of single-cut PPT,
    labeled as such rather than numerically certified.
    """

    n: int
    alpha: float
    ppt_single: bool
    npt_pairs: bool | None
    bound_entangled_claim: bool
    non_distillability: str


def ppt_check(rho: DensityOperator, subset, tol: float = DEFAULT_PPT_TOL) -> PptReport:
    """Check positivity of the partial transpose on ``subset``."""
    parties = rho.layout.check_subset(subset, nonempty=True, proper=True)
    transposed = partial_transpose(rho, parties)
    eigs = hermitian_eigenvalues(transposed)
    min_eig = float(eigs[0])
    threshold = -tol * max(1.0, rho.trace)
    verdict = PSD if min_eig >= threshold else NOT_PSD
    return PptReport(parties, min_eig, verdict, tol)


def scan(rho: DensityOperator, tol: float = DEFAULT_PPT_TOL) -> BipartitionScan:
    """PPT-check every subset of size up to floor(N/2), in deterministic order."""
    layout = rho.layout
    if layout.dim > MAX_GLOBAL_DIM:
        raise ValueError(f"global dimension {layout.dim} exceeds scan cap {MAX_GLOBAL_DIM}")
    n = layout.num_parties
    reports = []
    for size in range(1, n // 2 + 1):
        for subset in combinations(range(1, n + 1), size):
            reports.append(ppt_check(rho, subset, tol))
    all_ppt = all(r.verdict == PSD for r in reports)
    return BipartitionScan(tuple(reports), all_ppt)


def classify_family(
    n: int, alpha: float | None = None, tol: float = DEFAULT_PPT_TOL
) -> RhoClassification:
    """Classify one family member: PPT across single cuts, NPT across pairs.

    The bound-entanglement claim is the conjunction of both facts; it holds
    exactly for N >= 4.
    """
    if not 2 <= n <= 12:
        raise ValueError(f"party count {n} outside supported range 2..12")
    spec = RhoFamilySpec(n, alpha)
    rho = rho_family(spec)

    singles = [ppt_check(rho, (k,), tol) for k in range(1, n + 1)]
    ppt_single = all(r.verdict == PSD for r in singles)

    npt_pairs: bool | None
    if n < 3:
        npt_pairs = None  # a two-party subset would be the whole system
    else:
        pairs = [ppt_check(rho, pair, tol) for pair in combinations(range(1, n + 1), 2)]
        npt_pairs = all(r.verdict == NOT_PSD for r in pairs)

    claim = bool(ppt_single and npt_pairs)
    basis = DERIVED_BY_THEOREM if ppt_single else NOT_INFERRED
    return RhoClassification(n, spec.alpha, ppt_single, npt_pairs, claim, basis)

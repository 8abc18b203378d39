"""Constructors for the state family under study and test fixtures.

The family mixes an N-qubit GHZ projector with the 2N rank-1 projectors
onto the single-flip basis states (one party flipped against the rest) and
their bit complements, uniformly weighted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tensor import DensityOperator, PartyLayout, PureState


def default_alpha(n: int) -> float:
    """GHZ phase pi*(N-1)/4 that maximizes the Bell expectation for N parties."""
    return math.pi * (n - 1) / 4.0


@dataclass(frozen=True)
class RhoFamilySpec:
    """Parameters (party count, GHZ phase) selecting one family member.

    ``alpha=None`` resolves to :func:`default_alpha`.
    """

    n: int
    alpha: float | None = None

    def __post_init__(self) -> None:
        n = int(self.n)
        object.__setattr__(self, "n", n)
        if n < 2:
            raise ValueError("family requires at least two parties")
        alpha = default_alpha(n) if self.alpha is None else float(self.alpha)
        if not math.isfinite(alpha):
            raise ValueError("alpha must be finite")
        object.__setattr__(self, "alpha", alpha)


def ghz(n: int, alpha: float) -> PureState:
    """GHZ state (|0...0> + e^{i alpha} |1...1>)/sqrt(2) on n qubits."""
    if n < 2:
        raise ValueError("GHZ state needs at least two parties")
    layout = PartyLayout.qubits(n)
    amps = np.zeros(layout.dim, dtype=complex)
    amps[0] = 1.0 / math.sqrt(2.0)
    amps[-1] = np.exp(1j * alpha) / math.sqrt(2.0)
    return PureState(layout, amps)


def flip_index(n: int, k: int) -> int:
    """Basis index of |0..1..0> with the 1 at party k (party 1 most significant)."""
    if not 1 <= k <= n:
        raise ValueError(f"party index {k} out of range 1..{n}")
    return 1 << (n - k)


def ghz_projector(n: int, alpha: float) -> DensityOperator:
    """Rank-1 projector onto the GHZ state, written entrywise.

    The two diagonal corners are exact 1/2 (independent of the phase), so
    only the off-diagonal corners vary with alpha.
    """
    if n < 2:
        raise ValueError("GHZ projector needs at least two parties")
    layout = PartyLayout.qubits(n)
    d = layout.dim
    m = np.zeros((d, d), dtype=complex)
    phase = np.exp(1j * float(alpha))
    m[0, 0] = 0.5
    m[d - 1, d - 1] = 0.5
    m[d - 1, 0] = 0.5 * phase
    m[0, d - 1] = 0.5 * np.conj(phase)
    return DensityOperator(layout, m, psd_certified=True)


def flip_projectors(n: int, k: int) -> tuple[DensityOperator, DensityOperator]:
    """Rank-1 projectors onto the single-flip state at party k and its complement."""
    if n < 2:
        raise ValueError("need at least two parties")
    idx = flip_index(n, k)
    layout = PartyLayout.qubits(n)
    d = layout.dim
    p = np.zeros((d, d), dtype=complex)
    p[idx, idx] = 1.0
    pbar = np.zeros((d, d), dtype=complex)
    pbar[d - 1 - idx, d - 1 - idx] = 1.0
    return (
        DensityOperator(layout, p, psd_certified=True),
        DensityOperator(layout, pbar, psd_certified=True),
    )


def rho_family(spec: RhoFamilySpec) -> DensityOperator:
    """Density operator of the GHZ-plus-flip-projector family.

    Built entrywise: the GHZ projector plus weight 1/2 on each of the 2N
    flip-projector diagonal entries, all scaled by 1/(N+1).  Only the two
    off-diagonal GHZ corners depend on the phase.
    """
    n = spec.n
    m = np.array(ghz_projector(n, spec.alpha).matrix)
    d = m.shape[0]
    for k in range(1, n + 1):
        idx = flip_index(n, k)
        m[idx, idx] += 0.5
        m[d - 1 - idx, d - 1 - idx] += 0.5
    m *= 1.0 / (n + 1)
    return DensityOperator(PartyLayout.qubits(n), m, psd_certified=True)


def random_pure(layout: PartyLayout, seed: int) -> PureState:
    """Haar-like random pure state, fully determined by the seed.

    Amplitudes are drawn i.i.d. from the rotation-invariant complex normal
    distribution and normalized.
    """
    rng = np.random.default_rng(int(seed))
    amps = rng.standard_normal(layout.dim) + 1j * rng.standard_normal(layout.dim)
    amps /= np.linalg.norm(amps)
    return PureState(layout, amps)

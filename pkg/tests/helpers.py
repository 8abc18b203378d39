"""Shared fixtures and independent mini-oracles for the test suite."""

from __future__ import annotations

import numpy as np

from boundbell import DensityOperator, PartyLayout, PureState, random_pure


def make_extraction_corpus(count: int = 200) -> list[tuple[str, PureState]]:
    """Seeded random pure states, N in {3,4,5}, local dims in {2,3}."""
    rng = np.random.default_rng(20260810)
    corpus = []
    for i in range(count):
        n = int(rng.integers(3, 6))
        dims = tuple(int(d) for d in rng.integers(2, 4, size=n))
        psi = random_pure(PartyLayout(dims), 1000 + i)
        corpus.append((f"case{i:03d}", psi))
    return corpus


def separable_fixture(n: int = 3, terms: int = 6, seed: int = 11) -> DensityOperator:
    """Uniform mixture of seeded random n-qubit product pure states."""
    rng = np.random.default_rng(seed)
    layout = PartyLayout.qubits(n)
    m = np.zeros((layout.dim, layout.dim), dtype=complex)
    for _ in range(terms):
        amps = np.ones(1, dtype=complex)
        for _ in range(n):
            local = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            local /= np.linalg.norm(local)
            amps = np.kron(amps, local)
        m += np.outer(amps, amps.conj()) / terms
    return DensityOperator(layout, m, psd_certified=True)


def random_density(layout: PartyLayout, seed: int, terms: int = 4) -> DensityOperator:
    """Full-rank-ish random density operator from a seeded pure-state mixture."""
    rng = np.random.default_rng(seed)
    weights = rng.random(terms)
    weights /= weights.sum()
    m = np.zeros((layout.dim, layout.dim), dtype=complex)
    for t in range(terms):
        psi = random_pure(layout, seed * 1000 + t)
        m += weights[t] * np.outer(psi.amplitudes, psi.amplitudes.conj())
    return DensityOperator(layout, m, psd_certified=True)


def brute_reduced_operator(psi: PureState, party: int) -> np.ndarray:
    """One-party reduced operator by explicit contraction (oracle path)."""
    dims = psi.layout.dims
    t = np.moveaxis(psi.amplitudes.reshape(dims), party - 1, 0)
    m = t.reshape(dims[party - 1], -1)
    return m @ m.conj().T


def brute_single_rank(psi: PureState, party: int, cutoff: float = 1e-10) -> int:
    """Schmidt rank at one party from reduced-operator eigenvalues (oracle)."""
    eigs = np.linalg.eigvalsh(brute_reduced_operator(psi, party))
    return int(np.sum(eigs > cutoff**2))

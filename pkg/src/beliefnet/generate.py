"""Random model instances for experiments and property tests.

Every function takes an explicit ``numpy.random.Generator``.
"""

from __future__ import annotations

import numpy as np

from .graphs import structural_balance
from .model import ModelError, validate_influence, validate_logic, validate_profile


class GenerationExhausted(RuntimeError):
    pass


MAX_ATTEMPTS = 100


def random_influence(n: int, rng: np.random.Generator, extra_edge_prob: float = 0.3) -> np.ndarray:
    """Ring plus self-loops plus random extra edges, rows normalized.

    The ring makes the graph strongly connected and the self-loops give the
    positive diagonal, so the result always satisfies the network assumption.
    """
    mask = np.eye(n, dtype=bool)
    if n > 1:
        mask[np.arange(n), (np.arange(n) + 1) % n] = True
    mask |= rng.random((n, n)) < extra_edge_prob
    W = np.where(mask, rng.uniform(0.1, 1.0, (n, n)), 0.0)
    return W / W.sum(axis=1, keepdims=True)


def random_pattern(m: int, density: float, rng: np.random.Generator) -> np.ndarray:
    """Boolean logic pattern with a full diagonal; off-diagonal cells with
    probability ``density``."""
    P = rng.random((m, m)) < density
    np.fill_diagonal(P, True)
    return P


def random_irreducible_pattern(m: int, rng: np.random.Generator, density: float = 0.3) -> np.ndarray:
    """Random pattern containing a random Hamiltonian cycle, hence irreducible."""
    P = random_pattern(m, density, rng)
    if m > 1:
        order = rng.permutation(m)
        P[order, np.roll(order, 1)] = True
    return P


def balanced_signs(pattern, rng: np.random.Generator) -> np.ndarray:
    """Signs ``s_p s_q`` from random camps ``s``; structurally balanced."""
    m = pattern.shape[0]
    camp = rng.choice([-1, 1], size=m)
    return np.outer(camp, camp)


def random_signs(pattern, rng: np.random.Generator, flip_prob: float) -> np.ndarray:
    S = np.where(rng.random(pattern.shape) < flip_prob, -1, 1)
    np.fill_diagonal(S, 1)
    return S


def unbalanced_signs(pattern, rng: np.random.Generator) -> np.ndarray:
    """Sign pattern whose graph on ``pattern`` is structurally unbalanced."""
    for _ in range(MAX_ATTEMPTS):
        S = random_signs(pattern, rng, 0.5)
        if not structural_balance(np.where(pattern, S, 0)).balanced:
            return S
    raise GenerationExhausted("pattern admits no unbalanced signing (is it a forest?)")


def random_logic(pattern, signs, rng: np.random.Generator, low: float = 0.1) -> np.ndarray:
    """Logic matrix on ``pattern`` with the given off-diagonal signs.

    Magnitudes are uniform in ``[low, 1)`` before each row is scaled to unit
    absolute sum; the diagonal stays positive.
    """
    pattern = np.asarray(pattern, dtype=bool)
    mag = np.where(pattern, rng.uniform(low, 1.0, pattern.shape), 0.0)
    S = np.asarray(signs).copy()
    np.fill_diagonal(S, 1)
    C = mag * S
    return C / np.abs(C).sum(axis=1, keepdims=True)


def random_profile(pattern, signs, n: int, rng: np.random.Generator,
                   competing_cells=(), homogeneous: bool = False):
    """``n`` logic matrices on a shared pattern and sign pattern.

    For each ``(p, q)`` in ``competing_cells`` a random nonempty proper
    subset of individuals gets the opposite sign there. Each matrix is
    checked against the logic-matrix assumption and resampled on failure.
    """
    flips = {}
    if competing_cells:
        if n < 2:
            raise ValueError("competition needs at least two individuals")
        for cell in competing_cells:
            k = rng.integers(1, n)
            flips[cell] = rng.permutation(n)[:k]
    mats = []
    for i in range(n):
        S = np.array(signs, copy=True)
        for (p, q), who in flips.items():
            if i in who:
                S[p, q] = -S[p, q]
        if homogeneous and mats:
            mats.append(mats[0])
            continue
        for _ in range(MAX_ATTEMPTS):
            C = random_logic(pattern, S, rng)
            try:
                validate_logic(C)
            except ModelError:
                continue
            mats.append(C)
            break
        else:
            raise GenerationExhausted(f"no valid logic matrix for individual {i}")
    return mats


def random_scenario(n: int, m: int, rng: np.random.Generator, density: float = 0.3,
                    competition: bool = False, sign_flip_prob: float = 0.3,
                    extra_edge_prob: float = 0.3, pattern=None):
    """Return ``(W, matrices)`` for a random valid model."""
    W = random_influence(n, rng, extra_edge_prob)
    if pattern is None:
        pattern = random_pattern(m, density, rng)
    pattern = np.array(pattern, dtype=bool)
    np.fill_diagonal(pattern, True)
    cells = []
    if competition:
        if m < 2 or n < 2:
            raise GenerationExhausted("competition needs m >= 2 and n >= 2")
        off = np.argwhere(pattern & ~np.eye(m, dtype=bool))
        if off.size == 0:
            p, q = rng.choice(m, size=2, replace=False)
            pattern[p, q] = True
            off = np.array([[p, q]])
        p, q = off[rng.integers(len(off))]
        cells = [(int(p), int(q))]
    signs = random_signs(pattern, rng, sign_flip_prob)
    mats = random_profile(pattern, signs, n, rng, competing_cells=cells)
    validate_influence(W)
    validate_profile(mats)
    return W, mats


def random_opinions(size: int, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size)


__all__ = [
    "GenerationExhausted",
    "balanced_signs",
    "random_influence",
    "random_irreducible_pattern",
    "random_logic",
    "random_opinions",
    "random_pattern",
    "random_profile",
    "random_scenario",
    "random_signs",
    "unbalanced_signs",
]

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beliefnet.generate import (
    balanced_signs,
    random_influence,
    random_irreducible_pattern,
    random_pattern,
    random_profile,
    random_signs,
    unbalanced_signs,
)
from beliefnet.graphs import (
    PreconditionViolation,
    build_multiplex_pattern,
    condense_logic,
    condense_pattern,
    is_strongly_connected,
    multiplex_balance_via_lemma,
    period,
    primitivity_check,
    strongly_connected_components,
    structural_balance,
)
from beliefnet.model import has_competition, homogeneous_profile, validate_influence, validate_profile

from conftest import C_BAR, C_HAT, C_SPACE_OPPOSED, W_SIX, seven_topic_pattern

seeds = st.integers(0, 2**32 - 1)


# -- brute-force oracles ----------------------------------------------------

def closure(adj):
    R = (np.asarray(adj) != 0) | np.eye(len(adj), dtype=bool)
    for k in range(len(adj)):
        R = R | (R[:, [k]] & R[[k], :])
    return R


def scc_oracle(adj):
    R = closure(adj)
    mutual = R & R.T
    return sorted({tuple(np.flatnonzero(mutual[v]).tolist()) for v in range(len(adj))})


def balance_oracle(G):
    """Balanced iff some +-1 labelling makes every edge sign equal s_u s_v."""
    G = np.asarray(G)
    d = len(G)
    edges = [(u, v, np.sign(G[u, v])) for u in range(d) for v in range(d) if G[u, v] != 0]
    for labels in itertools.product((1, -1), repeat=d):
        if all(labels[u] * labels[v] == s for u, v, s in edges):
            return True
    return False


def primitive_oracle(M):
    P = (np.asarray(M) != 0).astype(np.int64)
    d = len(P)
    Q = P.copy()
    for _ in range((d - 1) ** 2 + 1):
        if (Q > 0).all():
            return True
        Q = ((Q @ P) > 0).astype(np.int64)
    return False


def random_signed(d, rng, density=0.4):
    G = np.where(rng.random((d, d)) < density, rng.choice([-1.0, 1.0], (d, d)), 0.0)
    return G


# -- strongly connected components and condensation --------------------------

@settings(max_examples=100, deadline=None)
@given(seed=seeds)
def test_scc_matches_transitive_closure(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 10))
    adj = rng.random((d, d)) < rng.uniform(0.05, 0.5)
    assert sorted(map(tuple, strongly_connected_components(adj))) == scc_oracle(adj)


def test_condensation_of_seven_topic_pattern():
    part = condense_pattern(seven_topic_pattern())
    assert part.s == 4
    assert part.blocks == ((0, 1, 2), (3,), (4, 5), (6,))
    assert part.closed_flags == (True, True, False, False)
    assert part.dep_sets[5] == {3, 4}
    assert part.ext_dep_sets[2] == {2, 3}
    assert part.ext_dep_sets[3] == {5}


def test_condensation_of_first_study_profile():
    part = condense_logic(validate_profile([C_HAT] * 3 + [C_BAR] * 3))
    assert part.blocks == ((0,), (1,), (2,), (3, 4))
    assert part.closed_flags == (True, False, False, False)


def test_irreducible_pattern_is_one_closed_block():
    P = np.ones((4, 4), dtype=bool)
    part = condense_pattern(P)
    assert part.blocks == ((0, 1, 2, 3),) and part.closed_flags == (True,)


@settings(max_examples=80, deadline=None)
@given(seed=seeds)
def test_partition_invariants(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 9))
    P = random_pattern(m, rng.uniform(0.05, 0.5), rng)
    part = condense_pattern(P)
    assert sorted(p for b in part.blocks for p in b) == list(range(m))
    assert sorted(part.perm) == list(range(m))

    # reordered pattern is lower block triangular with irreducible diagonal blocks
    Q = part.permutation_matrix()
    R = Q.T @ P.astype(float) @ Q
    sizes = np.cumsum([0] + [len(b) for b in part.blocks])
    for j in range(part.s):
        lo, hi = sizes[j], sizes[j + 1]
        assert not R[lo:hi, hi:].any()
        assert is_strongly_connected(R[lo:hi, lo:hi])
        # closed iff nothing to the left of the diagonal block
        assert part.closed_flags[j] == (not R[lo:hi, :lo].any())
        deps = set().union(*(part.dep_sets[p] for p in part.blocks[j])) - set(part.blocks[j])
        assert part.ext_dep_sets[j] == deps
    for p in range(m):
        assert part.dep_sets[p] == {q for q in range(m) if q != p and P[p, q]}


@settings(max_examples=80, deadline=None)
@given(seed=seeds)
def test_condensation_is_relabeling_equivariant(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 9))
    P = random_pattern(m, rng.uniform(0.05, 0.5), rng)
    sigma = rng.permutation(m)  # old topic p becomes sigma[p]
    Pr = np.zeros_like(P)
    Pr[np.ix_(sigma, sigma)] = P
    a, b = condense_pattern(P), condense_pattern(Pr)

    def closed_sets(part, relabel):
        return {frozenset(relabel[p] for p in blk): c
                for blk, c in zip(part.blocks, part.closed_flags)}

    assert closed_sets(a, sigma) == closed_sets(b, np.arange(m))
    for p in range(m):
        assert {sigma[q] for q in a.dep_sets[p]} == set(b.dep_sets[sigma[p]])


# -- structural balance ------------------------------------------------------

def test_all_positive_matrix_is_balanced():
    v = structural_balance(np.ones((3, 3)))
    assert v.balanced and v.partition[1] == frozenset()


def test_opposed_two_topic_matrix():
    v = structural_balance(C_SPACE_OPPOSED)
    assert v.balanced
    assert v.partition == (frozenset({0}), frozenset({1}))
    assert v.side(0) == 1 and v.side(1) == -1


def test_triangle_with_one_negative_edge():
    G = np.array([[0, 1, 0], [0, 0, 1], [-1, 0, 0]], dtype=float)
    v = structural_balance(G)
    assert not v.balanced
    assert len(v.witness) == 3
    with pytest.raises(PreconditionViolation):
        v.side(0)


def assert_valid_witness(G, witness):
    nonzero = np.asarray(G) != 0
    assert sum(1 for *_, s in witness if s < 0) % 2 == 1
    for (u, v, s), (u2, *_ ) in zip(witness, witness[1:] + witness[:1]):
        assert v == u2  # closed walk
        assert nonzero[u, v] or nonzero[v, u]
        signs = {np.sign(G[u, v]), np.sign(G[v, u])} - {0}
        assert s in signs


@settings(max_examples=150, deadline=None)
@given(seed=seeds)
def test_balance_matches_coloring_enumeration(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 9))
    G = random_signed(d, rng, rng.uniform(0.1, 0.6))
    # half the time make antiparallel pairs agree in sign
    if rng.random() < 0.5:
        lower = np.tril(np.ones((d, d), dtype=bool), -1)
        G = np.where(lower & (G.T != 0), np.abs(G) * np.sign(G.T), G)
    v = structural_balance(G)
    assert v.balanced == balance_oracle(G)
    if v.balanced:
        plus, minus = v.partition
        assert plus | minus == set(range(d)) and not plus & minus
        for a, b in np.argwhere(G != 0):
            same = (a in plus) == (b in plus)
            assert (G[a, b] > 0) == same
    else:
        assert_valid_witness(G, list(v.witness))


# -- primitivity and period --------------------------------------------------

def test_primitivity_examples():
    assert primitivity_check(W_SIX)
    assert not primitivity_check([[0, 1], [1, 0]])
    assert primitivity_check(np.full((3, 3), 0.2))


@settings(max_examples=100, deadline=None)
@given(seed=seeds)
def test_primitivity_matches_naive_powers(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 8))
    M = rng.random((d, d)) < rng.uniform(0.1, 0.6)
    expected = primitive_oracle(M)
    assert primitivity_check(M) == expected
    # strongly connected and aperiodic characterization
    if is_strongly_connected(M) and M.any():
        assert expected == (period(M) == 1)
    else:
        assert not expected


def test_period_of_cycles():
    ring = np.roll(np.eye(5), 1, axis=1)
    assert period(ring) == 5
    ring[0, 0] = 1
    assert period(ring) == 1
    with pytest.raises(PreconditionViolation):
        period(np.eye(2))


# -- multiplex graph ---------------------------------------------------------

def random_model(rng, n_max=6, m_max=5, irreducible=False, mode=None):
    n, m = int(rng.integers(1, n_max + 1)), int(rng.integers(1, m_max + 1))
    W = validate_influence(random_influence(n, rng, rng.uniform(0, 0.5)))
    if irreducible:
        P = random_irreducible_pattern(m, rng, rng.uniform(0, 0.5))
    else:
        P = random_pattern(m, rng.uniform(0, 0.5), rng)
    mode = mode or rng.choice(["balanced", "random", "competition"])
    off = np.argwhere(P & ~np.eye(m, dtype=bool))
    if mode == "balanced":
        S, cells = balanced_signs(P, rng), []
    elif mode == "competition" and n >= 2 and off.size:
        S, cells = random_signs(P, rng, 0.3), [tuple(off[rng.integers(len(off))])]
    else:
        S, cells = random_signs(P, rng, 0.4), []
    prof = validate_profile(random_profile(P, S, n, rng, competing_cells=cells))
    return W, prof


def test_single_individual_multiplex_is_the_logic_matrix():
    net = validate_influence([[1.0]])
    prof = validate_profile([C_HAT])
    assert np.array_equal(build_multiplex_pattern(net, prof), C_HAT)


def test_homogeneous_multiplex_is_kronecker_product():
    net = validate_influence(W_SIX)
    A = build_multiplex_pattern(net, homogeneous_profile(C_HAT, 6))
    assert np.allclose(A, np.kron(C_HAT, W_SIX), atol=0)


def test_study_multiplex_rows_have_unit_abs_sum():
    net = validate_influence(W_SIX)
    A = build_multiplex_pattern(net, validate_profile([C_HAT] * 3 + [C_BAR] * 3))
    assert A.shape == (30, 30)
    assert np.allclose(np.abs(A).sum(axis=1), 1.0, atol=1e-14)


@settings(max_examples=100, deadline=None)
@given(seed=seeds)
def test_multiplex_edges_match_influence_and_logic(seed):
    rng = np.random.default_rng(seed)
    net, prof = random_model(rng)
    A = build_multiplex_pattern(net, prof)
    n, m = net.n, prof.m
    for p, q, i, j in itertools.product(range(m), range(m), range(n), range(n)):
        c = prof.matrices[i].C[p, q]
        a = A[p * n + i, q * n + j]
        assert (a != 0) == (net.W[i, j] > 0 and c != 0)
        if a != 0:
            assert np.sign(a) == np.sign(c)


@settings(max_examples=100, deadline=None)
@given(seed=seeds)
def test_multiplex_primitive_iff_both_layers_primitive(seed):
    rng = np.random.default_rng(seed)
    net, prof = random_model(rng)
    A = build_multiplex_pattern(net, prof)
    expected = primitivity_check(net.W) and primitivity_check(prof.pattern)
    assert primitivity_check(np.abs(A)) == expected
    assert (is_strongly_connected(A) and period(A) == 1) == expected


@settings(max_examples=100, deadline=None)
@given(seed=seeds)
def test_balance_shortcut_matches_direct_check(seed):
    rng = np.random.default_rng(seed)
    net, prof = random_model(rng, irreducible=True)
    competing = has_competition(prof)
    short = multiplex_balance_via_lemma(prof, competing, net)
    A = build_multiplex_pattern(net, prof)
    direct = structural_balance(A)
    assert short.balanced == direct.balanced
    if short.balanced:
        # same camps up to swapping
        assert set(short.partition) == set(direct.partition)
    elif short.witness is not None:
        assert_valid_witness(A, list(short.witness))


def test_balance_shortcut_needs_irreducible_pattern():
    prof = validate_profile([C_SPACE_OPPOSED])
    with pytest.raises(PreconditionViolation):
        multiplex_balance_via_lemma(prof, False)


def test_homogeneous_positive_logic_gives_balanced_multiplex():
    prof = homogeneous_profile(np.full((3, 3), 1 / 3), 4)
    v = multiplex_balance_via_lemma(prof, False)
    assert v.balanced and v.partition[1] == frozenset()


def test_competition_forces_unbalance():
    rng = np.random.default_rng(5)
    net = validate_influence(random_influence(3, rng))
    P = random_irreducible_pattern(3, rng, 0.3)
    p, q = np.argwhere(P & ~np.eye(3, dtype=bool))[0]
    prof = validate_profile(random_profile(P, balanced_signs(P, rng), 3, rng, competing_cells=[(p, q)]))
    assert has_competition(prof)
    v = multiplex_balance_via_lemma(prof, True, net)
    A = build_multiplex_pattern(net, prof)
    assert not v.balanced
    assert_valid_witness(A, list(v.witness))
    assert not structural_balance(A).balanced


def test_unbalanced_signs_generator():
    rng = np.random.default_rng(3)
    P = random_irreducible_pattern(4, rng, 0.5)
    S = unbalanced_signs(P, rng)
    assert not balance_oracle(np.where(P, S, 0))

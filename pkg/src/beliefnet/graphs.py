"""Directed and signed graph machinery.

Matrices are read as graphs with the convention that a nonzero ``M[i, j]``
is an edge from node ``j`` to node ``i`` (row ``i`` listens to column ``j``).
Connectivity questions do not depend on that choice, but the closed/open
classification of topic blocks does.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from math import gcd
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .model import InfluenceNetwork, LogicProfile

ZERO_TOL = 1e-12


class PreconditionViolation(ValueError):
    pass


def strongly_connected_components(adj) -> list[list[int]]:
    """Tarjan's algorithm, iterative.

    ``adj`` is a boolean (or numeric) square matrix; ``adj[i, j]`` nonzero
    means an arc between ``i`` and ``j``. Components come out in reverse
    topological order of the condensation of the arcs ``i -> j``.
    """
    adj = np.asarray(adj) != 0
    n = adj.shape[0]
    succ = [np.flatnonzero(adj[v]).tolist() for v in range(n)]
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, k = work[-1]
            if k < len(succ[v]):
                work[-1] = (v, k + 1)
                w = succ[v][k]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


def is_strongly_connected(adj) -> bool:
    return len(strongly_connected_components(adj)) == 1


def period(adj) -> int:
    """Period of a strongly connected digraph (gcd of its cycle lengths).

    Uses BFS levels: the period is the gcd of ``level[u] + 1 - level[v]``
    over all arcs ``u -> v``.
    """
    adj = np.asarray(adj) != 0
    if not is_strongly_connected(adj):
        raise PreconditionViolation("period is only defined for strongly connected graphs")
    n = adj.shape[0]
    level = [-1] * n
    level[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(adj[u]):
            if level[v] == -1:
                level[v] = level[u] + 1
                queue.append(v)
    g = 0
    for u, v in np.argwhere(adj):
        g = gcd(g, abs(level[u] + 1 - level[v]))
    return g


def primitivity_check(M) -> bool:
    """True iff the nonnegative matrix ``M`` has an entrywise positive power.

    Works on the boolean pattern. Positivity of ``M^k`` is inherited by all
    higher powers, so squaring until the exponent passes Wielandt's bound
    ``(d-1)^2 + 1`` decides the question.
    """
    P = np.asarray(M) != 0
    d = P.shape[0]
    bound = (d - 1) ** 2 + 1
    power = 1
    while True:
        if P.all():
            return True
        if power >= bound:
            return False
        Pi = P.astype(np.int64)
        P = (Pi @ Pi) > 0
        power *= 2


@dataclass(frozen=True)
class TopicPartition:
    """Ordered strongly connected blocks of the shared logic pattern.

    ``blocks[j]`` lists the topics of block ``j`` in ascending order; blocks
    are in dependency order (a block only depends on earlier blocks).
    ``dep_sets[p]`` are the topics ``q != p`` with ``c_pq != 0`` and
    ``ext_dep_sets[j]`` the topics outside block ``j`` it depends on.
    """

    perm: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]
    closed_flags: tuple[bool, ...]
    dep_sets: tuple[frozenset, ...]
    ext_dep_sets: tuple[frozenset, ...]

    @property
    def s(self) -> int:
        return len(self.blocks)

    def block_of(self, p: int) -> int:
        for j, b in enumerate(self.blocks):
            if p in b:
                return j
        raise KeyError(p)

    def permutation_matrix(self) -> np.ndarray:
        """``P`` with ``P.T @ C @ P`` lower block triangular."""
        m = len(self.perm)
        P = np.zeros((m, m))
        P[list(self.perm), np.arange(m)] = 1.0
        return P


def condense_pattern(pattern) -> TopicPartition:
    """Condense a logic pattern (``pattern[p, q]``: topic p depends on q)."""
    pattern = np.asarray(pattern) != 0
    m = pattern.shape[0]
    comps = strongly_connected_components(pattern)
    comp_of = [0] * m
    for k, comp in enumerate(comps):
        for p in comp:
            comp_of[p] = k

    # block a must precede block b when some topic in b depends on one in a
    preds: list[set[int]] = [set() for _ in comps]
    for p, q in np.argwhere(pattern):
        a, b = comp_of[q], comp_of[p]
        if a != b:
            preds[b].add(a)
    succs: list[set[int]] = [set() for _ in comps]
    for b, ps in enumerate(preds):
        for a in ps:
            succs[a].add(b)
    indeg = [len(ps) for ps in preds]
    heap = [(comps[k][0], k) for k in range(len(comps)) if indeg[k] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, k = heapq.heappop(heap)
        order.append(k)
        for b in succs[k]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, (comps[b][0], b))

    blocks = tuple(tuple(comps[k]) for k in order)
    dep_sets = tuple(
        frozenset(int(q) for q in np.flatnonzero(pattern[p]) if q != p) for p in range(m)
    )
    ext = []
    for b in blocks:
        deps = set().union(*(dep_sets[p] for p in b)) - set(b)
        ext.append(frozenset(deps))
    return TopicPartition(
        perm=tuple(p for b in blocks for p in b),
        blocks=blocks,
        closed_flags=tuple(not e for e in ext),
        dep_sets=dep_sets,
        ext_dep_sets=tuple(ext),
    )


def condense_logic(profile: LogicProfile) -> TopicPartition:
    return condense_pattern(profile.pattern)


@dataclass(frozen=True)
class BalanceVerdict:
    """Outcome of a structural balance test.

    ``witness`` is a closed walk of undirected edges ``(u, v, sign)`` with an
    odd number of negative signs when the graph is unbalanced.
    """

    balanced: bool
    partition: tuple[frozenset, frozenset] | None = None
    witness: tuple[tuple[int, int, int], ...] | None = None

    def side(self, v: int) -> int:
        """+1 or -1 for the camp of node ``v`` (balanced graphs only)."""
        if not self.balanced:
            raise PreconditionViolation("unbalanced graphs have no camps")
        return 1 if v in self.partition[0] else -1


class _ParityUnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n
        # parity of a node relative to its parent
        self.parity = [0] * n

    def find(self, v: int) -> tuple[int, int]:
        path = []
        while self.parent[v] != v:
            path.append(v)
            v = self.parent[v]
        root = v
        # compress, accumulating parity from the top down
        acc = 0
        for u in reversed(path):
            acc ^= self.parity[u]
            self.parity[u] = acc
            self.parent[u] = root
        return root, (self.parity[path[0]] if path else 0)

    def union(self, u: int, v: int, odd: int) -> bool:
        """Impose parity(u) xor parity(v) == odd. False on contradiction."""
        ru, pu = self.find(u)
        rv, pv = self.find(v)
        if ru == rv:
            return (pu ^ pv) == odd
        if self.rank[ru] < self.rank[rv]:
            ru, rv, pu, pv = rv, ru, pv, pu
        self.parent[rv] = ru
        self.parity[rv] = pu ^ pv ^ odd
        if self.rank[ru] == self.rank[rv]:
            self.rank[ru] += 1
        return True


def _undirected_signed_edges(G, tol: float):
    G = np.asarray(G, dtype=float)
    d = G.shape[0]
    for i in range(d):
        for j in range(d):
            w = G[i, j]
            if abs(w) > tol:
                yield min(i, j), max(i, j), (1 if w > 0 else -1)


def _tree_path(tree: list[list[tuple[int, int]]], src: int, dst: int):
    prev: dict[int, tuple[int, int]] = {src: (src, 1)}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            break
        for v, s in tree[u]:
            if v not in prev:
                prev[v] = (u, s)
                queue.append(v)
    path = []
    v = dst
    while v != src:
        u, s = prev[v]
        path.append((u, v, s))
        v = u
    return path[::-1]


def structural_balance(G, tol: float = ZERO_TOL) -> BalanceVerdict:
    """Decide structural balance of the signed graph of ``G``.

    Edge directions are ignored. Each node of each connected component goes
    into the camp of its smallest-index node (``V+``) or the other one.
    """
    G = np.asarray(G, dtype=float)
    d = G.shape[0]
    uf = _ParityUnionFind(d)
    tree: list[list[tuple[int, int]]] = [[] for _ in range(d)]
    for u, v, s in _undirected_signed_edges(G, tol):
        if u == v:
            if s < 0:
                return BalanceVerdict(False, witness=((u, u, -1),))
            continue
        odd = 1 if s < 0 else 0
        ru, _ = uf.find(u)
        rv, _ = uf.find(v)
        if ru != rv:
            uf.union(u, v, odd)
            tree[u].append((v, s))
            tree[v].append((u, s))
        elif not uf.union(u, v, odd):
            cycle = _tree_path(tree, u, v) + [(v, u, s)]
            return BalanceVerdict(False, witness=tuple(cycle))

    plus, minus = set(), set()
    anchor: dict[int, int] = {}
    for v in range(d):
        r, p = uf.find(v)
        if r not in anchor:
            anchor[r] = p
        (plus if p == anchor[r] else minus).add(v)
    return BalanceVerdict(True, partition=(frozenset(plus), frozenset(minus)))


def build_multiplex_pattern(net: InfluenceNetwork, profile: LogicProfile) -> np.ndarray:
    """The topic-major system matrix, block ``(p, q)`` equal to ``diag(c_pq) W``."""
    n, m = net.n, profile.m
    Cs = profile.stack()  # (n, m, m)
    A = np.empty((n * m, n * m))
    for p in range(m):
        for q in range(m):
            A[p * n:(p + 1) * n, q * n:(q + 1) * n] = Cs[:, p, q][:, None] * net.W
    return A


def multiplex_balance_via_lemma(
    profile: LogicProfile,
    competing: bool,
    net: InfluenceNetwork | None = None,
) -> BalanceVerdict:
    """Balance of the multiplex graph derived from the logic pattern alone.

    With competition the multiplex graph is unbalanced; otherwise it has the
    balance of any single logic graph, each topic's layer inheriting the
    topic's camp. Node ``p*n + i`` is individual ``i``'s opinion on topic
    ``p``. When ``net`` is given, the unbalanced witness is lifted to an
    explicit cycle in the multiplex graph.
    """
    if not is_strongly_connected(profile.pattern):
        raise PreconditionViolation("logic pattern must be irreducible")
    n, m = profile.n, profile.m

    if competing:
        witness = None
        if net is not None:
            witness = _competition_cycle(net, profile)
        return BalanceVerdict(False, witness=witness)

    base = structural_balance(profile.matrices[0].C)
    if not base.balanced:
        witness = tuple((u * n, v * n, s) for u, v, s in base.witness)
        return BalanceVerdict(False, witness=witness)
    plus = frozenset(p * n + i for p in base.partition[0] for i in range(n))
    minus = frozenset(p * n + i for p in base.partition[1] for i in range(n))
    return BalanceVerdict(True, partition=(plus, minus))


def _competition_cycle(net: InfluenceNetwork, profile: LogicProfile):
    from .model import detect_competing

    n = net.n
    for p in range(profile.m):
        found = detect_competing(profile, p)
        if not found:
            continue
        q, i, j = min(found)
        und = (net.W > 0) | (net.W.T > 0)
        np.fill_diagonal(und, False)
        tree = [[(int(v), 1) for v in np.flatnonzero(und[u])] for u in range(n)]
        walk = _tree_path(tree, i, j)
        ci, cj = profile.entry(p, q)[[i, j]]
        cycle = [(q * n + i, p * n + i, 1 if ci > 0 else -1)]
        cycle += [(p * n + a, p * n + b, 1) for a, b, _ in walk]
        cycle.append((p * n + j, q * n + j, 1 if cj > 0 else -1))
        cycle += [(q * n + b, q * n + a, 1) for a, b, _ in reversed(walk)]
        return tuple(cycle)
    return None

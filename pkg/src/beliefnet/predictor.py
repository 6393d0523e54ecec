"""Per-topic consensus/disagreement prediction from the logic structure.

Topic blocks are visited in dependency order. Each block is handled by one
of three rules:

* closed block: consensus on every topic. The consensus values share one
  modulus (signs follow the balance camps) when the block's logic graph is
  structurally balanced and no two individuals weigh a dependency with
  opposite signs; otherwise every value is 0.
* open singleton block ``{p}``: consensus iff the ratio
  ``sum_q alpha_q c_pq,i / sum_q |c_pq,i|`` is the same for every individual.
* open block of several topics: consensus iff the linear system for the
  block's consensus values ``phi_k`` has a solution in ``[-1, 1]``.

The two open-block rules presuppose consensus on every upstream topic. When
an upstream topic disagrees the block is reported as a *conjectured*
disagreement, which is an empirical expectation and not a guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dynamics import to_topic_major
from .graphs import (
    PreconditionViolation,
    TopicPartition,
    build_multiplex_pattern,
    condense_logic,
    structural_balance,
)
from .model import InfluenceNetwork, LogicProfile, detect_competing
from .oracle import closed_block_limit, topic_indices

KAPPA_TOL = 1e-9
PHI_TOL = 1e-9
GENERIC_TOL = 1e-9


class VerdictKind(str, Enum):
    CONSENSUS = "consensus"
    ZERO_CONSENSUS = "zero-consensus"
    DISAGREEMENT = "disagreement"
    CONJECTURED_DISAGREEMENT = "conjectured-disagreement"
    UNDETERMINED = "undetermined"


# rule labels, one per decision path
CLOSED_BALANCED = "closed-block/balanced-modulus-consensus"
CLOSED_UNBALANCED = "closed-block/unbalanced-zero"
CLOSED_COMPETING = "closed-block/competing-zero"
SINGLETON_SINGLE_DEP = "open-singleton/single-dependency-sign"
SINGLETON_KAPPA = "open-singleton/common-ratio"
SINGLETON_ZERO = "open-singleton/zero-upstream"
MULTI_PHI = "open-block/phi-system"
MULTI_ZERO = "open-block/zero-upstream"
UPSTREAM_DISAGREES = "conjecture/upstream-disagreement"
UPSTREAM_UNKNOWN = "undetermined/upstream-undetermined"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    rule: str
    alpha: float | None = None

    @property
    def is_consensus(self) -> bool:
        return self.kind in (VerdictKind.CONSENSUS, VerdictKind.ZERO_CONSENSUS)

    @property
    def is_disagreement(self) -> bool:
        return self.kind in (VerdictKind.DISAGREEMENT, VerdictKind.CONJECTURED_DISAGREEMENT)

    @property
    def consensus_value(self) -> float:
        if self.kind is VerdictKind.ZERO_CONSENSUS:
            return 0.0
        if self.kind is VerdictKind.CONSENSUS:
            return self.alpha
        raise ValueError(f"no consensus value for a {self.kind.value} verdict")


def _zero(rule):
    return Verdict(VerdictKind.ZERO_CONSENSUS, rule, 0.0)


@dataclass
class PredictionReport:
    """Verdict per topic plus the constants each block rule solved for."""

    verdicts: list[Verdict]
    partition: TopicPartition
    block_constants: dict = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)

    def kinds(self) -> list[VerdictKind]:
        return [v.kind for v in self.verdicts]

    def to_dict(self) -> dict:
        topics = []
        for p, v in enumerate(self.verdicts):
            topics.append({
                "topic": p + 1,
                "verdict": v.kind.value,
                "rule": v.rule,
                "alpha": v.alpha,
            })
        blocks = []
        for j, b in enumerate(self.partition.blocks):
            blocks.append({
                "topics": [p + 1 for p in b],
                "closed": self.partition.closed_flags[j],
                "depends_on": sorted(q + 1 for q in self.partition.ext_dep_sets[j]),
                **self.block_constants.get(j, {}),
            })
        return {"topics": topics, "blocks": blocks, "flags": list(self.flags)}


def _upstream_gate(deps, upstream: dict[int, Verdict], rule_zero: str):
    """Shared handling of non-consensus or all-zero upstream topics.

    Returns (kind, rule) for an early verdict or None to continue.
    """
    ups = [upstream[q] for q in deps]
    if any(v.is_disagreement for v in ups):
        return VerdictKind.CONJECTURED_DISAGREEMENT, UPSTREAM_DISAGREES
    if any(v.kind is VerdictKind.UNDETERMINED for v in ups):
        return VerdictKind.UNDETERMINED, UPSTREAM_UNKNOWN
    if all(v.kind is VerdictKind.ZERO_CONSENSUS for v in ups):
        return VerdictKind.ZERO_CONSENSUS, rule_zero
    return None


def predict_closed_block(net: InfluenceNetwork, profile: LogicProfile, block, y0,
                         flags: list | None = None) -> tuple[dict[int, Verdict], dict]:
    """Verdicts for a closed block given topic-major initial opinions ``y0``."""
    block = tuple(block)
    inside = set(block)
    for p in block:
        outside = [q for q in np.flatnonzero(profile.pattern[p]) if q not in inside]
        if outside:
            raise PreconditionViolation(
                f"block {block} is open: topic {p} depends on {int(outside[0])}"
            )

    competing = any(detect_competing(profile, p) for p in block)
    if competing:
        return {p: _zero(CLOSED_COMPETING) for p in block}, {"case": "competing"}
    sub = profile.matrices[0].C[np.ix_(block, block)]
    balance = structural_balance(sub)
    if not balance.balanced:
        return {p: _zero(CLOSED_UNBALANCED) for p in block}, {"case": "unbalanced"}

    # modulus consensus; the value itself comes from the eigenprojector
    n = net.n
    A = build_multiplex_pattern(net, profile)
    idx = topic_indices(block, n)
    y_lim = closed_block_limit(A[np.ix_(idx, idx)], np.asarray(y0)[idx])
    out = {}
    camps = {}
    for k, p in enumerate(block):
        alpha = float(np.mean(y_lim[k * n:(k + 1) * n]))
        out[p] = Verdict(VerdictKind.CONSENSUS, CLOSED_BALANCED, alpha)
        camps[p + 1] = balance.side(k)
    if flags is not None and max(abs(v.alpha) for v in out.values()) < GENERIC_TOL:
        flags.append(f"block {[p + 1 for p in block]}: initial opinions are non-generic "
                     f"(consensus value numerically 0)")
    return out, {"case": "balanced", "camps": camps, "alpha_source": "eigenprojector"}


def predict_singleton_block(p: int, upstream: dict[int, Verdict],
                            profile: LogicProfile) -> tuple[Verdict, dict]:
    deps = sorted(int(q) for q in np.flatnonzero(profile.pattern[p]) if q != p)
    if not deps:
        raise PreconditionViolation(f"topic {p} depends on no other topic")
    rule = SINGLETON_SINGLE_DEP if len(deps) == 1 else SINGLETON_KAPPA
    gate = _upstream_gate(deps, upstream, SINGLETON_ZERO)
    if gate is not None:
        kind, gate_rule = gate
        alpha = 0.0 if kind is VerdictKind.ZERO_CONSENSUS else None
        return Verdict(kind, gate_rule, alpha), {}

    alphas = np.array([upstream[q].consensus_value for q in deps])
    Cs = profile.stack()[:, p, :][:, deps]  # (n, |deps|)
    ratios = (Cs @ alphas) / np.abs(Cs).sum(axis=1)
    spread = float(ratios.max() - ratios.min())
    consts = {"ratios": ratios.tolist(), "ratio_spread": spread}
    if spread < KAPPA_TOL:
        kappa = float(ratios[0])
        consts["kappa"] = kappa
        return Verdict(VerdictKind.CONSENSUS, rule, kappa), consts
    consts["kappa"] = None
    return Verdict(VerdictKind.DISAGREEMENT, rule), consts


def phi_system(block, ext, alphas: dict[int, float], profile: LogicProfile):
    """Stack the per-individual consistency equations of an open block.

    One equation per (individual, topic k in block):
    ``phi_k (sum_{r != k} |c_kr| + sum_{q in ext} |c_kq|)
      - sum_{r != k} phi_r c_kr = sum_{q in ext} alpha_q c_kq``.
    """
    block = list(block)
    ext = sorted(ext)
    Cs = profile.stack()
    n, s = profile.n, len(block)
    M = np.zeros((n * s, s))
    rhs = np.zeros(n * s)
    a_ext = np.array([alphas[q] for q in ext])
    for i in range(n):
        C = Cs[i]
        for a, k in enumerate(block):
            row = i * s + a
            others = [r for r in block if r != k]
            M[row, a] = np.abs(C[k, others]).sum() + np.abs(C[k, ext]).sum()
            for b, r in enumerate(block):
                if r != k:
                    M[row, b] -= C[k, r]
            rhs[row] = C[k, ext] @ a_ext
    return M, rhs


def predict_multi_block(block, upstream: dict[int, Verdict], profile: LogicProfile,
                        ext=None) -> tuple[dict[int, Verdict], dict]:
    block = tuple(block)
    if len(block) < 2:
        raise PreconditionViolation("use predict_singleton_block for single-topic blocks")
    if ext is None:
        deps = set()
        for k in block:
            deps |= {int(q) for q in np.flatnonzero(profile.pattern[k])}
        ext = deps - set(block)
    ext = sorted(ext)
    if not ext:
        raise PreconditionViolation(f"block {block} is closed")

    gate = _upstream_gate(ext, upstream, MULTI_ZERO)
    if gate is not None:
        kind, rule = gate
        alpha = 0.0 if kind is VerdictKind.ZERO_CONSENSUS else None
        return {k: Verdict(kind, rule, alpha) for k in block}, {}

    alphas = {q: upstream[q].consensus_value for q in ext}
    M, rhs = phi_system(block, ext, alphas, profile)
    phi, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    residual = float(np.max(np.abs(M @ phi - rhs)))
    consts = {"phi": phi.tolist(), "phi_residual": residual}
    if residual < PHI_TOL and np.all(np.abs(phi) <= 1.0 + PHI_TOL):
        return {k: Verdict(VerdictKind.CONSENSUS, MULTI_PHI, float(phi[a]))
                for a, k in enumerate(block)}, consts
    return {k: Verdict(VerdictKind.DISAGREEMENT, MULTI_PHI) for k in block}, consts


def predict_all(net: InfluenceNetwork, profile: LogicProfile, x0) -> PredictionReport:
    """Run the block-by-block decision procedure on an individual-major ``x0``."""
    n, m = net.n, profile.m
    partition = condense_logic(profile)
    y0 = to_topic_major(np.asarray(x0, dtype=float), n, m)
    verdicts: dict[int, Verdict] = {}
    constants = {}
    flags: list[str] = []
    for j, block in enumerate(partition.blocks):
        if partition.closed_flags[j]:
            out, consts = predict_closed_block(net, profile, block, y0, flags)
        elif len(block) == 1:
            v, consts = predict_singleton_block(block[0], verdicts, profile)
            out = {block[0]: v}
        else:
            out, consts = predict_multi_block(block, verdicts, profile,
                                              partition.ext_dep_sets[j])
        verdicts.update(out)
        constants[j] = consts
    return PredictionReport([verdicts[p] for p in range(m)], partition, constants, flags)

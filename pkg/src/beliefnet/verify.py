"""Three-way comparison: predicted verdicts, direct fixed points, simulation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    DEFAULT_CONSENSUS_TOL,
    DEFAULT_MAX_STEPS,
    DEFAULT_TOL,
    Ordering,
    Trajectory,
    build_system,
    per_topic_outcome,
    simulate,
)
from .graphs import build_multiplex_pattern
from .model import InfluenceNetwork, LogicProfile
from .oracle import CertificateFailure, fixed_point_all, spectral_certificate
from .predictor import PredictionReport, VerdictKind, predict_all


@dataclass(frozen=True)
class Tolerances:
    sim_tol: float = DEFAULT_TOL
    consensus_tol: float = DEFAULT_CONSENSUS_TOL
    max_steps: int = DEFAULT_MAX_STEPS
    # oracle limit vs simulated limit, and predicted alpha vs simulated value
    agreement_tol: float = 1e-6


@dataclass(frozen=True)
class TopicCheck:
    topic: int
    verdict: VerdictKind
    predicted_alpha: float | None
    oracle_limit: np.ndarray
    simulated_limit: np.ndarray
    oracle_deviation: float
    alpha_deviation: float | None
    simulated_spread: float
    category_match: bool | None  # None: no theorem claim to check


@dataclass
class VerificationReport:
    topics: list[TopicCheck]
    spectral: dict[int, float]
    prediction: PredictionReport
    trajectory: Trajectory
    fixed_point_residual: float
    tolerances: Tolerances
    certificate_failures: list[str] = field(default_factory=list)

    @property
    def agreement(self) -> bool:
        tol = self.tolerances.agreement_tol
        for c in self.topics:
            if c.oracle_deviation >= tol:
                return False
            if c.alpha_deviation is not None and c.alpha_deviation >= tol:
                return False
            if c.category_match is False:
                return False
        return not self.certificate_failures

    def to_dict(self) -> dict:
        topics = []
        for c in self.topics:
            topics.append({
                "topic": c.topic + 1,
                "verdict": c.verdict.value,
                "predicted_alpha": c.predicted_alpha,
                "oracle_limit": c.oracle_limit.tolist(),
                "simulated_limit": c.simulated_limit.tolist(),
                "oracle_deviation": c.oracle_deviation,
                "alpha_deviation": c.alpha_deviation,
                "simulated_spread": c.simulated_spread,
                "category_match": c.category_match,
            })
        return {
            "agreement": self.agreement,
            "converged_at": self.trajectory.converged_at,
            "fixed_point_residual": self.fixed_point_residual,
            "spectral_radius": {str(j + 1): r for j, r in self.spectral.items()},
            "certificate_failures": list(self.certificate_failures),
            "topics": topics,
        }


def _category_match(kind: VerdictKind, sim_consensus: bool):
    if kind in (VerdictKind.CONSENSUS, VerdictKind.ZERO_CONSENSUS):
        return sim_consensus
    if kind is VerdictKind.DISAGREEMENT:
        return not sim_consensus
    return None


def cross_validate(net: InfluenceNetwork, profile: LogicProfile, x0,
                   tolerances: Tolerances | None = None) -> VerificationReport:
    """Predict, solve for fixed points, simulate, and compare the three.

    Conjectured and undetermined topics are compared oracle-vs-simulation
    only.
    """
    tol = tolerances or Tolerances()
    n, m = net.n, profile.m
    report = predict_all(net, profile, x0)
    part = report.partition
    A = build_multiplex_pattern(net, profile)

    ystar = fixed_point_all(net, profile, x0, part)
    residual = float(np.max(np.abs(A @ ystar - ystar)))

    spectral = {}
    failures = []
    for j, block in enumerate(part.blocks):
        if part.closed_flags[j]:
            continue
        try:
            spectral[j] = spectral_certificate(A, block, n).rho
        except CertificateFailure as exc:
            failures.append(str(exc))

    B = build_system(net, profile, Ordering.INDIVIDUAL)
    traj = simulate(B, x0, max_steps=tol.max_steps, tol=tol.sim_tol)
    ysim = traj.topic_major_limit(n, m)
    outcomes = per_topic_outcome(ysim, n, m, tol.consensus_tol)

    checks = []
    for p in range(m):
        v = report.verdicts[p]
        sl = slice(p * n, (p + 1) * n)
        o = outcomes[p]
        alpha_dev = None
        if v.is_consensus:
            alpha_dev = float(np.max(np.abs(ysim[sl] - v.consensus_value)))
        checks.append(TopicCheck(
            topic=p,
            verdict=v.kind,
            predicted_alpha=v.alpha,
            oracle_limit=ystar[sl].copy(),
            simulated_limit=ysim[sl].copy(),
            oracle_deviation=float(np.max(np.abs(ystar[sl] - ysim[sl]))),
            alpha_deviation=alpha_dev,
            simulated_spread=o.spread,
            category_match=_category_match(v.kind, o.consensus),
        ))
    return VerificationReport(checks, spectral, report, traj, residual, tol, failures)

"""Consensus and disagreement in networks of heterogeneous belief systems."""

from .dynamics import (
    MaxStepsExceeded,
    Ordering,
    Trajectory,
    build_system,
    detect_per_topic_outcome,
    homogeneous_limit,
    simulate,
)
from .graphs import (
    BalanceVerdict,
    TopicPartition,
    build_multiplex_pattern,
    condense_logic,
    multiplex_balance_via_lemma,
    primitivity_check,
    structural_balance,
)
from .model import (
    InfluenceNetwork,
    LogicMatrix,
    LogicProfile,
    OpinionState,
    detect_competing,
    validate_influence,
    validate_logic,
    validate_profile,
)
from .oracle import fixed_point_all, fixed_point_block, spectral_certificate
from .predictor import PredictionReport, Verdict, VerdictKind, predict_all
from .verify import Tolerances, VerificationReport, cross_validate

__version__ = "0.1.0"

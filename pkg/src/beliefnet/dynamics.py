"""Building and iterating the networked opinion system.

Two orderings of the same state are used throughout:

* individual-major ``x = [x_1; ...; x_n]`` with ``x_i`` the m opinions of
  individual ``i``, driven by ``B`` whose block ``(i, j)`` is ``w_ij C_i``;
* topic-major ``y = [y_1; ...; y_m]`` with ``y_k`` the n opinions on topic
  ``k``, driven by ``A`` whose block ``(p, q)`` is ``diag(c_pq) W``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .graphs import build_multiplex_pattern
from .model import InfluenceNetwork, LogicMatrix, LogicProfile

DEFAULT_TOL = 1e-12
DEFAULT_CONSENSUS_TOL = 1e-8
DEFAULT_MAX_STEPS = 10**6
# residual must stay below tol for this many steps in a row
PATIENCE = 10


class Ordering(str, Enum):
    INDIVIDUAL = "individual-major"
    TOPIC = "topic-major"


class MaxStepsExceeded(RuntimeError):
    def __init__(self, steps: int, last_state: np.ndarray, residual: float):
        super().__init__(f"no convergence after {steps} steps (residual {residual:.3e})")
        self.steps = steps
        self.last_state = last_state
        self.residual = residual


class PowerLimitNonconvergent(RuntimeError):
    pass


class NotConverged(ValueError):
    pass


def interleave_permutation(n: int, m: int) -> np.ndarray:
    """Index map ``perm`` with ``y = x[perm]``.

    Position ``k*n + i`` of the topic-major vector holds entry ``i*m + k`` of
    the individual-major one.
    """
    k, i = np.divmod(np.arange(n * m), n)
    return i * m + k


def permutation_matrix(n: int, m: int) -> np.ndarray:
    """``P`` with ``y = P x`` and ``A = P B P^T``."""
    perm = interleave_permutation(n, m)
    P = np.zeros((n * m, n * m))
    P[np.arange(n * m), perm] = 1.0
    return P


def to_topic_major(x, n: int, m: int) -> np.ndarray:
    return np.asarray(x)[..., interleave_permutation(n, m)]


def to_individual_major(y, n: int, m: int) -> np.ndarray:
    y = np.asarray(y)
    x = np.empty_like(y)
    x[..., interleave_permutation(n, m)] = y
    return x


def build_system(net: InfluenceNetwork, profile: LogicProfile, ordering=Ordering.INDIVIDUAL) -> np.ndarray:
    ordering = Ordering(ordering)
    if ordering is Ordering.TOPIC:
        return build_multiplex_pattern(net, profile)
    n, m = net.n, profile.m
    Cs = profile.stack()
    B = np.empty((n * m, n * m))
    for i in range(n):
        for j in range(n):
            B[i * m:(i + 1) * m, j * m:(j + 1) * m] = net.W[i, j] * Cs[i]
    return B


@dataclass
class Trajectory:
    """States ``x(0), x(1), ...`` as rows of ``states``.

    ``converged_at`` is the first step from which the residual stayed below
    the tolerance; ``limit`` is the last state once converged.
    """

    states: np.ndarray
    ordering: Ordering
    converged_at: int | None = None
    limit: np.ndarray | None = None
    residuals: np.ndarray | None = None

    @property
    def converged(self) -> bool:
        return self.converged_at is not None

    def topic_major_limit(self, n: int, m: int) -> np.ndarray:
        if self.limit is None:
            raise NotConverged("trajectory did not converge")
        if self.ordering is Ordering.TOPIC:
            return self.limit
        return to_topic_major(self.limit, n, m)


def simulate(M, x0, max_steps: int = DEFAULT_MAX_STEPS, tol: float = DEFAULT_TOL,
             ordering=Ordering.INDIVIDUAL) -> Trajectory:
    """Iterate ``x(t+1) = M x(t)`` until ``PATIENCE`` consecutive residuals
    ``||x(t+1) - x(t)||_inf`` fall below ``tol``.

    The recorded trajectory ends at the step where the streak completed.
    Raises :class:`MaxStepsExceeded` if that never happens within
    ``max_steps`` multiplications.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = np.asarray(M, dtype=float)
    x = np.asarray(x0, dtype=float).copy()
    if np.any(np.abs(x) > 1.0 + 1e-12):
        raise ValueError("initial opinions must lie in [-1, 1]")

    states = [x]
    residuals = []
    streak = 0
    for t in range(max_steps):
        nxt = M @ x
        r = float(np.max(np.abs(nxt - x))) if x.size else 0.0
        residuals.append(r)
        states.append(nxt)
        x = nxt
        streak = streak + 1 if r < tol else 0
        if streak >= PATIENCE:
            start = t + 1 - PATIENCE
            return Trajectory(np.array(states), Ordering(ordering), start,
                              x.copy(), np.array(residuals))
    raise MaxStepsExceeded(max_steps, x, residuals[-1] if residuals else 0.0)


def power_limit(C, tol: float = 1e-12, max_squarings: int = 20) -> np.ndarray:
    """``lim C^k`` by repeated squaring.

    Gives up after ``max_squarings`` squarings (exponent ``2**20``, about
    a million steps) if consecutive squares still differ by more than ``tol``.
    """
    P = np.asarray(C, dtype=float)
    for _ in range(max_squarings):
        Q = P @ P
        if np.max(np.abs(Q - P)) < tol:
            return Q
        P = Q
    raise PowerLimitNonconvergent(f"C^k has not settled after 2**{max_squarings} steps")


def homogeneous_limit(net: InfluenceNetwork, C: LogicMatrix | np.ndarray, x0) -> np.ndarray:
    """Closed-form limit ``(1 gamma^T kron C^inf) x0`` for a shared logic matrix.

    Returned in individual-major order.
    """
    Cm = C.C if isinstance(C, LogicMatrix) else np.asarray(C, dtype=float)
    gamma = net.perron_vector()
    W_inf = np.outer(np.ones(net.n), gamma)
    C_inf = power_limit(Cm)
    return np.kron(W_inf, C_inf) @ np.asarray(x0, dtype=float)


@dataclass(frozen=True)
class TopicOutcome:
    consensus: bool
    value: float | None
    spread: float


def per_topic_outcome(y_limit, n: int, m: int, consensus_tol: float = DEFAULT_CONSENSUS_TOL):
    """Classify each topic of a topic-major limit vector."""
    Y = np.asarray(y_limit, dtype=float).reshape(m, n)
    out = []
    for k in range(m):
        spread = float(Y[k].max() - Y[k].min())
        if spread < consensus_tol:
            out.append(TopicOutcome(True, float(Y[k].mean()), spread))
        else:
            out.append(TopicOutcome(False, None, spread))
    return out


def detect_per_topic_outcome(traj: Trajectory, n: int, m: int,
                             consensus_tol: float = DEFAULT_CONSENSUS_TOL) -> list[TopicOutcome]:
    if not traj.converged:
        raise NotConverged("trajectory did not converge")
    return per_topic_outcome(traj.topic_major_limit(n, m), n, m, consensus_tol)

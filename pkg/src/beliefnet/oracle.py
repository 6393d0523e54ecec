"""Direct computation of limiting opinions, without iterating the dynamics.

The topic-major system matrix is lower block triangular over the ordered
topic blocks. A closed block evolves on its own, so its limit is the
projection of its initial opinions onto the eigenvalue-1 eigenspace of its
diagonal block. An open block has a diagonal block of spectral radius
below one, so its limit solves

    (I - A_jj) y_J = sum_q A_Jq y_q

given the limits of the topics it depends on. The solve is valid whether
or not those upstream topics reached consensus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dynamics import to_topic_major
from .graphs import TopicPartition, build_multiplex_pattern, condense_logic
from .model import InfluenceNetwork, LogicProfile

NULL_TOL = 1e-9
CERT_MARGIN = 1e-12
COND_LIMIT = 1e12


class SingularSystem(np.linalg.LinAlgError):
    pass


class CertificateFailure(ValueError):
    pass


def topic_indices(topics, n: int) -> np.ndarray:
    """Rows of the topic-major state belonging to ``topics``."""
    return np.concatenate([np.arange(p * n, (p + 1) * n) for p in topics])


def _null_space(M: np.ndarray) -> np.ndarray:
    return scipy.linalg.null_space(M, rcond=NULL_TOL)


def unit_eigenprojector(M: np.ndarray) -> np.ndarray:
    """Spectral projector of ``M`` onto its (semi-simple) eigenvalue 1.

    Zero matrix when 1 is not an eigenvalue.
    """
    d = M.shape[0]
    K = np.eye(d) - M
    R = _null_space(K)
    L = _null_space(K.T)
    if R.shape[1] == 0:
        return np.zeros((d, d))
    if L.shape[1] != R.shape[1]:
        raise SingularSystem("left and right unit eigenspaces differ in dimension")
    return R @ np.linalg.solve(L.T @ R, L.T)


def closed_block_limit(A_block: np.ndarray, y0_block) -> np.ndarray:
    """Limit of ``y(t+1) = A_block y(t)`` for a block with no inputs."""
    return unit_eigenprojector(A_block) @ np.asarray(y0_block, dtype=float)


def fixed_point_block(A: np.ndarray, block, upstream: dict, n: int) -> dict:
    """Limits of the topics in an open ``block`` from their upstream limits.

    ``upstream`` maps every topic the block depends on to its length-``n``
    limit vector (consensus or not). Returns a dict topic -> limit vector.
    """
    idx = topic_indices(block, n)
    A_jj = A[np.ix_(idx, idx)]
    rhs = np.zeros(idx.size)
    for q, yq in upstream.items():
        cols = np.arange(q * n, (q + 1) * n)
        rhs += A[np.ix_(idx, cols)] @ np.asarray(yq, dtype=float)
    K = np.eye(idx.size) - A_jj
    if np.linalg.cond(K) > COND_LIMIT:
        raise SingularSystem(f"I - A_jj is singular for block {tuple(block)}")
    y = np.linalg.solve(K, rhs)
    return {p: y[k * n:(k + 1) * n] for k, p in enumerate(block)}


def fixed_point_all(net: InfluenceNetwork, profile: LogicProfile, x0,
                    partition: TopicPartition | None = None) -> np.ndarray:
    """Full topic-major limit ``y*`` computed block by block.

    ``x0`` is individual-major.
    """
    n, m = net.n, profile.m
    partition = partition or condense_logic(profile)
    A = build_multiplex_pattern(net, profile)
    y0 = to_topic_major(np.asarray(x0, dtype=float), n, m)
    ystar = np.zeros(n * m)
    for j, block in enumerate(partition.blocks):
        idx = topic_indices(block, n)
        if partition.closed_flags[j]:
            ystar[idx] = closed_block_limit(A[np.ix_(idx, idx)], y0[idx])
        else:
            up = {q: ystar[q * n:(q + 1) * n] for q in partition.ext_dep_sets[j]}
            for p, yp in fixed_point_block(A, block, up, n).items():
                ystar[p * n:(p + 1) * n] = yp
    return ystar


@dataclass(frozen=True)
class SpectralCertificate:
    rho: float  # spectral radius of the signed diagonal block
    rho_abs_upper: float  # Collatz-Wielandt upper bound on rho(|A_jj|)
    iterations: int


def perron_upper_bound(M: np.ndarray, tol: float = 1e-13, max_iter: int = 100_000):
    """Power iteration on a nonnegative matrix with the Collatz-Wielandt bounds.

    Every iterate ``x > 0`` gives ``min (Mx/x) <= rho(M) <= max (Mx/x)``;
    stops when the bracket is narrower than ``tol``.
    """
    x = np.ones(M.shape[0])
    upper = np.inf
    for it in range(1, max_iter + 1):
        Mx = M @ x
        ratio = Mx / x
        lo, hi = ratio.min(), ratio.max()
        upper = min(upper, hi)
        if hi - lo < tol or lo <= 0:
            break
        x = Mx / Mx.max()
    return float(upper), it


def spectral_certificate(A: np.ndarray, block, n: int) -> SpectralCertificate:
    """Certify that the diagonal block of an open topic block is a contraction.

    Raises :class:`CertificateFailure` if ``rho(A_jj) >= 1 - 1e-12``, which
    happens for closed blocks (rho is exactly 1 when they are balanced) or
    an invalid model.
    """
    idx = topic_indices(block, n)
    A_jj = A[np.ix_(idx, idx)]
    rho = float(np.max(np.abs(np.linalg.eigvals(A_jj))))
    upper, its = perron_upper_bound(np.abs(A_jj))
    if rho >= 1.0 - CERT_MARGIN:
        raise CertificateFailure(f"rho(A_jj) = {rho!r} for block {tuple(block)}")
    return SpectralCertificate(rho, upper, its)

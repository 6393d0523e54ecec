"""Domain types for the multi-dimensional DeGroot model and their validation.

An influence network ``W`` (n x n, row-stochastic, positive diagonal, strongly
connected) couples ``n`` individuals, each of whom holds opinions on ``m``
logically interdependent topics. Individual ``i`` combines the opinions of
its neighbours through its own logic matrix ``C_i``:

    x_i(t+1) = sum_j w_ij C_i x_j(t)

All indices in this package are 0-based. Validated objects are frozen
dataclasses holding read-only numpy arrays.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graphs import strongly_connected_components

# exact-structure checks (row sums, zero entries)
STRUCT_TOL = 1e-12
# eigenvalue / rank checks
SPECTRAL_TOL = 1e-9
# row sums off by at most this much are renormalized with a warning
RENORM_TOL = 1e-9


class ModelError(ValueError):
    """Base class for every model validation failure."""


class RowSumViolation(ModelError):
    pass


class NonnegativityViolation(ModelError):
    pass


class ZeroDiagonal(ModelError):
    pass


class NotStronglyConnected(ModelError):
    pass


class RowAbsSumViolation(ModelError):
    pass


class NonpositiveDiagonal(ModelError):
    pass


class EigenvalueModulusViolation(ModelError):
    pass


class NonSemiSimpleUnitEigenvalue(ModelError):
    pass


class PatternMismatch(ModelError):
    pass


class RenormalizationWarning(UserWarning):
    """A row sum was within rounding distance of 1 and has been rescaled."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.flags.writeable = False
    return a


def _square(M, name: str) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ModelError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ModelError(f"{name} contains non-finite entries")
    return M


def _renormalize_rows(M: np.ndarray, sums: np.ndarray, name: str, exc: type[ModelError]):
    dev = np.abs(sums - 1.0)
    bad = np.flatnonzero(dev > RENORM_TOL)
    if bad.size:
        r = int(bad[0])
        raise exc(f"{name}: row {r} sums to {sums[r]!r}, expected 1")
    fix = np.flatnonzero(dev > STRUCT_TOL)
    if fix.size:
        warnings.warn(
            f"{name}: rows {fix.tolist()} renormalized (deviation <= {RENORM_TOL:g})",
            RenormalizationWarning,
            stacklevel=3,
        )
        M = M / sums[:, None]
    return M


@dataclass(frozen=True)
class InfluenceNetwork:
    """Certified influence matrix. Build through :func:`validate_influence`."""

    W: np.ndarray

    @property
    def n(self) -> int:
        return self.W.shape[0]

    def perron_vector(self) -> np.ndarray:
        """Left eigenvector gamma of W for eigenvalue 1, positive, summing to 1."""
        n = self.n
        # gamma^T (I - W) = 0, gamma^T 1 = 1
        M = np.vstack([(np.eye(n) - self.W).T, np.ones((1, n))])
        rhs = np.zeros(n + 1)
        rhs[-1] = 1.0
        gamma, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        return gamma


@dataclass(frozen=True)
class LogicMatrix:
    """Certified logic matrix. Build through :func:`validate_logic`."""

    C: np.ndarray
    unit_multiplicity: int = 0

    @property
    def m(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True)
class LogicProfile:
    """Logic matrices of all individuals, sharing one zero/nonzero pattern."""

    matrices: tuple[LogicMatrix, ...]
    pattern: np.ndarray

    @property
    def n(self) -> int:
        return len(self.matrices)

    @property
    def m(self) -> int:
        return self.pattern.shape[0]

    def stack(self) -> np.ndarray:
        """All logic matrices as one (n, m, m) array."""
        return np.stack([c.C for c in self.matrices])

    def entry(self, p: int, q: int) -> np.ndarray:
        """The vector (c_pq,1 .. c_pq,n) over individuals."""
        return np.array([c.C[p, q] for c in self.matrices])

    def is_homogeneous(self) -> bool:
        first = self.matrices[0].C
        return all(np.array_equal(first, c.C) for c in self.matrices[1:])


@dataclass(frozen=True)
class OpinionState:
    x: np.ndarray
    t: int = 0

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1:
            raise ModelError("opinion state must be a vector")
        if np.any(np.abs(x) > 1.0 + STRUCT_TOL):
            i = int(np.argmax(np.abs(x)))
            raise ModelError(f"opinion {i} = {x[i]!r} lies outside [-1, 1]")
        if self.t < 0:
            raise ModelError("time step must be nonnegative")
        object.__setattr__(self, "x", _frozen(x))


def validate_influence(W) -> InfluenceNetwork:
    """Check that ``W`` is a valid influence matrix and certify it.

    Raises the ``ModelError`` subclass naming the first offending row or entry.
    """
    W = _square(W, "W")
    neg = np.argwhere(W < 0)
    if neg.size:
        i, j = map(int, neg[0])
        raise NonnegativityViolation(f"W[{i},{j}] = {W[i, j]!r} is negative")
    W = _renormalize_rows(W, W.sum(axis=1), "W", RowSumViolation)
    zero = np.flatnonzero(np.diag(W) <= 0)
    if zero.size:
        i = int(zero[0])
        raise ZeroDiagonal(f"W[{i},{i}] must be positive")
    sccs = strongly_connected_components(W > 0)
    if len(sccs) != 1:
        raise NotStronglyConnected(
            f"influence graph has {len(sccs)} strongly connected components: "
            f"{[sorted(c) for c in sccs]}"
        )
    return InfluenceNetwork(_frozen(W))


def unit_eigen_structure(C: np.ndarray) -> tuple[int, int]:
    """Return (algebraic, geometric) multiplicity of eigenvalue 1 of ``C``.

    Algebraic multiplicity counts eigenvalues within ``SPECTRAL_TOL`` of 1;
    geometric multiplicity is the nullity of ``C - I`` with singular values
    below ``SPECTRAL_TOL`` times the largest one treated as zero.
    """
    m = C.shape[0]
    eig = np.linalg.eigvals(C)
    algebraic = int(np.sum(np.abs(eig - 1.0) <= SPECTRAL_TOL))
    sv = np.linalg.svd(C - np.eye(m), compute_uv=False)
    thresh = SPECTRAL_TOL * max(sv[0], 1.0) if sv.size else 0.0
    rank = int(np.sum(sv > thresh))
    return algebraic, m - rank


def validate_logic(C) -> LogicMatrix:
    C = _square(C, "C")
    abs_sums = np.abs(C).sum(axis=1)
    C = _renormalize_rows(C, abs_sums, "C", RowAbsSumViolation)
    bad = np.flatnonzero(np.diag(C) <= 0)
    if bad.size:
        p = int(bad[0])
        raise NonpositiveDiagonal(f"C[{p},{p}] = {C[p, p]!r} must be positive")

    eig = np.linalg.eigvals(C)
    is_unit = np.abs(eig - 1.0) <= SPECTRAL_TOL
    mod = np.abs(eig)
    if np.any(mod > 1.0 + SPECTRAL_TOL):
        raise EigenvalueModulusViolation(f"eigenvalue of modulus {mod.max()!r} > 1")
    # flag, do not accept, eigenvalues hugging the unit circle away from 1
    near = ~is_unit & (mod >= 1.0 - SPECTRAL_TOL)
    if np.any(near):
        lam = eig[near][0]
        raise EigenvalueModulusViolation(
            f"eigenvalue {lam!r} has modulus within {SPECTRAL_TOL:g} of 1 but is not 1"
        )
    algebraic, geometric = unit_eigen_structure(C)
    if algebraic != geometric:
        raise NonSemiSimpleUnitEigenvalue(
            f"eigenvalue 1 has algebraic multiplicity {algebraic} "
            f"but geometric multiplicity {geometric}"
        )
    return LogicMatrix(_frozen(C), algebraic)


def validate_profile(matrices: Sequence) -> LogicProfile:
    """Certify a list of logic matrices as a common-pattern profile.

    Entries may be raw arrays or already validated :class:`LogicMatrix`.
    """
    if len(matrices) == 0:
        raise ModelError("profile needs at least one logic matrix")
    certified = [c if isinstance(c, LogicMatrix) else validate_logic(c) for c in matrices]
    m = certified[0].m
    for i, c in enumerate(certified):
        if c.m != m:
            raise ModelError(f"logic matrix {i} is {c.m}x{c.m}, expected {m}x{m}")
    pattern = np.abs(certified[0].C) > STRUCT_TOL
    for j, c in enumerate(certified[1:], start=1):
        mask = np.abs(c.C) > STRUCT_TOL
        diff = np.argwhere(mask != pattern)
        if diff.size:
            p, q = map(int, diff[0])
            raise PatternMismatch(
                f"individuals 0 and {j} differ in pattern at cell ({p},{q}): "
                f"{certified[0].C[p, q]!r} vs {c.C[p, q]!r}"
            )
    pattern = pattern.copy()
    pattern.flags.writeable = False
    return LogicProfile(tuple(certified), pattern)


def homogeneous_profile(C, n: int) -> LogicProfile:
    c = validate_logic(C)
    return validate_profile([c] * n)


def sign(values, tol: float = STRUCT_TOL) -> np.ndarray:
    """Elementwise sign with entries of magnitude <= ``tol`` mapped to 0."""
    v = np.asarray(values, dtype=float)
    return np.where(np.abs(v) <= tol, 0, np.sign(v)).astype(int)


def detect_competing(profile: LogicProfile, p: int) -> set[tuple[int, int, int]]:
    """Witnesses ``(q, i, j)`` of competing interdependencies on topic ``p``.

    Each witness has ``q != p``, ``i < j`` and ``c_pq,i``, ``c_pq,j`` nonzero
    with opposite signs. An empty set means no competition on ``p``.
    """
    out: set[tuple[int, int, int]] = set()
    for q in range(profile.m):
        if q == p or not profile.pattern[p, q]:
            continue
        s = sign(profile.entry(p, q))
        pos = np.flatnonzero(s > 0)
        neg = np.flatnonzero(s < 0)
        for i in pos:
            for j in neg:
                a, b = sorted((int(i), int(j)))
                out.add((q, a, b))
    return out


def has_competition(profile: LogicProfile, topics=None) -> bool:
    """True if any topic in ``topics`` (default: all) has competing entries."""
    topics = range(profile.m) if topics is None else topics
    return any(detect_competing(profile, p) for p in topics)

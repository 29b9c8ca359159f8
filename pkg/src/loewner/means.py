"""Operator geometric and harmonic means of positive semidefinite matrices.

The geometric mean of singular operands is computed exactly, without
regularization: any Hermitian ``X`` with ``[A, X; X, B] >= 0`` lives on
``S = ran A ∩ ran B``, and taking Schur complements over ``S^perp`` reduces the
problem to two positive definite operators on ``S``.
"""
from __future__ import annotations

import enum

import numpy as np

from .linalg_core import (
    DEFAULT_TOL,
    ConvergenceError,
    DimensionError,
    NotPSDError,
    Tolerances,
    adjoint,
    hermitian,
    op_norm,
    pseudo_inverse,
    scale_of,
)
from .outcome import CheckOutcome, outcome


class MeanKind(str, enum.Enum):
    geometric = "geometric"
    harmonic = "harmonic"
    parallel_sum = "parallel_sum"


def _sym(M):
    return (M + adjoint(M)) / 2


def _psd_operand(M, tol):
    H = hermitian(M, tol)
    w, Q = np.linalg.eigh(H)
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] < -tol.tol_psd * scale:
        raise NotPSDError(f"operand has eigenvalue {w[0]:.3e}")
    return H, np.clip(w, 0.0, None), Q


def _range_basis(w, Q, tol):
    top = float(w[-1])
    if top <= 0:
        return Q[:, :0]
    return Q[:, w > tol.tol_rank * top]


def _mean_pd(wa, Qa, B):
    """``A # B`` for positive definite ``A`` given by its eigenpairs."""
    ra = (Qa * np.sqrt(wa)) @ adjoint(Qa)
    ria = (Qa / np.sqrt(wa)) @ adjoint(Qa)
    wm, Qm = np.linalg.eigh(_sym(ria @ B @ ria))
    mid = (Qm * np.sqrt(np.clip(wm, 0.0, None))) @ adjoint(Qm)
    return _sym(ra @ mid @ ra)


def _cond(w):
    return float(w[-1] / w[0]) if w[0] > 0 else np.inf


def _geometric_pd_pair(A, B):
    wa, Qa = np.linalg.eigh(A)
    wb, Qb = np.linalg.eigh(B)
    # the formula is symmetric in exact arithmetic; factor the better-conditioned operand
    if _cond(wb) < _cond(wa):
        return _mean_pd(wb, Qb, A)
    return _mean_pd(wa, Qa, B)


def _shorted(M, J, K, tol):
    """Schur complement of ``M`` onto span(J) along span(K)."""
    if K.shape[1] == 0:
        return _sym(adjoint(J) @ M @ J)
    M12 = adjoint(J) @ M @ K
    return _sym(adjoint(J) @ M @ J - M12 @ pseudo_inverse(adjoint(K) @ M @ K, tol) @ adjoint(M12))


def geometric_mean(A, B, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``A # B``, the largest Hermitian ``X`` with ``[A, X; X, B] >= 0``."""
    A, wa, Qa = _psd_operand(A, tol)
    B, wb, Qb = _psd_operand(B, tol)
    if A.shape != B.shape:
        raise DimensionError(f"shape mismatch {A.shape} vs {B.shape}")
    n = A.shape[0]
    top_a, top_b = float(wa[-1]), float(wb[-1])
    full_a = top_a > 0 and wa[0] > tol.tol_rank * top_a
    full_b = top_b > 0 and wb[0] > tol.tol_rank * top_b
    if full_a and full_b:
        return _geometric_pd_pair(A, B)
    if full_a:
        return _mean_pd(wa, Qa, B)
    if full_b:
        return _mean_pd(wb, Qb, A)

    Ra, Rb = _range_basis(wa, Qa, tol), _range_basis(wb, Qb, tol)
    if Ra.shape[1] == 0 or Rb.shape[1] == 0:
        return np.zeros((n, n), dtype=complex)
    # vectors of ran A at distance ~0 from ran B span the intersection
    resid = Ra - Rb @ (adjoint(Rb) @ Ra)
    _, s, Vh = np.linalg.svd(resid)
    s = np.concatenate([s, np.zeros(Ra.shape[1] - s.size)])
    inside = s <= np.sqrt(tol.tol_rank)
    if not np.any(inside):
        return np.zeros((n, n), dtype=complex)
    J, _ = np.linalg.qr(Ra @ adjoint(Vh)[:, inside])
    full, _ = np.linalg.qr(np.hstack([J, np.eye(n)]))
    K = full[:, J.shape[1]:n]
    As, Bs = _shorted(A, J, K, tol), _shorted(B, J, K, tol)
    return _sym(J @ _geometric_pd_pair(As, Bs) @ adjoint(J))


def _epsilon_schedule(A, B):
    base = max(1.0, op_norm(A), op_norm(B))
    return [10.0 ** (-2 * k) * base for k in range(1, 8)]


def regularized_limit(mean, A, B, tol: Tolerances = DEFAULT_TOL, stop: float = 1e-8) -> np.ndarray:
    """Limit of ``mean(A + eps I, B + eps I)`` over ``eps_k = 10^{-2k} max(1, ||A||, ||B||)``.

    Stops once successive iterates differ by less than ``stop`` relative to
    ``max(1, ||iterate||)``; raises :class:`ConvergenceError` otherwise.
    """
    A, B = hermitian(A, tol), hermitian(B, tol)
    eye = np.eye(A.shape[0])
    prev = None
    for eps in _epsilon_schedule(A, B):
        cur = mean(A + eps * eye, B + eps * eye)
        if prev is not None and op_norm(cur - prev) < stop * scale_of(cur):
            return cur
        prev = cur
    raise ConvergenceError("regularized mean did not settle over the epsilon schedule")


def _parallel_sum_pd(A, B):
    return _sym(A @ np.linalg.solve(A + B, B))


def parallel_sum(A, B, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``A : B = A (A + B)^+ B``, falling back to the regularized limit on range mismatch."""
    A, _, _ = _psd_operand(A, tol)
    B, _, _ = _psd_operand(B, tol)
    if A.shape != B.shape:
        raise DimensionError(f"shape mismatch {A.shape} vs {B.shape}")
    S = A + B
    Sp = pseudo_inverse(S, tol)
    if op_norm(A @ Sp @ S - A) <= tol.tol_recon * scale_of(A):
        return _sym(A @ Sp @ B)
    return regularized_limit(_parallel_sum_pd, A, B, tol)


def harmonic_mean(A, B, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``A ! B = 2 (A : B)``."""
    return 2 * parallel_sum(A, B, tol)


_MEANS = {
    MeanKind.geometric: geometric_mean,
    MeanKind.harmonic: harmonic_mean,
    MeanKind.parallel_sum: parallel_sum,
}


def mean(kind, A, B, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    return _MEANS[MeanKind(kind)](A, B, tol)


def variational_check(kind, A, B, X, tol: Tolerances = DEFAULT_TOL) -> CheckOutcome:
    """Test ``X`` against the extremal characterization of the mean.

    geometric: ``[A, X; X, B] >= 0``; harmonic: ``[X, X; X, X] <= diag(2A, 2B)``.
    """
    kind = MeanKind(kind)
    A, B, X = hermitian(A, tol), hermitian(B, tol), hermitian(X, tol)
    if not (A.shape == B.shape == X.shape):
        raise DimensionError("A, B, X must share a shape")
    if kind is MeanKind.geometric:
        M = np.block([[A, X], [X, B]])
    elif kind is MeanKind.harmonic:
        M = np.block([[2 * A - X, -X], [-X, 2 * B - X]])
    else:
        raise ValueError("variational check is defined for geometric and harmonic means")
    margin = float(np.linalg.eigvalsh(M)[0])
    scale = scale_of(A, B, X)
    return outcome(f"variational-{kind.value}", margin, scale, tol=tol, inputs=(A, B, X),
                   hypotheses={"X_hermitian": True, "same_shape": True})

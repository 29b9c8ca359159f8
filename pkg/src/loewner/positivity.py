"""Loewner order, 2x2 operator blocks and Ando's contraction criterion."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .linalg_core import (
    DEFAULT_TOL,
    DimensionError,
    LinalgError,
    Tolerances,
    adjoint,
    as_matrix,
    hermitian,
    hermitian_eig,
    op_norm,
    psd_sqrt,
    pseudo_inverse,
    scale_of,
)


class WitnessRefused(LinalgError):
    """``C`` does not factor as ``A^{1/2} W B^{1/2}``."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class BlockTwo:
    top_left: np.ndarray
    top_right: np.ndarray
    bottom_left: np.ndarray
    bottom_right: np.ndarray

    @property
    def assembled(self) -> np.ndarray:
        return np.block([[self.top_left, self.top_right], [self.bottom_left, self.bottom_right]])

    @property
    def n(self) -> int:
        return self.top_left.shape[0]

    def parts(self):
        return self.top_left, self.top_right, self.bottom_left, self.bottom_right

    def congruence(self, D1, D2) -> "BlockTwo":
        """``diag(D1, D2)^* M diag(D1, D2)``."""
        D1h, D2h = adjoint(D1), adjoint(D2)
        return BlockTwo(D1h @ self.top_left @ D1, D1h @ self.top_right @ D2,
                        D2h @ self.bottom_left @ D1, D2h @ self.bottom_right @ D2)


@dataclass(frozen=True)
class ContractionWitness:
    w: np.ndarray
    norm: float
    reconstruction_error: float


def is_psd(M, tol: Tolerances = DEFAULT_TOL) -> Tuple[bool, float]:
    """Return ``(verdict, min_eig)``; verdict allows ``-tol_psd * max(1, ||M||)``."""
    H = hermitian(M, tol)
    w, _ = hermitian_eig(H, tol)
    scale = max(1.0, float(np.max(np.abs(w))))
    return bool(w[0] >= -tol.tol_psd * scale), float(w[0])


def loewner_leq(A, B, tol: Tolerances = DEFAULT_TOL) -> Tuple[bool, float]:
    """``A <= B``; the margin is the least eigenvalue of ``B - A``."""
    A, B = hermitian(A, tol), hermitian(B, tol)
    if A.shape != B.shape:
        raise DimensionError(f"shape mismatch {A.shape} vs {B.shape}")
    w, _ = hermitian_eig(B - A, tol)
    scale = scale_of(A, B)
    return bool(w[0] >= -tol.tol_psd * scale), float(w[0])


def assemble_block2(A, C_top, C_bottom, B) -> BlockTwo:
    parts = [as_matrix(m) for m in (A, C_top, C_bottom, B)]
    n = parts[0].shape[0]
    for p in parts:
        if p.shape != (n, n):
            raise DimensionError(f"all blocks must be {n}x{n}, got {p.shape}")
    return BlockTwo(*parts)


def hermitian_block(A, C, B) -> BlockTwo:
    """``[A, C; C*, B]``."""
    C = as_matrix(C)
    return assemble_block2(A, C, adjoint(C), B)


def weak_block(A, C, B, tol: Tolerances = DEFAULT_TOL) -> BlockTwo:
    """``[A, C; C, B]`` with ``C`` Hermitian (the only way the block can be PSD)."""
    C = hermitian(C, tol)
    return assemble_block2(A, C, C, B)


def contraction_witness(A, B, C, tol: Tolerances = DEFAULT_TOL) -> ContractionWitness:
    """Extract ``W`` with ``C = A^{1/2} W B^{1/2}``.

    ``W = (A^{1/2})^+ C (B^{1/2})^+`` is the minimal-norm candidate; the range
    conditions are checked through the reconstruction error, so the block
    ``[A, C; C*, B]`` is PSD iff the witness is returned with norm <= 1.
    Raises :class:`WitnessRefused` when ``C`` cannot be reconstructed.
    """
    A, B, C = hermitian(A, tol), hermitian(B, tol), as_matrix(C)
    if not (A.shape == B.shape == C.shape):
        raise DimensionError("A, B, C must share a shape")
    ra, rb = psd_sqrt(A, tol), psd_sqrt(B, tol)
    w = pseudo_inverse(ra, tol) @ C @ pseudo_inverse(rb, tol)
    err = op_norm(ra @ w @ rb - C) / scale_of(C)
    witness = ContractionWitness(w, op_norm(w), err)
    if err > tol.tol_recon:
        raise WitnessRefused(f"reconstruction error {err:.3e} exceeds {tol.tol_recon:.1e}", witness)
    return witness

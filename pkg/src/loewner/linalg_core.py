"""Dense complex-matrix primitives.

Everything here works on ``numpy.ndarray`` of dtype ``complex128``.  Hermitian
inputs are symmetrized before any spectral computation and the measured
defect is kept on a :class:`HermitianView`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np


class LinalgError(ValueError):
    """Base class for input errors raised by this package."""


class DimensionError(LinalgError):
    pass


class NotHermitianError(LinalgError):
    pass


class NotPSDError(LinalgError):
    pass


class SpectrumError(LinalgError):
    """An eigenvalue falls outside the domain of a function."""


class ConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Tolerances:
    """Relative tolerances; each is scaled by ``max(1, norm of operand)``."""

    tol_herm: float = 1e-10
    tol_psd: float = 1e-9
    tol_recon: float = 1e-10
    tol_rank: float = 1e-12
    tol_margin: float = 1e-8
    tol_spec: float = 1e-9

    def __post_init__(self):
        for name in ("tol_herm", "tol_psd", "tol_recon", "tol_rank", "tol_margin", "tol_spec"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.tol_rank < np.finfo(float).eps:
            raise ValueError("tol_rank below machine epsilon")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class Interval:
    lower: float = -math.inf
    upper: float = math.inf
    lower_closed: bool = False
    upper_closed: bool = False

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("empty interval: lower > upper")
        if self.lower_closed and not math.isfinite(self.lower):
            raise ValueError("closed endpoint must be finite")
        if self.upper_closed and not math.isfinite(self.upper):
            raise ValueError("closed endpoint must be finite")

    def contains(self, t: float, slack: float = 0.0) -> bool:
        lo_ok = t >= self.lower - slack if self.lower_closed else t > self.lower
        hi_ok = t <= self.upper + slack if self.upper_closed else t < self.upper
        return bool(lo_ok and hi_ok)

    def clamp(self, t: np.ndarray) -> np.ndarray:
        lo = self.lower if self.lower_closed else -math.inf
        hi = self.upper if self.upper_closed else math.inf
        return np.clip(t, lo, hi)

    def __str__(self):
        left = "[" if self.lower_closed else "("
        right = "]" if self.upper_closed else ")"
        return f"{left}{self.lower:g}, {self.upper:g}{right}"


@dataclass(frozen=True)
class HermitianView:
    matrix: np.ndarray
    hermiticity_defect: float


@dataclass(frozen=True)
class PolarDecomposition:
    isometry_part: np.ndarray
    positive_part: np.ndarray
    rank: int


class MatrixScalars(NamedTuple):
    trace: complex
    determinant: Optional[complex]
    operator_norm: float
    min_hermitian_eig: Optional[float]
    spectrum: Optional[np.ndarray]


def as_matrix(M) -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    M = np.asarray(M, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise LinalgError("matrix has non-finite entries")
    return M


def _require_square(M: np.ndarray) -> None:
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")


def adjoint(M: np.ndarray) -> np.ndarray:
    return M.conj().T


def op_norm(M: np.ndarray) -> float:
    if M.size == 1:
        return float(abs(M.flat[0]))
    return float(np.linalg.svd(M, compute_uv=False)[0])


def _fro(M: np.ndarray) -> float:
    return float(np.sqrt(np.sum(M.real ** 2 + M.imag ** 2)))


def scale_of(*mats) -> float:
    """``max(1, largest operator norm)`` used to make tolerances relative."""
    return max([1.0] + [op_norm(np.asarray(m)) for m in mats])


def hermitian_view(M, tol: Tolerances = DEFAULT_TOL) -> HermitianView:
    M = as_matrix(M)
    _require_square(M)
    # Frobenius norms: cheaper than the spectral norm and never looser in the numerator
    defect = _fro(M - adjoint(M)) / max(1.0, _fro(M))
    if defect > tol.tol_herm:
        raise NotHermitianError(f"hermiticity defect {defect:.3e} exceeds {tol.tol_herm:.1e}")
    return HermitianView((M + adjoint(M)) / 2, defect)


def hermitian(M, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Symmetrized copy of ``M``; raises if ``M`` is not Hermitian within tolerance."""
    if isinstance(M, HermitianView):
        return M.matrix
    return hermitian_view(M, tol).matrix


def hermitian_eig(M, tol: Tolerances = DEFAULT_TOL):
    """Ascending eigenvalues and unitary eigenvectors of a Hermitian matrix."""
    H = hermitian(M, tol)
    try:
        w, Q = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"Hermitian eigensolver failed: {exc}") from exc
    return w, Q


def singular_value_decompose(M):
    """Return ``(U, s, V)`` with ``M = U @ diag(s) @ V^*`` and ``s`` descending."""
    M = as_matrix(M)
    try:
        U, s, Vh = np.linalg.svd(M)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD failed: {exc}") from exc
    return U, s, adjoint(Vh)


def _spectral(w: np.ndarray, Q: np.ndarray, fw: np.ndarray) -> np.ndarray:
    out = (Q * fw) @ adjoint(Q)
    return (out + adjoint(out)) / 2


def psd_sqrt(M, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Positive square root.

    Eigenvalues within ``-tol_psd*scale`` of 0 are clamped; eigenvalues at or
    below ``tol_rank * lambda_max`` count as zero, so projections are fixed points.
    """
    H = hermitian(M, tol)
    w, Q = hermitian_eig(H, tol)
    floor = -tol.tol_psd * max(1.0, float(np.max(np.abs(w))))
    if w[0] < floor:
        raise NotPSDError(f"minimum eigenvalue {w[0]:.3e} below {floor:.3e}")
    w = np.where(w > tol.tol_rank * max(float(w[-1]), 0.0), w, 0.0)
    return _spectral(w, Q, np.sqrt(w))


def operator_abs(M):
    """Return ``(|M|, |M*|)``, i.e. ``(M*M)^{1/2}`` and ``(MM*)^{1/2}``."""
    M = as_matrix(M)
    _require_square(M)
    U, s, V = singular_value_decompose(M)
    return _spectral(s, V, s), _spectral(s, U, s)


def _numerical_rank(s: np.ndarray, tol: Tolerances) -> int:
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tol.tol_rank * s[0]))


def pseudo_inverse(M, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose inverse with a hard relative cut at ``tol_rank * sigma_max``."""
    M = as_matrix(M)
    U, s, V = singular_value_decompose(M)
    r = _numerical_rank(s, tol)
    return (V[:, :r] / s[:r]) @ adjoint(U[:, :r])


def polar_decompose(M, tol: Tolerances = DEFAULT_TOL) -> PolarDecomposition:
    """``M = U|M|`` with ``ker U = ker |M|``.

    Directions whose singular value is at or below ``tol_rank * sigma_max`` are
    dropped from ``U``, which makes it a partial isometry rather than a unitary
    for singular ``M``.
    """
    M = as_matrix(M)
    _require_square(M)
    W, s, V = singular_value_decompose(M)
    r = _numerical_rank(s, tol)
    U = W[:, :r] @ adjoint(V[:, :r])
    return PolarDecomposition(U, _spectral(s, V, s), r)


def apply_function(f, M, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Functional calculus ``Q f(Lambda) Q*`` for a Hermitian ``M``.

    ``f`` is either a :class:`loewner.maps.FunctionDescriptor` or a pair
    ``(callable, Interval)``.
    """
    if isinstance(f, tuple):
        func, domain = f
    else:
        func, domain = f.evaluate, f.domain
    w, Q = hermitian_eig(M, tol)
    slack = tol.tol_spec * max(1.0, float(np.max(np.abs(w))))
    bad = [float(x) for x in w if not domain.contains(float(x), slack)]
    if bad:
        raise SpectrumError(f"eigenvalue {bad[0]:.6g} outside domain {domain}")
    return _spectral(w, Q, func(domain.clamp(w)))


def rank_one(x, y) -> np.ndarray:
    """``x (x) conj(y)``: the operator ``z -> <z, y> x``."""
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    if x.shape != y.shape:
        raise DimensionError(f"vector sizes differ: {x.size} vs {y.size}")
    return np.outer(x, y.conj())


def inner(u, v) -> complex:
    """``<u, v>``, linear in the first slot."""
    return complex(np.vdot(np.asarray(v).ravel(), np.asarray(u).ravel()))


def matrix_scalars(M, tol: Tolerances = DEFAULT_TOL) -> MatrixScalars:
    M = as_matrix(M)
    norm = op_norm(M)
    if M.shape[0] != M.shape[1]:
        return MatrixScalars(complex(np.trace(M)), None, norm, None, None)
    det = complex(np.linalg.det(M))
    min_eig = spectrum = None
    try:
        spectrum, _ = hermitian_eig(M, tol)
        min_eig = float(spectrum[0])
    except NotHermitianError:
        pass
    return MatrixScalars(complex(np.trace(M)), det, norm, min_eig, spectrum)


def min_eig(M) -> float:
    """Smallest eigenvalue of the Hermitian part, with no hermiticity check."""
    M = np.asarray(M)
    if M.shape == (1, 1):
        return float(M[0, 0].real)
    return float(np.linalg.eigvalsh((M + adjoint(M)) / 2)[0])


def is_projection(P, atol: float = 1e-10) -> bool:
    P = as_matrix(P)
    return bool(np.allclose(P @ P, P, atol=atol) and np.allclose(P, adjoint(P), atol=atol))


def direct_sum(blocks: Sequence[np.ndarray]) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    m = sum(b.shape[1] for b in blocks)
    out = np.zeros((n, m), dtype=complex)
    i = j = 0
    for b in blocks:
        out[i:i + b.shape[0], j:j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out


ScalarFunction = Callable[[np.ndarray], np.ndarray]

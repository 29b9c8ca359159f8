"""Concrete maps on matrices, their ampliations, and operator convex functions."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .linalg_core import (
    DEFAULT_TOL,
    DimensionError,
    Interval,
    LinalgError,
    Tolerances,
    adjoint,
    as_matrix,
    op_norm,
    pseudo_inverse,
    scale_of,
)
from .outcome import CheckOutcome, HypothesisError, outcome
from .positivity import BlockTwo, hermitian_block, weak_block


class Grade(enum.IntEnum):
    positive = 1
    weakly_2_positive = 2
    two_positive = 3
    completely_positive = 4


@dataclass(frozen=True, eq=False)
class MapDescriptor:
    kind: str
    input_dim: int
    output_dim: int
    claimed_grade: Grade
    is_linear: bool
    is_star_map: bool = True
    params: dict = field(default_factory=dict)

    def __call__(self, X):
        return apply_map(self, X)

    def __repr__(self):
        shown = {k: v for k, v in self.params.items() if np.isscalar(v)}
        return f"MapDescriptor({self.kind}, {self.input_dim}->{self.output_dim}, {shown})"

    @property
    def label(self) -> str:
        return self.params.get("label", self.kind)


def transpose(n: int = 2) -> MapDescriptor:
    return MapDescriptor("transpose", n, n, Grade.weakly_2_positive, True)


def moore_penrose(n: int = 2) -> MapDescriptor:
    return MapDescriptor("moore_penrose", n, n, Grade.positive, False)


def det_shift(alpha: float = 1.0, n: int = 2) -> MapDescriptor:
    """``X -> X* + alpha det(X) I``; neither linear nor conjugate linear."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return MapDescriptor("det_shift", n, n, Grade.weakly_2_positive, False,
                         params={"alpha": float(alpha)})


def vector_state(e) -> MapDescriptor:
    e = np.asarray(e, dtype=complex).ravel()
    if abs(np.linalg.norm(e) - 1) > 1e-12:
        raise ValueError("state vector must have unit norm")
    return MapDescriptor("vector_state", e.size, 1, Grade.completely_positive, True,
                         params={"e": e})


def normalized_trace(n: int) -> MapDescriptor:
    return MapDescriptor("normalized_trace", n, 1, Grade.completely_positive, True)


def compression(V, tol: Tolerances = DEFAULT_TOL) -> MapDescriptor:
    """``X -> V* X V`` for ``V`` with orthonormal columns."""
    V = as_matrix(V)
    if op_norm(adjoint(V) @ V - np.eye(V.shape[1])) > tol.tol_recon * 10:
        raise ValueError("compression requires V*V = I")
    return MapDescriptor("compression", V.shape[0], V.shape[1], Grade.completely_positive, True,
                         params={"V": V})


def pinching(partition: Sequence[Sequence[int]], n: Optional[int] = None) -> MapDescriptor:
    """``X -> sum_i P_i X P_i`` over coordinate blocks (0-based indices)."""
    blocks = tuple(tuple(int(i) for i in b) for b in partition)
    flat = sorted(i for b in blocks for i in b)
    n = len(flat) if n is None else n
    if flat != list(range(n)) or any(len(b) == 0 for b in blocks):
        raise ValueError(f"blocks {blocks} do not partition range({n})")
    return MapDescriptor("pinching", n, n, Grade.completely_positive, True,
                         params={"partition": blocks})


def kraus(ops: Sequence) -> MapDescriptor:
    """``X -> sum_i K_i* X K_i``."""
    ops = tuple(as_matrix(K) for K in ops)
    if not ops:
        raise ValueError("at least one Kraus operator required")
    shape = ops[0].shape
    if any(K.shape != shape for K in ops):
        raise DimensionError("Kraus operators must share a shape")
    return MapDescriptor("kraus", shape[0], shape[1], Grade.completely_positive, True,
                         params={"ops": ops})


def identity_map(n: int) -> MapDescriptor:
    return kraus([np.eye(n)])


def apply_map(phi: MapDescriptor, X) -> np.ndarray:
    X = as_matrix(X)
    if X.shape != (phi.input_dim, phi.input_dim):
        raise DimensionError(f"{phi.kind} expects {phi.input_dim}x{phi.input_dim}, got {X.shape}")
    kind, p = phi.kind, phi.params
    if kind == "transpose":
        return X.T.copy()
    if kind == "moore_penrose":
        return pseudo_inverse(X)
    if kind == "det_shift":
        return adjoint(X) + p["alpha"] * np.linalg.det(X) * np.eye(phi.input_dim)
    if kind == "vector_state":
        e = p["e"]
        return np.array([[np.vdot(e, X @ e)]])
    if kind == "normalized_trace":
        return np.array([[np.trace(X) / phi.input_dim]])
    if kind == "compression":
        V = p["V"]
        return adjoint(V) @ X @ V
    if kind == "pinching":
        out = np.zeros_like(X)
        for b in p["partition"]:
            idx = np.ix_(b, b)
            out[idx] = X[idx]
        return out
    if kind == "kraus":
        return sum(adjoint(K) @ X @ K for K in p["ops"])
    raise ValueError(f"unknown map kind {kind!r}")


def ampliate2(phi: MapDescriptor, M: BlockTwo) -> BlockTwo:
    """Apply ``phi`` blockwise."""
    return BlockTwo(*(apply_map(phi, part) for part in M.parts()))


def choi_matrix(phi: MapDescriptor) -> np.ndarray:
    """``sum_ij E_ij (x) phi(E_ij)``; PSD iff ``phi`` is completely positive."""
    if not phi.is_linear:
        raise ValueError(f"Choi matrix requires a linear map, {phi.kind} is not")
    n, m = phi.input_dim, phi.output_dim
    C = np.zeros((n * m, n * m), dtype=complex)
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = 1
            C[i * m:(i + 1) * m, j * m:(j + 1) * m] = apply_map(phi, E)
    return C


def is_unital(phi: MapDescriptor, atol: float = 1e-10) -> bool:
    out = apply_map(phi, np.eye(phi.input_dim))
    return out.shape[0] == out.shape[1] and np.allclose(out, np.eye(out.shape[0]), atol=atol)


def is_conditional_expectation_member(phi: MapDescriptor, A, tol: Tolerances = DEFAULT_TOL) -> bool:
    """``A`` lies in the range subalgebra of a pinching, i.e. ``phi(A) = A``."""
    A = as_matrix(A)
    return op_norm(apply_map(phi, A) - A) <= tol.tol_herm * scale_of(A)


# ---------------------------------------------------------------------------
# random blocks in the weak and general PSD cones


def random_psd_block(n: int, rng: np.random.Generator) -> BlockTwo:
    """Blocks read off ``G*G`` for a complex Gaussian ``G`` of size 2n."""
    G = (rng.standard_normal((2 * n, 2 * n)) + 1j * rng.standard_normal((2 * n, 2 * n))) / math.sqrt(2)
    M = adjoint(G) @ G
    M = (M + adjoint(M)) / 2 / op_norm(M)
    return BlockTwo(M[:n, :n], M[:n, n:], M[n:, :n], M[n:, n:])


def random_weak_block(n: int, rng: np.random.Generator, tol: Tolerances = DEFAULT_TOL) -> BlockTwo:
    """PSD block ``[A, C; C, B]`` with Hermitian ``C``.

    Half the draws use ``C = t (A # B)`` with ``t`` uniform on [-1, 1]; the other
    half scale a random Hermitian ``C`` to the largest ``t`` keeping the block
    PSD, found by bisection on the minimum eigenvalue.
    """
    from .means import geometric_mean

    def psd(k):
        G = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))) / math.sqrt(2)
        P = adjoint(G) @ G
        return (P + adjoint(P)) / 2

    A, B = psd(n), psd(n)
    if rng.random() < 0.5:
        t = rng.uniform(-1.0, 1.0)
        return weak_block(A, t * geometric_mean(A, B, tol), B, tol)
    H = psd(n) - psd(n)

    def lo_eig(t):
        return np.linalg.eigvalsh(np.block([[A, t * H], [t * H, B]]))[0]

    lo, hi = 0.0, 1.0
    while lo_eig(hi) >= 0 and hi < 1e6:
        lo, hi = hi, 2 * hi
    for _ in range(50):
        mid = (lo + hi) / 2
        if lo_eig(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return weak_block(A, lo * rng.uniform(0.0, 1.0) ** 0.25 * H, B, tol)


# 2x2 matrices whose block is PSD yet maps to a non-PSD block under transpose
COUNTER_A = np.array([[1, 0], [0, 0]], dtype=complex)
COUNTER_B = np.array([[2, 2], [2, 2]], dtype=complex)
COUNTER_C = np.array([[1, 1], [0, 0]], dtype=complex)


def counterexample_block(n: int = 2) -> BlockTwo:
    """``[A, C; C*, B]`` built from the 2x2 counterexample, zero-padded to n."""
    if n < 2:
        raise DimensionError("the counterexample block needs n >= 2")
    pad = np.zeros((n, n), dtype=complex)

    def emb(M):
        out = pad.copy()
        out[:2, :2] = M
        return out

    return hermitian_block(emb(COUNTER_A), emb(COUNTER_C), emb(COUNTER_B))


def two_one_block(n: int = 2) -> BlockTwo:
    """``[2I, I; I, 2I]``."""
    eye = np.eye(n, dtype=complex)
    return BlockTwo(2 * eye, eye, eye, 2 * eye)


def _image_min_eig(phi, M, tol):
    img = ampliate2(phi, M).assembled
    img = (img + adjoint(img)) / 2
    return float(np.linalg.eigvalsh(img)[0]), scale_of(img)


def falsify_grade(phi: MapDescriptor, grade, trials: int = 1000, seed: int = 0,
                  tol: Tolerances = DEFAULT_TOL):
    """Search for a PSD block whose image under ``phi`` is not PSD.

    Returns ``(found, witness, min_eig)``.  ``found = False`` is inconclusive,
    not a proof that ``phi`` has the grade.
    """
    grade = Grade[grade] if isinstance(grade, str) else Grade(grade)
    if grade not in (Grade.weakly_2_positive, Grade.two_positive):
        raise ValueError("grade must be weakly_2_positive or two_positive")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = phi.input_dim
    candidates = [two_one_block(n)]
    if grade is Grade.two_positive and n >= 2:
        candidates.append(counterexample_block(n))
    best = (np.inf, None)
    for M in candidates:
        lam, scale = _image_min_eig(phi, M, tol)
        if lam < -tol.tol_psd * scale:
            return True, M, lam
        best = min(best, (lam, M), key=lambda p: p[0])
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        M = random_weak_block(n, rng, tol) if grade is Grade.weakly_2_positive else random_psd_block(n, rng)
        lam, scale = _image_min_eig(phi, M, tol)
        if lam < -tol.tol_psd * scale:
            return True, M, lam
        if lam < best[0]:
            best = (lam, M)
    return False, None, float(best[0])


def check_bimodule(phi: MapDescriptor, A, X, B, tol: Tolerances = DEFAULT_TOL) -> CheckOutcome:
    """Residual of ``phi(AXB) = A phi(X) B`` for ``A, B`` in the pinching's range."""
    if phi.kind != "pinching":
        raise ValueError("bimodule check is defined for pinchings")
    A, X, B = as_matrix(A), as_matrix(X), as_matrix(B)
    for name, M in (("A", A), ("B", B)):
        if not is_conditional_expectation_member(phi, M, tol):
            raise HypothesisError(f"{name}_in_subalgebra", "operand is not block diagonal")
    resid = op_norm(apply_map(phi, A @ X @ B) - A @ apply_map(phi, X) @ B)
    scale = scale_of(A) * scale_of(X) * scale_of(B)
    return outcome("bimodule", -resid, scale, tol=tol, residuals={"residual": resid},
                   inputs=(A, X, B), hypotheses={"A_in_subalgebra": True, "B_in_subalgebra": True})


# ---------------------------------------------------------------------------
# operator convex functions


@dataclass(frozen=True)
class FunctionDescriptor:
    name: str
    domain: Interval
    evaluate: Callable[[np.ndarray], np.ndarray]

    def __call__(self, t):
        return self.evaluate(np.asarray(t, dtype=float))


def _xlogx(t):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(t > 0, t * np.log(np.where(t > 0, t, 1.0)), 0.0)


POSITIVE_REALS = Interval(0.0, math.inf)

FUNCTIONS = {
    "square": FunctionDescriptor("square", Interval(), lambda t: np.asarray(t, dtype=float) ** 2),
    "inverse": FunctionDescriptor("inverse", POSITIVE_REALS, lambda t: 1.0 / np.asarray(t, dtype=float)),
    "neg_sqrt": FunctionDescriptor("neg_sqrt", Interval(0.0, math.inf, lower_closed=True),
                                   lambda t: -np.sqrt(np.asarray(t, dtype=float))),
    "neg_log": FunctionDescriptor("neg_log", POSITIVE_REALS, lambda t: -np.log(np.asarray(t, dtype=float))),
    "t_log_t": FunctionDescriptor("t_log_t", POSITIVE_REALS, _xlogx),
}


def function(name: str) -> FunctionDescriptor:
    try:
        return FUNCTIONS[name]
    except KeyError:
        raise LinalgError(f"unknown function {name!r}; choose from {sorted(FUNCTIONS)}") from None


# ---------------------------------------------------------------------------
# map names as used on the command line


def parse_map(text: str, dim: int = 2, loader: Optional[Callable[[str], np.ndarray]] = None) -> MapDescriptor:
    """Build a map from ``name[:params]``.

    Examples: ``transpose``, ``moore-penrose``, ``det-shift:0.5``,
    ``pinching:1,2|3,4`` (1-based), ``vector-state:1,0,0``,
    ``normalized-trace``, ``compression:@V.json``,
    ``kraus:@K1.json,@K2.json``, ``identity``.
    """
    name, _, arg = text.partition(":")
    name = name.strip().lower().replace("_", "-")
    if name == "transpose":
        return transpose(int(arg) if arg else dim)
    if name == "moore-penrose":
        return moore_penrose(int(arg) if arg else dim)
    if name == "det-shift":
        parts = arg.split(",") if arg else []
        alpha = float(parts[0]) if parts else 1.0
        n = int(parts[1]) if len(parts) > 1 else dim
        return det_shift(alpha, n)
    if name == "normalized-trace":
        return normalized_trace(int(arg) if arg else dim)
    if name == "identity":
        return identity_map(int(arg) if arg else dim)
    if name == "vector-state":
        if not arg:
            e = np.zeros(dim)
            e[0] = 1
        else:
            e = np.array([complex(s) for s in arg.split(",")])
            e = e / np.linalg.norm(e)
        return vector_state(e)
    if name == "pinching":
        if not arg:
            return pinching([[i] for i in range(dim)], dim)
        blocks = [[int(i) - 1 for i in blk.split(",") if i.strip()] for blk in arg.split("|")]
        return pinching(blocks)
    if name in ("compression", "kraus"):
        if loader is None:
            from .io import read_matrix as loader
        files = [s.strip().lstrip("@") for s in arg.split(",") if s.strip()]
        if not files:
            raise ValueError(f"{name} needs matrix files, e.g. {name}:@K.json")
        mats = [loader(f) for f in files]
        return compression(mats[0]) if name == "compression" else kraus(mats)
    raise ValueError(f"unknown map {name!r}")

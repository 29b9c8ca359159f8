"""Numerical checks of Cauchy-Schwarz and Hua type operator inequalities.

Every check validates its own hypotheses and raises
:class:`~loewner.outcome.HypothesisError` instead of judging an instance the
inequality says nothing about.  ``margin`` is the least eigenvalue of the
side that should be larger minus the other side (or the scalar difference).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .linalg_core import (
    DEFAULT_TOL,
    DimensionError,
    LinalgError,
    Tolerances,
    adjoint,
    apply_function,
    as_matrix,
    hermitian,
    inner,
    min_eig,
    op_norm,
    operator_abs,
    polar_decompose,
    psd_sqrt,
    scale_of,
)
from .maps import FunctionDescriptor, Grade, MapDescriptor, apply_map, is_conditional_expectation_member, is_unital, pinching
from .means import MeanKind, geometric_mean, harmonic_mean
from .outcome import CheckOutcome, HypothesisError, outcome

INEQUALITY_IDS = (
    "schwarz-block", "thm-2-1-i", "thm-2-1-ii", "rmk-2-2", "cor-2-3", "cor-2-4",
    "cor-2-5-i", "cor-2-5-ii", "mean-sub-geo", "mean-sub-har", "hua-classical",
    "eq-3-1", "thm-3-1", "eq-3-3", "cdj", "thm-3-2", "cor-3-3",
)


@dataclass(frozen=True)
class HuaInstance:
    delta: float
    alpha: float
    xs: Tuple[float, ...]

    def __post_init__(self):
        if not (self.delta > 0 and self.alpha > 0):
            raise ValueError("delta and alpha must be positive")
        if len(self.xs) == 0:
            raise ValueError("xs must be nonempty")


def _sym(M):
    return (M + adjoint(M)) / 2


def _require_grade(phi: MapDescriptor, grade: Grade, star: bool = False, linear: bool = False):
    report = {f"map_{grade.name}": phi.claimed_grade >= grade}
    if star:
        report["map_star"] = phi.is_star_map
    if linear:
        report["map_linear"] = phi.is_linear
    for name, ok in report.items():
        if not ok:
            raise HypothesisError(name, f"{phi.kind} does not satisfy it")
    return report


def _matrix_outcome(ident, larger, smaller, tol, inputs, hypotheses, residuals=None):
    D = _sym(larger - smaller)
    margin = min_eig(D)
    return outcome(ident, margin, scale_of(larger, smaller), tol=tol, inputs=inputs,
                   hypotheses=hypotheses, residuals=residuals, difference=D)


def _scalar(M) -> complex:
    return complex(np.asarray(M).reshape(-1)[0]) if np.size(M) == 1 else complex(np.trace(M))


# ---------------------------------------------------------------------------
# Cauchy-Schwarz family


def check_schwarz_block(A, X, Y, tol: Tolerances = DEFAULT_TOL) -> CheckOutcome:
    """PSD-ness of ``[|A|, A*; A, |A*|]`` and its congruence by ``diag(X, Y)``."""
    A, X, Y = as_matrix(A), as_matrix(X), as_matrix(Y)
    if A.shape[0] != A.shape[1] or X.shape[0] != A.shape[0] or Y.shape[0] != A.shape[0]:
        raise DimensionError("A must be square with X, Y having as many rows")
    absA, absAs = operator_abs(A)
    inner_block = np.block([[absA, adjoint(A)], [A, absAs]])
    outer_block = np.block([[adjoint(X) @ absA @ X, adjoint(X) @ adjoint(A) @ Y],
                            [adjoint(Y) @ A @ X, adjoint(Y) @ absAs @ Y]])
    m1, m2 = min_eig(inner_block), min_eig(outer_block)
    return outcome("schwarz-block", min(m1, m2), scale_of(inner_block, outer_block), tol=tol,
                   inputs=(A, X, Y), residuals={"abs_block_min_eig": m1, "congruence_min_eig": m2},
                   hypotheses={"dimensions": True})


def check_map_schwarz(variant: str, phi: MapDescriptor, A, X, Y=None,
                      tol: Tolerances = DEFAULT_TOL) -> CheckOutcome:
    """Geometric-mean Cauchy-Schwarz inequality for weakly 2-positive / 2-positive maps.

    variant ``"i"``:      ``phi(|X*A*Y|) <= phi(V* X*|A|X V) # phi(Y*|A*|Y)``
    variant ``"ii"``:     ``|phi(X*A*Y)| <= U* phi(X*|A|X) U # phi(Y*|A*|Y)``
    variant ``"hermitian"``: ``|phi(X*AX)| <= U* phi(X*|A|X) U # phi(X*|A|X)`` for Hermitian ``A``
    """
    A, X = as_matrix(A), as_matrix(X)
    if variant == "hermitian":
        hyp = _require_grade(phi, Grade.weakly_2_positive, star=True)
        if Y is not None and not np.array_equal(as_matrix(Y), X):
            raise HypothesisError("Y_equals_X")
        try:
            A = hermitian(A, tol)
        except LinalgError as exc:
            raise HypothesisError("A_hermitian", str(exc)) from None
        hyp.update(A_hermitian=True, Y_equals_X=True)
        Y = X
    elif variant == "i":
        hyp = _require_grade(phi, Grade.weakly_2_positive)
    elif variant == "ii":
        hyp = _require_grade(phi, Grade.two_positive, star=True)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    Y = as_matrix(Y)
    absA, absAs = operator_abs(A)
    Xh, Yh = adjoint(X), adjoint(Y)
    Z = Xh @ adjoint(A) @ Y
    left_op = Xh @ absA @ X
    right_op = Yh @ absAs @ Y
    if variant == "i":
        V = polar_decompose(Z, tol).isometry_part
        lhs = apply_map(phi, operator_abs(Z)[0])
        rhs = geometric_mean(apply_map(phi, adjoint(V) @ left_op @ V), apply_map(phi, right_op), tol)
        ident = "thm-2-1-i"
    else:
        W = apply_map(phi, Z)
        U = polar_decompose(W, tol).isometry_part
        lhs = operator_abs(W)[0]
        rhs = geometric_mean(adjoint(U) @ apply_map(phi, left_op) @ U, apply_map(phi, right_op), tol)
        ident = "thm-2-1-ii" if variant == "ii" else "rmk-2-2"
    return _matrix_outcome(ident, rhs, lhs, tol, (phi.kind, A, X, Y), hyp,
                           residuals={"lhs_trace": float(np.trace(lhs).real),
                                      "rhs_trace": float(np.trace(rhs).real)})


def check_vector_schwarz(A, x, y, tol: Tolerances = DEFAULT_TOL) -> CheckOutcome:
    """``|<Ax, y>|^2 <= <|A|x, x> <|A*|y, y>``."""
    A = as_matrix(A)
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    if not (A.shape[0] == A.shape[1] == x.size == y.size):
        raise DimensionError("A must be square and match x, y")
    absA, absAs = operator_abs(A)
    lhs = abs(inner(A @ x, y)) ** 2
    rhs = inner(absA @ x, x).real * inner(absAs @ y, y).real
    return outcome("cor-2-3", rhs - lhs, max(1.0, rhs, lhs), tol=tol, inputs=(A, x, y),
                   residuals={"lhs": lhs, "rhs": rhs}, hypotheses={"dimensions": True})


def check_trace_schwarz(A, X, Y, tol: Tolerances = DEFAULT_TOL) -> CheckOutcome:
    """``tr(|X*A*Y|)^2 <= tr(X*|A|X) tr(Y*|A*|Y)``."""
    A, X, Y = as_matrix(A), as_matrix(X), as_matrix(Y)
    if not (A.shape == X.shape == Y.shape and A.shape[0] == A.shape[1]):
        raise DimensionError("A, X, Y must be square of one size")
    absA, absAs = operator_abs(A)
    lhs = float(np.trace(operator_abs(adjoint(X) @ adjoint(A) @ Y)[0]).real) ** 2
    rhs = float(np.trace(adjoint(X) @ absA @ X).real) * float(np.trace(adjoint(Y) @ absAs @ Y).real)
    return outcome("cor-2-4", rhs - lhs, max(1.0, rhs, lhs), tol=tol, inputs=(A, X, Y),
                   residuals={"lhs": lhs, "rhs": rhs}, hypotheses={"dimensions": True})


def check_single_operator_schwarz(variant: str, phi: MapDescriptor, X, tol: Tolerances = DEFAULT_TOL) -> CheckOutcome:
    """variant ``"i"``:  ``phi(|X|) <= phi(V*|X*|V) # phi(|X|)`` with ``X = V|X|``;
    variant ``"ii"``: ``|phi(X)| <= U* phi(|X*|^{1/2}) U # phi(|X|^{3/2})`` with ``phi(X) = U|phi(X)|``.
    """
    X = as_matrix(X)
    absX, absXs = operator_abs(X)
    if variant == "i":
        hyp = _require_grade(phi, Grade.weakly_2_positive)
        V = polar_decompose(X, tol).isometry_part
        lhs = apply_map(phi, absX)
        rhs = geometric_mean(apply_map(phi, adjoint(V) @ absXs @ V), lhs, tol)
    elif variant == "ii":
        hyp = _require_grade(phi, Grade.two_positive, star=True)
        W = apply_map(phi, X)
        U = polar_decompose(W, tol).isometry_part
        lhs = operator_abs(W)[0]
        half = apply_map(phi, psd_sqrt(absXs, tol))
        three_halves = apply_map(phi, absX @ psd_sqrt(absX, tol))
        rhs = geometric_mean(adjoint(U) @ half @ U, _sym(three_halves), tol)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return _matrix_outcome(f"cor-2-5-{variant}", rhs, lhs, tol, (phi.kind, X), hyp)


def check_mean_subpreservation(kind, phi: MapDescriptor, A, B, tol: Tolerances = DEFAULT_TOL) -> CheckOutcome:
    """``phi(A # B) <= phi(A) # phi(B)``, or the harmonic analogue for linear ``phi``."""
    kind = MeanKind(kind)
    if kind is MeanKind.geometric:
        hyp = _require_grade(phi, Grade.weakly_2_positive)
        mean, ident = geometric_mean, "mean-sub-geo"
    elif kind is MeanKind.harmonic:
        hyp = _require_grade(phi, Grade.weakly_2_positive, linear=True)
        mean, ident = harmonic_mean, "mean-sub-har"
    else:
        raise ValueError("kind must be geometric or harmonic")
    A, B = hermitian(A, tol), hermitian(B, tol)
    lhs = apply_map(phi, mean(A, B, tol))
    rhs = mean(apply_map(phi, A), apply_map(phi, B), tol)
    return _matrix_outcome(ident, rhs, lhs, tol, (phi.kind, A, B), hyp)


# ---------------------------------------------------------------------------
# Hua family


def check_hua_classical(inst: HuaInstance, tol: Tolerances = DEFAULT_TOL) -> CheckOutcome:
    """``(delta - sum x)^2 + alpha sum x^2 >= alpha delta^2 / (n + alpha)``."""
    xs = np.asarray(inst.xs, dtype=float)
    n = xs.size
    s = math.fsum(xs)
    lhs = (inst.delta - s) ** 2 + inst.alpha * math.fsum(xs * xs)
    rhs = inst.alpha / (n + inst.alpha) * inst.delta ** 2
    return outcome("hua-classical", lhs - rhs, max(1.0, lhs, rhs), tol=tol,
                   inputs=(inst.delta, inst.alpha, tuple(xs)), residuals={"lhs": lhs, "rhs": rhs},
                   hypotheses={"delta_positive": True, "alpha_positive": True})


def _require_state(phi: MapDescriptor):
    hyp = {
        "state_scalar_valued": phi.output_dim == 1,
        "state_linear": phi.is_linear,
        "state_positive": phi.claimed_grade >= Grade.positive,
    }
    hyp["state_unital"] = hyp["state_scalar_valued"] and is_unital(phi)
    for name, ok in hyp.items():
        if not ok:
            raise HypothesisError(name, phi.kind)
    return hyp


def _require_contraction(name, M, tol):
    norm = op_norm(M)
    if norm > 1 + tol.tol_psd:
        raise HypothesisError(name, f"norm {norm:.6g} > 1")
    return True


def check_state_contraction_chain(phi: MapDescriptor, A, B, tol: Tolerances = DEFAULT_TOL) -> CheckOutcome:
    """``(1 - |phi(B*A)|)^2 >= (1 - sqrt(phi(A*A) phi(B*B)))^2 >= phi(I - A*A) phi(I - B*B)``."""
    hyp = _require_state(phi)
    A, B = as_matrix(A), as_matrix(B)
    hyp["A_contraction"] = _require_contraction("A_contraction", A, tol)
    hyp["B_contraction"] = _require_contraction("B_contraction", B, tol)
    eye = np.eye(A.shape[0])
    a = _scalar(apply_map(phi, adjoint(A) @ A)).real
    b = _scalar(apply_map(phi, adjoint(B) @ B)).real
    cross = abs(_scalar(apply_map(phi, adjoint(B) @ A)))
    first = (1 - cross) ** 2
    middle = (1 - math.sqrt(max(a, 0.0) * max(b, 0.0))) ** 2
    last = _scalar(apply_map(phi, eye - adjoint(A) @ A)).real * _scalar(apply_map(phi, eye - adjoint(B) @ B)).real
    r1, r2 = first - middle, middle - last
    return outcome("eq-3-1", min(r1, r2), 1.0, tol=tol, inputs=(phi.kind, A, B),
                   residuals={"first_gap": r1, "second_gap": r2}, hypotheses=hyp)


def check_map_hua(phi: MapDescriptor, A, X, Y, tol: Tolerances = DEFAULT_TOL) -> CheckOutcome:
    """``I - |phi(X*A*Y)| >= U*(I - phi(X*|A|X))U # (I - phi(Y*|A*|Y))``."""
    hyp = _require_grade(phi, Grade.two_positive, star=True)
    A, X, Y = as_matrix(A), as_matrix(X), as_matrix(Y)
    absA, absAs = operator_abs(A)
    P = _sym(apply_map(phi, adjoint(X) @ absA @ X))
    Q = _sym(apply_map(phi, adjoint(Y) @ absAs @ Y))
    hyp["phi_left_contraction"] = _require_contraction("phi_left_contraction", P, tol)
    hyp["phi_right_contraction"] = _require_contraction("phi_right_contraction", Q, tol)
    W = apply_map(phi, adjoint(X) @ adjoint(A) @ Y)
    U = polar_decompose(W, tol).isometry_part
    eye = np.eye(W.shape[0])
    lhs = eye - operator_abs(W)[0]
    rhs = geometric_mean(adjoint(U) @ (eye - P) @ U, eye - Q, tol)
    return _matrix_outcome("thm-3-1", lhs, rhs, tol, (phi.kind, A, X, Y), hyp)


def _check_spectrum(name, f: FunctionDescriptor, M, tol):
    w = np.linalg.eigvalsh(_sym(M))
    slack = tol.tol_spec * max(1.0, float(np.max(np.abs(w))))
    bad = [t for t in w if not f.domain.contains(float(t), slack)]
    if bad:
        raise HypothesisError(name, f"eigenvalue {bad[0]:.6g} outside {f.domain}")
    return True


def check_jensen_subunital(f: FunctionDescriptor, pairs: Sequence[Tuple[np.ndarray, np.ndarray]],
                           tol: Tolerances = DEFAULT_TOL) -> CheckOutcome:
    """``f(sum X_i* A_i X_i) <= sum X_i* f(A_i) X_i`` when ``sum X_i* X_i = I``."""
    if not pairs:
        raise ValueError("at least one pair required")
    As = [hermitian(A, tol) for A, _ in pairs]
    Xs = [as_matrix(X) for _, X in pairs]
    k = Xs[0].shape[1]
    S = sum(adjoint(X) @ X for X in Xs)
    if op_norm(S - np.eye(k)) > tol.tol_recon * 10:
        raise HypothesisError("normalized", "sum X_i* X_i != I")
    hyp = {"normalized": True}
    for i, A in enumerate(As):
        hyp[f"spectrum_A{i}"] = _check_spectrum(f"spectrum_A{i}", f, A, tol)
    inside = _sym(sum(adjoint(X) @ A @ X for A, X in zip(As, Xs)))
    lhs = apply_function(f, inside, tol)
    rhs = sum(adjoint(X) @ apply_function(f, A, tol) @ X for A, X in zip(As, Xs))
    return _matrix_outcome("eq-3-3", rhs, lhs, tol, (f.name, *As, *Xs), hyp)


def check_cdj(phi: MapDescriptor, f: FunctionDescriptor, A, tol: Tolerances = DEFAULT_TOL) -> CheckOutcome:
    """Choi-Davis-Jensen: ``f(phi(A)) <= phi(f(A))`` for unital positive linear ``phi``."""
    hyp = {"map_linear": phi.is_linear, "map_positive": phi.claimed_grade >= Grade.positive,
           "map_unital": is_unital(phi)}
    for name, ok in hyp.items():
        if not ok:
            raise HypothesisError(name, phi.kind)
    A = hermitian(A, tol)
    hyp["spectrum_A"] = _check_spectrum("spectrum_A", f, A, tol)
    lhs = apply_function(f, _sym(apply_map(phi, A)), tol)
    rhs = apply_map(phi, apply_function(f, A, tol))
    return _matrix_outcome("cdj", rhs, lhs, tol, (phi.kind, f.name, A), hyp)


def check_pinching_hua(partition, f: FunctionDescriptor, B, C, tol: Tolerances = DEFAULT_TOL) -> CheckOutcome:
    """``f(I - phi(B)) + C* phi(f(C*^{-1} B C^{-1})) C >= f((I + C*C)^{-1}) (I + C*C)``
    where ``phi`` is the pinching onto ``partition``.
    """
    B, C = hermitian(B, tol), as_matrix(C)
    n = B.shape[0]
    if C.shape != (n, n):
        raise DimensionError("B and C must be square of one size")
    phi = partition if isinstance(partition, MapDescriptor) else pinching(partition, n)
    if phi.kind != "pinching":
        raise HypothesisError("conditional_expectation", phi.kind)
    hyp = {"conditional_expectation": True}
    if not is_conditional_expectation_member(phi, C, tol):
        raise HypothesisError("C_in_subalgebra", "C is not block diagonal")
    hyp["C_in_subalgebra"] = True
    s = np.linalg.svd(C, compute_uv=False)
    if s[-1] <= tol.tol_rank * s[0]:
        raise HypothesisError("C_invertible")
    hyp["C_invertible"] = True
    eye = np.eye(n)
    Cinv = np.linalg.inv(C)
    T = eye + adjoint(C) @ C
    inner_arg = _sym(adjoint(Cinv) @ B @ Cinv)
    first_arg = eye - _sym(apply_map(phi, B))
    res_arg = _sym(np.linalg.inv(T))
    for name, M in (("spectrum_I_minus_phiB", first_arg), ("spectrum_resolvent", res_arg),
                    ("spectrum_congruence", inner_arg)):
        hyp[name] = _check_spectrum(name, f, M, tol)
    lhs = apply_function(f, first_arg, tol) + adjoint(C) @ apply_map(phi, apply_function(f, inner_arg, tol)) @ C
    rhs = apply_function(f, res_arg, tol) @ T
    return _matrix_outcome("thm-3-2", _sym(lhs), _sym(rhs), tol, (phi.params["partition"], f.name, B, C), hyp)


def check_state_hua(phi: MapDescriptor, f: FunctionDescriptor, B, gamma: float,
                    tol: Tolerances = DEFAULT_TOL) -> CheckOutcome:
    """``f(1 - phi(B)) + gamma phi(f(B / gamma)) >= (1 + gamma) f(1 / (1 + gamma))``."""
    if not gamma > 0:
        raise HypothesisError("gamma_positive")
    hyp = _require_state(phi)
    hyp["gamma_positive"] = True
    B = hermitian(B, tol)
    b = _scalar(apply_map(phi, B)).real
    point = 1.0 / (1.0 + gamma)
    for name, t in (("one_minus_state_in_J", 1.0 - b), ("resolvent_point_in_J", point)):
        if not f.domain.contains(t, tol.tol_spec):
            raise HypothesisError(name, f"{t:.6g} outside {f.domain}")
        hyp[name] = True
    hyp["spectrum_B_over_gamma"] = _check_spectrum("spectrum_B_over_gamma", f, B / gamma, tol)
    lhs = float(f(np.array([1.0 - b]))[0]) + gamma * _scalar(apply_map(phi, apply_function(f, B / gamma, tol))).real
    rhs = (1.0 + gamma) * float(f(np.array([point]))[0])
    return outcome("cor-3-3", lhs - rhs, max(1.0, abs(lhs), abs(rhs)), tol=tol,
                   inputs=(phi.kind, f.name, B, gamma), residuals={"lhs": lhs, "rhs": rhs}, hypotheses=hyp)

"""Seeded inequality suites and reproductions of the positivity counterexamples."""
from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import generators as gen
from . import inequalities as ineq
from . import maps
from .linalg_core import DEFAULT_TOL, Interval, LinalgError, Tolerances, adjoint, matrix_scalars, op_norm, operator_abs
from .outcome import CheckOutcome
from .positivity import is_psd

DEFAULT_DIMS = (2, 3, 4, 6)
DEFAULT_TRIALS = 1000


@dataclass
class SuiteReport:
    suite_id: str
    master_seed: int
    trials: int
    dims: List[int]
    failures: List[dict] = field(default_factory=list)
    min_margin: Optional[float] = None
    tolerance: float = DEFAULT_TOL.tol_margin
    wall_time: float = 0.0
    details: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# ---------------------------------------------------------------------------
# map pools; each trial picks ``pool[trial_index % len(pool)]``


def _kraus(rng, n, unital=False):
    m = int(rng.integers(1, 4))
    if unital:
        p = rng.dirichlet(np.ones(m))
        return maps.kraus([math.sqrt(pi) * gen.unitary(rng, n) for pi in p])
    return maps.kraus([gen.ginibre(rng, n) / math.sqrt(m * n) for _ in range(m)])


def _two_positive_pool(rng, n):
    return [
        lambda: maps.pinching(gen.random_partition(rng, n), n),
        lambda: maps.compression(gen.isometry_columns(rng, n, int(rng.integers(1, n + 1)))),
        lambda: maps.vector_state(gen.unit_vector(rng, n)),
        lambda: maps.normalized_trace(n),
        lambda: _kraus(rng, n),
    ]


def _weak_pool(rng, n):
    return [
        lambda: maps.transpose(n),
        lambda: maps.det_shift(float(rng.uniform(0.0, 2.0)), n),
    ] + _two_positive_pool(rng, n)


def _linear_weak_pool(rng, n):
    return [lambda: maps.transpose(n)] + _two_positive_pool(rng, n)


def _unital_pool(rng, n):
    return [
        lambda: maps.pinching(gen.random_partition(rng, n), n),
        lambda: maps.compression(gen.isometry_columns(rng, n, int(rng.integers(1, n + 1)))),
        lambda: maps.vector_state(gen.unit_vector(rng, n)),
        lambda: maps.normalized_trace(n),
        lambda: maps.transpose(n),
        lambda: _kraus(rng, n, unital=True),
    ]


def _state_pool(rng, n):
    return [
        lambda: maps.vector_state(gen.unit_vector(rng, n)),
        lambda: maps.normalized_trace(n),
    ]


def _pick(pool, k):
    return pool[k % len(pool)]()


_FUNCTION_NAMES = tuple(maps.FUNCTIONS)


def _function_and_window(k):
    f = maps.FUNCTIONS[_FUNCTION_NAMES[k % len(_FUNCTION_NAMES)]]
    window = (-2.0, 2.0) if f.name == "square" else (0.01, 2.0)
    return f, window


def _herm(rng, n):
    G = gen.ginibre(rng, n)
    return (G + adjoint(G)) / 2


# ---------------------------------------------------------------------------
# one instance builder per inequality id: (rng, n, k) -> CheckOutcome


def _schwarz(rng, n, k):
    m = int(rng.integers(1, n + 1))
    return ineq.check_schwarz_block(gen.ginibre(rng, n), gen.ginibre(rng, n, m), gen.ginibre(rng, n, m))


def _map_schwarz_weak(rng, n, k):
    phi = _pick(_weak_pool(rng, n), k)
    return ineq.check_map_schwarz("i", phi, gen.ginibre(rng, n), gen.ginibre(rng, n), gen.ginibre(rng, n))


def _map_schwarz_2pos(rng, n, k):
    phi = _pick(_two_positive_pool(rng, n), k)
    return ineq.check_map_schwarz("ii", phi, gen.ginibre(rng, n), gen.ginibre(rng, n), gen.ginibre(rng, n))


def _map_schwarz_herm(rng, n, k):
    phi = _pick(_weak_pool(rng, n), k)
    return ineq.check_map_schwarz("hermitian", phi, _herm(rng, n), gen.ginibre(rng, n))


def _vector_schwarz(rng, n, k):
    return ineq.check_vector_schwarz(gen.ginibre(rng, n), gen.ginibre(rng, n, 1), gen.ginibre(rng, n, 1))


def _trace_schwarz(rng, n, k):
    return ineq.check_trace_schwarz(gen.ginibre(rng, n), gen.ginibre(rng, n), gen.ginibre(rng, n))


def _single_weak(rng, n, k):
    return ineq.check_single_operator_schwarz("i", _pick(_weak_pool(rng, n), k), gen.ginibre(rng, n))


def _single_2pos(rng, n, k):
    return ineq.check_single_operator_schwarz("ii", _pick(_two_positive_pool(rng, n), k), gen.ginibre(rng, n))


def _mean_geo(rng, n, k):
    phi = _pick(_weak_pool(rng, n), k)
    return ineq.check_mean_subpreservation("geometric", phi, gen.psd_wishart(rng, n), gen.psd_wishart(rng, n))


def _mean_har(rng, n, k):
    phi = _pick(_linear_weak_pool(rng, n), k)
    return ineq.check_mean_subpreservation("harmonic", phi, gen.psd_wishart(rng, n), gen.psd_wishart(rng, n))


def _hua(rng, n, k):
    delta = float(rng.uniform(0.1, 10.0))
    alpha = float(rng.uniform(0.1, 10.0))
    xs = rng.normal(delta / (n + alpha), delta / n, size=n)
    return ineq.check_hua_classical(ineq.HuaInstance(delta, alpha, tuple(float(x) for x in xs)))


def _state_chain(rng, n, k):
    phi = _pick(_state_pool(rng, n), k)
    return ineq.check_state_contraction_chain(phi, gen.contraction(rng, n), gen.contraction(rng, n))


def _rescale(phi, op, M):
    P = maps.apply_map(phi, adjoint(M) @ op @ M)
    norm = op_norm(P)
    return M * math.sqrt(0.9 / norm) if norm > 1.0 else M


def _map_hua(rng, n, k):
    phi = _pick(_two_positive_pool(rng, n), k)
    A, X, Y = gen.ginibre(rng, n), gen.ginibre(rng, n), gen.ginibre(rng, n)
    absA, absAs = operator_abs(A)
    return ineq.check_map_hua(phi, A, _rescale(phi, absA, X), _rescale(phi, absAs, Y))


def _jensen(rng, n, k):
    f, window = _function_and_window(k)
    m = 2 + k % 2
    As = [gen.hermitian_in_interval(rng, n, f.domain, window) for _ in range(m)]
    Xs = [gen.ginibre(rng, n) for _ in range(m)]
    S = sum(adjoint(X) @ X for X in Xs)
    w, Q = np.linalg.eigh(S)
    root = (Q / np.sqrt(w)) @ adjoint(Q)
    return ineq.check_jensen_subunital(f, list(zip(As, [X @ root for X in Xs])))


def _cdj(rng, n, k):
    f, window = _function_and_window(k)
    phi = _pick(_unital_pool(rng, n), k // len(_FUNCTION_NAMES))
    return ineq.check_cdj(phi, f, gen.hermitian_in_interval(rng, n, f.domain, window))


def _block_diag_invertible(rng, partition, n):
    C = np.zeros((n, n), dtype=complex)
    for blk in partition:
        b = len(blk)
        block = gen.unitary(rng, b) @ np.diag(rng.uniform(0.3, 3.0, size=b)) @ gen.unitary(rng, b)
        C[np.ix_(blk, blk)] = block
    return C


def _pinching_hua(rng, n, k):
    f, _ = _function_and_window(k)
    partition = [list(range(n))] if k % 5 == 0 else gen.random_partition(rng, n)
    C = _block_diag_invertible(rng, partition, n)
    B = gen.hermitian_in_interval(rng, n, Interval(0.0, 1.0), (0.01, 0.99))
    return ineq.check_pinching_hua(partition, f, B, C)


def _state_hua(rng, n, k):
    f, _ = _function_and_window(k)
    phi = _pick(_state_pool(rng, n), k // len(_FUNCTION_NAMES))
    gamma = float(rng.uniform(0.1, 5.0))
    H = gen.hermitian_in_interval(rng, n, Interval(0.0, 1.0), (0.01, min(1.0, 0.99 / gamma)))
    return ineq.check_state_hua(phi, f, gamma * H, gamma)


SUITES: Dict[str, Callable] = {
    "schwarz-block": _schwarz,
    "thm-2-1-i": _map_schwarz_weak,
    "thm-2-1-ii": _map_schwarz_2pos,
    "rmk-2-2": _map_schwarz_herm,
    "cor-2-3": _vector_schwarz,
    "cor-2-4": _trace_schwarz,
    "cor-2-5-i": _single_weak,
    "cor-2-5-ii": _single_2pos,
    "mean-sub-geo": _mean_geo,
    "mean-sub-har": _mean_har,
    "hua-classical": _hua,
    "eq-3-1": _state_chain,
    "thm-3-1": _map_hua,
    "eq-3-3": _jensen,
    "cdj": _cdj,
    "thm-3-2": _pinching_hua,
    "cor-3-3": _state_hua,
}
assert tuple(SUITES) == ineq.INEQUALITY_IDS


def _run_one(suite_id, builder, master_seed, trials, dims, tol, failures):
    lowest = None
    for n in dims:
        for t in range(trials):
            rng = gen.trial_rng(master_seed, suite_id, n, t)
            try:
                res: CheckOutcome = builder(rng, n, t)
            except (LinalgError, ArithmeticError) as exc:
                failures.append({"suite_id": suite_id, "dim": n, "trial_index": t,
                                 "instance_digest": None, "margin": None, "error": str(exc)})
                continue
            rel = res.margin / res.scale
            lowest = rel if lowest is None else min(lowest, rel)
            if rel < -tol.tol_margin:
                failures.append({"suite_id": suite_id, "dim": n, "trial_index": t,
                                 "instance_digest": res.instance_digest, "margin": res.margin})
    return lowest


def run_suite(suite_id: str, master_seed: int = 0, trials: int = DEFAULT_TRIALS,
              dims: Sequence[int] = DEFAULT_DIMS, tol: Tolerances = DEFAULT_TOL,
              suites: Optional[Dict[str, Callable]] = None) -> SuiteReport:
    """Run the named check (or ``"all"``) on seeded instances.

    ``min_margin`` is the least ``margin / scale`` seen; a trial fails when it
    drops below ``-tol_margin`` or when the instance raises.  ``suites`` swaps
    in a different builder table (used by tests to inject a broken check).
    """
    table = SUITES if suites is None else suites
    if suite_id != "all" and suite_id not in table:
        raise KeyError(f"unknown suite {suite_id!r}; choose from {sorted(table)} or 'all'")
    ids = list(table) if suite_id == "all" else [suite_id]
    dims = [int(n) for n in dims]
    start = time.perf_counter()
    failures: List[dict] = []
    per_suite = {}
    lowest = None
    for sid in ids:
        m = _run_one(sid, table[sid], master_seed, trials, dims, tol, failures)
        per_suite[sid] = m
        if m is not None:
            lowest = m if lowest is None else min(lowest, m)
    failures.sort(key=lambda f: (f["suite_id"], f["dim"], f["trial_index"]))
    details = {"per_suite_min_margin": per_suite} if suite_id == "all" else {}
    return SuiteReport(suite_id, master_seed, trials, dims, failures, lowest, tol.tol_margin,
                       time.perf_counter() - start, details)


# ---------------------------------------------------------------------------
# counterexamples from the positivity discussion

DEMO_CASES = ("moore-penrose", "det-shift", "transpose")


def _fmt(M):
    M = np.asarray(M)
    if np.allclose(M.imag, 0):
        return [[repr(float(z.real)) for z in row] for row in M]
    return [[repr(complex(z)) for z in row] for row in M]


def demo_counterexample(case: str, alpha: float = 1.0, n: int = 2, tol: Tolerances = DEFAULT_TOL) -> SuiteReport:
    """Reproduce a counterexample and report the numbers that refute positivity."""
    start = time.perf_counter()
    if case == "moore-penrose":
        phi = maps.moore_penrose(n)
        block = maps.two_one_block(n)
    elif case == "det-shift":
        phi = maps.det_shift(alpha, 2)
        block = maps.counterexample_block(2)
    elif case == "transpose":
        phi = maps.transpose(2)
        block = maps.counterexample_block(2)
    else:
        raise KeyError(f"unknown demo case {case!r}; choose from {DEMO_CASES}")
    source_psd, source_min = is_psd(block.assembled, tol)
    image = maps.ampliate2(phi, block).assembled
    scalars = matrix_scalars(image, tol)
    details = {
        "map": phi.kind,
        "input_block": _fmt(block.assembled),
        "input_min_eig": source_min,
        "image_block": _fmt(image),
        "image_eigenvalues": [float(x) for x in scalars.spectrum],
        "image_min_eig": scalars.min_hermitian_eig,
        "image_determinant": float(scalars.determinant.real),
    }
    if case == "det-shift":
        details["alpha"] = alpha
    failures = []
    if not source_psd:
        failures.append({"trial_index": 0, "instance_digest": None, "margin": source_min,
                         "error": "input block is not PSD"})
    if scalars.min_hermitian_eig >= -tol.tol_psd:
        failures.append({"trial_index": 0, "instance_digest": None, "margin": scalars.min_hermitian_eig,
                         "error": "image block is PSD; counterexample not reproduced"})
    return SuiteReport(f"demo:{case}", 0, 1, [block.n], failures, scalars.min_hermitian_eig,
                       tol.tol_psd, time.perf_counter() - start, details)

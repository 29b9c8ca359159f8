"""Seeded random instances.

Random streams are derived from ``SeedSequence(master_seed,
spawn_key=(suite_key, dim, trial_index))`` with ``suite_key`` the first 8 bytes
of ``sha256(suite_id)``, so each trial is reproducible on its own and
independent of evaluation order.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .linalg_core import DimensionError, Interval, adjoint, op_norm
from .maps import random_psd_block, random_weak_block
from .positivity import BlockTwo

KINDS = ("ginibre", "psd_wishart", "hermitian_in_interval", "contraction", "unitary",
         "isometry_columns", "psd_weak_block", "psd_block")

_MASK64 = (1 << 64) - 1


def suite_key(suite_id: str) -> int:
    return int.from_bytes(hashlib.sha256(suite_id.encode()).digest()[:8], "little")


def trial_rng(master_seed: int, suite_id: str, dim: int, trial_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(master_seed & _MASK64, spawn_key=(suite_key(suite_id), dim, trial_index))
    return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    dim: int
    seed: int
    interval: Optional[Interval] = None
    cols: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.dim < 1:
            raise DimensionError("dim must be >= 1")


def ginibre(rng, n, m=None):
    m = n if m is None else m
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / math.sqrt(2)


def psd_wishart(rng, n):
    G = ginibre(rng, n)
    P = adjoint(G) @ G
    P = (P + adjoint(P)) / 2
    return P / op_norm(P)


def unitary(rng, n):
    q, r = np.linalg.qr(ginibre(rng, n))
    d = np.diag(r)
    return q * (d / np.abs(d))


def isometry_columns(rng, n, k):
    if not 1 <= k <= n:
        raise DimensionError("need 1 <= cols <= dim")
    return unitary(rng, n)[:, :k]


def sampling_window(interval: Interval, width: float = 2.0):
    """Finite sub-window of ``interval`` used for drawing eigenvalues."""
    lo = interval.lower if math.isfinite(interval.lower) else -width
    hi = interval.upper if math.isfinite(interval.upper) else lo + width
    if not math.isfinite(interval.lower) and math.isfinite(interval.upper):
        lo = hi - width
    return lo, hi


def hermitian_in_interval(rng, n, interval: Interval, window=None):
    lo, hi = window if window is not None else sampling_window(interval)
    w = rng.uniform(lo, hi, size=n)
    if not interval.lower_closed:
        w[w <= interval.lower] = np.nextafter(interval.lower, np.inf)
    Q = unitary(rng, n)
    H = (Q * w) @ adjoint(Q)
    return (H + adjoint(H)) / 2


def contraction(rng, n, m=None):
    G = ginibre(rng, n, m)
    return G / (op_norm(G) * (1.0 + rng.uniform(0.0, 1.0)))


def unit_vector(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def random_partition(rng, n):
    """Random partition of range(n) into nonempty blocks."""
    perm = rng.permutation(n)
    cuts = sorted(set(rng.integers(1, n, size=rng.integers(0, n))) if n > 1 else [])
    return [sorted(int(i) for i in blk) for blk in np.split(perm, cuts)]


def generate(spec: GeneratorSpec) -> Union[np.ndarray, BlockTwo]:
    rng = np.random.default_rng(spec.seed & _MASK64)
    n = spec.dim
    if spec.kind == "ginibre":
        return ginibre(rng, n, spec.cols)
    if spec.kind == "psd_wishart":
        return psd_wishart(rng, n)
    if spec.kind == "hermitian_in_interval":
        return hermitian_in_interval(rng, n, spec.interval or Interval(0.0, 1.0))
    if spec.kind == "contraction":
        return contraction(rng, n, spec.cols)
    if spec.kind == "unitary":
        return unitary(rng, n)
    if spec.kind == "isometry_columns":
        return isometry_columns(rng, n, spec.cols or max(1, n // 2))
    if spec.kind == "psd_weak_block":
        return random_weak_block(n, rng)
    return random_psd_block(n, rng)

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .linalg_core import DEFAULT_TOL, Tolerances


class HypothesisError(ValueError):
    """A check was asked to judge an instance outside its hypotheses."""

    def __init__(self, hypothesis: str, detail: str = ""):
        self.hypothesis = hypothesis
        super().__init__(f"hypothesis '{hypothesis}' failed" + (f": {detail}" if detail else ""))


@dataclass
class CheckOutcome:
    inequality_id: str
    holds: bool
    margin: float
    scale: float
    residuals: Dict[str, float] = field(default_factory=dict)
    instance_digest: str = ""
    hypothesis_report: Dict[str, bool] = field(default_factory=dict)
    equality: bool = False
    # the matrix asserted to be PSD (None for scalar checks)
    difference: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def relative_margin(self) -> float:
        return self.margin / self.scale

    def to_dict(self) -> dict:
        return {
            "inequality_id": self.inequality_id,
            "holds": self.holds,
            "margin": self.margin,
            "scale": self.scale,
            "residuals": dict(self.residuals),
            "instance_digest": self.instance_digest,
            "hypothesis_report": dict(self.hypothesis_report),
            "equality": self.equality,
        }


def digest(*items) -> str:
    """Stable hex digest of arrays / scalars / strings."""
    h = hashlib.sha256()
    for item in items:
        if isinstance(item, np.ndarray):
            a = np.ascontiguousarray(item, dtype=complex)
            h.update(str(a.shape).encode())
            h.update(a.tobytes())
        else:
            h.update(repr(item).encode())
        h.update(b"|")
    return h.hexdigest()[:16]


def outcome(inequality_id: str, margin: float, scale: float, *, tol: Tolerances = DEFAULT_TOL,
            residuals=None, inputs=(), hypotheses=None, difference=None) -> CheckOutcome:
    margin = float(margin)
    return CheckOutcome(
        inequality_id=inequality_id,
        holds=margin >= -tol.tol_margin * scale,
        margin=margin,
        scale=float(scale),
        residuals=dict(residuals or {}),
        instance_digest=digest(inequality_id, *inputs),
        hypothesis_report=dict(hypotheses or {}),
        equality=abs(margin) <= 10 * tol.tol_margin * scale,
        difference=difference,
    )

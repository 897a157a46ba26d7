"""End-to-end exposedness check for Ad_s.

The chain: reduce s = u sigma v^* so that Ad_s is an affine image of
Ad_sigma; certify Ad_sigma and the identity on M_r; report the hypothesis
status of the corner maps S and T that factor Ad_sigma; then certify Ad_s
and Ad_s o t directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .bidual import BidualProbe, default_budget, probe_bidual
from .linalg import DEFAULT_TOL, Tolerance, as_matrix
from .maps import ad, compose, identity_map, st_maps, svd_reduce, transpose_map
from .woronowicz import woronowicz_verdict

EXPOSED = "exposed (numerical certificate)"
NOT_CERTIFIED = "not certified"


class RankInstabilityError(RuntimeError):
    """A bi-dual dimension changed between budget and twice the budget."""

    def __init__(self, step: str, dims):
        super().__init__(f"step {step!r}: dimension {dims[0]} at budget, {dims[1]} at twice the budget")
        self.step = step
        self.dims = dims


@dataclass
class PipelineResult:
    shape: tuple
    rank: int
    budget: int
    verdict: str
    steps: List[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "shape": list(self.shape),
            "rank": self.rank,
            "budget": self.budget,
            "verdict": self.verdict,
            "steps": self.steps,
        }


def _bidual_step(name: str, phi, budget: int, seed: int, tol: Tolerance) -> dict:
    probe: BidualProbe = probe_bidual(phi, budget, seed, tol, check_stability=True)
    if not probe.stable:
        raise RankInstabilityError(name, (probe.dimension, probe.dimension_at_double))
    return {
        "step": name,
        "bidual_dimension": probe.dimension,
        "dimension_at_double_budget": probe.dimension_at_double,
        "samples": probe.sample_count,
    }


def pipeline_marciniak(s, budget: Optional[int] = None, seed: int = 42,
                       tol: Tolerance = DEFAULT_TOL) -> PipelineResult:
    s = as_matrix(s)
    m, n = s.shape
    budget = default_budget(m, n) if budget is None else budget
    u, sigma, v, r = svd_reduce(s, tol)
    residual = float(np.max(np.abs(u @ sigma @ v.conj().T - s)))
    steps = [{"step": "svd_reduce", "rank": r, "reconstruction_residual": residual}]

    step2 = _bidual_step("bidual_ad_sigma", ad(sigma), budget, seed, tol)
    steps.append(step2)

    ident = woronowicz_verdict(identity_map(r), seed=seed, tol=tol)
    steps.append({"step": "woronowicz_identity", "r": r, **ident.as_dict()})

    embed, _ = st_maps(r, n)
    _, compress = st_maps(r, m)
    for name, phi in (("woronowicz_S", embed), ("woronowicz_T", compress)):
        rep = woronowicz_verdict(phi, seed=seed, tol=tol)
        steps.append({"step": name, "dims": [phi.m, phi.n], **rep.as_dict()})

    step5a = _bidual_step("bidual_ad_s", ad(s), budget, seed, tol)
    step5b = _bidual_step("bidual_ad_s_transpose", compose(ad(s), transpose_map(m)), budget, seed, tol)
    steps += [step5a, step5b]

    ident_ok = ident.verdict.value == "exposed_by_theorem"
    certified = ident_ok and all(st["bidual_dimension"] == 1 for st in (step2, step5a, step5b))
    return PipelineResult((m, n), r, budget, EXPOSED if certified else NOT_CERTIFIED, steps)

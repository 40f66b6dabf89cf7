"""Influence diagnostics: single-deletion table and greedy scene removal.

The greedy loop repeatedly deletes the scene whose removal leaves the
highest lower confidence endpoint for the dispersion index, recording one
step per removal, and stops as soon as the current endpoint is no longer
strictly positive (the dispersion test would no longer reject), or at the
removal cap. Ties are broken by scene id, numerically when ids are digit
strings, so the outcome does not depend on input row order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .directional import ZERO_TOL, OpsSummary, coplanarity_test
from .errors import EmptySample, FocalMean, InvalidLevel
from .geometry import DirectionSample

STOP_NONPOSITIVE = "lower_endpoint_nonpositive"
STOP_MAX_REMOVALS = "max_removals_reached"
STOP_NO_IMPROVEMENT = "no_improvement"


def _scene_order_key(scene_id: str):
    # digit-string ids sort numerically so ordering is permutation-invariant
    if scene_id.isdigit():
        return (0, int(scene_id), scene_id)
    return (1, 0, scene_id)


@dataclass(frozen=True)
class LeaveOneOutRow:
    """Recomputed summary statistics with one scene deleted."""

    scene_id: str
    total_variance: float
    se: float
    z: float
    ci_lower: float
    degenerate: bool
    focal: bool


def leave_one_out(
    sample: DirectionSample, alpha: float = 0.05, df: Optional[int] = None
) -> List[LeaveOneOutRow]:
    """Single-deletion dispersion table, one row per scene in sample order.

    A deletion that leaves a focal mean is flagged on its row (statistics
    NaN) rather than raised: the table is a diagnostic, not an analysis.
    """
    if sample.n < 3:
        raise EmptySample("need at least three scenes for single-deletion diagnostics")
    if not 0.0 < alpha < 1.0:
        raise InvalidLevel(f"alpha must be in (0, 1), got {alpha}")
    rows: List[LeaveOneOutRow] = []
    for i in range(sample.n):
        sid = sample.scene_ids[i]
        try:
            s = coplanarity_test(sample.without(i), alpha, df)
            rows.append(
                LeaveOneOutRow(
                    scene_id=sid,
                    total_variance=s.total_variance,
                    se=s.se,
                    z=s.z,
                    ci_lower=s.ci[0],
                    degenerate=s.degenerate,
                    focal=False,
                )
            )
        except FocalMean:
            rows.append(
                LeaveOneOutRow(
                    scene_id=sid,
                    total_variance=math.nan,
                    se=math.nan,
                    z=math.nan,
                    ci_lower=math.nan,
                    degenerate=False,
                    focal=True,
                )
            )
    return rows


@dataclass(frozen=True)
class ReductionStep:
    """One greedy removal: who was removed and the summary afterwards."""

    removed_scene_id: str
    summary: OpsSummary
    ci_lower: float


@dataclass(frozen=True)
class ReductionTrace:
    """Outcome of the greedy removal loop."""

    steps: Tuple[ReductionStep, ...]
    alpha_ref: float
    initial_scene_ids: Tuple[str, ...]
    final_scene_ids: Tuple[str, ...]
    stopped_reason: str

    @property
    def removed_scene_ids(self) -> Tuple[str, ...]:
        return tuple(step.removed_scene_id for step in self.steps)


def greedy_reduce(
    sample: DirectionSample,
    alpha_ref: float = 0.05,
    max_removals: Optional[int] = None,
    df: Optional[int] = None,
) -> ReductionTrace:
    """Remove scenes one at a time, keeping the lower endpoint maximal.

    Each iteration evaluates every single deletion from the current sample
    and removes the argmax of the post-deletion CI lower endpoint at level
    alpha_ref. The loop stops, checking before each removal, when the
    current endpoint is at most the fp zero floor (the test no longer
    rejects), when max_removals (default n // 4) have been removed, or when
    no deletion can be evaluated at all.

    Args:
        sample: registered directions, n >= 3.
        alpha_ref: reference level for the endpoints.
        max_removals: safety cap, >= 0; defaults to n // 4.
        df: chi-square dof forwarded to the per-step summaries.
    """
    if sample.n < 3:
        raise EmptySample("need at least three scenes to reduce")
    if not 0.0 < alpha_ref < 1.0:
        raise InvalidLevel(f"alpha_ref must be in (0, 1), got {alpha_ref}")
    if max_removals is None:
        max_removals = sample.n // 4
    if max_removals < 0:
        raise ValueError("max_removals must be >= 0")

    current = sample
    steps: List[ReductionStep] = []
    reason = STOP_MAX_REMOVALS
    while True:
        summary = coplanarity_test(current, alpha_ref, df)
        if summary.ci[0] <= ZERO_TOL:
            reason = STOP_NONPOSITIVE
            break
        if len(steps) >= max_removals or current.n <= 3:
            reason = STOP_MAX_REMOVALS
            break

        best: Optional[Tuple[float, int, OpsSummary]] = None
        for i in range(current.n):
            try:
                cand = coplanarity_test(current.without(i), alpha_ref, df)
            except FocalMean:
                continue
            lower = cand.ci[0]
            if (
                best is None
                or lower > best[0]
                or (
                    lower == best[0]
                    and _scene_order_key(current.scene_ids[i])
                    < _scene_order_key(current.scene_ids[best[1]])
                )
            ):
                best = (lower, i, cand)
        if best is None:
            reason = STOP_NO_IMPROVEMENT
            break

        lower, idx, cand_summary = best
        steps.append(
            ReductionStep(
                removed_scene_id=current.scene_ids[idx],
                summary=cand_summary,
                ci_lower=lower,
            )
        )
        current = current.without(idx)

    return ReductionTrace(
        steps=tuple(steps),
        alpha_ref=alpha_ref,
        initial_scene_ids=sample.scene_ids,
        final_scene_ids=current.scene_ids,
        stopped_reason=reason,
    )

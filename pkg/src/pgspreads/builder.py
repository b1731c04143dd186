"""Hyperplane-anchored construction of maximal partial spreads in PG(5,q).

Starting point is a size-(q^3+1) maximal partial spread of the hyperplane
H = {x5 = 0}, which leaves q^2 holes inside H. Covering those holes with
q^2 lines from outside H saturates H and yields a maximal partial spread
of size q^3+q^2+1. Each ladder step then trades one line resident in H
for q+1 external lines through its points, growing the size by exactly q
while keeping H saturated, up to k = floor((q^3-q^2)/(q+1)) steps. The
line-finding primitive underneath is a deterministic scan that succeeds
whenever fewer than q^3 external lines are in play.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import constructions
from .certificate import Certificate
from .projgeom import GeometryContext, GeometryError, Hyperplane, Line, context_make
from .spreadcore import (
    ORIGIN_EXTERNAL,
    ORIGIN_RESIDENT,
    PartialSpread,
    extension_witness,
    hyperplane_saturated,
)


class LadderError(ValueError):
    """Precondition failure in the construction machinery."""


class CandidateExhaustionError(RuntimeError):
    """No free line found although fewer than q^3 lines were avoided.

    This is guaranteed impossible for valid inputs, so hitting it means a
    geometry bug, not an unlucky instance.
    """


def max_ladder_steps(q: int) -> int:
    """Largest number of resident-line exchanges the size ladder supports."""
    if q < 2:
        raise LadderError(f"q must be at least 2, got {q}")
    return (q**3 - q**2) // (q + 1)


def skew_line_through(
    ctx: GeometryContext,
    hyperplane: Hyperplane,
    x: int,
    avoid: list[Line],
    covered: np.ndarray | None = None,
) -> Line:
    """A line through x, not inside the hyperplane, skew to every avoided line.

    ``avoid`` must hold fewer than q^3 lines, each meeting the hyperplane
    in exactly one point different from x. Candidates are the q^4 lines
    through x leaving the hyperplane, enumerated by scanning the points
    off the hyperplane in id order; each avoided line can block at most q
    of them, so a free candidate always exists. The optional ``covered``
    mask is an extra safety screen: every point of the returned line must
    be unmarked in it.
    """
    q = ctx.q
    if not hyperplane.contains_point(x):
        raise LadderError(f"point {x} is not on the hyperplane")
    if len(avoid) >= q**3:
        raise LadderError(f"{len(avoid)} avoided lines; the scan needs fewer than {q**3}")
    blocked = np.zeros(ctx.n_points, dtype=bool)
    for line in avoid:
        pts = list(line.points)
        if x in pts:
            raise LadderError(f"avoided line {line.points} passes through x={x}")
        if len(hyperplane.line_intersection(line)) != 1:
            raise LadderError(
                f"avoided line {line.points} must meet the hyperplane in exactly one point"
            )
        blocked[pts] = True
    for p in hyperplane.complement_ids:
        p = int(p)
        if blocked[p] or (covered is not None and covered[p]):
            continue
        line = ctx.line_span(x, p)
        pts = list(line.points)
        if blocked[pts].any():
            continue
        if covered is not None and covered[pts].any():
            continue
        return line
    raise CandidateExhaustionError(
        f"no free line through {x} off the hyperplane with {len(avoid)} avoided lines"
    )


def _external_lines(spread: PartialSpread) -> list[Line]:
    return [
        line
        for line, origin in zip(spread.lines, spread.origins)
        if origin != ORIGIN_RESIDENT
    ]


def cover_hyperplane_holes(
    ctx: GeometryContext, hyperplane: Hyperplane, resident: PartialSpread
) -> PartialSpread:
    """Extend a size-(q^3+1) hyperplane spread to size q^3+q^2+1.

    The q^2 holes the resident spread leaves inside the hyperplane are
    covered one by one, in ascending id order, each by a fresh line from
    outside the hyperplane that stays skew to everything added so far.
    The result saturates the hyperplane and is therefore maximal.
    """
    q = ctx.q
    if resident.ctx is not ctx:
        raise LadderError("resident spread belongs to a different context")
    if resident.size != q**3 + 1:
        raise LadderError(
            f"seed spread has size {resident.size}, expected q^3+1 = {q**3 + 1}"
        )
    for line in resident.lines:
        if not hyperplane.contains_line(line):
            raise LadderError(f"seed line {line.points} is not inside the hyperplane")
    holes_in_h = resident.holes(restrict=hyperplane)
    if len(holes_in_h) != q**2:
        raise LadderError(
            f"seed leaves {len(holes_in_h)} holes in the hyperplane, expected {q**2}"
        )
    spread = resident.copy()
    added: list[Line] = []
    for x in holes_in_h:
        assert len(added) < q**3
        line = skew_line_through(ctx, hyperplane, int(x), added, covered=spread.covered)
        spread.insert(line, origin=ORIGIN_EXTERNAL)
        added.append(line)
    assert spread.size == q**3 + q**2 + 1
    assert hyperplane_saturated(spread, hyperplane)
    spread.assert_consistent()
    return spread


@dataclass
class LadderState:
    """One in-progress ladder run over a fixed hyperplane."""

    ctx: GeometryContext
    hyperplane: Hyperplane
    spread: PartialSpread
    steps_done: int = 0
    replaced: list[Line] = field(default_factory=list)

    @property
    def external_count(self) -> int:
        return sum(1 for o in self.spread.origins if o != ORIGIN_RESIDENT)

    def resident_lines(self) -> list[Line]:
        return [
            line
            for line, origin in zip(self.spread.lines, self.spread.origins)
            if origin == ORIGIN_RESIDENT
        ]

    def expected_size(self) -> int:
        q = self.ctx.q
        return q**3 + q**2 + self.steps_done * q + 1

    def check_invariants(self) -> None:
        q = self.ctx.q
        assert self.spread.size == self.expected_size()
        assert self.external_count == q**2 + self.steps_done * (q + 1)
        assert hyperplane_saturated(self.spread, self.hyperplane)
        self.spread.assert_consistent()


def ladder_step(state: LadderState, line: Line | None = None) -> LadderState:
    """Swap one hyperplane-resident line for q+1 external covering lines.

    Removing the resident line uncovers its q+1 points inside the
    hyperplane; each gets a fresh external line through it, screened
    against every external line currently in play. Net size gain is q and
    the hyperplane ends up saturated again.
    """
    ctx, spread, hyperplane = state.ctx, state.spread, state.hyperplane
    q = ctx.q
    if line is None:
        residents = state.resident_lines()
        if not residents:
            raise LadderError("no hyperplane-resident line left to replace")
        line = min(residents)
    index = spread.lines.index(line)
    if spread.origins[index] != ORIGIN_RESIDENT:
        raise LadderError(f"line {line.points} is not hyperplane-resident")
    if state.external_count + q + 1 > q**3:
        raise LadderError(
            f"replacing another line needs {state.external_count + q + 1} external "
            f"lines, past the q^3 = {q**3} scan budget"
        )
    spread.remove_at(index)
    new_lines = []
    for j, x in enumerate(line.points):
        avoid = _external_lines(spread)
        assert len(avoid) == q**2 + state.steps_done * (q + 1) + j < q**3
        fresh = skew_line_through(ctx, hyperplane, x, avoid, covered=spread.covered)
        spread.insert(fresh, origin=ORIGIN_EXTERNAL)
        new_lines.append(fresh)
    touched = {hyperplane.line_intersection(l)[0] for l in new_lines}
    assert touched == set(line.points)
    state.replaced.append(line)
    state.steps_done += 1
    state.check_invariants()
    return state


def start_ladder(
    ctx: GeometryContext, seed4: PartialSpread | None = None
) -> LadderState:
    """Embed a PG(4,q) seed into the x5=0 hyperplane and saturate it."""
    if ctx.n != 5:
        raise GeometryError(f"ladder runs in PG(5,q), got n={ctx.n}")
    hyperplane = constructions.construction_hyperplane(ctx)
    if seed4 is None:
        seed4 = constructions.max_partial_spread_pg4(context_make(ctx.q, 4))
    resident = constructions.embed_in_hyperplane(ctx, seed4, hyperplane)
    spread = cover_hyperplane_holes(ctx, hyperplane, resident)
    state = LadderState(ctx=ctx, hyperplane=hyperplane, spread=spread)
    state.check_invariants()
    return state


def build_ladder(
    ctx: GeometryContext,
    k: int,
    seed4: PartialSpread | None = None,
    verify: bool = True,
) -> Certificate:
    """Verified maximal partial spread of size q^3+q^2+kq+1 as a certificate.

    k = 0 reproduces the base size q^3+q^2+1; every further step replaces
    the least remaining resident line. Identical inputs give byte-identical
    certificates. Verification checks the exact size, hyperplane
    saturation, and maximality independently.
    """
    q = ctx.q
    if not 0 <= k <= max_ladder_steps(q):
        raise LadderError(
            f"k={k} out of range: the ladder supports 0 <= k <= {max_ladder_steps(q)} for q={q}"
        )
    state = start_ladder(ctx, seed4)
    for _ in range(k):
        ladder_step(state)
    spread = state.spread
    assert spread.size == q**3 + q**2 + k * q + 1
    if verify:
        assert hyperplane_saturated(spread, state.hyperplane)
        witness = extension_witness(spread)
        assert witness is None, f"ladder output unexpectedly extendable by {witness}"
    return Certificate.from_spread(spread, tag=f"ladder-{k}")

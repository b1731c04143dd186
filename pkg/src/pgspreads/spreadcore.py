"""Partial spread state, hole accounting, and the maximality verifier.

A partial spread is a set of pairwise skew lines. Membership screening
runs against a dense covered-point array, so inserting a line is O(q)
and the pairwise-skew invariant is equivalent to the counting identity
covered == (q+1) * size, which is asserted throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .projgeom import GeometryContext, Hyperplane, Line

ORIGIN_RESIDENT = "hyperplane-resident"
ORIGIN_EXTERNAL = "external"
ORIGIN_SEARCH = "search-added"
ORIGIN_CONSTRUCTION = "construction"


class SpreadConflictError(ValueError):
    """Attempted to insert a line that meets the spread."""

    def __init__(self, line: Line, blocking_point: int):
        super().__init__(
            f"line {line.points} conflicts with the spread at point {blocking_point}"
        )
        self.line = line
        self.blocking_point = blocking_point


@dataclass
class DeficiencyReport:
    q: int
    n: int
    size: int
    spread_size: int
    deficiency: int
    maximal: bool
    delta_min: int | None = None

    def __str__(self) -> str:
        state = "maximal" if self.maximal else "extendable"
        return f"size {self.size}, deficiency {self.deficiency} ({state})"


class PartialSpread:
    """Mutable set of pairwise skew lines with dense covered-point tracking.

    Single writer; hand out copies for concurrent readers. Insertion
    order is preserved together with a per-line origin tag.
    """

    def __init__(self, ctx: GeometryContext):
        self.ctx = ctx
        self.lines: list[Line] = []
        self.origins: list[str] = []
        self.covered = np.zeros(ctx.n_points, dtype=bool)

    @property
    def size(self) -> int:
        return len(self.lines)

    def copy(self) -> "PartialSpread":
        dup = PartialSpread(self.ctx)
        dup.lines = list(self.lines)
        dup.origins = list(self.origins)
        dup.covered = self.covered.copy()
        return dup

    def can_insert(self, line: Line) -> bool:
        return not self.covered[list(line.points)].any()

    def insert(self, line: Line, origin: str = ORIGIN_SEARCH) -> None:
        pts = list(line.points)
        hits = self.covered[pts]
        if hits.any():
            raise SpreadConflictError(line, pts[int(hits.argmax())])
        self.covered[pts] = True
        self.lines.append(line)
        self.origins.append(origin)

    def remove_at(self, index: int) -> Line:
        """Drop one member; covered is rebuilt from scratch (removals are
        rare next to insert/screen traffic)."""
        line = self.lines.pop(index)
        self.origins.pop(index)
        self._rebuild_covered()
        return line

    def remove_many(self, indices) -> list[Line]:
        removed = []
        for index in sorted(indices, reverse=True):
            removed.append(self.lines.pop(index))
            self.origins.pop(index)
        self._rebuild_covered()
        return removed

    def remove(self, line: Line) -> Line:
        return self.remove_at(self.lines.index(line))

    def _rebuild_covered(self) -> None:
        self.covered = np.zeros(self.ctx.n_points, dtype=bool)
        for line in self.lines:
            self.covered[list(line.points)] = True

    def holes(self, restrict: Hyperplane | None = None) -> np.ndarray:
        uncovered = ~self.covered
        if restrict is not None:
            uncovered = uncovered & restrict.mask
        return np.flatnonzero(uncovered)

    def assert_consistent(self) -> None:
        q = self.ctx.q
        covered_count = int(self.covered.sum())
        assert covered_count == (q + 1) * self.size, (
            f"covered count {covered_count} != (q+1)*size {(q + 1) * self.size}"
        )

    def __repr__(self) -> str:
        return f"PartialSpread(q={self.ctx.q}, n={self.ctx.n}, size={self.size})"


def lines_within(ctx: GeometryContext, point_ids, first_only: bool = False):
    """Lines of PG(n,q) lying entirely inside a point set.

    Works per anchor point a in ascending id order: every other member b
    of the set is projected into the quotient space modulo a and bucketed
    by its normalized image, which is constant exactly on the punctured
    lines through a. A bucket of q members means the full line {a} union
    bucket sits inside the set. Restricting b > a makes every such line
    surface exactly once, at its minimal point.

    Returns the list of all such lines, or with ``first_only`` the
    lexicographically least one (None when the set contains no line).
    """
    q = ctx.q
    ids = np.asarray(sorted(int(p) for p in point_ids), dtype=np.int64)
    found: list[Line] = []
    if len(ids) < q + 1:
        return None if first_only else found
    pts = ctx.points
    for idx in range(len(ids)):
        rest = ids[idx + 1 :]
        if len(rest) < q:
            break
        a = int(ids[idx])
        va = pts[a]
        pivot_col = int((va != 0).argmax())
        block = pts[rest]
        coef = block[:, pivot_col]
        proj = ctx.field.vsub(block, ctx.field.vmul(coef[:, None], va[None, :]))
        keys = ctx.keys_of(ctx.normalize_rows(proj))
        order = np.argsort(keys, kind="stable")
        sorted_keys = keys[order]
        bounds = np.flatnonzero(
            np.r_[True, sorted_keys[1:] != sorted_keys[:-1], True]
        )
        runs = np.diff(bounds)
        hits = []
        for r in np.flatnonzero(runs == q):
            members = rest[order[bounds[r] : bounds[r] + q]]
            hits.append(Line(points=tuple([a] + sorted(int(m) for m in members))))
        if hits:
            if first_only:
                return min(hits)
            found.extend(sorted(hits))
    return None if first_only else found


def extension_witness(spread: PartialSpread) -> Line | None:
    """The lexicographically least line extending the spread, if any.

    Candidate lines are enumerated inside the hole set only: any line
    insertable into the spread must consist entirely of holes, so if the
    hole set holds fewer than q+1 points the spread is maximal outright.
    """
    holes = spread.holes()
    if len(holes) < spread.ctx.q + 1:
        return None
    return lines_within(spread.ctx, holes, first_only=True)


def is_maximal(spread: PartialSpread) -> bool:
    return extension_witness(spread) is None


def hyperplane_saturated(spread: PartialSpread, hyperplane: Hyperplane) -> bool:
    """True when every point of the hyperplane is covered.

    Every line of the space meets every hyperplane, so a saturated
    hyperplane leaves no room for an extension line and forces
    maximality.
    """
    return bool(spread.covered[hyperplane.ids].all())


def spread_size(q: int, n: int) -> int:
    if n % 2 == 0:
        raise ValueError(f"PG({n},{q}) has no spreads: n must be odd")
    return (q ** (n + 1) - 1) // (q**2 - 1)


def deficiency(
    spread: PartialSpread, verified_maximal: bool | None = None
) -> DeficiencyReport:
    """Distance of the spread size from a full spread of the same space."""
    ctx = spread.ctx
    full = spread_size(ctx.q, ctx.n)
    if verified_maximal is None:
        verified_maximal = is_maximal(spread)
    delta = full - spread.size
    assert delta >= 0
    return DeficiencyReport(
        q=ctx.q,
        n=ctx.n,
        size=spread.size,
        spread_size=full,
        deficiency=delta,
        maximal=verified_maximal,
    )

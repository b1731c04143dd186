"""Combinatorial model of the projective space PG(N,q).

Points are normalized coordinate vectors (first nonzero entry 1) indexed
in lexicographic order; a line is the sorted tuple of the q+1 point ids it
contains. The full line set is materialized lazily and only for spaces
small enough to hold it; everything else is generated on demand through
``line_span``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .gf import Field, field_make

# Materializing the line table is refused beyond this many lines
# (PG(5,5) has 508431 and fits fine; PG(5,7) at ~6.9M does not pay off).
LINE_TABLE_LIMIT = 600_000


class GeometryError(ValueError):
    """Bad coordinates, unsupported parameters, or degenerate input."""


def counts(q: int, n: int) -> tuple[int, int, int | None]:
    """Closed-form point, line and spread-size counts for PG(n,q).

    The spread size (q^(n+1)-1)/(q^2-1) only exists for odd n and is
    returned as None otherwise.
    """
    points = (q ** (n + 1) - 1) // (q - 1)
    lines = (q ** (n + 1) - 1) * (q**n - 1) // ((q**2 - 1) * (q - 1))
    spread = (q ** (n + 1) - 1) // (q**2 - 1) if n % 2 == 1 else None
    return points, lines, spread


def normalize_point(field: Field, v) -> tuple[int, ...]:
    """Scale a nonzero vector so its first nonzero coordinate is 1."""
    v = tuple(int(x) for x in v)
    for x in v:
        if not 0 <= x < field.q:
            raise GeometryError(f"coordinate {x} out of range for GF({field.q})")
    pivot = next((x for x in v if x != 0), 0)
    if pivot == 0:
        raise GeometryError("cannot normalize the zero vector")
    s = field.inv(pivot)
    return tuple(field.mul(s, x) for x in v)


@dataclass(frozen=True, order=True)
class Line:
    """A line of PG(N,q), identified by its sorted point-id tuple."""

    points: tuple[int, ...]

    @property
    def basis(self) -> tuple[int, int]:
        return self.points[0], self.points[1]

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Hyperplane:
    """Point set of a hyperplane, kept both as a mask and an id array."""

    covector: tuple[int, ...]
    mask: np.ndarray
    ids: np.ndarray

    def contains_point(self, pid: int) -> bool:
        return bool(self.mask[pid])

    def contains_line(self, line: Line) -> bool:
        return bool(self.mask[list(line.points)].all())

    def line_intersection(self, line: Line) -> list[int]:
        return [p for p in line.points if self.mask[p]]

    @cached_property
    def complement_ids(self) -> np.ndarray:
        return np.flatnonzero(~self.mask)

    def __len__(self) -> int:
        return len(self.ids)


class GeometryContext:
    """Immutable enumeration of PG(n,q): point table, id maps, line access.

    Construction enumerates every normalized vector once; all later
    lookups are table driven. Instances are safe to share across
    concurrent readers, the only mutable state is the lazily built and
    internally completed line table.
    """

    def __init__(self, q: int, n: int):
        if n not in (2, 3, 4, 5):
            raise GeometryError(f"unsupported projective dimension {n}")
        self.field = field_make(q)
        self.q = q
        self.n = n
        self._build_points()
        self._line_matrix: np.ndarray | None = None

    def _build_points(self) -> None:
        q, n = self.q, self.n
        total = q ** (n + 1)
        keys = np.arange(total, dtype=np.int64)
        digits = np.zeros((total, n + 1), dtype=np.uint8)
        rest = keys.copy()
        for i in range(n, -1, -1):
            digits[:, i] = rest % q
            rest //= q
        nonzero = digits != 0
        has_any = nonzero.any(axis=1)
        first = nonzero.argmax(axis=1)
        lead = digits[np.arange(total), first]
        normalized = has_any & (lead == 1)
        pts = digits[normalized]
        pts.setflags(write=False)
        self.points = pts
        self.n_points = len(pts)
        self.radix = np.array([q**i for i in range(n, -1, -1)], dtype=np.int64)
        key_to_id = np.full(total, -1, dtype=np.int32)
        key_to_id[keys[normalized]] = np.arange(self.n_points, dtype=np.int32)
        key_to_id.setflags(write=False)
        self._key_to_id = key_to_id
        expected, _, _ = counts(q, n)
        assert self.n_points == expected

    @property
    def n_lines(self) -> int:
        return counts(self.q, self.n)[1]

    def coords(self, pid: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.points[pid])

    def point_id(self, coords) -> int:
        v = normalize_point(self.field, coords)
        key = sum(int(c) * int(r) for c, r in zip(v, self.radix))
        pid = int(self._key_to_id[key])
        assert pid >= 0
        return pid

    def keys_of(self, rows: np.ndarray) -> np.ndarray:
        return rows.astype(np.int64) @ self.radix

    def normalize_rows(self, rows: np.ndarray) -> np.ndarray:
        """Vectorized projective normalization of nonzero rows."""
        nz = rows != 0
        first = nz.argmax(axis=1)
        pivots = rows[np.arange(len(rows)), first]
        return self.field.vmul(rows, self.field.vinv(pivots)[:, None])

    def ids_of_rows(self, rows: np.ndarray) -> np.ndarray:
        return self._key_to_id[self.keys_of(self.normalize_rows(rows))]

    def line_span(self, a: int, b: int) -> Line:
        """The unique line through two distinct points."""
        if a == b:
            raise GeometryError(f"line_span needs two distinct points, got {a} twice")
        f = self.field
        va, vb = self.points[a], self.points[b]
        ids = {a, b}
        for lam in range(1, self.q):
            w = f.vadd(va, f.vmul(np.uint8(lam), vb))
            ids.add(int(self.ids_of_rows(w[None, :])[0]))
        assert len(ids) == self.q + 1
        return Line(points=tuple(sorted(ids)))

    def lines_skew(self, l1: Line, l2: Line) -> bool:
        """Distinct lines of a projective space meet in at most one point,
        so disjoint point sets characterize skewness exactly."""
        return not set(l1.points) & set(l2.points)

    def hyperplane(self, covector) -> Hyperplane:
        c = tuple(int(x) for x in covector)
        if len(c) != self.n + 1:
            raise GeometryError(f"covector must have {self.n + 1} entries")
        if all(x == 0 for x in c):
            raise GeometryError("zero covector does not define a hyperplane")
        f = self.field
        acc = np.zeros(self.n_points, dtype=np.uint8)
        for i, ci in enumerate(c):
            if ci:
                acc = f.vadd(acc, f.vmul(self.points[:, i], np.uint8(ci)))
        mask = acc == 0
        mask.setflags(write=False)
        ids = np.flatnonzero(mask)
        ids.setflags(write=False)
        return Hyperplane(covector=c, mask=mask, ids=ids)

    def iter_lines(self):
        """Stream every line exactly once.

        Lines are enumerated through their reduced 2x(n+1) echelon bases:
        pivot columns i<j, row one has 1 at i, 0 at j and free entries
        elsewhere right of i, row two has 1 at j and free entries right
        of j. All q+1 point representatives that enumeration produces are
        already normalized, so each line costs only id lookups.
        """
        f = self.field
        n1 = self.n + 1
        lams = list(range(self.q))
        for i in range(n1):
            for j in range(i + 1, n1):
                free1 = [c for c in range(i + 1, n1) if c != j]
                free2 = list(range(j + 1, n1))
                for vals1 in itertools.product(range(self.q), repeat=len(free1)):
                    r1 = np.zeros(n1, dtype=np.uint8)
                    r1[i] = 1
                    r1[free1] = vals1
                    for vals2 in itertools.product(range(self.q), repeat=len(free2)):
                        r2 = np.zeros(n1, dtype=np.uint8)
                        r2[j] = 1
                        r2[free2] = vals2
                        ids = [int(self._key_to_id[int(r2 @ self.radix)])]
                        for lam in lams:
                            w = f.vadd(r1, f.vmul(np.uint8(lam), r2))
                            ids.append(int(self._key_to_id[int(w @ self.radix)]))
                        yield Line(points=tuple(sorted(ids)))

    def line_matrix(self) -> np.ndarray:
        """All lines as a (n_lines, q+1) id matrix, rows sorted lexicographically.

        Refused for spaces past LINE_TABLE_LIMIT; stream with iter_lines
        instead.
        """
        if self._line_matrix is None:
            if self.n_lines > LINE_TABLE_LIMIT:
                raise GeometryError(
                    f"PG({self.n},{self.q}) has {self.n_lines} lines; "
                    "use iter_lines() instead of materializing them"
                )
            mat = np.array([l.points for l in self.iter_lines()], dtype=np.int32)
            mat = mat[np.lexsort(mat.T[::-1])]
            mat.setflags(write=False)
            self._line_matrix = mat
            assert len(mat) == self.n_lines
        return self._line_matrix

    def lines_through(self, pid: int) -> list[Line]:
        """Every line through one point, built on demand."""
        seen = np.zeros(self.n_points, dtype=bool)
        seen[pid] = True
        out = []
        for b in range(self.n_points):
            if seen[b]:
                continue
            line = self.line_span(pid, b)
            seen[list(line.points)] = True
            out.append(line)
        return sorted(out)

    def __repr__(self) -> str:
        return f"GeometryContext(q={self.q}, n={self.n})"


def context_make(q: int, n: int) -> GeometryContext:
    return GeometryContext(q, n)

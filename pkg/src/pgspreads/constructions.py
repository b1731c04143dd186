"""Deterministic algebraic spread constructions.

Two classical objects are built here directly instead of searched for:

* the largest maximal partial line spread of PG(4,q), of size q^3+1,
  realized as the graphs of the multiplication maps of GF(q^3) restricted
  to a 2-dimensional subspace, plus one line inside the residual plane;
* a full line spread of PG(5,q) from the GF(q^2)-subspace partition of
  GF(q^6).

Both come out verified by the generic machinery and give the search and
ladder layers reproducible starting material for every supported q.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .gf import Field, field_make
from .projgeom import GeometryContext, GeometryError, Hyperplane, Line
from .spreadcore import ORIGIN_CONSTRUCTION, ORIGIN_RESIDENT, PartialSpread

# --------------------------------------------------------------------------
# Polynomial helpers over GF(q). Coefficients are tuples by ascending
# degree; all moduli are monic.
# --------------------------------------------------------------------------


def _poly_divmod(field: Field, a: tuple, b: tuple) -> tuple[tuple, tuple]:
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    inv_lb = field.inv(lb)
    quo = [0] * max(len(a) - db, 1)
    for i in range(len(a) - 1, db - 1, -1):
        c = field.mul(a[i], inv_lb)
        if c:
            quo[i - db] = c
            for j in range(db + 1):
                a[i - db + j] = field.sub(a[i - db + j], field.mul(c, b[j]))
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return tuple(quo), tuple(a)


def _int_to_poly(field: Field, k: int, degree: int) -> tuple:
    coeffs = []
    for _ in range(degree):
        coeffs.append(k % field.q)
        k //= field.q
    return tuple(coeffs) + (1,)


@lru_cache(maxsize=None)
def irreducible_poly(q: int, degree: int) -> tuple:
    """Least monic irreducible polynomial of the given degree over GF(q).

    Candidates are scanned in base-q counter order of their non-leading
    coefficients and trial-divided by every lower-degree irreducible up
    to half the degree.
    """
    field = field_make(q)
    by_degree: dict[int, list[tuple]] = {}
    for d in range(1, degree + 1):
        irr: list[tuple] = []
        for k in range(q**d):
            f = _int_to_poly(field, k, d)
            divisible = False
            for e in range(1, d // 2 + 1):
                for g in by_degree.get(e, ()):
                    if all(c == 0 for c in _poly_divmod(field, f, g)[1]):
                        divisible = True
                        break
                if divisible:
                    break
            if not divisible:
                if d == degree:
                    return f
                irr.append(f)
        by_degree[d] = irr
    raise AssertionError(f"no irreducible polynomial of degree {degree} over GF({q})")


def _ext_mul(field: Field, a: tuple, b: tuple, modulus: tuple) -> tuple:
    d = len(modulus) - 1
    prod = [0] * (2 * d - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                if cb:
                    prod[i + j] = field.add(prod[i + j], field.mul(ca, cb))
    for i in range(2 * d - 2, d - 1, -1):
        c = prod[i]
        if c:
            prod[i] = 0
            for j in range(d):
                prod[i - d + j] = field.sub(prod[i - d + j], field.mul(c, modulus[j]))
    return tuple(prod[:d])


def _ext_pow(field: Field, a: tuple, e: int, modulus: tuple) -> tuple:
    d = len(modulus) - 1
    out = (1,) + (0,) * (d - 1)
    base = a
    while e:
        if e & 1:
            out = _ext_mul(field, out, base, modulus)
        base = _ext_mul(field, base, base, modulus)
        e >>= 1
    return out


def _kernel_basis(field: Field, matrix: np.ndarray) -> list[np.ndarray]:
    """Basis of the right kernel of a matrix over GF(q) (Gaussian elimination)."""
    m = matrix.astype(np.uint8).copy()
    rows, cols = m.shape
    pivot_cols = []
    r = 0
    for c in range(cols):
        sel = next((i for i in range(r, rows) if m[i, c]), None)
        if sel is None:
            continue
        m[[r, sel]] = m[[sel, r]]
        m[r] = field.vmul(m[r], np.uint8(field.inv(int(m[r, c]))))
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] = field.vsub(m[i], field.vmul(np.uint8(int(m[i, c])), m[r]))
        pivot_cols.append(c)
        r += 1
        if r == rows:
            break
    basis = []
    free_cols = [c for c in range(cols) if c not in pivot_cols]
    for fc in free_cols:
        v = np.zeros(cols, dtype=np.uint8)
        v[fc] = 1
        for pr, pc in enumerate(pivot_cols):
            v[pc] = field.neg(int(m[pr, fc]))
        basis.append(v)
    return basis


# --------------------------------------------------------------------------
# PG(4,q): largest maximal partial spread, size q^3 + 1.
# --------------------------------------------------------------------------


def max_partial_spread_pg4(ctx: GeometryContext) -> PartialSpread:
    """Build the size-(q^3+1) maximal partial line spread of PG(4,q).

    Split the underlying vector space as U x GF(q^3) with U the span of
    {1, t} inside GF(q^3). For every a in GF(q^3) the graph
    {(u, a*u) : u in U} is a 2-space, any two meet trivially, and
    together they cover every vector with nonzero U-part. One more line
    inside the residual plane {0} x GF(q^3) brings the size to q^3+1 and
    leaves q^2 holes forming a plane minus a line, which no line can sit
    inside, hence maximality.
    """
    if ctx.n != 4:
        raise GeometryError(f"largest-spread construction needs PG(4,q), got n={ctx.n}")
    field = ctx.field
    q = ctx.q
    modulus = irreducible_poly(q, 3)
    theta = (0, 1, 0)
    spread = PartialSpread(ctx)
    for k in range(q**3):
        a = _int_to_poly(field, k, 3)[:-1]
        b1 = (1, 0) + a
        b2 = (0, 1) + _ext_mul(field, a, theta, modulus)
        line = ctx.line_span(ctx.point_id(b1), ctx.point_id(b2))
        spread.insert(line, origin=ORIGIN_CONSTRUCTION)
    tail = ctx.line_span(ctx.point_id((0, 0, 1, 0, 0)), ctx.point_id((0, 0, 0, 1, 0)))
    spread.insert(tail, origin=ORIGIN_CONSTRUCTION)
    assert spread.size == q**3 + 1
    assert len(spread.holes()) == q**2
    spread.assert_consistent()
    return spread


# --------------------------------------------------------------------------
# PG(n,q), n odd: full line spread from the subfield partition.
# --------------------------------------------------------------------------


def full_line_spread(ctx: GeometryContext) -> PartialSpread:
    """A line spread covering all of PG(n,q), n odd.

    Model the vector space as GF(q^(n+1)) and partition its nonzero
    elements into the multiplicative cosets of GF(q^2)*; each coset plus
    zero is a 2-dimensional GF(q)-subspace, i.e. a line, and distinct
    cosets are disjoint. GF(q^2) is located inside GF(q^(n+1)) as the
    fixed space of the Frobenius power x -> x^(q^2).
    """
    if ctx.n % 2 == 0:
        raise GeometryError(f"PG({ctx.n},{ctx.q}) admits no line spread: n must be odd")
    field = ctx.field
    q = ctx.q
    d = ctx.n + 1
    modulus = irreducible_poly(q, d)
    x = tuple(1 if i == 1 else 0 for i in range(d))
    w = _ext_pow(field, x, q**2, modulus)
    frob = np.zeros((d, d), dtype=np.uint8)
    power = (1,) + (0,) * (d - 1)
    for i in range(d):
        frob[:, i] = power
        power = _ext_mul(field, power, w, modulus)
    ident = np.eye(d, dtype=np.uint8)
    basis = _kernel_basis(field, field.vsub(frob, ident))
    assert len(basis) == 2, "fixed space of x -> x^(q^2) must be 2-dimensional"
    w1, w2 = (tuple(int(c) for c in v) for v in basis)
    subfield = []
    for c1 in range(q):
        for c2 in range(q):
            if c1 == 0 and c2 == 0:
                continue
            vec = tuple(
                field.add(field.mul(c1, w1[i]), field.mul(c2, w2[i])) for i in range(d)
            )
            subfield.append(vec)

    spread = PartialSpread(ctx)
    claimed = np.zeros(q**d, dtype=bool)
    radix = [q**i for i in range(d - 1, -1, -1)]
    for key in range(1, q**d):
        if claimed[key]:
            continue
        digits = []
        rest = key
        for r in radix:
            digits.append(rest // r)
            rest %= r
        alpha = tuple(digits)
        ids = set()
        for s in subfield:
            vec = _ext_mul(field, alpha, s, modulus)
            claimed[sum(int(c) * r for c, r in zip(vec, radix))] = True
            ids.add(ctx.point_id(vec))
        assert len(ids) == q + 1
        spread.insert(Line(points=tuple(sorted(ids))), origin=ORIGIN_CONSTRUCTION)
    assert spread.covered.all()
    spread.assert_consistent()
    return spread


# --------------------------------------------------------------------------
# Embedding PG(4,q) spreads into the x5 = 0 hyperplane of PG(5,q).
# --------------------------------------------------------------------------


def construction_hyperplane(ctx: GeometryContext) -> Hyperplane:
    """The canonical hyperplane x_n = 0 used by all constructions."""
    c = [0] * (ctx.n + 1)
    c[-1] = 1
    return ctx.hyperplane(c)


def embed_in_hyperplane(
    ctx5: GeometryContext, spread4: PartialSpread, hyperplane: Hyperplane | None = None
) -> PartialSpread:
    """Lift a PG(4,q) spread into the x5 = 0 hyperplane of PG(5,q).

    Coordinates get a trailing zero appended; normalization is untouched
    by that, so the lift is an isomorphism onto the hyperplane.
    """
    if ctx5.n != 5 or spread4.ctx.n != 4 or ctx5.q != spread4.ctx.q:
        raise GeometryError("embedding expects a PG(4,q) spread and a PG(5,q) context")
    if hyperplane is None:
        hyperplane = construction_hyperplane(ctx5)
    lifted = PartialSpread(ctx5)
    for line in spread4.lines:
        a, b = line.basis
        ia = ctx5.point_id(spread4.ctx.coords(a) + (0,))
        ib = ctx5.point_id(spread4.ctx.coords(b) + (0,))
        image = ctx5.line_span(ia, ib)
        assert hyperplane.contains_line(image)
        lifted.insert(image, origin=ORIGIN_RESIDENT)
    lifted.assert_consistent()
    return lifted

"""Certificate file format and independent re-verification.

A certificate is a plain text file: a short header followed by one
record per line of the spread, each record being the coordinate vectors
of the line's two smallest points. Reconstruction via line spans plus a
full skewness and maximality check makes third-party re-verification
trivial and keeps the format diffable. Serialization is canonical
(records sorted by basis coordinates), so verified outputs round-trip
byte-identically.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gf import MODULI, SUPPORTED_ORDERS
from .projgeom import GeometryContext, GeometryError, Line, context_make
from .spreadcore import (
    PartialSpread,
    SpreadConflictError,
    extension_witness,
    spread_size,
)

FORMAT_MAGIC = "pgspreads-certificate"
FORMAT_VERSION = 1


class CertificateError(ValueError):
    """Malformed certificate file or inconsistent header."""


@dataclass
class Certificate:
    q: int
    n: int
    size: int
    tag: str
    records: list[tuple[tuple[int, ...], tuple[int, ...]]]
    seed: int | None = None

    @classmethod
    def from_spread(
        cls, spread: PartialSpread, tag: str, seed: int | None = None
    ) -> "Certificate":
        ctx = spread.ctx
        records = []
        for line in spread.lines:
            a, b = line.basis
            records.append((ctx.coords(a), ctx.coords(b)))
        records.sort()
        return cls(
            q=ctx.q, n=ctx.n, size=spread.size, tag=tag, records=records, seed=seed
        )

    def text(self) -> str:
        out = [f"{FORMAT_MAGIC} v{FORMAT_VERSION}"]
        out.append(f"q {self.q}")
        out.append(f"n {self.n}")
        out.append(f"size {self.size}")
        out.append(f"tag {self.tag}")
        if self.seed is not None:
            out.append(f"seed {self.seed}")
        if self.q in MODULI:
            out.append("modulus " + " ".join(str(c) for c in MODULI[self.q]))
        out.append("lines")
        for va, vb in sorted(self.records):
            out.append(" ".join(str(c) for c in va + vb))
        out.append("")
        return "\n".join(out)

    @classmethod
    def parse(cls, text: str) -> "Certificate":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith(FORMAT_MAGIC):
            raise CertificateError("not a certificate file")
        header: dict[str, str] = {}
        body_at = None
        for i, ln in enumerate(lines[1:], start=1):
            if ln == "lines":
                body_at = i + 1
                break
            key, _, value = ln.partition(" ")
            header[key] = value
        if body_at is None:
            raise CertificateError("missing 'lines' section")
        try:
            q = int(header["q"])
            n = int(header["n"])
            size = int(header["size"])
        except (KeyError, ValueError) as exc:
            raise CertificateError(f"bad header: {exc}") from exc
        if q not in SUPPORTED_ORDERS:
            raise CertificateError(f"unsupported field order {q}")
        tag = header.get("tag", "external")
        seed = int(header["seed"]) if "seed" in header else None
        if "modulus" in header:
            stated = tuple(int(c) for c in header["modulus"].split())
            if stated != MODULI.get(q):
                raise CertificateError(
                    f"modulus {stated} does not match the GF({q}) encoding"
                )
        elif q in MODULI:
            raise CertificateError(f"GF({q}) certificate must state its modulus")
        records = []
        width = n + 1
        for ln in lines[body_at:]:
            vals = [int(c) for c in ln.split()]
            if len(vals) != 2 * width:
                raise CertificateError(
                    f"record {ln!r} must hold 2 coordinate vectors of {width} entries"
                )
            records.append((tuple(vals[:width]), tuple(vals[width:])))
        if len(records) != size:
            raise CertificateError(
                f"header says size {size} but {len(records)} records follow"
            )
        return cls(q=q, n=n, size=size, tag=tag, records=records, seed=seed)


@dataclass
class VerificationReport:
    valid: bool
    maximal: bool
    size: int
    deficiency: int | None
    witness: Line | None
    error: str | None = None

    def verdict(self) -> str:
        if not self.valid:
            return f"invalid: {self.error}"
        head = "maximal" if self.maximal else "extendable"
        out = f"{head}, size {self.size}"
        if self.deficiency is not None:
            out += f", deficiency {self.deficiency}"
        if self.witness is not None:
            out += f", witness {self.witness.points}"
        return out


def rebuild_spread(
    cert: Certificate, ctx: GeometryContext | None = None
) -> PartialSpread:
    """Reconstruct the spread from basis coordinates, enforcing skewness.

    Nothing from the header beyond (n, q) is trusted: every record is
    re-normalized, re-spanned and screened against the covered set, so a
    duplicated or meeting pair raises immediately.
    """
    if ctx is None:
        ctx = context_make(cert.q, cert.n)
    spread = PartialSpread(ctx)
    for va, vb in cert.records:
        try:
            a = ctx.point_id(va)
            b = ctx.point_id(vb)
            line = ctx.line_span(a, b)
        except GeometryError as exc:
            raise CertificateError(f"bad record {va} {vb}: {exc}") from exc
        spread.insert(line, origin=cert.tag)
    spread.assert_consistent()
    return spread


def verify_certificate(
    cert: Certificate, ctx: GeometryContext | None = None
) -> VerificationReport:
    """Re-derive all lines and re-check skewness plus maximality."""
    try:
        spread = rebuild_spread(cert, ctx)
    except (CertificateError, SpreadConflictError, GeometryError) as exc:
        return VerificationReport(
            valid=False, maximal=False, size=0, deficiency=None, witness=None,
            error=str(exc),
        )
    witness = extension_witness(spread)
    maximal = witness is None
    delta = None
    if spread.ctx.n % 2 == 1:
        delta = spread_size(spread.ctx.q, spread.ctx.n) - spread.size
    return VerificationReport(
        valid=True,
        maximal=maximal,
        size=spread.size,
        deficiency=delta,
        witness=witness,
    )


def save(cert: Certificate, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(cert.text())


def load(path) -> Certificate:
    with open(path, "r", encoding="ascii") as fh:
        return Certificate.parse(fh.read())

"""Randomized search layer: greedy completion, remove-and-reinsert local
search toward target sizes, spectrum scans, and the per-q reference
bounds table.

Every certified output is re-verified from its serialized form alone, so
nothing downstream has to trust search state. All randomness flows from a
single 64-bit seed through ``random.Random``, making single-worker runs
reproducible bit for bit.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

import numpy as np

from . import builder, constructions
from .certificate import Certificate, verify_certificate
from .projgeom import GeometryContext, Line, context_make
from .spreadcore import (
    ORIGIN_SEARCH,
    PartialSpread,
    extension_witness,
    lines_within,
    spread_size,
)

SUPPORTED_Q = (2, 3, 4, 5, 7)

# q + epsilon(q) is the size of the smallest nontrivial blocking set of
# PG(2,q); the q=2 value is conventional. Maximal partial spreads cannot
# have deficiency strictly between 0 and epsilon.
EPSILON = {2: 2, 3: 3, 4: 3, 5: 4, 7: 5}


class SearchError(ValueError):
    pass


class SeedSearchError(RuntimeError):
    """Seed search ran out of budget; carries the best size reached."""

    def __init__(self, best_size: int, target: int):
        super().__init__(f"seed search stalled at size {best_size} (target {target})")
        self.best_size = best_size
        self.target = target


def min_mps_size(q: int) -> int:
    return q**3 + q**2 + 1


def delta_min(q: int) -> int:
    """Least possible positive deficiency of a maximal partial spread."""
    if q == 2:
        return 2
    root = math.isqrt(q)
    if root * root == q:
        return root + 1
    return (q + 3) // 2


@dataclass
class BoundsRow:
    """One reference row: attainable-size window for MPS of PG(5,q)."""

    q: int
    min_size: int
    epsilon: int
    delta_min: int
    max_size: int
    interval_boundary: int
    spread_size: int
    density_low_ln: float
    density_low_log2: float
    modified_low_ln: float
    modified_low_log2: float

    def table_cells(self) -> tuple:
        return (
            self.min_size,
            self.delta_min,
            self.max_size,
            self.interval_boundary,
            self.spread_size,
        )


def bounds_row(q: int) -> BoundsRow:
    """Reference values for q in {2,3,4,5,7}.

    min_size is the least MPS size q^3+q^2+1; the deficiency bound is 2
    for q=2, sqrt(q)+1 for square q and (q+3)/2 for odd prime q, which
    caps max_size at spread_size - delta_min. interval_boundary is
    spread_size - q + 1. The density lower bounds 9*5*q^3*log q and
    2*q^3*log q are reported in both log bases since the base choice is
    a known ambiguity.
    """
    if q not in SUPPORTED_Q:
        raise SearchError(f"no reference bounds for q={q}; supported: {SUPPORTED_Q}")
    full = spread_size(q, 5)
    dmin = delta_min(q)
    return BoundsRow(
        q=q,
        min_size=min_mps_size(q),
        epsilon=EPSILON[q],
        delta_min=dmin,
        max_size=full - dmin,
        interval_boundary=full - q + 1,
        spread_size=full,
        density_low_ln=9 * 5 * q**3 * math.log(q),
        density_low_log2=9 * 5 * q**3 * math.log2(q),
        modified_low_ln=2 * q**3 * math.log(q),
        modified_low_log2=2 * q**3 * math.log2(q),
    )


def excluded_by_bounds(q: int, size: int) -> bool:
    """True when the size sits in the impossible band just under a spread."""
    full = spread_size(q, 5)
    return full - delta_min(q) < size < full


@dataclass
class SearchConfig:
    rng_seed: int = 0
    restarts: int = 1
    max_steps: int = 500
    removal_width: int = 3
    target_size: int | None = None
    time_budget: float | None = None

    def __post_init__(self):
        if self.restarts < 1 or self.max_steps < 1 or self.removal_width < 1:
            raise SearchError("restarts, max_steps and removal_width must be positive")
        if self.time_budget is not None and self.time_budget <= 0:
            raise SearchError("time_budget must be positive")


@dataclass
class SearchOutcome:
    reached: bool
    best_size: int
    steps_used: int
    seconds: float
    certificate: Certificate | None = None


# Spaces up to this many lines use a full line-table screen for candidate
# enumeration (one vectorized pass); larger spaces fall back to hole-pair
# bucketing, which never touches the global line set.
MATRIX_SCREEN_LIMIT = 20_000


def _candidate_matrix(ctx: GeometryContext, covered: np.ndarray) -> np.ndarray:
    """Insertable lines as an id matrix: all lines fully inside the holes."""
    if ctx.n_lines <= MATRIX_SCREEN_LIMIT:
        mat = ctx.line_matrix()
        return mat[~covered[mat].any(axis=1)]
    found = lines_within(ctx, np.flatnonzero(~covered))
    if not found:
        return np.empty((0, ctx.q + 1), dtype=np.int64)
    return np.array([l.points for l in found], dtype=np.int64)


def greedy_complete(spread: PartialSpread, rng: random.Random) -> PartialSpread:
    """Insert uniformly random lines from inside the hole set until none fit.

    Candidates are enumerated once and then filtered after each
    insertion, which is exact: a line stays insertable iff it avoids
    every newly covered point. An empty candidate list is the maximality
    condition itself, so the result needs no separate check.
    """
    ctx = spread.ctx
    cand = _candidate_matrix(ctx, spread.covered)
    while len(cand):
        row = cand[rng.randrange(len(cand))]
        line = Line(points=tuple(int(p) for p in row))
        spread.insert(line, origin=ORIGIN_SEARCH)
        cand = cand[~np.isin(cand, row).any(axis=1)]
    return spread


def random_maximal_spread(ctx: GeometryContext, rng: random.Random) -> PartialSpread:
    return greedy_complete(PartialSpread(ctx), rng)


def certify(
    spread: PartialSpread, tag: str, seed: int | None = None
) -> Certificate:
    """Wrap a spread as a certificate and re-verify it from text alone."""
    cert = Certificate.from_spread(spread, tag=tag, seed=seed)
    report = verify_certificate(Certificate.parse(cert.text()))
    assert report.valid and report.maximal, f"certification failed: {report.verdict()}"
    assert report.size == spread.size
    if spread.ctx.n == 5:
        q = spread.ctx.q
        full = spread_size(q, 5)
        assert spread.size >= min_mps_size(q)
        assert not excluded_by_bounds(q, spread.size), (
            f"size {spread.size} lies in the impossible deficiency band for q={q}"
        )
    return cert


def _resize_walk(
    current: PartialSpread,
    target: int,
    cfg: SearchConfig,
    rng: random.Random,
    deadline: float | None,
) -> tuple[PartialSpread, int, bool]:
    """Perturbation walk: remove t lines, recomplete, accept toward target.

    Plateau moves (equal distance) are taken with probability 1/2, moves
    away never. Returns (final spread, steps used, hit deadline).
    """
    steps = 0
    for _ in range(cfg.max_steps):
        if current.size == target:
            break
        if deadline is not None and time.monotonic() > deadline:
            return current, steps, True
        steps += 1
        trial = current.copy()
        width = min(cfg.removal_width, trial.size)
        trial.remove_many(rng.sample(range(trial.size), width))
        greedy_complete(trial, rng)
        d_new = abs(trial.size - target)
        d_cur = abs(current.size - target)
        if d_new < d_cur or (d_new == d_cur and rng.random() < 0.5):
            current = trial
    return current, steps, False


def local_search_resize(
    spread: PartialSpread, target: int, cfg: SearchConfig
) -> SearchOutcome:
    """Drive a verified-maximal spread to an exact target size.

    Restarts begin from fresh random maximal spreads. On success the
    output is certified (re-verified from its serialized form); on budget
    exhaustion the outcome carries the closest size seen.
    """
    t0 = time.monotonic()
    witness = extension_witness(spread)
    if witness is not None:
        raise SearchError(f"starting spread is extendable (witness {witness.points})")
    rng = random.Random(cfg.rng_seed)
    deadline = t0 + cfg.time_budget if cfg.time_budget else None
    current = spread.copy()
    best_size = current.size
    steps_total = 0
    for restart in range(cfg.restarts):
        if restart > 0:
            current = random_maximal_spread(spread.ctx, rng)
        current, steps, timed_out = _resize_walk(current, target, cfg, rng, deadline)
        steps_total += steps
        if abs(current.size - target) < abs(best_size - target):
            best_size = current.size
        if current.size == target:
            cert = certify(current, tag="search", seed=cfg.rng_seed)
            return SearchOutcome(
                reached=True,
                best_size=target,
                steps_used=steps_total,
                seconds=time.monotonic() - t0,
                certificate=cert,
            )
        if timed_out:
            break
    return SearchOutcome(
        reached=False,
        best_size=best_size,
        steps_used=steps_total,
        seconds=time.monotonic() - t0,
    )


# --------------------------------------------------------------------------
# PG(4,q) seeds.
# --------------------------------------------------------------------------


def seed_pg4_mps(
    q: int,
    rng_seed: int = 0,
    method: str = "construct",
    cfg: SearchConfig | None = None,
    ctx: GeometryContext | None = None,
) -> PartialSpread:
    """A verified maximal partial spread of PG(4,q) of size q^3+1.

    ``construct`` (default) uses the deterministic algebraic construction;
    ``search`` runs restart-greedy plus local search, raising
    SeedSearchError with the best size on budget exhaustion. Either way
    the result is verified: exact size, q^2 holes, maximal.
    """
    if ctx is None:
        ctx = context_make(q, 4)
    target = q**3 + 1
    if method == "construct":
        spread = constructions.max_partial_spread_pg4(ctx)
    elif method == "search":
        cfg = cfg or SearchConfig(rng_seed=rng_seed, restarts=8, max_steps=2000)
        rng = random.Random(cfg.rng_seed)
        best = 0
        spread = None
        for restart in range(cfg.restarts):
            cand = random_maximal_spread(ctx, rng)
            cand, _, _ = _resize_walk(cand, target, cfg, rng, None)
            best = max(best, cand.size)
            if cand.size == target:
                spread = cand
                break
        if spread is None:
            raise SeedSearchError(best, target)
    else:
        raise SearchError(f"unknown seed method {method!r}")
    assert spread.size == target
    assert len(spread.holes()) == q**2
    witness = extension_witness(spread)
    assert witness is None
    spread.assert_consistent()
    return spread


# --------------------------------------------------------------------------
# Spectrum scan.
# --------------------------------------------------------------------------

# Per-target step budgets; searches are independent and individually
# seeded so a longer budget only extends each target's iteration stream.
# The ci preset avoids wall-clock caps to keep runs reproducible.
BUDGETS = {
    "ci": {"restarts": 8, "max_steps": 3000, "time_budget": None},
    "long": {"restarts": 8, "max_steps": 6000, "time_budget": 300.0},
}


@dataclass
class SpectrumEntry:
    size: int
    status: str  # achieved | missed | excluded
    provenance: str | None  # ladder-k | search | spread
    seconds: float
    certificate: Certificate | None = None
    best_size: int | None = None


@dataclass
class SpectrumReport:
    q: int
    budget: str
    rng_seed: int
    entries: list[SpectrumEntry] = field(default_factory=list)

    def achieved(self) -> list[int]:
        return sorted(e.size for e in self.entries if e.status == "achieved")

    def missed(self) -> list[int]:
        return sorted(e.size for e in self.entries if e.status == "missed")

    def excluded(self) -> list[int]:
        return sorted(e.size for e in self.entries if e.status == "excluded")


def target_seed(rng_seed: int, q: int, size: int) -> int:
    """Stable per-target seed so targets stay independent of scan order."""
    return (rng_seed * 1_000_003 + q * 10_007 + size) % (2**63)


def search_start(
    ctx: GeometryContext, target: int, rng: random.Random
) -> PartialSpread:
    """Starting spread for a target: a random maximal spread, or the
    closest ladder rung when that sits nearer to the target."""
    q = ctx.q
    base = min_mps_size(q)
    k_floor = min(builder.max_ladder_steps(q), max(0, (target - base) // q))
    ladder_size = base + k_floor * q
    sample = random_maximal_spread(ctx, rng)
    if abs(sample.size - target) <= target - ladder_size:
        return sample
    from .certificate import rebuild_spread

    cert = builder.build_ladder(ctx, k_floor)
    return rebuild_spread(cert, ctx)


def _scan_one_target(
    ctx: GeometryContext, size: int, budget: str, rng_seed: int
) -> SpectrumEntry:
    q = ctx.q
    t0 = time.monotonic()
    seed = target_seed(rng_seed, q, size)
    params = BUDGETS[budget]
    cfg = SearchConfig(
        rng_seed=seed,
        restarts=params["restarts"],
        max_steps=params["max_steps"],
        removal_width=3,
        target_size=size,
        time_budget=params["time_budget"],
    )
    rng = random.Random(seed ^ 0x5EED)
    start = search_start(ctx, size, rng)
    outcome = local_search_resize(start, size, cfg)
    if outcome.reached:
        return SpectrumEntry(
            size=size,
            status="achieved",
            provenance="search",
            seconds=time.monotonic() - t0,
            certificate=outcome.certificate,
        )
    return SpectrumEntry(
        size=size,
        status="missed",
        provenance=None,
        seconds=time.monotonic() - t0,
        best_size=outcome.best_size,
    )


def spectrum_scan(
    q: int,
    budget: str = "ci",
    rng_seed: int = 0,
    jobs: int = 1,
    ctx: GeometryContext | None = None,
) -> SpectrumReport:
    """Sweep every size from q^3+q^2+1 up to the spread size.

    Ladder-reachable sizes go through the deterministic construction, the
    spread size through the subfield partition, sizes inside the
    impossible deficiency band are excluded up front, everything else is
    searched with a per-target budget and its own seed. Partial reports
    are valid: a missed target records the best size reached.
    """
    if q not in SUPPORTED_Q:
        raise SearchError(f"spectrum scan supports q in {SUPPORTED_Q}, got {q}")
    if budget not in BUDGETS:
        raise SearchError(f"unknown budget {budget!r}; choose from {sorted(BUDGETS)}")
    if ctx is None:
        ctx = context_make(q, 5)
    base = min_mps_size(q)
    full = spread_size(q, 5)
    k_max = builder.max_ladder_steps(q)
    report = SpectrumReport(q=q, budget=budget, rng_seed=rng_seed)
    search_sizes = []
    for size in range(base, full + 1):
        t0 = time.monotonic()
        if size == full:
            cert = certify(constructions.full_line_spread(ctx), tag="spread")
            report.entries.append(
                SpectrumEntry(
                    size=size,
                    status="achieved",
                    provenance="spread",
                    seconds=time.monotonic() - t0,
                    certificate=cert,
                )
            )
        elif (size - base) % q == 0 and (size - base) // q <= k_max:
            k = (size - base) // q
            cert = builder.build_ladder(ctx, k)
            report.entries.append(
                SpectrumEntry(
                    size=size,
                    status="achieved",
                    provenance=f"ladder-{k}",
                    seconds=time.monotonic() - t0,
                    certificate=cert,
                )
            )
        elif excluded_by_bounds(q, size):
            report.entries.append(
                SpectrumEntry(size=size, status="excluded", provenance=None, seconds=0.0)
            )
        else:
            search_sizes.append(size)
    if jobs > 1 and len(search_sizes) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_spectrum_worker, q, size, budget, rng_seed)
                for size in search_sizes
            ]
            for fut in futures:
                report.entries.append(_entry_from_wire(fut.result()))
    else:
        for size in search_sizes:
            report.entries.append(_scan_one_target(ctx, size, budget, rng_seed))
    report.entries.sort(key=lambda e: e.size)
    return report


def _spectrum_worker(q: int, size: int, budget: str, rng_seed: int) -> dict:
    ctx = context_make(q, 5)
    entry = _scan_one_target(ctx, size, budget, rng_seed)
    return {
        "size": entry.size,
        "status": entry.status,
        "provenance": entry.provenance,
        "seconds": entry.seconds,
        "cert_text": entry.certificate.text() if entry.certificate else None,
        "best_size": entry.best_size,
    }


def _entry_from_wire(wire: dict) -> SpectrumEntry:
    cert = Certificate.parse(wire["cert_text"]) if wire["cert_text"] else None
    return SpectrumEntry(
        size=wire["size"],
        status=wire["status"],
        provenance=wire["provenance"],
        seconds=wire["seconds"],
        certificate=cert,
        best_size=wire["best_size"],
    )

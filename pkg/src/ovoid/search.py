"""Backtracking searches for maximal partial ovoids.

All engines work on the bitset incidence of a verified quadrangle.  The
deterministic depth-first modes explore candidates in ascending index
order and return the lexicographically first witness, so reruns are
reproducible bit for bit; the randomized mode restarts a seeded greedy
completion until the budget runs out.

The paired mode fixes a grid subquadrangle (a hyperbolic section in the
orthogonal model) and searches over antipode pairs: the partner of an
off-grid point is the unique second point collinear with the whole conic
of grid points collinear with the first.  Selecting whole pairs keeps
every candidate set antipode closed by construction.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from ovoid.gq import GQ, GQError, check_partial_ovoid, extension_bits


class SearchError(ValueError):
    """Raised for inconsistent search configurations."""


@dataclass
class SearchConfig:
    target_size: int
    mode: str = "exact_dfs"  # exact_dfs | antipode_paired | extend_random
    seed: int = 0
    time_budget: Optional[float] = None  # seconds, None is unlimited
    root_fix: Optional[int] = None  # point index (exact) or pair index (paired)
    deterministic: bool = True


@dataclass
class SearchOutcome:
    status: str  # found | exhausted | timeout
    members: Optional[tuple[int, ...]]
    nodes: int
    elapsed: float
    restarts: int = 0

    @property
    def found(self) -> bool:
        return self.status == "found"


def _deadline(cfg: SearchConfig) -> Optional[float]:
    return None if cfg.time_budget is None else time.monotonic() + cfg.time_budget


# ----------------------------------------------------------------------
# exact point-level DFS
# ----------------------------------------------------------------------

def _dfs_points(
    gq: GQ,
    target: int,
    root: Optional[int],
    deadline: Optional[float],
    collect: Optional[list[tuple[int, ...]]] = None,
) -> SearchOutcome:
    """Ascending-order DFS for maximal partial ovoids of exact size.

    A leaf at full depth is accepted iff no point extends the set, which
    with self-inclusive collinearity bitsets is exactly "the complement
    of the union of collinear sets is empty".  When ``collect`` is given
    every witness is recorded and the walk continues to exhaustion.
    """
    coll = gq.collinear_bits
    full = gq.full_mask
    start = time.monotonic()
    nodes = 0
    chosen: list[int] = []
    first: Optional[tuple[int, ...]] = None
    timed_out = False

    if root is not None:
        chosen.append(root)
        base_cands = full & ~coll[root]
        base_last = root
    else:
        base_cands = full
        base_last = -1

    def walk(cands: int, last: int) -> bool:
        nonlocal nodes, first, timed_out
        depth = len(chosen)
        if depth == target:
            if cands == 0:
                first = tuple(chosen)
                if collect is not None:
                    collect.append(first)
                    return False
                return True
            return False
        need = target - depth
        avail = cands & (full << (last + 1))
        while avail:
            if avail.bit_count() < need:
                return False
            nodes += 1
            if deadline is not None and nodes % 4096 == 0:
                if time.monotonic() > deadline:
                    timed_out = True
                    return True
            low = avail & -avail
            i = low.bit_length() - 1
            avail ^= low
            chosen.append(i)
            if walk(cands & ~coll[i], i):
                return True
            chosen.pop()
        return False

    hit = walk(base_cands, base_last)
    elapsed = time.monotonic() - start
    if timed_out:
        return SearchOutcome("timeout", None, nodes, elapsed)
    if collect is not None:
        status = "found" if collect else "exhausted"
        return SearchOutcome(status, collect[0] if collect else None, nodes, elapsed)
    if hit and first is not None:
        return SearchOutcome("found", first, nodes, elapsed)
    return SearchOutcome("exhausted", None, nodes, elapsed)


# ----------------------------------------------------------------------
# antipode pairing
# ----------------------------------------------------------------------

def antipode_pairs(gq: GQ, grid_points: Iterable[int]) -> list[tuple[int, int]]:
    """Partition the points off a grid subquadrangle into antipode pairs."""
    grid_mask = 0
    for i in grid_points:
        grid_mask |= 1 << int(i)
    coll = gq.collinear_bits
    expected_conic = gq.s + 1
    pairs: list[tuple[int, int]] = []
    seen = 0
    for p in range(gq.num_points):
        bit = 1 << p
        if (grid_mask | seen) & bit:
            continue
        conic = coll[p] & grid_mask
        if conic.bit_count() != expected_conic:
            raise SearchError(
                f"point {p} sees {conic.bit_count()} grid points, expected {expected_conic}"
            )
        inter = gq.full_mask
        c = conic
        while c:
            lowc = c & -c
            inter &= coll[lowc.bit_length() - 1]
            c ^= lowc
        inter &= ~bit
        if inter.bit_count() != 1:
            raise SearchError(f"point {p} has {inter.bit_count()} antipode candidates")
        partner = inter.bit_length() - 1
        if grid_mask & inter:
            raise SearchError(f"antipode of {p} lies on the grid")
        if coll[p] & inter:
            raise SearchError(f"antipode pair ({p}, {partner}) is collinear")
        pairs.append((p, partner))
        seen |= bit | inter
    return pairs


@dataclass
class PairedUniverse:
    """Precomputed pair-level incidence for the paired searches."""

    pairs: tuple[tuple[int, int], ...]
    pair_adj: tuple[int, ...]  # pair-index bitsets, self-inclusive
    pair_cover: tuple[int, ...]  # point-index bitsets covered by the pair
    grid_mask: int

    @classmethod
    def build(cls, gq: GQ, grid_points: Iterable[int]) -> "PairedUniverse":
        grid_list = [int(i) for i in grid_points]
        pairs = antipode_pairs(gq, grid_list)
        coll = gq.collinear_bits
        cover = [coll[a] | coll[b] for a, b in pairs]
        adj = []
        for i, (a, b) in enumerate(pairs):
            mask = 0
            ca = cover[i]
            for j, (c, d) in enumerate(pairs):
                if (ca >> c) & 1 or (ca >> d) & 1 or i == j:
                    mask |= 1 << j
            adj.append(mask)
        grid_mask = 0
        for i in grid_list:
            grid_mask |= 1 << i
        return cls(tuple(pairs), tuple(adj), tuple(cover), grid_mask)


def _dfs_pairs(
    gq: GQ,
    uni: PairedUniverse,
    target_pairs: int,
    root_pair: Optional[int],
    deadline: Optional[float],
) -> SearchOutcome:
    """Ascending DFS over antipode pairs; leaves must cover every point."""
    npairs = len(uni.pairs)
    all_pairs = (1 << npairs) - 1
    full_points = gq.full_mask
    start = time.monotonic()
    nodes = 0
    chosen: list[int] = []
    witness: Optional[tuple[int, ...]] = None
    timed_out = False

    def members_of(pair_ids: Sequence[int]) -> tuple[int, ...]:
        out: list[int] = []
        for pi in pair_ids:
            out.extend(uni.pairs[pi])
        return tuple(sorted(out))

    def walk(cands: int, cover: int, last: int) -> bool:
        nonlocal nodes, witness, timed_out
        depth = len(chosen)
        if depth == target_pairs:
            if cover == full_points:
                witness = members_of(chosen)
                return True
            return False
        need = target_pairs - depth
        avail = cands & (all_pairs << (last + 1))
        while avail:
            if avail.bit_count() < need:
                return False
            nodes += 1
            if deadline is not None and nodes % 4096 == 0:
                if time.monotonic() > deadline:
                    timed_out = True
                    return True
            low = avail & -avail
            i = low.bit_length() - 1
            avail ^= low
            chosen.append(i)
            if walk(cands & ~uni.pair_adj[i], cover | uni.pair_cover[i], i):
                return True
            chosen.pop()
        return False

    if root_pair is not None:
        if not 0 <= root_pair < npairs:
            raise SearchError(f"root pair {root_pair} out of range")
        chosen.append(root_pair)
        hit = walk(
            all_pairs & ~uni.pair_adj[root_pair],
            uni.pair_cover[root_pair],
            root_pair,
        )
    else:
        hit = walk(all_pairs, 0, -1)
    elapsed = time.monotonic() - start
    if timed_out:
        return SearchOutcome("timeout", None, nodes, elapsed)
    if hit and witness is not None:
        return SearchOutcome("found", witness, nodes, elapsed)
    return SearchOutcome("exhausted", None, nodes, elapsed)


# ----------------------------------------------------------------------
# randomized greedy restarts
# ----------------------------------------------------------------------

def _random_bit(rng: random.Random, mask: int) -> int:
    k = rng.randrange(mask.bit_count())
    for _ in range(k):
        mask &= mask - 1
    return (mask & -mask).bit_length() - 1


def _restart_points(gq, target, root, deadline, rng) -> SearchOutcome:
    coll = gq.collinear_bits
    full = gq.full_mask
    start = time.monotonic()
    restarts = 0
    nodes = 0
    while True:
        if deadline is not None and time.monotonic() > deadline:
            return SearchOutcome(
                "timeout", None, nodes, time.monotonic() - start, restarts
            )
        restarts += 1
        if root is not None:
            chosen = [root]
            cands = full & ~coll[root]
        else:
            chosen = []
            cands = full
        while cands and len(chosen) < target:
            nodes += 1
            i = _random_bit(rng, cands)
            chosen.append(i)
            cands &= ~coll[i]
        if len(chosen) == target and cands == 0:
            return SearchOutcome(
                "found", tuple(sorted(chosen)), nodes, time.monotonic() - start, restarts
            )


def _restart_pairs(gq, uni, target_pairs, root_pair, deadline, rng) -> SearchOutcome:
    npairs = len(uni.pairs)
    all_pairs = (1 << npairs) - 1
    full_points = gq.full_mask
    start = time.monotonic()
    restarts = 0
    nodes = 0
    while True:
        if deadline is not None and time.monotonic() > deadline:
            return SearchOutcome(
                "timeout", None, nodes, time.monotonic() - start, restarts
            )
        restarts += 1
        if root_pair is not None:
            chosen = [root_pair]
            cands = all_pairs & ~uni.pair_adj[root_pair]
            cover = uni.pair_cover[root_pair]
        else:
            chosen = []
            cands = all_pairs
            cover = 0
        while cands and len(chosen) < target_pairs:
            nodes += 1
            i = _random_bit(rng, cands)
            chosen.append(i)
            cands &= ~uni.pair_adj[i]
            cover |= uni.pair_cover[i]
        if len(chosen) == target_pairs and cover == full_points:
            members = tuple(sorted(p for pi in chosen for p in uni.pairs[pi]))
            return SearchOutcome(
                "found", members, nodes, time.monotonic() - start, restarts
            )


# ----------------------------------------------------------------------
# public entry points
# ----------------------------------------------------------------------

def search_maximal(
    gq: GQ, cfg: SearchConfig, grid_points: Optional[Iterable[int]] = None
) -> SearchOutcome:
    """Search for a maximal partial ovoid of exactly the target size."""
    if cfg.target_size < 1 or cfg.target_size > gq.num_points:
        raise SearchError(f"target size {cfg.target_size} out of range")
    if cfg.mode == "exact_dfs":
        return _dfs_points(gq, cfg.target_size, cfg.root_fix, _deadline(cfg))
    if cfg.mode == "antipode_paired":
        if grid_points is None:
            raise SearchError("antipode_paired mode needs a grid subquadrangle")
        if cfg.target_size % 2:
            raise SearchError("antipode_paired mode needs an even target size")
        uni = PairedUniverse.build(gq, grid_points)
        return _dfs_pairs(
            gq, uni, cfg.target_size // 2, cfg.root_fix, _deadline(cfg)
        )
    if cfg.mode == "extend_random":
        rng = random.Random(cfg.seed)
        if grid_points is not None:
            if cfg.target_size % 2:
                raise SearchError("paired random mode needs an even target size")
            uni = PairedUniverse.build(gq, grid_points)
            return _restart_pairs(
                gq, uni, cfg.target_size // 2, cfg.root_fix, _deadline(cfg), rng
            )
        return _restart_points(gq, cfg.target_size, cfg.root_fix, _deadline(cfg), rng)
    raise SearchError(f"unknown search mode {cfg.mode!r}")


def enumerate_maximal(
    gq: GQ, target: int, root_fix: Optional[int] = None
) -> list[tuple[int, ...]]:
    """All maximal partial ovoids of the target size through the pinned root."""
    found: list[tuple[int, ...]] = []
    _dfs_points(gq, target, root_fix, None, collect=found)
    return found


# ----------------------------------------------------------------------
# extendability audits
# ----------------------------------------------------------------------

@dataclass
class AuditReport:
    size: int
    rho: int  # deficiency: s*t - size
    in_unique_range: bool  # 0 <= rho < t/s
    extensions: tuple[int, ...]
    completions: tuple[tuple[int, ...], ...]
    unique_completion: Optional[bool]


def extendability_audit(gq: GQ, members: Iterable[int]) -> AuditReport:
    """Extension witnesses and full ovoid completions of a partial ovoid."""
    members = tuple(sorted(int(i) for i in members))
    if not check_partial_ovoid(gq, members):
        raise GQError("not a partial ovoid")
    s, t = gq.s, gq.t
    rho = s * t - len(members)
    in_range = 0 <= rho * s < t  # rho < t/s without integer division
    ext = extension_bits(gq, members)
    witnesses = []
    m = ext
    while m:
        low = m & -m
        witnesses.append(low.bit_length() - 1)
        m ^= low
    ovoid_size = s * t + 1
    completions: list[tuple[int, ...]] = []
    if len(members) <= ovoid_size:
        stack = [(members, ext, -1)]
        while stack:
            cur, cands, last = stack.pop()
            if len(cur) == ovoid_size:
                completions.append(cur)
                continue
            avail = cands & (gq.full_mask << (last + 1))
            while avail:
                low = avail & -avail
                i = low.bit_length() - 1
                avail ^= low
                stack.append(
                    (tuple(sorted(cur + (i,))), cands & ~gq.collinear_bits[i], i)
                )
    completions.sort()
    return AuditReport(
        size=len(members),
        rho=rho,
        in_unique_range=in_range,
        extensions=tuple(witnesses),
        completions=tuple(completions),
        unique_completion=(len(completions) == 1) if in_range else None,
    )


def check_unique_completion_exhaustive(
    gq: GQ, root_fix: int = 0
) -> tuple[int, list[tuple[int, ...]]]:
    """Walk every partial ovoid of size s*t through the pinned root and
    verify each has exactly one extension point.

    Returns the number of sets checked and any counterexamples.
    """
    target = gq.s * gq.t
    coll = gq.collinear_bits
    full = gq.full_mask
    checked = 0
    failures: list[tuple[int, ...]] = []
    chosen: list[int] = [root_fix]

    def walk(cands: int, last: int) -> None:
        nonlocal checked
        depth = len(chosen)
        if depth == target:
            checked += 1
            if cands.bit_count() != 1:
                failures.append(tuple(chosen))
            return
        need = target - depth
        avail = cands & (full << (last + 1))
        while avail:
            if avail.bit_count() < need:
                return
            low = avail & -avail
            i = low.bit_length() - 1
            avail ^= low
            chosen.append(i)
            walk(cands & ~coll[i], i)
            chosen.pop()

    walk(full & ~coll[root_fix], root_fix)
    return checked, failures

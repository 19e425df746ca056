"""The selection rules under comparison.

All six rules share one interface: they take an instance and return an
:class:`Outcome` holding the selected students (in priority order) and the
seat matching that justifies the selection.  They are pure functions of the
instance; the only optional nondeterminism is the seeded tie-breaking mode
of :func:`ehyy_select`.

Tags used throughout the package and the CLI:

==========  ========================================================
``as``      greedy highest-priority selection subject to keeping the
            matching rank-maximal across both reserve ranks
``ehyy``    pass-based greedy: rank-1 seats first, then rank-2, then
            fill to capacity
``sy1``     rank-maximal selection with rank-2 reserves removed
``sy2``     rank-maximal selection with both ranks merged into one
``pog``     top-capacity students by priority, seats assigned greedily
``pos``     same students as ``pog``, seats assigned optimally
==========  ========================================================
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from typing import Any, Callable

from .graph import Matching, Seat, build_graph
from .model import Instance, QuotaTable, StudentId, UNIVERSAL_TYPE
from .solver import RankMaximalMatcher


@dataclass(frozen=True)
class Outcome:
    """Result of one selection rule on one instance."""

    algorithm: str
    selected: tuple[StudentId, ...]
    matching: Matching


def _greedy_scan(instance: Instance) -> tuple[tuple[StudentId, ...], RankMaximalMatcher]:
    """Scan students by priority, pinning each one whose selection keeps the
    rank signature maximal, until the capacity is reached."""
    graph = build_graph(instance)
    matcher = RankMaximalMatcher(graph)
    chosen: list[StudentId] = []
    for sid in instance.acceptable:
        if len(chosen) == matcher.target_size:
            break
        if matcher.try_force(sid):
            chosen.append(sid)
    return tuple(chosen), matcher


def a_s_select(instance: Instance) -> Outcome:
    """Highest-priority students compatible with a rank-maximal matching."""
    chosen, matcher = _greedy_scan(instance)
    return Outcome("as", chosen, matcher.matching())


def sy1_select(instance: Instance) -> Outcome:
    """Drop the rank-2 reserves, then select rank-maximally.

    The returned matching uses rank-1 and universal seats only.
    """
    reduced = QuotaTable(instance.quotas.rank1, (0,) * instance.n_types)
    chosen, matcher = _greedy_scan(replace(instance, quotas=reduced))
    return Outcome("sy1", chosen, matcher.matching())


def sy2_select(instance: Instance) -> Outcome:
    """Merge both reserve ranks into one and select rank-maximally.

    The selected students are then re-seated on the original two-rank seats
    with the engine, all of them pinned.  That matching realizes the same
    total reserve fill as the merged optimum (re-seating a fixed student
    set never loses merged seats) while reporting honest per-rank counts:
    rank-1 seats are used as well as the selected set allows.
    """
    merged = QuotaTable(
        tuple(a + b for a, b in zip(instance.quotas.rank1, instance.quotas.rank2)),
        (0,) * instance.n_types,
    )
    chosen, _ = _greedy_scan(replace(instance, quotas=merged))
    graph = build_graph(instance, set(chosen))
    matcher = RankMaximalMatcher(graph, chosen)
    return Outcome("sy2", chosen, matcher.matching())


def ehyy_select(instance: Instance, rng: random.Random | None = None) -> Outcome:
    """Three greedy passes down the priority list: unfilled rank-1 seats,
    then unfilled rank-2 seats, then plain fill to capacity.

    A student eligible for several open seats takes the lowest-numbered
    type; pass ``rng`` to resolve such ties uniformly at random instead.
    """
    pool = instance.acceptable
    target = min(instance.capacity, len(pool))
    quotas = instance.quotas
    used: dict[tuple[int, int], int] = {}
    chosen: list[StudentId] = []
    pairs: list[tuple[StudentId, Seat]] = []
    taken: set[StudentId] = set()

    for rank in (1, 2):
        for sid in pool:
            if len(chosen) == target:
                break
            if sid in taken:
                continue
            open_types = [
                t
                for t in sorted(instance.student(sid).types)
                if used.get((t, rank), 0) < quotas.quota(t, rank)
            ]
            if not open_types:
                continue
            t = rng.choice(open_types) if rng is not None else open_types[0]
            idx = used.get((t, rank), 0)
            used[(t, rank)] = idx + 1
            taken.add(sid)
            chosen.append(sid)
            pairs.append((sid, Seat(t, rank, idx)))

    universal_used = 0
    for sid in pool:
        if len(chosen) == target:
            break
        if sid in taken:
            continue
        taken.add(sid)
        chosen.append(sid)
        pairs.append((sid, Seat(UNIVERSAL_TYPE, 3, universal_used)))
        universal_used += 1

    chosen.sort(key=instance.priority_position)
    return Outcome("ehyy", tuple(chosen), Matching(frozenset(pairs)))


def pog_select(instance: Instance) -> Outcome:
    """Top students by priority; each takes an open rank-1 seat of one of
    its types if any, else an open rank-2 seat, else a universal seat."""
    pool = instance.acceptable
    target = min(instance.capacity, len(pool))
    chosen = pool[:target]
    quotas = instance.quotas
    used: dict[tuple[int, int], int] = {}
    universal_used = 0
    pairs: list[tuple[StudentId, Seat]] = []
    for sid in chosen:
        seat: Seat | None = None
        for rank in (1, 2):
            for t in sorted(instance.student(sid).types):
                idx = used.get((t, rank), 0)
                if idx < quotas.quota(t, rank):
                    used[(t, rank)] = idx + 1
                    seat = Seat(t, rank, idx)
                    break
            if seat is not None:
                break
        if seat is None:
            seat = Seat(UNIVERSAL_TYPE, 3, universal_used)
            universal_used += 1
        pairs.append((sid, seat))
    return Outcome("pog", chosen, Matching(frozenset(pairs)))


def pos_select(instance: Instance) -> Outcome:
    """Same students as ``pog``, but re-seated rank-maximally."""
    pool = instance.acceptable
    target = min(instance.capacity, len(pool))
    chosen = pool[:target]
    graph = build_graph(instance, set(chosen))
    matcher = RankMaximalMatcher(graph, chosen)
    return Outcome("pos", chosen, matcher.matching())


ALGORITHMS: dict[str, Callable[[Instance], Outcome]] = {
    "as": a_s_select,
    "ehyy": ehyy_select,
    "sy1": sy1_select,
    "sy2": sy2_select,
    "pog": pog_select,
    "pos": pos_select,
}


def run_algorithm(tag: str, instance: Instance) -> Outcome:
    try:
        fn = ALGORITHMS[tag]
    except KeyError:
        raise ValueError(f"unknown algorithm tag {tag!r}") from None
    return fn(instance)


def outcome_to_json(outcome: Outcome) -> str:
    """Serialize an outcome: tag, selected ids in priority order, the seat
    pairs as (student, type, rank, index) rows, and the signature triple."""
    from .graph import signature

    doc: dict[str, Any] = {
        "algorithm": outcome.algorithm,
        "selected": list(outcome.selected),
        "matching": sorted(
            [sid, seat.type, seat.rank, seat.index] for sid, seat in outcome.matching.pairs
        ),
        "signature": list(signature(outcome.matching)),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def outcome_from_json(text: str) -> Outcome:
    doc = json.loads(text)
    pairs = frozenset(
        (sid, Seat(t, rank, idx)) for sid, t, rank, idx in doc["matching"]
    )
    return Outcome(doc["algorithm"], tuple(doc["selected"]), Matching(pairs))

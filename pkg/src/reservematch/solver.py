"""Rank-maximal matching engine with a global size cap and pinned students.

The engine maintains a matching of students onto seat pools that maximizes
the rank signature (rank-1 count first, then rank-2, then rank-3)
lexicographically, subject to a size cap and to a set of "forced" students
that must stay matched.

Seats of equal type and rank are interchangeable, which makes every
augmenting or reshuffling chain weight-telescoping: moving a student out of
a pool and another student in cancels exactly, so the net signature change
of a chain depends only on its endpoints.  Three consequences drive the
implementation:

* an augmenting chain (unmatched student -> ... -> pool with a free slot)
  improves the signature by exactly one seat at the final pool's rank, so
  the best augmentation is found by breadth-first reachability, preferring
  the lowest-rank free pool reached;
* successive best augmentations have non-increasing gain, so once the best
  reachable free slot is a universal (rank-3) slot, all remaining fill is a
  straight priority scan;
* forcing an unmatched student while preserving the signature is possible
  exactly when there is an eviction chain from the student that ends by
  unseating a non-forced student (net zero), or a chain to a free slot of
  some rank combined with an independent chain that releases one seat of
  the same rank elsewhere, again unseating a non-forced student.

Augmenting one pinned student at a time via its best chain keeps the
matching optimal among matchings covering the pinned set (the classic
row-addition argument for assignment problems), which is what the greedy
selection rules need.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

from .graph import Matching, RankSignature, ReservationGraph, Seat, signature
from .model import StudentId


class InfeasibleForcedError(ValueError):
    """More students were pinned than the size cap allows."""


# BFS chain search outcome: terminal student, terminal pool, parent links.
_Chain = tuple[int, int, dict[int, tuple[int, int] | None]]


class RankMaximalMatcher:
    """Incremental rank-maximal matching over a reservation graph.

    Students are handled by their position in the graph's priority-ordered
    student tuple.  All tie-breaking is deterministic: students are explored
    in priority order and pools in (rank, type) order, so identical inputs
    always produce identical matchings.
    """

    def __init__(self, graph: ReservationGraph, forced: Iterable[StudentId] = ()):
        self._graph = graph
        students = graph.students
        self._index = {sid: i for i, sid in enumerate(students)}
        self._adj: list[tuple[int, ...]] = [graph.adjacency[sid] for sid in students]
        self._capacity = [p.capacity for p in graph.pools]
        self._rank = [p.rank for p in graph.pools]
        self._universal = graph.universal_pool

        n = len(students)
        self._pool_of = [-1] * n
        self._members: list[set[int]] = [set() for _ in graph.pools]
        self._used = [0] * len(graph.pools)
        self._forced = [False] * n
        self._n_forced = 0
        self._size = 0
        self.target_size = min(graph.cap, n)

        pinned = []
        seen = set()
        for sid in forced:
            if sid not in self._index:
                raise ValueError(f"forced student {sid} is not in the graph")
            if sid not in seen:
                seen.add(sid)
                pinned.append(self._index[sid])
        if len(pinned) > graph.cap:
            raise InfeasibleForcedError(
                f"cannot pin {len(pinned)} students with a cap of {graph.cap}"
            )
        pinned.sort()

        for i in pinned:
            terminal, pool, came = self._find_chain([i])
            self._shift_in(terminal, pool, came)
            self._size += 1
            self._forced[i] = True
            self._n_forced += 1
        self._fill()

    # ------------------------------------------------------------------
    # construction

    def _find_chain(self, sources: Sequence[int]) -> _Chain:
        """Best augmenting chain from any source.

        Explores eviction moves through full pools and returns the chain
        reaching the free slot with the best (lowest) rank; rank 1 cannot be
        beaten, so the search stops as soon as it touches one.
        """
        came: dict[int, tuple[int, int] | None] = {}
        queue: deque[int] = deque()
        for i in sources:
            came[i] = None
            queue.append(i)
        best: tuple[int, int, int] | None = None  # (rank, student, pool)
        scanned_pools: set[int] = set()
        while queue:
            x = queue.popleft()
            for p in self._adj[x]:
                if self._used[p] < self._capacity[p]:
                    r = self._rank[p]
                    if best is None or r < best[0]:
                        best = (r, x, p)
                        if r == 1:
                            return x, p, came
                # displacing an occupant is usage-preserving whether or not
                # the pool is full, so every occupied pool is a thoroughfare
                if self._used[p] > 0 and p not in scanned_pools:
                    scanned_pools.add(p)
                    for y in sorted(self._members[p]):
                        if y not in came:
                            came[y] = (x, p)
                            queue.append(y)
        if best is None:
            raise AssertionError("no augmenting chain despite free capacity")
        return best[1], best[2], came

    def _shift_in(self, student: int, pool: int, came: dict[int, tuple[int, int] | None]) -> None:
        """Place ``student`` into ``pool`` and ripple the eviction chain back
        to its source.  Does not touch the size counter."""
        while True:
            old = self._pool_of[student]
            if old >= 0:
                self._members[old].remove(student)
                self._used[old] -= 1
            self._pool_of[student] = pool
            self._members[pool].add(student)
            self._used[pool] += 1
            step = came[student]
            if step is None:
                return
            student, pool = step

    def _unseat(self, student: int, came: dict[int, tuple[int, int] | None]) -> None:
        """Remove ``student`` from its pool and ripple the rest of its chain."""
        pool = self._pool_of[student]
        self._members[pool].remove(student)
        self._used[pool] -= 1
        self._pool_of[student] = -1
        step = came[student]
        if step is not None:
            self._shift_in(step[0], step[1], came)

    def _fill(self) -> None:
        """Augment to the target size with best chains from all unmatched
        students; once only universal slots remain reachable, finish with a
        direct priority scan."""
        n = len(self._pool_of)
        while self._size < self.target_size:
            sources = [i for i in range(n) if self._pool_of[i] < 0]
            terminal, pool, came = self._find_chain(sources)
            if self._rank[pool] == 3:
                u = self._universal
                for i in sources:
                    if self._size >= self.target_size:
                        break
                    self._pool_of[i] = u
                    self._members[u].add(i)
                    self._used[u] += 1
                    self._size += 1
                return
            self._shift_in(terminal, pool, came)
            self._size += 1

    # ------------------------------------------------------------------
    # queries

    def signature(self) -> RankSignature:
        counts = [0, 0, 0]
        for p, used in enumerate(self._used):
            counts[self._rank[p] - 1] += used
        return RankSignature(*counts)

    def is_matched(self, sid: StudentId) -> bool:
        return self._pool_of[self._index[sid]] >= 0

    def matched_students(self) -> tuple[StudentId, ...]:
        return tuple(
            sid for i, sid in enumerate(self._graph.students) if self._pool_of[i] >= 0
        )

    def matching(self) -> Matching:
        """Materialize the pool assignment as seat-level pairs; within a pool
        seats are indexed in priority order."""
        pairs = []
        for p, pool in enumerate(self._graph.pools):
            for idx, i in enumerate(sorted(self._members[p])):
                pairs.append((self._graph.students[i], Seat(pool.type, pool.rank, idx)))
        return Matching(frozenset(pairs))

    # ------------------------------------------------------------------
    # pinning

    def try_force(self, sid: StudentId) -> bool:
        """Pin ``sid`` if doing so preserves the current rank signature.

        Returns ``True`` and updates the matching when a signature-preserving
        matching covering all pinned students plus ``sid`` exists; otherwise
        leaves the state untouched and returns ``False``.
        """
        i = self._index[sid]
        if self._forced[i]:
            return True
        if self._pool_of[i] >= 0:
            self._forced[i] = True
            self._n_forced += 1
            return True
        if self._n_forced >= self.target_size:
            return False

        # Fast path: swap onto the universal pool by unseating an unpinned
        # occupant; rank-3 usage is unchanged.
        victim = self._unpinned_member(self._universal)
        if victim is not None:
            came = {victim: None}
            self._unseat(victim, came)
            u = self._universal
            self._pool_of[i] = u
            self._members[u].add(i)
            self._used[u] += 1
            self._forced[i] = True
            self._n_forced += 1
            return True

        if self._reconfigure(i):
            self._forced[i] = True
            self._n_forced += 1
            return True
        return False

    def _unpinned_member(self, pool: int) -> int | None:
        """Lowest-priority non-pinned occupant of a pool, if any."""
        best = -1
        for y in self._members[pool]:
            if not self._forced[y] and y > best:
                best = y
        return best if best >= 0 else None

    def _reconfigure(self, i: int) -> bool:
        """Match student ``i`` without changing the signature, by eviction
        chains.  Exact: returns False only when no signature-preserving
        matching covering the pinned set plus ``i`` exists."""
        came: dict[int, tuple[int, int] | None] = {i: None}
        queue: deque[int] = deque([i])
        free_ranks: dict[int, tuple[int, int]] = {}  # rank -> first (student, pool)
        scanned_pools: set[int] = set()
        while queue:
            x = queue.popleft()
            for p in self._adj[x]:
                if self._used[p] < self._capacity[p]:
                    free_ranks.setdefault(self._rank[p], (x, p))
                if self._used[p] > 0 and p not in scanned_pools:
                    scanned_pools.add(p)
                    for y in sorted(self._members[p]):
                        if y in came:
                            continue
                        came[y] = (x, p)
                        if not self._forced[y]:
                            # Net-zero exchange: i enters, y is unseated.
                            self._unseat(y, came)
                            return True
                        queue.append(y)

        # No direct exchange.  Try entering a free slot of some rank while an
        # independent chain releases one seat of the same rank elsewhere.
        for r in sorted(free_ranks):
            shed = self._find_shed(r)
            if shed is None:
                continue
            dump, shed_came = shed
            if not set(shed_came) & set(came):
                x, p = free_ranks[r]
                self._shift_in(x, p, came)
                self._size += 1
                self._unseat(dump, shed_came)
                self._size -= 1
                return True
            # The two chains touch; fall back to a fresh solve, which is
            # exact, and adopt its state when the signature survives.
            return self._refit_with(i)
        return False

    def _find_shed(self, rank_needed: int) -> tuple[int, dict[int, tuple[int, int] | None]] | None:
        """Chain that lowers the seat count at ``rank_needed`` by one while
        keeping every pinned student matched: some occupant of a pool of
        that rank leaves, relocating through full pools until a non-pinned
        student can be unseated."""
        came: dict[int, tuple[int, int] | None] = {}
        queue: deque[int] = deque()
        for p, pool in enumerate(self._graph.pools):
            if pool.rank != rank_needed or self._used[p] == 0:
                continue
            for y in sorted(self._members[p]):
                if y in came:
                    continue
                came[y] = None
                if not self._forced[y]:
                    return y, came
                queue.append(y)
        scanned_pools: set[int] = set()
        while queue:
            x = queue.popleft()
            for p in self._adj[x]:
                # Relocations must displace an occupant; consuming a free
                # slot would change some rank's count.
                if p == self._pool_of[x] or self._used[p] == 0:
                    continue
                if p in scanned_pools:
                    continue
                scanned_pools.add(p)
                for y in sorted(self._members[p]):
                    if y in came:
                        continue
                    came[y] = (x, p)
                    if not self._forced[y]:
                        return y, came
                    queue.append(y)
        return None

    def _refit_with(self, i: int) -> bool:
        pinned = [
            self._graph.students[j]
            for j in range(len(self._pool_of))
            if self._forced[j]
        ]
        pinned.append(self._graph.students[i])
        fresh = RankMaximalMatcher(self._graph, pinned)
        if fresh.signature() != self.signature():
            return False
        self._pool_of = fresh._pool_of
        self._members = fresh._members
        self._used = fresh._used
        self._forced = fresh._forced
        self._n_forced = fresh._n_forced
        self._size = fresh._size
        return True


def rank_maximal_matching(
    graph: ReservationGraph, forced: Iterable[StudentId] = ()
) -> Matching:
    """Rank-maximal matching of size at most the graph cap that matches
    every student in ``forced``.

    With ``forced`` empty this is the unconstrained rank-maximal matching.
    Raises :class:`InfeasibleForcedError` when more than ``cap`` students
    are forced; any smaller set is feasible thanks to the universal seats.
    """
    return RankMaximalMatcher(graph, forced).matching()


def max_signature(graph: ReservationGraph) -> RankSignature:
    """Signature of the unconstrained rank-maximal matching."""
    return RankMaximalMatcher(graph).signature()


def is_compatible(graph: ReservationGraph, forced: Iterable[StudentId]) -> bool:
    """Whether some matching achieves the unconstrained rank-maximal
    signature while matching every student in ``forced``."""
    forced = tuple(forced)
    if len(set(forced)) > graph.cap:
        return False
    constrained = RankMaximalMatcher(graph, forced).signature()
    return constrained == max_signature(graph)

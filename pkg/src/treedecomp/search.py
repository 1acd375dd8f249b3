"""
Structure search over a weight catalog.

All searches work on sorted variable-index tuples and report a
:class:`~treedecomp.structure.Topology` over the catalog's variable names.
A connected structure is a set of pair/triple components whose incidence
graph is a spanning tree: every component joins variables from distinct
parts, and ``#pairs + 2 * #triples = n - 1``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from itertools import combinations

from .structure import Topology
from .weights import WeightCatalog

__all__ = [
    "SearchOptions",
    "SearchReport",
    "BRUTE_FORCE_MAX_N",
    "greedy",
    "chow_liu",
    "branch_and_bound",
    "brute_force",
    "structure_key",
]

BRUTE_FORCE_MAX_N = 6
_MODES = {"paper": "paper", "paper-greedy": "paper", "connected": "connected"}


@dataclass(frozen=True)
class SearchOptions:
    mode: str = "paper"
    node_budget: int = 1_000_000
    tolerance: float = 1e-12

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {sorted(_MODES)}, got {self.mode!r}")
        object.__setattr__(self, "mode", _MODES[self.mode])
        if self.node_budget < 1:
            raise ValueError("node_budget must be at least 1")


@dataclass
class SearchReport:
    topology: Topology
    weight_sum: float
    components: tuple
    nodes_expanded: int = 0
    nodes_pruned: int = 0
    greedy_iterations: int = 0
    optimal: bool = False
    method: str = ""
    incumbent_found_at: int = 0
    trace: list = field(default_factory=list, repr=False)


def structure_key(components) -> tuple:
    """Deterministic tie-break key: the sorted list of sorted index tuples."""
    return tuple(sorted(tuple(sorted(c)) for c in components))


def _total(catalog: WeightCatalog, components) -> float:
    return math.fsum(catalog.weight(c) for c in components)


def _topology(catalog: WeightCatalog, components) -> Topology:
    names = catalog.variables
    sets = [[names[i] for i in c] for c in structure_key(components)]
    return Topology.from_sets(names, sets)


class _Parts:
    """Tiny union-find over variable indices."""

    __slots__ = ("label",)

    def __init__(self, n: int):
        self.label = list(range(n))

    def find(self, x: int) -> int:
        lab = self.label
        while lab[x] != x:
            lab[x] = lab[lab[x]]
            x = lab[x]
        return x

    def disjoint(self, comp) -> bool:
        roots = [self.find(x) for x in comp]
        return len(set(roots)) == len(roots)

    def join(self, comp):
        r0 = self.find(comp[0])
        for x in comp[1:]:
            self.label[self.find(x)] = r0


def greedy(catalog: WeightCatalog, options: SearchOptions | None = None) -> SearchReport:
    """One descending pass over the catalog.

    ``paper`` mode accepts an entry sharing at most one variable with the
    covered set (and may end with a forest); ``connected`` mode requires
    exactly one shared variable.  The first entry is always accepted.
    """
    options = options or SearchOptions()
    n = catalog.n
    if n < 2:
        raise ValueError("greedy search needs at least two variables")
    limit = 1 if options.mode == "connected" else None
    covered = set()
    chosen = []
    examined = 0
    for comp, _w in catalog.entries:
        if len(covered) == n:
            break
        examined += 1
        shared = sum(1 for x in comp if x in covered)
        if chosen:
            if limit is not None and shared != limit:
                continue
            if shared > 1:
                continue
        chosen.append(comp)
        covered.update(comp)
    return SearchReport(
        topology=_topology(catalog, chosen),
        weight_sum=_total(catalog, chosen),
        components=structure_key(chosen),
        greedy_iterations=examined,
        optimal=False,
        method=f"greedy-{options.mode}",
    )


def chow_liu(catalog: WeightCatalog) -> SearchReport:
    """Maximum-weight spanning tree over pair weights (Kruskal, catalog order)."""
    n = catalog.n
    if n < 2:
        raise ValueError("chow_liu needs at least two variables")
    parts = _Parts(n)
    chosen = []
    examined = 0
    for comp, _w in catalog.entries:
        if len(comp) != 2:
            continue
        examined += 1
        if parts.disjoint(comp):
            parts.join(comp)
            chosen.append(comp)
            if len(chosen) == n - 1:
                break
    return SearchReport(
        topology=_topology(catalog, chosen),
        weight_sum=_total(catalog, chosen),
        components=structure_key(chosen),
        greedy_iterations=examined,
        optimal=True,
        method="chow-liu",
    )


class _Searcher:
    def __init__(self, catalog: WeightCatalog, tol: float):
        self.catalog = catalog
        self.n = catalog.n
        self.tol = tol
        self.comps = [c for c, _ in catalog.entries]
        self.weights = [w for _, w in catalog.entries]
        self.slots = [len(c) - 1 for c in self.comps]
        # ratio order for the fractional-knapsack relaxation
        self.by_ratio = sorted(
            range(len(self.comps)),
            key=lambda r: (-self.weights[r] / self.slots[r], r),
        )

    def _parts(self, labels) -> _Parts:
        p = _Parts(self.n)
        p.label = list(labels)
        return p

    def upper_bound(self, weight, last, labels, k):
        """Partial weight plus the fractional knapsack over the k open slots.

        Only entries ranked after ``last`` that are individually acyclic
        with the partial structure are candidates; overlap among them is
        ignored.  Returns None when they cannot fill k slots.
        """
        if k == 0:
            return weight
        parts = self._parts(labels)
        room = k
        extra = 0.0
        leftover = False
        for r in self.by_ratio:
            if r <= last or not parts.disjoint(self.comps[r]):
                continue
            s = self.slots[r]
            if room >= s:
                extra += self.weights[r]
                room -= s
            else:
                extra += self.weights[r] * room / s
                room = 0
            if room == 0:
                leftover = True
                break
        if not leftover:
            return None
        return weight + extra

    def complete(self, comps, last, labels, k):
        """Greedy completion using entries ranked after ``last``."""
        if k == 0:
            return list(comps)
        parts = self._parts(labels)
        out = list(comps)
        for r in range(last + 1, len(self.comps)):
            s = self.slots[r]
            if s > k:
                continue
            c = self.comps[r]
            if parts.disjoint(c):
                parts.join(c)
                out.append(r)
                k -= s
                if k == 0:
                    return out
        return None


def branch_and_bound(
    catalog: WeightCatalog,
    options: SearchOptions | None = None,
    trace: bool = False,
) -> SearchReport:
    """Exact best-first branch and bound over connected structures.

    A node is a set of catalog ranks added in increasing rank order.  Its
    upper bound is a fractional knapsack over the remaining child slots
    (acyclicity between candidates relaxed); its lower bound is the greedy
    completion.  Among optimal structures the one with the smallest
    :func:`structure_key` is returned.  With ``trace=True`` every expanded
    node is recorded as ``(ranks, upper, lower)``.
    """
    options = options or SearchOptions(mode="connected")
    n = catalog.n
    if n < 2:
        raise ValueError("branch_and_bound needs at least two variables")
    tol = options.tolerance
    S = _Searcher(catalog, tol)

    seed = greedy(catalog, SearchOptions(mode="connected"))
    best_w = seed.weight_sum
    best_c = seed.components
    best_key = structure_key(best_c)
    found_at = 0

    def offer(ranks, at):
        nonlocal best_w, best_c, best_key, found_at
        comps = [S.comps[r] for r in ranks]
        w = _total(catalog, comps)
        key = structure_key(comps)
        if w > best_w + tol or (abs(w - best_w) <= tol and key < best_key):
            best_w, best_c, best_key, found_at = w, key, key, at
        return w

    root_labels = tuple(range(n))
    root_ub = S.upper_bound(0.0, -1, root_labels, n - 1)
    heap = [(-root_ub, (), 0.0, -1, root_labels, n - 1)]
    expanded = 0
    pruned = 0
    records = []
    exhausted = False

    while heap:
        neg_ub, ranks, weight, last, labels, k = heapq.heappop(heap)
        ub = -neg_ub
        if ub < best_w - tol:
            pruned += 1 + len(heap)
            heap.clear()
            break
        if expanded >= options.node_budget:
            heapq.heappush(heap, (neg_ub, ranks, weight, last, labels, k))
            exhausted = True
            break
        expanded += 1

        completion = S.complete(ranks, last, labels, k)
        lb = None
        if completion is not None:
            lb = offer(completion, expanded)
        if trace:
            records.append((ranks, ub, lb))
        if completion is None:
            pruned += 1
            continue

        parts = S._parts(labels)
        for r in range(last + 1, len(S.comps)):
            s = S.slots[r]
            if s > k:
                continue
            c = S.comps[r]
            if not parts.disjoint(c):
                continue
            child = S._parts(labels)
            child.join(c)
            # canonical labels keep the heap tuples comparable and small
            child_labels = tuple(child.find(x) for x in range(n))
            cw = weight + S.weights[r]
            ck = k - s
            cranks = ranks + (r,)
            if ck == 0:
                offer(cranks, expanded)
                continue
            cub = S.upper_bound(cw, r, child_labels, ck)
            if cub is None or cub < best_w - tol:
                pruned += 1
                continue
            heapq.heappush(heap, (-cub, cranks, cw, r, child_labels, ck))

    return SearchReport(
        topology=_topology(catalog, best_c),
        weight_sum=_total(catalog, best_c),
        components=best_c,
        nodes_expanded=expanded,
        nodes_pruned=pruned,
        greedy_iterations=seed.greedy_iterations,
        optimal=not exhausted,
        method="exact",
        incumbent_found_at=found_at,
        trace=records,
    )


def enumerate_structures(n: int):
    """Yield every connected structure over ``n`` variables as a key.

    Components are added in ascending lexicographic order so each structure
    appears once.
    """
    if n == 1:
        yield ()
        return
    items = list(combinations(range(n), 2)) + list(combinations(range(n), 3))
    items.sort()

    def rec(start, chosen, parts_labels, k):
        if k == 0:
            yield tuple(chosen)
            return
        for i in range(start, len(items)):
            c = items[i]
            s = len(c) - 1
            if s > k:
                continue
            p = _Parts(n)
            p.label = list(parts_labels)
            if not p.disjoint(c):
                continue
            p.join(c)
            chosen.append(c)
            yield from rec(i + 1, chosen, tuple(p.find(x) for x in range(n)), k - s)
            chosen.pop()

    yield from rec(0, [], tuple(range(n)), n - 1)


def brute_force(catalog: WeightCatalog, tolerance: float = 1e-12) -> SearchReport:
    """Exhaustive enumeration of connected structures (n <= 6)."""
    n = catalog.n
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute_force is limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    if n < 2:
        raise ValueError("brute_force needs at least two variables")
    best_w = -math.inf
    best_key = None
    count = 0
    for key in enumerate_structures(n):
        count += 1
        w = _total(catalog, key)
        if best_key is None or w > best_w + tolerance or (abs(w - best_w) <= tolerance and key < best_key):
            best_w, best_key = w, key
    return SearchReport(
        topology=_topology(catalog, best_key),
        weight_sum=best_w,
        components=best_key,
        nodes_expanded=count,
        optimal=True,
        method="brute-force",
    )

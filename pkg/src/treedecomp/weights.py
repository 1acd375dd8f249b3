"""Mutual-information weights of pair and triple components."""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .distribution import JointTable, marginal

__all__ = ["CLAMP", "WeightCatalog", "mi_pair", "mi_triple", "mi_of", "build_catalog"]

CLAMP = 1e-12


def _mi_from_joint(joint: np.ndarray, k: int) -> float:
    # joint is LSB-first over k variables
    idx = np.arange(1 << k)
    prod = np.ones(1 << k)
    for i in range(k):
        bit = (idx >> i) & 1
        p_true = joint[bit == 1].sum()
        prod *= np.where(bit == 1, p_true, 1.0 - p_true)
    nz = joint > 0
    return float(np.sum(joint[nz] * np.log(joint[nz] / prod[nz])))


def mi_pair(table: JointTable, a: str, b: str) -> float:
    """I(a; b) in nats."""
    if a == b:
        raise ValueError("mi_pair needs two distinct variables")
    return _mi_from_joint(marginal(table, [a, b]).probs, 2)


def mi_triple(table: JointTable, a: str, b: str, c: str) -> float:
    """Sum over outcomes of P(abc) log[P(abc) / (P(a) P(b) P(c))], in nats."""
    if len({a, b, c}) != 3:
        raise ValueError("mi_triple needs three distinct variables")
    return _mi_from_joint(marginal(table, [a, b, c]).probs, 3)


def mi_of(table: JointTable, names) -> float:
    names = list(names)
    if len(names) == 2:
        return mi_pair(table, *names)
    if len(names) == 3:
        return mi_triple(table, *names)
    raise ValueError("components have two or three variables")


@dataclass(frozen=True)
class WeightCatalog:
    """All pair and triple weights, sorted by weight descending.

    ``entries`` holds ``(index_tuple, weight)`` with sorted variable-index
    tuples; ties go to the lexicographically smaller tuple.
    """

    variables: tuple
    entries: tuple

    @property
    def n(self) -> int:
        return len(self.variables)

    def weight(self, indices) -> float:
        return self._lookup()[tuple(sorted(indices))]

    def weight_of_names(self, names) -> float:
        return self.weight(self.variables.index(v) for v in names)

    def rank(self, indices) -> int:
        return self._ranks()[tuple(sorted(indices))]

    def _lookup(self) -> dict:
        cache = self.__dict__.get("_w")
        if cache is None:
            cache = dict(self.entries)
            object.__setattr__(self, "_w", cache)
        return cache

    def _ranks(self) -> dict:
        cache = self.__dict__.get("_r")
        if cache is None:
            cache = {e[0]: r for r, e in enumerate(self.entries)}
            object.__setattr__(self, "_r", cache)
        return cache

    def to_dict(self) -> dict:
        return {
            "variables": list(self.variables),
            "entries": [[list(s), w] for s, w in self.entries],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def build_catalog(table: JointTable) -> WeightCatalog:
    n = table.n
    if n < 2:
        raise ValueError("a catalog needs at least two variables")
    names = table.variables
    entries = []
    for size in (2, 3):
        for combo in combinations(range(n), size):
            w = mi_of(table, [names[i] for i in combo])
            if w < CLAMP:
                w = 0.0
            entries.append((combo, w))
    entries.sort(key=lambda e: (-e[1], e[0]))
    return WeightCatalog(tuple(names), tuple(entries))

"""
Exact joint probability tables over binary variables.

A table over ``n`` variables stores ``2**n`` probabilities.  Outcome index
``k`` encodes an assignment in LSB-first order: bit ``i`` of ``k`` is 1 iff
variable ``i`` is true.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

__all__ = [
    "MAX_VARIABLES",
    "JointTable",
    "TripletStats",
    "ZeroProbabilityEvidence",
    "as_evidence",
    "validate",
    "marginal",
    "entropy",
    "triplet_stats",
    "posterior",
    "evidence_probability",
    "random_table",
]

MAX_VARIABLES = 20
MAX_RANDOM_VARIABLES = 12
SUM_TOL = 1e-12

EvidenceLike = Union[Mapping[str, bool], Iterable[tuple]]


class ZeroProbabilityEvidence(ValueError):
    """Raised when conditioning on an event of probability zero."""


@dataclass(frozen=True, eq=False)
class JointTable:
    """Dense joint distribution over named binary variables."""

    variables: tuple
    probs: np.ndarray

    def __init__(self, variables: Sequence[str], probs):
        object.__setattr__(self, "variables", tuple(variables))
        arr = np.array(probs, dtype=float).reshape(-1)
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @property
    def n(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def bits(self) -> np.ndarray:
        """(2**n, n) array of outcome assignments, column i = variable i."""
        k = np.arange(1 << self.n)
        return ((k[:, None] >> np.arange(self.n)[None, :]) & 1).astype(bool)

    def __eq__(self, other):
        if not isinstance(other, JointTable):
            return NotImplemented
        return self.variables == other.variables and np.array_equal(self.probs, other.probs)

    def __repr__(self):
        return f"JointTable(variables={list(self.variables)}, probs={self.probs.tolist()})"


@dataclass(frozen=True)
class TripletStats:
    """Joint-occurrence probabilities of a binary triplet.

    ``p1..p3`` are marginals of the variables being true, ``pij`` pairwise
    true-true probabilities and ``p123`` the all-true probability.
    """

    p1: float
    p2: float
    p3: float
    p12: float
    p13: float
    p23: float
    p123: float

    def as_tuple(self) -> tuple:
        return (self.p1, self.p2, self.p3, self.p12, self.p13, self.p23, self.p123)

    def marginals(self) -> tuple:
        return (self.p1, self.p2, self.p3)

    def pair(self, i: int, j: int) -> float:
        """Pairwise joint for 0-based observable indices ``i != j``."""
        key = tuple(sorted((i, j)))
        return {(0, 1): self.p12, (0, 2): self.p13, (1, 2): self.p23}[key]

    def covariances(self) -> tuple:
        """(c12, c13, c23) with ``cij = pij - pi*pj``."""
        return (
            self.p12 - self.p1 * self.p2,
            self.p13 - self.p1 * self.p3,
            self.p23 - self.p2 * self.p3,
        )

    def cells(self) -> np.ndarray:
        """The implied 8-cell table (LSB-first) by inclusion-exclusion."""
        p1, p2, p3, p12, p13, p23, p123 = self.as_tuple()
        out = np.empty(8)
        out[7] = p123
        out[3] = p12 - p123
        out[5] = p13 - p123
        out[6] = p23 - p123
        out[1] = p1 - p12 - p13 + p123
        out[2] = p2 - p12 - p23 + p123
        out[4] = p3 - p13 - p23 + p123
        out[0] = 1.0 - p1 - p2 - p3 + p12 + p13 + p23 - p123
        return out

    def to_table(self, names: Sequence[str] = ("X1", "X2", "X3")) -> JointTable:
        return JointTable(names, self.cells())

    def violations(self, tol: float = 1e-12) -> list:
        bad = []
        cells = self.cells()
        if np.any(cells < -tol):
            bad.append("negative implied cell")
        for v in self.marginals():
            if v < -tol or v > 1 + tol:
                bad.append("marginal outside [0,1]")
                break
        return bad


def _check_names(variables) -> list:
    problems = []
    if len(variables) == 0:
        problems.append("empty variable list")
    if len(set(variables)) != len(variables):
        problems.append("duplicate variable names")
    if any(not isinstance(v, str) or v == "" for v in variables):
        problems.append("bad variable name")
    if len(variables) > MAX_VARIABLES:
        problems.append(f"too many variables (max {MAX_VARIABLES})")
    return problems


def validate(table: JointTable) -> list:
    """Return the list of violated table invariants (empty when valid).

    Possible entries: ``"sum"``, ``"negative entry"``, ``"non-finite entry"``,
    ``"size"`` and variable-name problems.
    """
    problems = _check_names(table.variables)
    p = table.probs
    if p.size != 1 << len(table.variables):
        problems.append("size")
        return problems
    if not np.all(np.isfinite(p)):
        problems.append("non-finite entry")
        return problems
    if np.any(p < 0):
        problems.append("negative entry")
    if abs(p.sum() - 1.0) > SUM_TOL:
        problems.append("sum")
    return problems


def marginal(table: JointTable, subset: Sequence[str]) -> JointTable:
    """Marginal table over ``subset``, with entries ordered by ``subset``'s order."""
    subset = list(subset)
    if not subset:
        raise ValueError("subset must be nonempty")
    if len(set(subset)) != len(subset):
        raise ValueError("subset variables must be distinct")
    idx = [table.index(v) for v in subset]
    n = table.n
    # axis a of the reshaped array is variable n-1-a (C order, LSB = last axis)
    arr = table.probs.reshape((2,) * n)
    keep_axes = [n - 1 - i for i in idx]
    drop = tuple(a for a in range(n) if a not in keep_axes)
    summed = arr.sum(axis=drop) if drop else arr
    remaining = [a for a in range(n) if a in keep_axes]
    # want new axis order: subset[-1], ..., subset[0]
    order = [remaining.index(keep_axes[j]) for j in reversed(range(len(subset)))]
    out = np.transpose(summed, order).reshape(-1)
    return JointTable(subset, out)


def entropy(table) -> float:
    """Shannon entropy in nats, with ``0 log 0 = 0``.

    Accepts a :class:`JointTable` or a plain probability vector.
    """
    p = table.probs if isinstance(table, JointTable) else np.asarray(table, dtype=float)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def triplet_stats(table: JointTable, a: str, b: str, c: str) -> TripletStats:
    if len({a, b, c}) != 3:
        raise ValueError("triplet variables must be distinct")
    m = marginal(table, [a, b, c]).probs
    # bit0=a, bit1=b, bit2=c
    return TripletStats(
        p1=float(m[1] + m[3] + m[5] + m[7]),
        p2=float(m[2] + m[3] + m[6] + m[7]),
        p3=float(m[4] + m[5] + m[6] + m[7]),
        p12=float(m[3] + m[7]),
        p13=float(m[5] + m[7]),
        p23=float(m[6] + m[7]),
        p123=float(m[7]),
    )


def as_evidence(evidence: EvidenceLike | None) -> dict:
    """Normalize evidence to a ``{name: bool}`` dict, rejecting repeats."""
    if evidence is None:
        return {}
    items = evidence.items() if isinstance(evidence, Mapping) else evidence
    out = {}
    for name, value in items:
        if name in out:
            raise ValueError(f"variable {name!r} assigned twice in evidence")
        out[name] = bool(value)
    return out


def _event_mask(table: JointTable, assignments: Mapping[str, bool]) -> np.ndarray:
    k = np.arange(1 << table.n)
    mask = np.ones(k.size, dtype=bool)
    for name, value in assignments.items():
        bit = (k >> table.index(name)) & 1
        mask &= bit == int(value)
    return mask


def evidence_probability(table: JointTable, evidence: EvidenceLike | None) -> float:
    ev = as_evidence(evidence)
    return float(table.probs[_event_mask(table, ev)].sum())


def posterior(table: JointTable, evidence: EvidenceLike | None, target: str) -> float:
    """Exact ``P(target = true | evidence)`` by summation over the table."""
    ev = as_evidence(evidence)
    if target in ev:
        raise ValueError("target variable is part of the evidence")
    table.index(target)
    mask = _event_mask(table, ev)
    pe = table.probs[mask].sum()
    if pe <= 0:
        raise ZeroProbabilityEvidence("evidence has zero probability")
    both = mask & _event_mask(table, {target: True})
    return float(table.probs[both].sum() / pe)


def _uniform_doubles(seed: int, size: int) -> np.ndarray:
    # PCG64 raw 64-bit outputs are a fixed bit stream; the top 53 bits give a
    # double in [0, 1) without relying on Generator method internals.
    bitgen = np.random.PCG64(seed)
    raw = bitgen.random_raw(size)
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def random_table(n: int, seed: int, min_mass: float = 1e-6, names: Sequence[str] | None = None) -> JointTable:
    """Seeded random joint table.

    Draws ``2**n`` uniforms from PCG64 seeded with ``seed`` (53-bit
    mantissas from the raw 64-bit stream), adds ``min_mass`` to each and
    normalizes.  Variables default to ``X0 .. X{n-1}``.
    """
    if not 1 <= n <= MAX_RANDOM_VARIABLES:
        raise ValueError(f"n must be in [1, {MAX_RANDOM_VARIABLES}], got {n}")
    if min_mass < 0:
        raise ValueError("min_mass must be nonnegative")
    if seed < 0 or seed >= 1 << 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    vals = _uniform_doubles(int(seed), 1 << n) + min_mass
    total = vals.sum()
    if total <= 0:
        vals = np.full(1 << n, 1.0)
        total = vals.sum()
    if names is None:
        names = [f"X{i}" for i in range(n)]
    return JointTable(names, vals / total)

"""
Tree-decomposable topologies, parameter projection and scoring.

A topology is a set of pair components P(child | parent) and triple
components P(child1, child2 | parent) plus one root per connected part.
Orientation is derived: :meth:`Topology.from_sets` orients unordered
component sets breadth-first from the roots.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .distribution import JointTable, entropy, marginal
from .weights import CLAMP, WeightCatalog, mi_of

__all__ = [
    "Component",
    "Topology",
    "Scores",
    "FittedModel",
    "ProjectionError",
    "validate_topology",
    "project_parameters",
    "model_joint",
    "log_score",
    "i_divergence",
    "quadratic_score",
    "spherical_score",
    "weight_sum",
    "reroot",
    "score_identity_gap",
    "direct_weight_sum",
]


class ProjectionError(ValueError):
    """A conditioning event of the topology has zero probability."""


@dataclass(frozen=True)
class Component:
    parent: str
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) not in (1, 2):
            raise ValueError("a component has one or two children")

    @property
    def kind(self) -> str:
        return "pair" if len(self.children) == 1 else "triple"

    @property
    def members(self) -> tuple:
        return (self.parent,) + self.children

    @classmethod
    def pair(cls, parent, child):
        return cls(parent, (child,))

    @classmethod
    def triple(cls, parent, child1, child2):
        return cls(parent, (child1, child2))


@dataclass(frozen=True)
class Topology:
    roots: tuple
    components: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(self.roots))
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def n_pairs(self) -> int:
        return sum(1 for c in self.components if c.kind == "pair")

    @property
    def n_triples(self) -> int:
        return sum(1 for c in self.components if c.kind == "triple")

    def component_sets(self) -> list:
        return [frozenset(c.members) for c in self.components]

    def variables(self) -> set:
        out = set(self.roots)
        for c in self.components:
            out.update(c.members)
        return out

    @classmethod
    def from_sets(cls, variables: Sequence[str], sets, roots: Sequence[str] = ()) -> "Topology":
        """Orient unordered component sets breadth-first.

        Each connected part is rooted at the given root lying in it, or else
        at its first variable in ``variables`` order.  Children are listed in
        ``variables`` order.
        """
        variables = list(variables)
        order = {v: i for i, v in enumerate(variables)}
        sets = [sorted(set(s), key=order.__getitem__) for s in sets]
        given = list(roots)
        parts = _parts(variables, sets)
        chosen = []
        for part in parts:
            in_part = [r for r in given if r in part]
            if len(in_part) > 1:
                raise ValueError("two roots given for one connected part")
            chosen.append(in_part[0] if in_part else min(part, key=order.__getitem__))
        leftover = set(given) - set(chosen)
        if leftover:
            raise ValueError(f"roots not among the variables: {sorted(leftover)}")
        chosen.sort(key=order.__getitem__)

        assigned = [False] * len(sets)
        comps = []
        reached = set()
        for r in chosen:
            queue = deque([r])
            reached.add(r)
            while queue:
                v = queue.popleft()
                for k, s in enumerate(sets):
                    if assigned[k] or v not in s:
                        continue
                    assigned[k] = True
                    kids = tuple(x for x in s if x != v)
                    if any(x in reached for x in kids):
                        raise ValueError("component sets contain a cycle")
                    comps.append(Component(v, kids))
                    for x in kids:
                        if x not in reached:
                            reached.add(x)
                            queue.append(x)
        if not all(assigned):
            raise ValueError("component sets contain a cycle or unreachable member")
        return cls(tuple(chosen), tuple(comps))


def _parts(variables, sets) -> list:
    parent = {v: v for v in variables}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in sets:
        for x in s[1:]:
            parent[find(x)] = find(s[0])
    groups = {}
    for v in variables:
        groups.setdefault(find(v), set()).add(v)
    return list(groups.values())


def validate_topology(topology: Topology, variables: Sequence[str], connected: bool | None = None) -> list:
    """Return every violated topology invariant as a short message.

    ``connected=True`` additionally requires exactly one root.
    """
    variables = list(variables)
    known = set(variables)
    n = len(variables)
    problems = []

    mentioned = set(topology.roots)
    for c in topology.components:
        mentioned.update(c.members)
        if len(set(c.members)) != len(c.members):
            problems.append(f"repeated variable within component {list(c.members)}")
    unknown = mentioned - known
    if unknown:
        problems.append(f"unknown variables {sorted(unknown)}")

    if not topology.roots:
        problems.append("no root")
    if len(set(topology.roots)) != len(topology.roots):
        problems.append("duplicate root")
    if connected and len(topology.roots) != 1:
        problems.append("connected topology needs exactly one root")

    parents_of = {}
    for c in topology.components:
        for ch in c.children:
            parents_of[ch] = parents_of.get(ch, 0) + 1
    if any(k > 1 for k in parents_of.values()):
        problems.append("multiple parents")
    if set(topology.roots) & set(parents_of):
        problems.append("root has a parent")
    uncovered = known - set(topology.roots) - set(parents_of)
    if uncovered:
        problems.append(f"uncovered variables {sorted(uncovered)}")

    sets = topology.component_sets()
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if len(sets[i] & sets[j]) >= 2:
                problems.append("shared pair of variables")
                break
        else:
            continue
        break

    uf = {v: v for v in mentioned}

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    cyclic = False
    for s in sets:
        roots_ = {find(x) for x in s}
        if len(roots_) < len(s):
            cyclic = True
        first = next(iter(roots_))
        for r in roots_:
            uf[r] = first
    if cyclic:
        problems.append("cycle in component graph")

    # orientation: every parent must be reachable from a root through children
    reached = set(topology.roots)
    pending = list(topology.components)
    progress = True
    while pending and progress:
        progress = False
        rest = []
        for c in pending:
            if c.parent in reached:
                reached.update(c.children)
                progress = True
            else:
                rest.append(c)
        pending = rest
    if pending:
        problems.append("component parent not reachable from a root")

    slots = topology.n_pairs + 2 * topology.n_triples
    if slots != n - len(topology.roots):
        problems.append(f"component count: pairs + 2*triples = {slots}, expected {n - len(topology.roots)}")
    if 2 * topology.n_triples > n:
        problems.append("more than n/2 triple components")
    return problems


@dataclass(frozen=True)
class Scores:
    weight_sum: float
    log_score: float
    i_divergence: float


@dataclass(frozen=True, eq=False)
class FittedModel:
    """Topology with projected parameters.

    ``root_priors[r]`` is ``[P(not r), P(r)]``.  ``cpts[k]`` belongs to
    ``topology.components[k]``: shape (2, 2) for a pair, rows indexed by the
    parent value and columns by the child value; shape (2, 4) for a triple,
    columns indexed by ``child1 + 2 * child2``.
    """

    variables: tuple
    topology: Topology
    root_priors: dict
    cpts: tuple
    scores: Scores | None = field(default=None)


def project_parameters(table: JointTable, topology: Topology, catalog: WeightCatalog | None = None) -> FittedModel:
    """Fit component CPTs as exact conditionals of ``table``."""
    problems = validate_topology(topology, table.variables)
    if problems:
        raise ValueError("invalid topology: " + "; ".join(problems))
    priors = {}
    for r in topology.roots:
        m = marginal(table, [r]).probs
        priors[r] = m.copy()
    cpts = []
    for c in topology.components:
        m = marginal(table, list(c.members)).probs
        # flat index = parent + 2*code  ->  rows: parent, cols: code
        joint = m.reshape(-1, 2).T
        rows = joint.sum(axis=1)
        if np.any(rows <= 0):
            raise ProjectionError(
                f"P({c.parent} = {int(np.argmin(rows))}) is zero; cannot condition on it"
            )
        cpts.append(joint / rows[:, None])
    model = FittedModel(tuple(table.variables), topology, priors, tuple(cpts))
    ws = weight_sum(topology, catalog) if catalog is not None else direct_weight_sum(table, topology)
    approx = model_joint(model)
    ls = log_score(table, approx)
    scores = Scores(ws, ls, -entropy(table) - ls)
    return FittedModel(model.variables, topology, priors, model.cpts, scores)


def direct_weight_sum(table: JointTable, topology: Topology) -> float:
    ws = []
    for c in topology.components:
        w = mi_of(table, c.members)
        ws.append(0.0 if w < CLAMP else w)
    return math.fsum(ws)


def model_joint(model: FittedModel) -> JointTable:
    """Multiply root priors and component CPTs over every outcome."""
    names = list(model.variables)
    n = len(names)
    pos = {v: i for i, v in enumerate(names)}
    k = np.arange(1 << n)
    bit = lambda v: (k >> pos[v]) & 1  # noqa: E731
    out = np.ones(k.size)
    for r in model.topology.roots:
        out *= np.asarray(model.root_priors[r])[bit(r)]
    for c, cpt in zip(model.topology.components, model.cpts):
        code = bit(c.children[0])
        if len(c.children) == 2:
            code = code + 2 * bit(c.children[1])
        out *= np.asarray(cpt)[bit(c.parent), code]
    return JointTable(names, out)


def _vectors(p, r):
    pv = p.probs if isinstance(p, JointTable) else np.asarray(p, dtype=float)
    rv = r.probs if isinstance(r, JointTable) else np.asarray(r, dtype=float)
    if isinstance(p, JointTable) and isinstance(r, JointTable) and p.variables != r.variables:
        raise ValueError("tables are over different variables")
    if pv.shape != rv.shape:
        raise ValueError("distribution vectors differ in length")
    return pv, rv


def log_score(p, r) -> float:
    """Expected logarithmic score sum_k p_k log r_k in nats.

    Returns ``-inf`` when ``r`` puts zero mass where ``p`` does not.
    """
    pv, rv = _vectors(p, r)
    nz = pv > 0
    if np.any(rv[nz] <= 0):
        return -math.inf
    return float(np.sum(pv[nz] * np.log(rv[nz])))


def i_divergence(p, r) -> float:
    """Directed divergence sum_k p_k log(p_k / r_k); ``+inf`` off-support."""
    pv, rv = _vectors(p, r)
    nz = pv > 0
    if np.any(rv[nz] <= 0):
        return math.inf
    return float(np.sum(pv[nz] * (np.log(pv[nz]) - np.log(rv[nz]))))


def quadratic_score(p, r) -> float:
    pv, rv = _vectors(p, r)
    return float(-np.sum((pv - rv) ** 2))


def spherical_score(p, r) -> float:
    pv, rv = _vectors(p, r)
    norm = math.sqrt(float(np.sum(rv * rv)))
    if norm == 0:
        raise ValueError("spherical score undefined for an all-zero assessment")
    return float(np.sum(pv * rv)) / norm


def weight_sum(topology: Topology, catalog: WeightCatalog) -> float:
    """Sum of catalog weights over the topology's components (exactly rounded)."""
    try:
        return math.fsum(catalog.weight_of_names(c.members) for c in topology.components)
    except (KeyError, ValueError) as exc:
        raise KeyError(f"component missing from catalog: {exc}") from None


def score_identity_gap(table: JointTable, topology: Topology, catalog: WeightCatalog | None = None) -> float:
    """log_score - (weight_sum - sum_i H(X_i)); zero in exact arithmetic."""
    model = project_parameters(table, topology, catalog)
    h = math.fsum(entropy(marginal(table, [v])) for v in table.variables)
    return model.scores.log_score - (model.scores.weight_sum - h)


def reroot(topology: Topology, new_root: str) -> Topology:
    """Reorient the connected part containing ``new_root`` so it becomes the root."""
    variables = []
    seen = set()
    for v in list(topology.roots) + [x for c in topology.components for x in c.members]:
        if v not in seen:
            seen.add(v)
            variables.append(v)
    if new_root not in seen:
        raise KeyError(f"unknown variable {new_root!r}")
    if new_root in topology.roots:
        return topology
    sets = [c.members for c in topology.components]
    parts = _parts(variables, [list(s) for s in sets])
    part = next(p for p in parts if new_root in p)
    roots = [r for r in topology.roots if r not in part] + [new_root]
    # keep the original variable order for the other parts' orientation
    return Topology.from_sets(variables, sets, roots)

import sys
import random
from pathlib import Path

import numpy as np
import pytest

from treedecomp.distribution import JointTable, TripletStats
from treedecomp.structure import Topology

DATA = Path(__file__).parent / "data"

REF_STATS = TripletStats(0.7, 0.56, 0.41, 0.428, 0.278, 0.226, 0.1708)


def ref_table():
    return REF_STATS.to_table(("X1", "X2", "X3"))


def xor_table():
    # A, B fair and independent, C = A xor B
    probs = np.zeros(8)
    for a in (0, 1):
        for b in (0, 1):
            probs[a | (b << 1) | ((a ^ b) << 2)] = 0.25
    return JointTable(["A", "B", "C"], probs)


def chain_table():
    # P(A) P(B|A) P(C|B)
    pa = 0.3
    pb = {0: 0.2, 1: 0.9}
    pc = {0: 0.6, 1: 0.15}
    probs = np.zeros(8)
    for a in (0, 1):
        for b in (0, 1):
            for c in (0, 1):
                p = (pa if a else 1 - pa)
                p *= pb[a] if b else 1 - pb[a]
                p *= pc[b] if c else 1 - pc[b]
                probs[a | (b << 1) | (c << 2)] = p
    return JointTable(["A", "B", "C"], probs)


def random_topology(variables, rng: random.Random, connected: bool = True) -> Topology:
    """Random valid topology: grow parts by attaching one or two new variables."""
    pending = list(variables)
    rng.shuffle(pending)
    sets = []
    roots = []
    covered = []
    while pending:
        if not covered or (not connected and rng.random() < 0.2):
            v = pending.pop()
            roots.append(v)
            covered.append(v)
            continue
        parent = rng.choice(covered)
        if len(pending) >= 2 and rng.random() < 0.5:
            a, b = pending.pop(), pending.pop()
            sets.append([parent, a, b])
            covered += [a, b]
        else:
            a = pending.pop()
            sets.append([parent, a])
            covered.append(a)
    return Topology.from_sets(variables, sets, roots)


@pytest.fixture
def ref():
    return ref_table()


@pytest.fixture
def xor():
    return xor_table()


@pytest.fixture
def chain():
    return chain_table()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treedecomp.distribution import JointTable, marginal, random_table
from treedecomp.weights import build_catalog, mi_pair, mi_triple

LN2 = math.log(2)


def mi_loop(table, names):
    """Direct summation of P log P / prod P(marginals) over the component outcomes."""
    joint = marginal(table, list(names)).probs
    singles = [marginal(table, [v]).probs for v in names]
    total = 0.0
    for k, p in enumerate(joint):
        if p == 0:
            continue
        q = 1.0
        for i, m in enumerate(singles):
            q *= m[(k >> i) & 1]
        total += p * math.log(p / q)
    return total


def mi_between(table, group, other):
    """I(group; other) treating ``group`` as one joint variable."""
    j = marginal(table, list(group) + [other]).probs
    g = marginal(table, list(group)).probs
    o = marginal(table, [other]).probs
    size = 1 << len(group)
    total = 0.0
    for k, p in enumerate(j):
        if p > 0:
            total += p * math.log(p / (g[k % size] * o[k // size]))
    return total


class TestPair:
    def test_independent(self):
        assert mi_pair(JointTable(["A", "B"], [0.25] * 4), "A", "B") == pytest.approx(0.0, abs=1e-15)

    def test_copies(self):
        assert mi_pair(JointTable(["A", "B"], [0.5, 0, 0, 0.5]), "A", "B") == pytest.approx(LN2, abs=1e-12)

    def test_reference_pair(self, ref):
        got = mi_pair(ref, "X1", "X2")
        assert got == pytest.approx(mi_loop(ref, ["X1", "X2"]), abs=1e-15)
        # hand summation of the four cells gives 0.0124775
        assert got == pytest.approx(0.0124775, abs=1e-6)

    def test_same_variable(self, ref):
        with pytest.raises(ValueError):
            mi_pair(ref, "X1", "X1")


class TestTriple:
    def test_independent(self):
        assert mi_triple(JointTable(["A", "B", "C"], [0.125] * 8), "A", "B", "C") == pytest.approx(0, abs=1e-15)

    def test_xor(self, xor):
        assert mi_triple(xor, "A", "B", "C") == pytest.approx(LN2, abs=1e-12)
        for a, b in itertools.combinations("ABC", 2):
            assert mi_pair(xor, a, b) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("seed", range(10))
    def test_chain_identity(self, seed):
        t = random_table(4, seed)
        a, b, c = "X0", "X2", "X3"
        lhs = mi_triple(t, a, b, c)
        assert lhs == pytest.approx(mi_loop(t, [a, b, c]), abs=1e-14)
        assert lhs == pytest.approx(mi_pair(t, a, b) + mi_between(t, [a, b], c), abs=1e-12)

    @given(st.integers(0, 2**32))
    @settings(max_examples=40, deadline=None)
    def test_symmetry_and_monotonicity(self, seed):
        t = random_table(3, seed, min_mass=0.0)
        names = t.variables
        ref = mi_triple(t, *names)
        for perm in itertools.permutations(names):
            assert mi_triple(t, *perm) == pytest.approx(ref, abs=1e-12)
        for a, b in itertools.combinations(names, 2):
            assert mi_pair(t, a, b) == pytest.approx(mi_pair(t, b, a), abs=1e-12)
            assert mi_pair(t, a, b) >= -1e-12
            assert ref >= mi_pair(t, a, b) - 1e-9


class TestCatalog:
    def test_counts(self, ref):
        cat = build_catalog(ref)
        sizes = [len(s) for s, _ in cat.entries]
        assert sizes.count(2) == 3 and sizes.count(3) == 1

    @pytest.mark.parametrize("n", [2, 4, 7])
    def test_invariants(self, n):
        cat = build_catalog(random_table(n, n))
        sizes = [len(s) for s, _ in cat.entries]
        assert sizes.count(2) == math.comb(n, 2)
        assert sizes.count(3) == math.comb(n, 3)
        keys = [(-w, s) for s, w in cat.entries]
        assert keys == sorted(keys)
        assert all(w >= 0 for _, w in cat.entries)

    def test_xor_first(self, xor):
        cat = build_catalog(xor)
        assert cat.entries[0] == ((0, 1, 2), pytest.approx(LN2, abs=1e-12))
        assert all(w == 0.0 for s, w in cat.entries[1:])

    def test_uniform_tie_break(self):
        cat = build_catalog(JointTable(list("ABCD"), np.full(16, 1 / 16)))
        assert all(w == 0.0 for _, w in cat.entries)
        assert [s for s, _ in cat.entries] == sorted(s for s, _ in cat.entries)

    def test_deterministic_bytes(self):
        t = random_table(6, 11)
        assert build_catalog(t).dumps() == build_catalog(t).dumps()

    def test_lookup(self, ref):
        cat = build_catalog(ref)
        assert cat.weight((1, 0)) == pytest.approx(mi_pair(ref, "X1", "X2"), abs=1e-15)
        assert cat.weight_of_names(["X3", "X1", "X2"]) == pytest.approx(mi_triple(ref, "X1", "X2", "X3"))

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treedecomp.distribution import (
    JointTable,
    ZeroProbabilityEvidence,
    entropy,
    evidence_probability,
    marginal,
    posterior,
    random_table,
    triplet_stats,
    validate,
)


def brute_marginal(table, subset):
    """Loop over outcomes and accumulate into the subset's cells."""
    idx = [table.variables.index(v) for v in subset]
    out = np.zeros(1 << len(subset))
    for k, p in enumerate(table.probs):
        j = sum(((k >> i) & 1) << pos for pos, i in enumerate(idx))
        out[j] += p
    return out


class TestValidate:
    def test_uniform_ok(self):
        assert validate(JointTable(["A", "B"], [0.25] * 4)) == []

    def test_sum(self):
        assert "sum" in validate(JointTable(["A"], [0.4, 0.5]))

    def test_negative(self):
        assert "negative entry" in validate(JointTable(["A"], [1.1, -0.1]))

    def test_bad_names(self):
        assert validate(JointTable(["A", "A"], [0.25] * 4)) == ["duplicate variable names"]
        assert "size" in validate(JointTable(["A", "B"], [0.5, 0.5]))

    def test_reports_all(self):
        problems = validate(JointTable(["A"], [-0.1, 0.5]))
        assert "sum" in problems and "negative entry" in problems


class TestMarginal:
    def test_identity(self, ref):
        m = marginal(ref, list(ref.variables))
        assert m == ref

    def test_fair_coins(self):
        t = JointTable(["A", "B"], [0.25] * 4)
        np.testing.assert_allclose(marginal(t, ["A"]).probs, [0.5, 0.5])

    def test_reference_pair(self, ref):
        # order: (~X1,~X2), (X1,~X2), (~X1,X2), (X1,X2)
        np.testing.assert_allclose(marginal(ref, ["X1", "X2"]).probs,
                                   [0.168, 0.272, 0.132, 0.428], atol=1e-12)

    def test_subset_order(self, ref):
        swapped = marginal(ref, ["X2", "X1"]).probs
        np.testing.assert_allclose(swapped, [0.168, 0.132, 0.272, 0.428], atol=1e-12)

    def test_unknown(self, ref):
        with pytest.raises(KeyError):
            marginal(ref, ["Q"])

    @pytest.mark.parametrize("seed", range(5))
    def test_against_brute_force(self, seed):
        t = random_table(5, seed)
        for size in (1, 2, 3, 4):
            for subset in itertools.permutations(t.variables, size):
                np.testing.assert_allclose(marginal(t, subset).probs, brute_marginal(t, subset), atol=1e-15)

    @given(st.integers(0, 2**32), st.integers(2, 6), st.data())
    @settings(max_examples=40, deadline=None)
    def test_projection_property(self, seed, n, data):
        t = random_table(n, seed)
        s = data.draw(st.lists(st.sampled_from(t.variables), min_size=1, max_size=n, unique=True))
        sub = data.draw(st.lists(st.sampled_from(s), min_size=1, max_size=len(s), unique=True))
        np.testing.assert_allclose(marginal(marginal(t, s), sub).probs, marginal(t, sub).probs, atol=1e-12)


class TestEntropy:
    def test_values(self):
        assert entropy([1.0, 0.0]) == 0.0
        assert entropy([0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-12)
        assert entropy([0.25, 0.75]) == pytest.approx(0.562335, abs=1e-6)

    @given(st.integers(0, 2**32), st.integers(2, 7))
    @settings(max_examples=40, deadline=None)
    def test_subadditive(self, seed, n):
        t = random_table(n, seed, min_mass=0.0)
        assert entropy(t) >= 0
        assert entropy(t) <= sum(entropy(marginal(t, [v])) for v in t.variables) + 1e-9


class TestTripletStats:
    def test_reference(self, ref):
        s = triplet_stats(ref, "X1", "X2", "X3")
        expected = (0.7, 0.56, 0.41, 0.428, 0.278, 0.226, 0.1708)
        np.testing.assert_allclose(s.as_tuple(), expected, atol=1e-12)

    def test_coins(self):
        t = JointTable(["A", "B", "C"], [0.125] * 8)
        np.testing.assert_allclose(triplet_stats(t, "A", "B", "C").as_tuple(),
                                   [0.5] * 3 + [0.25] * 3 + [0.125])

    @pytest.mark.parametrize("seed", range(10))
    def test_consistent_with_marginal(self, seed):
        t = random_table(6, seed, min_mass=0.0)
        s = triplet_stats(t, "X4", "X1", "X3")
        m = marginal(t, ["X4", "X1", "X3"]).probs
        np.testing.assert_allclose(s.cells(), m, atol=1e-14)
        np.testing.assert_allclose(marginal(t, ["X4", "X1"]).probs[3], s.p12, atol=1e-14)
        assert s.violations() == []
        assert 0 <= s.p123 <= min(s.p12, s.p13, s.p23)
        assert s.p12 >= s.p1 + s.p2 - 1 - 1e-12


class TestPosterior:
    def test_reference_single(self, ref):
        assert posterior(ref, {"X2": True}, "X1") == pytest.approx(0.428 / 0.56, abs=1e-12)

    def test_empty(self, ref):
        assert posterior(ref, {}, "X3") == pytest.approx(0.41, abs=1e-12)

    def test_reference_double(self, ref):
        assert posterior(ref, {"X2": True, "X3": True}, "X1") == pytest.approx(0.1708 / 0.226, abs=1e-12)

    def test_zero_evidence(self):
        t = JointTable(["A", "B"], [0.5, 0.5, 0.0, 0.0])
        with pytest.raises(ZeroProbabilityEvidence):
            posterior(t, {"B": True}, "A")

    def test_duplicate_evidence(self, ref):
        with pytest.raises(ValueError):
            posterior(ref, [("X2", True), ("X2", False)], "X1")

    @given(st.integers(0, 2**32), st.data())
    @settings(max_examples=50, deadline=None)
    def test_product_rule(self, seed, data):
        t = random_table(5, seed)
        names = list(t.variables)
        target = data.draw(st.sampled_from(names))
        others = [v for v in names if v != target]
        keys = data.draw(st.lists(st.sampled_from(others), max_size=4, unique=True))
        ev = {k: data.draw(st.booleans()) for k in keys}
        both = dict(ev, **{target: True})
        direct = sum(p for k, p in enumerate(t.probs)
                     if all(((k >> names.index(v)) & 1) == int(b) for v, b in both.items()))
        assert posterior(t, ev, target) * evidence_probability(t, ev) == pytest.approx(direct, abs=1e-15)


class TestRandomTable:
    def test_deterministic(self):
        assert random_table(3, 1) == random_table(3, 1)
        assert random_table(3, 1) != random_table(3, 2)

    def test_min_mass(self):
        assert np.all(random_table(4, 9, min_mass=1e-3).probs > 0)

    def test_valid(self):
        assert validate(random_table(4, 7, min_mass=0.01)) == []

    def test_frozen_stream(self):
        # pins the PCG64 raw stream -> double conversion
        t = random_table(2, 0, min_mass=0.0)
        assert t.probs.tolist() == [
            0.6605776278063374, 0.2797893043476967, 0.04249265502679791, 0.017140412819167932,
        ]

    @pytest.mark.parametrize("n", [0, 13])
    def test_range(self, n):
        with pytest.raises(ValueError):
            random_table(n, 1)

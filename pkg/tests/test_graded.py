import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from properad.graded import (
    DGVectorSpace, GradedBasis, all_permutations, compose_perm,
    derivation_matrix, derivation_on_word, dualize_differential,
    dual_basis_name, identity_perm, invert_perm, koszul_sign, permute_word,
    unordered_word_iso,
)
from oracles import brute_force_koszul


def two_dim():
    return DGVectorSpace(GradedBasis([("a", 0), ("b", 1)]),
                         {("b", "a"): Fraction(1)})


class TestKoszulSign:
    def test_identity(self):
        assert koszul_sign((0, 1, 2), [1, 1, 1]) == 1

    def test_odd_transposition(self):
        assert koszul_sign((1, 0), [1, 1]) == -1

    def test_even_factor_commutes_freely(self):
        assert koszul_sign((1, 0), [0, 1]) == 1

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            koszul_sign((0, 1), [1])

    def test_not_a_permutation(self):
        with pytest.raises(ValueError):
            koszul_sign((0, 0), [1, 1])

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_multiplicative_exhaustive(self, n):
        degree_vectors = [[d >> i & 1 for i in range(n)] for d in range(2 ** n)]
        perms = all_permutations(n)
        for deg in degree_vectors:
            for tau in perms:
                tau_deg = permute_word(tau, tuple(deg))
                for sigma in perms:
                    lhs = koszul_sign(compose_perm(sigma, tau), deg)
                    rhs = koszul_sign(sigma, list(tau_deg)) * koszul_sign(tau, deg)
                    assert lhs == rhs

    @given(st.integers(2, 6).flatmap(
        lambda n: st.tuples(st.permutations(range(n)),
                            st.lists(st.integers(-2, 3), min_size=n, max_size=n))))
    def test_against_bubble_sort_oracle(self, data):
        perm, degrees = tuple(data[0]), data[1]
        assert koszul_sign(perm, degrees) == brute_force_koszul(perm, degrees)


class TestDGVectorSpace:
    def test_degree_raise_enforced(self):
        with pytest.raises(ValueError):
            DGVectorSpace(GradedBasis([("a", 0), ("b", 2)]), {("b", "a"): 1})

    def test_square_zero_enforced(self):
        basis = GradedBasis([("a", 0), ("b", 1), ("c", 2)])
        with pytest.raises(ValueError):
            DGVectorSpace(basis, {("b", "a"): 1, ("c", "b"): 1})

    def test_valid_three_step_with_cancellation(self):
        basis = GradedBasis([("a", 0), ("b", 1), ("b2", 1), ("c", 2)])
        V = DGVectorSpace(basis, {("b", "a"): 1, ("b2", "a"): 1,
                                  ("c", "b"): 1, ("c", "b2"): -1})
        assert V.d("a") == {"b": 1, "b2": 1}


class TestDualDifferential:
    def test_zero_dualizes_to_zero(self):
        V = DGVectorSpace(GradedBasis([("a", 0), ("b", 1)]), {})
        assert dualize_differential(V).differential == {}

    def test_two_dim_sign(self):
        # (d phi^b)(a) = (-1)^{|phi^b|} phi^b(d a) = -1
        dual = dualize_differential(two_dim())
        assert dual.differential == {(dual_basis_name("a"), dual_basis_name("b")):
                                     Fraction(-1)}
        assert dual.degree(dual_basis_name("b")) == -1

    def test_square_zero_on_dual(self):
        basis = GradedBasis([("a", 0), ("b", 1), ("b2", 1), ("c", 2)])
        V = DGVectorSpace(basis, {("b", "a"): 2, ("b2", "a"): 1,
                                  ("c", "b"): 1, ("c", "b2"): -2})
        dualize_differential(V)  # constructor re-checks d^2 = 0

    @pytest.mark.parametrize("elements,diff", [
        ([("a", 0), ("b", 1)], {("b", "a"): Fraction(1)}),
        ([("a", -1), ("b", 0), ("c", 1)], {("b", "a"): Fraction(3), ("c", "b"): 0}),
        ([("x", 2), ("y", 3), ("z", 3)], {("y", "x"): Fraction(1, 2),
                                          ("z", "x"): Fraction(5)}),
    ])
    def test_double_dual_recovers_d(self, elements, diff):
        # V^{##} is identified with V through the graded evaluation
        # v |-> (-1)^{|v|} ev_v, which contributes (-1)^{|src|+|tgt|} = -1
        # on every differential entry
        V = DGVectorSpace(GradedBasis(elements), diff)
        dd = dualize_differential(dualize_differential(V))
        recovered = {}
        for (t, s), c in dd.differential.items():
            tgt, src = t[:-2], s[:-2]
            sign = (-1) ** (V.degree(tgt) + V.degree(src))
            recovered[(tgt, src)] = sign * c
        assert recovered == V.differential


class TestDerivationExtension:
    def test_arity_zero_is_zero(self):
        assert derivation_matrix(two_dim(), 0) == {}

    def test_arity_one_is_d(self):
        V = two_dim()
        assert derivation_matrix(V, 1) == {(("b",), ("a",)): Fraction(1)}

    def test_arity_two_leibniz(self):
        V = two_dim()
        assert derivation_on_word(V, ("a", "a")) == {("b", "a"): Fraction(1),
                                                     ("a", "b"): Fraction(1)}

    def test_sign_past_odd_factor(self):
        V = two_dim()
        assert derivation_on_word(V, ("b", "a")) == {("b", "b"): Fraction(-1)}

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_squares_to_zero(self, m):
        rng = random.Random(m)
        basis = GradedBasis([("a", 0), ("b", 1), ("c", 2)])
        V = DGVectorSpace(basis, {("b", "a"): Fraction(rng.randint(1, 5)),
                                  ("c", "b"): 0})
        from properad.graded import add_to, iter_words
        for word in iter_words(V.basis.names, m):
            twice = {}
            for mid, c1 in derivation_on_word(V, word).items():
                for tgt, c2 in derivation_on_word(V, mid).items():
                    add_to(twice, tgt, c1 * c2)
            assert twice == {}


class TestUnorderedIso:
    def test_identity_ordering(self):
        V = two_dim()
        word, sign = unordered_word_iso(("a", "b"), ["u", "v"], ["u", "v"],
                                        V.degree)
        assert word == ("a", "b") and sign == 1

    def test_singleton_any_ordering(self):
        V = two_dim()
        word, sign = unordered_word_iso(("b",), ["x"], ["x"], V.degree)
        assert word == ("b",) and sign == 1

    def test_odd_flip(self):
        V = two_dim()
        word, sign = unordered_word_iso(("b", "b"), ["u", "v"], ["v", "u"],
                                        V.degree)
        assert word == ("b", "b") and sign == -1

    def test_composite_is_koszul_action(self):
        V = two_dim()
        rng = random.Random(0)
        labels = ["p", "q", "r", "s"]
        for _ in range(40):
            order1 = labels[:]
            order2 = labels[:]
            rng.shuffle(order1)
            rng.shuffle(order2)
            word = tuple(rng.choice(["a", "b"]) for _ in labels)
            mid, s1 = unordered_word_iso(word, order1, sorted(labels), V.degree)
            out, s2 = unordered_word_iso(mid, sorted(labels), order2, V.degree)
            direct, sd = unordered_word_iso(word, order1, order2, V.degree)
            assert out == direct and s1 * s2 == sd

import itertools

import pytest
from hypothesis import assume, given, strategies as st

from twuality import (
    BAR,
    FLIPS,
    ONE,
    PLUS,
    STAR,
    RibbonLoopClass,
    SetSystem,
    ValidationError,
    BudgetError,
    apply_flip,
    classify_element,
    dual_twist,
    is_delta_matroid,
    is_vf_safe,
    loop_complement,
    members_of,
    min_max_matroids,
    reduce_word,
    twist,
)

from conftest import set_systems, subset_of

ss = SetSystem.from_sets


def all_subsets_but_full(n):
    return [s for r in range(n) for s in itertools.combinations(range(1, n + 1), r)]


def exchange_refuted(D, X, Y, u):
    """Direct re-check that (X, Y, u) refutes symmetric exchange."""
    fam = set(D.feasible_sets())
    if X not in fam or Y not in fam:
        return False
    diff = set(X) ^ set(Y)
    if u not in diff:
        return False
    for v in diff:
        cand = tuple(sorted(set(X) ^ {u, v}))
        if cand in fam:
            return False
    return True


class TestSetSystemType:
    def test_canonical_form(self):
        D = ss(3, [(1, 3), (3,), (2, 3), (3,)])
        assert D.feasible_sets() == ((3,), (1, 3), (2, 3))
        assert D == ss(3, [(2, 3), (1, 3), (3,)])
        assert hash(D) == hash(ss(3, [(2, 3), (1, 3), (3,)]))
        assert D != ss(4, [(3,), (1, 3), (2, 3)])

    def test_validation(self):
        with pytest.raises(ValidationError):
            ss(2, [(3,)])
        with pytest.raises(ValidationError):
            ss(2, [(0,)])
        with pytest.raises(ValidationError):
            ss(2, [(1, 1)])
        with pytest.raises(ValidationError):
            SetSystem(17, [])
        with pytest.raises(ValidationError):
            SetSystem(2, [4])

    def test_json_round_trip(self):
        D = ss(3, [(3,), (1, 3), (2, 3)])
        data = D.to_json()
        assert data == {"n": 3, "feasible": [[3], [1, 3], [2, 3]]}
        assert SetSystem.from_json(data) == D

    def test_json_rejects_duplicates_and_range(self):
        with pytest.raises(ValidationError):
            SetSystem.from_json({"n": 2, "feasible": [[1], [1]]})
        with pytest.raises(ValidationError):
            SetSystem.from_json({"n": 2, "feasible": [[3]]})
        with pytest.raises(ValidationError):
            SetSystem.from_json({"n": 2, "feasible": [[1, 1]]})
        # ascending order within a set is canonical on output, not required on input
        assert SetSystem.from_json({"n": 2, "feasible": [[2, 1]]}).feasible_sets() == ((1, 2),)

    def test_zero_ground(self):
        D = ss(0, [()])
        assert D.is_proper and D.is_normal
        assert D.to_json() == {"n": 0, "feasible": [[]]}


class TestTwist:
    def test_fixed_point_example(self):
        D = ss(2, [(1,), (2,)])
        assert twist(D, (1, 2)) == D

    def test_empty_set_identity(self):
        D = ss(3, [(1,), (2, 3)])
        assert twist(D, ()) == D

    def test_worked_example(self):
        D = ss(2, [(), (1,), (1, 2)])
        assert twist(D, (1, 2)) == ss(2, [(), (2,), (1, 2)])

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            twist(ss(2, [()]), (3,))

    @given(set_systems(), st.data())
    def test_involution_and_size(self, D, data):
        I = members_of(data.draw(subset_of(D.n)))
        T = twist(D, I)
        assert len(T.masks) == len(D.masks)
        assert twist(T, I) == D


def single_loop_complement_oracle(D, i):
    """The one-element defining rule, computed on raw sets."""
    fam = {frozenset(s) for s in D.feasible_sets()}
    toggles = {frozenset(s | {i}) for s in fam if i not in s}
    return SetSystem.from_sets(D.n, (tuple(s) for s in fam ^ toggles))


class TestLoopComplement:
    def test_single_element_example(self):
        D = ss(3, all_subsets_but_full(3))
        got = loop_complement(D, (1,))
        assert got == single_loop_complement_oracle(D, 1)
        assert got == ss(3, [(), (2,), (3,), (2, 3), (1, 2, 3)])

    def test_tiny_example(self):
        assert loop_complement(ss(1, [()]), (1,)) == ss(1, [(), (1,)])

    @given(set_systems(), st.data())
    def test_involution(self, D, data):
        I = members_of(data.draw(subset_of(D.n)))
        assert loop_complement(loop_complement(D, I), I) == D

    @given(set_systems(max_n=4), st.integers(1, 4))
    def test_agrees_with_single_element_rule(self, D, i):
        assume(i <= D.n)
        assert loop_complement(D, (i,)) == single_loop_complement_oracle(D, i)


class TestDualTwist:
    def test_fixed_point_example(self):
        D = ss(3, [(), (1,), (2,)])
        assert dual_twist(D, (1, 2, 3)) == D

    def test_empty_set_identity(self):
        D = ss(2, [(1,), (1, 2)])
        assert dual_twist(D, ()) == D

    def test_tiny_example(self):
        assert dual_twist(ss(1, [()]), (1,)) == ss(1, [()])

    @given(set_systems(), st.data())
    def test_involution(self, D, data):
        I = members_of(data.draw(subset_of(D.n)))
        assert dual_twist(dual_twist(D, I), I) == D

    @given(set_systems(max_n=4), st.integers(1, 4))
    def test_equals_both_three_letter_words(self, D, i):
        assume(i <= D.n)
        direct = dual_twist(D, (i,))
        assert direct == apply_flip(D, reduce_word("+*+"), i)
        assert direct == apply_flip(D, reduce_word("*+*"), i)
        # letterwise as well
        step = loop_complement(twist(loop_complement(D, (i,)), (i,)), (i,))
        assert direct == step


class TestApplyFlip:
    @given(set_systems(max_n=4), st.integers(1, 4))
    def test_bar_is_dual_twist(self, D, i):
        assume(i <= D.n)
        assert apply_flip(D, BAR, i) == dual_twist(D, (i,))

    @given(set_systems(max_n=4), st.integers(1, 4))
    def test_identity(self, D, i):
        assume(i <= D.n)
        assert apply_flip(D, ONE, i) == D

    def test_twist_step_of_worked_transport(self):
        D = ss(3, [(3,), (1, 3), (2, 3)])
        assert apply_flip(D, STAR, 1) == ss(3, [(3,), (1, 3), (1, 2, 3)])

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            apply_flip(ss(2, [()]), STAR, 3)


class TestDeltaMatroid:
    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_near_power_set_family(self, n):
        D = ss(n, all_subsets_but_full(n))
        assert is_delta_matroid(D).valid

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_complemented_family_fails_with_witness(self, n):
        D = loop_complement(ss(n, all_subsets_but_full(n)), (1,))
        w = is_delta_matroid(D)
        assert not w.valid
        assert (w.X, w.Y, w.u) == ((), tuple(range(1, n + 1)), 1)
        assert exchange_refuted(D, w.X, w.Y, w.u)

    def test_improper(self):
        w = is_delta_matroid(SetSystem(2, []))
        assert not w.valid and w.reason == "not proper"

    @given(set_systems(max_n=4, proper=True))
    def test_witness_always_refutes(self, D):
        w = is_delta_matroid(D)
        if not w.valid:
            assert exchange_refuted(D, w.X, w.Y, w.u)

    @given(set_systems(max_n=4, proper=True), st.data())
    def test_closed_under_twist(self, D, data):
        assume(is_delta_matroid(D).valid)
        I = members_of(data.draw(subset_of(D.n)))
        assert is_delta_matroid(twist(D, I)).valid


class TestMinMax:
    def test_example(self):
        dmin, dmax = min_max_matroids(ss(3, [(3,), (1, 3), (2, 3)]))
        assert dmin == ss(3, [(3,)])
        assert dmax == ss(3, [(1, 3), (2, 3)])

    def test_uniform_family(self):
        D = ss(3, [(1,), (2,)])
        assert min_max_matroids(D) == (D, D)

    def test_tiny(self):
        assert min_max_matroids(ss(1, [(), (1,)])) == (ss(1, [()]), ss(1, [(1,)]))

    def test_improper(self):
        with pytest.raises(ValidationError):
            min_max_matroids(SetSystem(2, []))


class TestClassifyElement:
    def test_orientable(self):
        assert classify_element(ss(1, [()]), 1) is RibbonLoopClass.ORIENTABLE_LOOP

    def test_non_orientable(self):
        assert classify_element(ss(1, [(), (1,)]), 1) is RibbonLoopClass.NON_ORIENTABLE_LOOP

    def test_not_ribbon_loop(self):
        assert classify_element(ss(1, [(1,)]), 1) is RibbonLoopClass.NOT_RIBBON_LOOP

    def test_rejects_non_delta_matroid(self):
        bad = loop_complement(ss(3, all_subsets_but_full(3)), (1,))
        with pytest.raises(ValidationError):
            classify_element(bad, 1)


class TestVfSafe:
    def test_counterexample_family(self):
        assert not is_vf_safe(ss(3, all_subsets_but_full(3)))

    def test_safe_example(self):
        assert is_vf_safe(ss(3, [(3,), (1, 3), (2, 3)]))

    def test_trivial(self):
        assert is_vf_safe(ss(0, [()]))

    def test_budget(self):
        with pytest.raises(BudgetError):
            is_vf_safe(SetSystem(5, [0]), max_n=4)

    def test_cache_consistency(self):
        cache = {}
        D = ss(3, [(3,), (1, 3), (2, 3)])
        assert is_vf_safe(D, cache=cache) is True
        assert is_vf_safe(D, cache=cache) is True
        assert cache
        bad = ss(3, all_subsets_but_full(3))
        assert is_vf_safe(bad, cache=cache) is False
        assert is_vf_safe(bad, cache=cache) is False


class TestWordProperties:
    @given(set_systems(max_n=4), st.data())
    def test_flips_commute_on_distinct_elements(self, D, data):
        assume(D.n >= 2)
        i = data.draw(st.integers(1, D.n))
        j = data.draw(st.integers(1, D.n))
        assume(i != j)
        g1 = data.draw(st.sampled_from(FLIPS))
        g2 = data.draw(st.sampled_from(FLIPS))
        one_way = apply_flip(apply_flip(D, g1, i), g2, j)
        other = apply_flip(apply_flip(D, g2, j), g1, i)
        assert one_way == other

    @given(set_systems(max_n=4), st.integers(1, 4))
    def test_star_plus_has_order_three(self, D, i):
        assume(i <= D.n)
        word = reduce_word("*+")
        out = D
        for _ in range(3):
            out = apply_flip(out, word, i)
        assert out == D

    def test_single_element_noncommutativity_exists(self):
        # twist-then-complement differs from complement-then-twist somewhere
        found = False
        n = 1
        for masks in itertools.chain.from_iterable(
            itertools.combinations(range(1 << n), k) for k in range(1, (1 << n) + 1)
        ):
            D = SetSystem(n, masks)
            a = loop_complement(twist(D, (1,)), (1,))
            b = twist(loop_complement(D, (1,)), (1,))
            if a != b:
                found = True
                break
        assert found

    @given(set_systems(max_n=5, proper=True), st.data())
    def test_bulk_matches_every_sequential_order(self, D, data):
        size = data.draw(st.integers(0, min(3, D.n)))
        I = data.draw(
            st.lists(st.integers(1, max(D.n, 1)), min_size=size, max_size=size, unique=True)
        ) if D.n else []
        for bulk_op, flip in ((loop_complement, PLUS), (dual_twist, BAR)):
            expected = bulk_op(D, I)
            for order in itertools.permutations(I):
                out = D
                for i in order:
                    out = apply_flip(out, flip, i)
                assert out == expected

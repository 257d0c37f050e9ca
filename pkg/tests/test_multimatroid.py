import itertools

import pytest

from twuality import (
    BAR,
    BudgetError,
    FLIPS,
    Multimatroid,
    ONE,
    PLUS,
    Perm,
    Projection,
    STAR,
    SetSystem,
    TransversalTriple,
    TwualityElement,
    ValidationError,
    act,
    all_triples,
    apply_flip,
    extract,
    flip_mul,
    is_multimatroid,
    is_tight,
    is_vf_safe,
    lift,
    loop_complement,
    orbit,
    orbit_via_lift,
    restrict,
    triple_flip,
    triple_word,
    twist,
    vec_inv,
)

import ribbon_catalog
from twuality import delta_matroid_of

ss = SetSystem.from_sets

P3 = sorted(itertools.permutations((1, 2, 3)))


@pytest.fixture(scope="module")
def pool(rng, vf_cache):
    """Pool of small vf-safe delta-matroids: quasi-tree systems of random
    ribbon graphs plus random group translates of them."""
    out, seen = [], set()
    while len(out) < 40:
        G = ribbon_catalog.random_ribbon(rng, max_edges=4)
        D = delta_matroid_of(G, vf_cache=vf_cache)
        gv = tuple(rng.choice(FLIPS) for _ in range(D.n))
        p = Perm(rng.sample(range(1, D.n + 1), D.n))
        for X in (D, act(TwualityElement(gv, p), D)):
            if X not in seen:
                seen.add(X)
                out.append(X)
    return out


def rand_triple(rng, n):
    return TransversalTriple(tuple(rng.choice(P3) for _ in range(n)))


def rand_projection(rng, n):
    return Projection(Perm(rng.sample(range(1, n + 1), n)))


class TestTypes:
    def test_triple_validation_and_json(self):
        tau = TransversalTriple(((1, 2, 3), (2, 1, 3)))
        assert tau.slot_of(2, 1) == 2
        assert tau.member_in_slot(2, 1) == 2
        assert TransversalTriple.from_json(tau.to_json()) == tau
        with pytest.raises(ValidationError):
            TransversalTriple(((1, 2, 2),))

    def test_reference_triple(self):
        tau = TransversalTriple.reference(2)
        assert tau.transversal(1) == ((1, 1), (2, 1))
        assert tau.transversal(3) == ((1, 3), (2, 3))

    def test_projection(self):
        sigma = Projection(Perm((2, 3, 1)))
        assert sigma.label_of(1) == 2
        assert sigma.class_of(2) == 1
        assert Projection.identity(3).label_of(2) == 2

    def test_multimatroid_json_round_trip(self):
        Z = Multimatroid(2, [(1, 2), (3, 3)])
        data = Z.to_json()
        assert data == {"n": 2, "bases": [[[1, 1], [2, 2]], [[1, 3], [2, 3]]]}
        assert Multimatroid.from_json(data) == Z

    def test_multimatroid_json_rejects(self):
        with pytest.raises(ValidationError):
            Multimatroid.from_json({"n": 1, "bases": [[[1, 1], [1, 2]]]})
        with pytest.raises(ValidationError):
            Multimatroid.from_json({"n": 1, "bases": [[[1, 4]]]})
        with pytest.raises(ValidationError):
            Multimatroid.from_json({"n": 1, "bases": [[[1, 1]], [[1, 1]]]})
        with pytest.raises(ValidationError):
            Multimatroid(1, [(1, 2)])

    def test_carrier(self):
        Z = Multimatroid(2, [(1, 1)])
        assert Z.carrier.skew_class(1) == ((1, 1), (1, 2), (1, 3))
        assert len(Z.carrier.elements()) == 6


class TestLiftExtract:
    def test_singleton_lift_example(self):
        Z = lift(ss(1, [()]))
        assert Z.bases == {(1,), (3,)}

    def test_extract_inverts_lift_on_example(self):
        D = ss(1, [()])
        Z = lift(D)
        assert extract(Z, TransversalTriple.reference(1), Projection.identity(1)) == D

    def test_extract_can_be_improper(self):
        Z = Multimatroid(1, [(3,)])
        out = extract(Z, TransversalTriple.reference(1), Projection.identity(1))
        assert not out.is_proper

    def test_lift_rejects_unsafe(self):
        bad = ss(3, [s for r in range(3) for s in itertools.combinations((1, 2, 3), r)])
        with pytest.raises(ValidationError):
            lift(bad)

    def test_lift_budget(self):
        with pytest.raises(BudgetError):
            lift(SetSystem(9, [0]))

    def test_round_trip_random(self, pool, rng, vf_cache):
        for _ in range(40):
            D = rng.choice(pool)
            tau = rand_triple(rng, D.n)
            sigma = rand_projection(rng, D.n)
            assert extract(lift(D, tau, sigma, vf_cache=vf_cache), tau, sigma) == D


class TestAxioms:
    def test_lift_is_multimatroid_and_tight(self, pool, rng, vf_cache):
        for _ in range(12):
            D = rng.choice(pool)
            if D.n > 4:
                continue
            Z = lift(D, rand_triple(rng, D.n), rand_projection(rng, D.n), vf_cache=vf_cache)
            ok, witness = is_multimatroid(Z)
            assert ok, witness
            tight, witness = is_tight(Z)
            assert tight, witness

    def test_empty_bases_fail(self):
        ok, witness = is_multimatroid(Multimatroid(1, []))
        assert not ok and witness["axiom"] == 1

    def test_two_of_three_single_class(self):
        Z = Multimatroid(1, [(1,), (3,)])
        ok, _ = is_multimatroid(Z)
        assert ok
        tight, _ = is_tight(Z)
        assert tight

    def test_single_basis_not_tight(self):
        tight, witness = is_tight(Multimatroid(1, [(1,)]))
        assert not tight
        assert witness == {"basis": [1], "class": 1, "non_bases": [2, 3]}

    def test_axiom2_failure_detected(self):
        # two bases differing in both classes: the skew-pair axiom fails
        # at the empty set's extensions in class 1
        Z = Multimatroid(2, [(1, 1), (2, 2)])
        ok, witness = is_multimatroid(Z)
        assert not ok, witness

    def test_budget(self):
        with pytest.raises(BudgetError):
            is_multimatroid(Multimatroid(7, [(1,) * 7]))
        with pytest.raises(BudgetError):
            is_tight(Multimatroid(7, [(1,) * 7]))


class TestRestrict:
    def test_whole_carrier(self):
        Z = Multimatroid(1, [(1,), (3,)])
        res = restrict(Z, Z.carrier.elements())
        assert set(res.bases) == Z.bases

    def test_singleton_example(self):
        Z = Multimatroid(1, [(1,), (3,)])
        res = restrict(Z, [(1, 1), (1, 2)])
        assert res.bases == ((1,),)
        assert res.independents == {(0,), (1,)}

    def test_malformed(self):
        Z = Multimatroid(1, [(1,)])
        with pytest.raises(ValidationError):
            restrict(Z, [(1, 4)])
        with pytest.raises(ValidationError):
            restrict(Z, [7])

    def test_identity_on_lifts(self, pool, rng, vf_cache):
        """Bases of the restriction to the first two transversals equal
        the bases of Z avoiding the third, computed independently."""
        for _ in range(10):
            D = rng.choice(pool)
            tau = rand_triple(rng, D.n)
            sigma = rand_projection(rng, D.n)
            Z = lift(D, tau, sigma, vf_cache=vf_cache)
            res = restrict(Z, tau.transversal(1) + tau.transversal(2))
            direct = {
                b
                for b in Z.bases
                if all(tau.slot_of(i, r) != 3 for i, r in enumerate(b, start=1))
            }
            assert set(res.bases) == direct


class TestTripleOperations:
    def test_reference_twist(self):
        tau = triple_flip(TransversalTriple.reference(2), STAR, 1)
        assert tau.roles == ((2, 1, 3), (1, 2, 3))

    def test_involutions(self, rng):
        for _ in range(20):
            n = rng.randint(1, 4)
            tau = rand_triple(rng, n)
            i = rng.randint(1, n)
            for g in (STAR, PLUS, BAR):
                assert triple_flip(triple_flip(tau, g, i), g, i) == tau

    def test_bar_word_identity(self, rng):
        for _ in range(20):
            n = rng.randint(1, 4)
            tau = rand_triple(rng, n)
            i = rng.randint(1, n)
            word = triple_flip(triple_flip(triple_flip(tau, PLUS, i), STAR, i), PLUS, i)
            assert word == triple_flip(tau, BAR, i)

    def test_right_action(self, rng):
        for _ in range(40):
            n = rng.randint(1, 4)
            tau = rand_triple(rng, n)
            i = rng.randint(1, n)
            g, h = rng.choice(FLIPS), rng.choice(FLIPS)
            assert triple_flip(triple_flip(tau, h, i), g, i) == triple_flip(
                tau, flip_mul(g, h), i
            )

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            triple_flip(TransversalTriple.reference(2), STAR, 3)


class TestLiftInvariance:
    def test_same_flip_on_system_and_triple_preserves_lift(self, pool, rng, vf_cache):
        """Applying any one flip at element i of the system and at the
        class projecting to i of the triple leaves the lift unchanged."""
        for _ in range(30):
            D = rng.choice(pool)
            n = D.n
            tau = rand_triple(rng, n)
            sigma = rand_projection(rng, n)
            Z = lift(D, tau, sigma, vf_cache=vf_cache)
            i = rng.randint(1, n)
            c = sigma.class_of(i)
            for g in FLIPS:
                assert (
                    lift(apply_flip(D, g, i), triple_flip(tau, g, c), sigma, vf_cache=vf_cache)
                    == Z
                )

    def test_twist_and_complement_invariance(self, pool, rng, vf_cache):
        for _ in range(25):
            D = rng.choice(pool)
            n = D.n
            tau = rand_triple(rng, n)
            sigma = rand_projection(rng, n)
            Z = lift(D, tau, sigma, vf_cache=vf_cache)
            for i in range(1, n + 1):
                c = sigma.class_of(i)
                assert Z == lift(
                    loop_complement(D, (i,)), triple_flip(tau, PLUS, c), sigma, vf_cache=vf_cache
                )
                assert Z == lift(
                    twist(D, (i,)), triple_flip(tau, STAR, c), sigma, vf_cache=vf_cache
                )

    def test_group_action_invariance(self, pool, rng, vf_cache):
        """Acting by (gvec, pi) on the system matches acting on the triple
        and the projection instead; with the rightmost-first word action
        on triples the verbatim form takes the entrywise inverse vector."""
        for _ in range(25):
            D = rng.choice(pool)
            n = D.n
            tau = rand_triple(rng, n)
            sigma = rand_projection(rng, n)
            gv = tuple(rng.choice(FLIPS) for _ in range(n))
            pi = Perm(rng.sample(range(1, n + 1), n))
            moved = act(TwualityElement(gv, pi), D)
            sig_l = Projection(pi.inverse() * sigma.relabel)
            assert lift(moved, triple_word(tau, gv, sigma), sigma, vf_cache=vf_cache) == lift(
                D, tau, sig_l, vf_cache=vf_cache
            )
            assert lift(moved, tau, sigma, vf_cache=vf_cache) == lift(
                D, triple_word(tau, vec_inv(gv), sigma), sig_l, vf_cache=vf_cache
            )


class TestOrbitCharacterizations:
    def test_trivial_ground(self, vf_cache):
        D = ss(0, [()])
        assert orbit_via_lift(D, mode="full", vf_cache=vf_cache) == (D,)

    def test_matches_orbit_both_modes(self, pool, rng, vf_cache):
        small = [D for D in pool if D.n <= 3][:6] + [ss(1, [()]), ss(2, [(), (1,), (1, 2)])]
        for D in small:
            assert orbit_via_lift(D, mode="full", vf_cache=vf_cache) == orbit(D, "full").elements
            assert orbit_via_lift(D, mode="iota", vf_cache=vf_cache) == orbit(D, "iota").elements

    def test_budget(self):
        with pytest.raises(BudgetError):
            orbit_via_lift(SetSystem(5, [0]), mode="full")

    def test_same_lift_characterizes_orbit_exhaustively(self, vf_cache):
        """At n = 2: the systems liftable onto Z(D) by some triple and
        projection are exactly the full orbit of D, both sides enumerated
        exhaustively."""
        n = 2
        D0 = ss(2, [(), (1,)])
        Z0 = lift(D0, vf_cache=vf_cache)
        triples = list(all_triples(n))
        projections = [Projection(Perm(p)) for p in itertools.permutations((1, 2))]
        lhs = set()
        for bits in range(1, 1 << (1 << n)):
            cand = SetSystem(n, [m for m in range(1 << n) if bits >> m & 1])
            if not is_vf_safe(cand, cache=vf_cache):
                continue
            if any(
                lift(cand, tp, sp, vf_cache=vf_cache) == Z0
                for tp in triples
                for sp in projections
            ):
                lhs.add(cand)
        assert lhs == set(orbit(D0, "full").elements)

    def test_same_lift_characterizes_orbit_exhaustively_n3(self, vf_cache):
        """Same equality at n = 3, over every proper system on [3], with
        the lift comparison recomputed from the public bulk operation."""
        from twuality import dual_twist, members_of

        n = 3
        D0 = ss(3, [(3,), (1, 3), (2, 3)])
        target = lift(D0, vf_cache=vf_cache).bases
        triples = list(all_triples(n))
        projections = [Projection(Perm(p)) for p in itertools.permutations((1, 2, 3))]
        choices = list(itertools.product((1, 2, 3), repeat=n))

        def matches(cand, tau, sigma, memo):
            for choice in choices:
                f_mask = s_mask = 0
                for i, r in enumerate(choice, start=1):
                    slot = tau.slot_of(i, r)
                    if slot == 2:
                        f_mask |= 1 << (sigma.label_of(i) - 1)
                    elif slot == 3:
                        s_mask |= 1 << (sigma.label_of(i) - 1)
                fam = memo.get(s_mask)
                if fam is None:
                    fam = memo[s_mask] = dual_twist(cand, members_of(s_mask)).mask_set()
                if (f_mask in fam) != (choice in target):
                    return False
            return True

        lhs = set()
        for bits in range(1, 1 << (1 << n)):
            cand = SetSystem(n, [m for m in range(1 << n) if bits >> m & 1])
            if not is_vf_safe(cand, cache=vf_cache):
                continue
            memo: dict[int, frozenset] = {}
            if any(matches(cand, tp, sp, memo) for tp in triples for sp in projections):
                lhs.add(cand)
        assert lhs == set(orbit(D0, "full").elements)

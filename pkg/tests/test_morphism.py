import random
from itertools import product

import pytest
from hypothesis import given, settings

import oracles
from ultab.canon import canonical_form
from ultab.families import (broken_combs, comb, fork, is_boolean_sum, point, q_poset, rn_prefix,
                            rooted_posets, rooted_posets_by_upsets, s_frame, stack_depth)
from ultab.formula import bd, jankov_syntactic, named_axiom, parse
from ultab.morphism import (check_pmorphism, compose, is_kc_frame, is_pmorphism, jankov_refutes,
                            jankov_refutes_via_images, pmorphic_images, semantic_checker,
                            surjective_pmorphisms, validates_axiomset)
from ultab.poset import Poset, PosetError
from ultab.semantics import frame_validates


def set_partitions(xs):
    if not xs:
        yield []
        return
    head, rest = xs[0], xs[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1:]
        yield [[head]] + part


def images_oracle(P):
    """Quotients by every set partition whose projection is a p-morphism."""
    forms = set()
    for part in set_partitions(list(P.worlds)):
        name = {w: min(map(str, block)) for block in part for w in block}
        rel = {(name[a], name[b]) for a, b in oracles.leq_pairs(P)}
        changed = True
        while changed:
            extra = {(a, d) for a, b in rel for c, d in rel if b == c} - rel
            changed = bool(extra)
            rel |= extra
        if any((b, a) in rel for a, b in rel if a != b):
            continue
        Q = Poset.from_relation(sorted(set(name.values())), rel)
        if oracles.is_pmorphism(name, P, Q):
            forms.add(canonical_form(Q))
    return forms


class TestCheck:
    def test_fork_onto_chain(self):
        C = Poset.chain(2)
        f = {"r": C.worlds[0], "t1": C.worlds[1], "t2": C.worlds[1]}
        assert check_pmorphism(f, fork(2), C) == (True, None)

    def test_rn_retraction_fails_back(self):
        f = {"P2": "P1", "0": "P1", "1": "1"}
        assert check_pmorphism(f, rn_prefix(2), rn_prefix(1)) == (False, ("back", "0", "1"))
        assert not oracles.is_pmorphism(f, rn_prefix(2), rn_prefix(1))

    def test_identity(self):
        P = q_poset(5)
        assert is_pmorphism({w: w for w in P.worlds}, P, P)

    def test_order_violation(self):
        C = Poset.chain(2)
        ok, why = check_pmorphism({C.worlds[0]: C.worlds[1], C.worlds[1]: C.worlds[0]}, C, C)
        assert not ok and why[0] == "order"

    def test_partial_map(self):
        assert check_pmorphism({}, point(), point()) == (False, ("undefined", 0))

    @given(oracles.posets(max_size=4), oracles.posets(max_size=3))
    def test_against_oracle_on_all_maps(self, P, Q):
        for img in product(Q.worlds, repeat=len(P)):
            f = dict(zip(P.worlds, img))
            assert is_pmorphism(f, P, Q) == oracles.is_pmorphism(f, P, Q)


class TestSearch:
    def test_chain_onto_fork_is_impossible(self):
        assert surjective_pmorphisms(Poset.chain(2), fork(2)) == []
        assert oracles.surjective_pmorphisms(Poset.chain(2), fork(2)) == []

    def test_onto_point(self):
        for P in rooted_posets(5):
            assert len(surjective_pmorphisms(P, point())) == 1

    def test_cap(self):
        with pytest.raises(PosetError):
            surjective_pmorphisms(Poset.chain(5), point(), cap=3)

    @settings(max_examples=60)
    @given(oracles.posets(max_size=5), oracles.posets(max_size=4))
    def test_against_brute_force(self, P, Q):
        got = sorted(sorted(f.map.items(), key=str) for f in surjective_pmorphisms(P, Q))
        want = sorted(sorted(f.items(), key=str) for f in oracles.surjective_pmorphisms(P, Q))
        assert got == want

    def test_composition(self):
        rnd = random.Random(2)
        pool = rooted_posets(5)
        done = 0
        while done < 40:
            P = rnd.choice(pool)
            imgs = pmorphic_images(P)
            Q = rnd.choice(imgs)
            R = rnd.choice(pmorphic_images(Q))
            f = surjective_pmorphisms(P, Q, limit=1)[0].map
            g = surjective_pmorphisms(Q, R, limit=1)[0].map
            assert oracles.is_pmorphism(compose(g, f), P, R)
            done += 1


class TestImages:
    def test_counts(self):
        assert len(pmorphic_images(q_poset(8))) == 4
        assert len(pmorphic_images(Poset.chain(2))) == 2
        assert [len(pmorphic_images(comb(n))) for n in range(1, 5)] == [2, 5, 11, 23]

    def test_combs_map_onto_broken_combs(self):
        for n in range(1, 4):
            want = {canonical_form(B) for m in range(1, n + 1) for B in broken_combs(m)}
            got = {canonical_form(F) for F in pmorphic_images(comb(n))}
            assert got == want
            assert got == images_oracle(comb(n))

    def test_largest_first(self):
        sizes = [len(F) for F in pmorphic_images(q_poset(5))]
        assert sizes == sorted(sizes, reverse=True)

    @settings(max_examples=40)
    @given(oracles.posets(max_size=6))
    def test_against_partition_oracle(self, P):
        assert {canonical_form(F) for F in pmorphic_images(P)} == images_oracle(P)


class TestJankov:
    def test_examples(self):
        for Q in (point(), fork(2), q_poset(4)):
            ok, (x, f) = jankov_refutes(Q, Q)
            assert ok and oracles.is_pmorphism(f.map, Q.principal(x), Q)
        assert jankov_refutes(Poset.chain(2), fork(2)) == (False, None)
        assert jankov_refutes(q_poset(5), q_poset(6))[0]

    def test_q_must_be_rooted(self):
        with pytest.raises(PosetError):
            jankov_refutes(point(), Poset.antichain(2))

    def test_two_readings_agree(self):
        # principal upset mapping onto Q versus Q being a principal upset of an image
        pool = rooted_posets(6)
        tops = {}
        for P in pool:
            tops[P] = {canonical_form(F.principal(w)) for F in pmorphic_images(P) for w in F.worlds}
        for P in pool:
            for Q in pool:
                assert jankov_refutes(P, Q)[0] == (canonical_form(Q) in tops[P])
        assert jankov_refutes_via_images(q_poset(5), q_poset(6))

    def test_syntactic_matches_semantic(self):
        # desk-scale check of the Jankov characterization on small frames
        frames = rooted_posets_by_upsets(10)
        for Q in rooted_posets_by_upsets(6):
            f = jankov_syntactic(Q)
            for P in frames:
                assert frame_validates(P, f)[0] == (not jankov_refutes(P, Q)[0])


class TestCheckers:
    def test_kc(self):
        kc = parse("~p | ~~p")
        assert semantic_checker(kc)[0] == "kc"
        for P in rooted_posets(6):
            assert is_kc_frame(P) == frame_validates(P, kc)[0]

    def test_bw2(self):
        ax = named_axiom("BW2").axioms[0]
        for P in rooted_posets(6):
            assert (P.width() <= 2) == frame_validates(P, ax)[0]
        assert not frame_validates(q_poset(8), ax)[0]

    def test_bd(self):
        for n, size in ((1, 5), (2, 5), (3, 4)):
            assert semantic_checker(bd(n))[0] == f"depth<={n}"
            for P in rooted_posets(size):
                assert (P.depth() <= n) == frame_validates(P, bd(n))[0]

    def test_unregistered_axiom_falls_back(self):
        assert semantic_checker(parse("p | ~p")) is None
        assert validates_axiomset(point(), named_axiom("LC"))


class TestAxiomSets:
    def test_box_on_s_frames(self):
        for n in range(3, 6):
            assert validates_axiomset(s_frame(n), named_axiom("Box"))

    def test_2uni_on_shallow_boolean_sums(self):
        A = named_axiom("2Uni")
        for P in rooted_posets(6):
            if is_boolean_sum(P):
                assert validates_axiomset(P, A) == (stack_depth(P) <= 1)

    def test_q4_fails_its_own_formula(self):
        assert not validates_axiomset(q_poset(4), named_axiom("2Uni"))
        assert not frame_validates(q_poset(4), jankov_syntactic(q_poset(4)))[0]

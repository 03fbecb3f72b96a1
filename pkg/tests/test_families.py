import pytest

import oracles
from ultab.canon import canonical_form, is_isomorphic
from ultab.families import (FamilyError, boolean_sum, boolean_sums, broken_combs, comb, figure2_pair,
                            figure4_pairs, fork, is_boolean_sum, is_broken_comb, m_model, n_model,
                            p_prime, p_star, point, q_poset, rn_canonical_model, rn_ladder,
                            rn_prefix, rooted_posets, s_frame, stack_depth, stack_profile)
from ultab.formula import AxiomSet, jankov_syntactic
from ultab.morphism import pmorphic_images, surjective_pmorphisms, validates_axiomset
from ultab.poset import Poset, linear_sum
from ultab.semantics import is_reduced


class TestLadder:
    def test_prefix_sizes(self):
        assert len(rn_prefix(2)) == 3
        assert len(rn_prefix(1)) == 2

    def test_p4_covers(self):
        P = rn_prefix(4)
        assert P.root == "P4"
        assert {b for a, b in P.cover_pairs() if a == "P4"} == {"P2", "P1"}

    def test_prefix_depths(self):
        for k in range(5):
            assert oracles.depth(rn_prefix(2 * k + 1)) == k + 2

    def test_weave(self):
        L = rn_ladder(8)
        for j in range(3, 9):
            below = {b for a, b in L.cover_pairs() if a == f"P{j}"}
            assert below == {f"P{j - 2}" if j > 2 else "0", f"P{j - 3}" if j > 3 else "0"}

    def test_upsets_are_nested(self):
        # the prefix at i contains the prefix at i - 2 but not at i - 1
        L = rn_ladder(8)
        for i in range(3, 9):
            assert L.leq(f"P{i}", f"P{i - 2}")
            assert not L.leq(f"P{i}", f"P{i - 1}")

    def test_canonical_models(self):
        for i in range(1, 9):
            M = rn_canonical_model(i)
            assert oracles.reduced(M) and is_reduced(M)
            assert M.color("1") == 1
            if i > 1:
                assert M.color("0") == 0

    def test_range(self):
        with pytest.raises(FamilyError):
            rn_prefix(0)


class TestPStar:
    def test_p_star_one(self):
        P = p_star(1)
        assert len(P) == 4
        maxi = {w for w in P.worlds if oracles.up(P, w) == {w}}
        assert maxi == {"1", "0"}
        assert not P.is_rooted

    def test_nested(self):
        for n in range(1, 4):
            assert set(p_star(n).worlds) < set(p_star(n + 1).worlds)

    def test_p_prime(self):
        P = p_prime(3)
        assert len(P) == len(rn_prefix(3)) + 1
        assert sum(1 for w in P.worlds if oracles.up(P, w) == {w}) == 1


class TestCombs:
    def test_small(self):
        assert canonical_form(comb(1)) == canonical_form(Poset.chain(2))
        for n in range(1, 6):
            assert len(comb(n)) == 2 * n
            assert len(broken_combs(n)) == 2 ** n

    def test_comb_clauses(self):
        C = comb(4)
        for i in range(1, 5):
            for j in range(1, 5):
                assert C.leq(f"x{i}", f"x{j}") == (i <= j)
                assert C.leq(f"x{i}", f"y{j}") == (i <= j)
                assert C.leq(f"y{i}", f"y{j}") == (i == j)

    def test_recognizer(self):
        for n in range(1, 5):
            assert all(is_broken_comb(B) for B in broken_combs(n))
        assert not is_broken_comb(q_poset(8))
        assert not is_broken_comb(q_poset(6))

    def test_recognizer_matches_images(self):
        forms = {canonical_form(B) for n in range(1, 8) for B in broken_combs(n) if len(B) <= 7}
        assert forms == {canonical_form(F) for F in pmorphic_images(comb(6)) if len(F) <= 7}
        for P in rooted_posets(7):
            assert is_broken_comb(P) == (canonical_form(P) in forms)


class TestBooleanSums:
    def test_q4(self):
        P = q_poset(4)
        assert is_boolean_sum(P)
        prof = stack_profile(P)
        assert prof.level_sizes == (2, 2, 1) and prof.stack_depth == 2
        assert stack_depth(q_poset(5)) == 2

    def test_chains(self):
        for n in range(1, 6):
            assert is_boolean_sum(Poset.chain(n))
            assert stack_depth(Poset.chain(n)) == 0

    def test_q1_is_not(self):
        assert not is_boolean_sum(q_poset(1))

    def test_constructor(self):
        B = boolean_sum([2, 3, 1])
        assert is_boolean_sum(B) and stack_profile(B).level_sizes == (2, 3, 1)
        with pytest.raises(FamilyError):
            boolean_sum([2, 2])

    def test_enumeration_against_recognizer(self):
        want = {canonical_form(P) for P in rooted_posets(6) if is_boolean_sum(P)}
        got = [canonical_form(P) for P in boolean_sums(6)]
        assert len(got) == len(set(got)) == len(want) == 32
        assert set(got) == want

    def test_definition_directly(self):
        # each point of depth k+1 sees all points of depth k and nothing else immediately
        for P in rooted_posets(6):
            d = {w: P.depth_of(w) for w in P.worlds}
            ok = all(
                {b for a, b in P.cover_pairs() if a == w} == {v for v in P.worlds if d[v] == d[w] - 1}
                for w in P.worlds)
            assert ok == is_boolean_sum(P)


class TestNamed:
    def test_q5_over_q4(self):
        assert is_isomorphic(q_poset(5), linear_sum(point(), q_poset(4)))[0]

    def test_q_shapes(self):
        assert [len(q_poset(i)) for i in range(1, 9)] == [4, 5, 5, 5, 6, 4, 5, 4]
        assert q_poset(8).width() == 3
        assert all(q_poset(i).is_rooted for i in range(1, 9))
        with pytest.raises(FamilyError):
            q_poset(9)

    def test_figure2(self):
        M, N = figure2_pair()
        assert M.colors == (0, 1)
        assert sorted(N.colors) == [0, 0, 1] and N.color(N.root) == 0

    def test_figure4(self):
        pairs = figure4_pairs()
        assert len(pairs) == 5
        for i, (M, N) in enumerate(pairs, 1):
            assert is_isomorphic(M.frame, q_poset(i))[0]
            assert is_reduced(M) and is_reduced(N)


class TestLayered:
    @pytest.mark.parametrize("n,k", [(3, 0), (3, 1), (4, 2), (5, 3), (6, 2)])
    def test_m_models(self, n, k):
        M = m_model(n, k)
        assert is_boolean_sum(M.frame)
        assert stack_depth(M.frame) == k + 1
        assert stack_profile(M.frame).level_sizes == (2,) * (k + 1) + (1,)
        assert is_reduced(M) and oracles.reduced(M)

    @pytest.mark.parametrize("n,k", [(3, 0), (3, 1), (4, 2), (5, 1)])
    def test_n_models(self, n, k):
        N = n_model(n, k)
        assert is_boolean_sum(N.frame) and is_reduced(N)

    def test_figure5_colors(self):
        M, N = m_model(3, 1), n_model(3, 0)
        assert {w: M.color_str(w) for w in M.worlds} == {
            "l0": "111", "r0": "110", "l1": "110", "r1": "100", "root": "100"}
        assert {w: N.color_str(w) for w in N.worlds} == {"l0": "111", "r0": "110", "root": "100"}

    def test_parameter_checks(self):
        with pytest.raises(FamilyError):
            m_model(3, 2)
        with pytest.raises(FamilyError):
            n_model(2, 0)

    @pytest.mark.parametrize("n,k", [(4, 1), (4, 2), (5, 2), (6, 3)])
    def test_successor_of_root(self, n, k):
        M, N = m_model(n, k), n_model(n, k - 1)
        succ = [b for a, b in M.frame.cover_pairs() if a == M.root]
        assert any(oracles.isomorphic(M.frame.principal(z), N.frame) for z in succ)


class TestSFrames:
    def test_shape(self):
        for n in range(3, 7):
            S = s_frame(n)
            assert S.width() == 2 == oracles.width(S)
            assert sum(1 for w in S.worlds if oracles.up(S, w) == {w}) == 1

    def test_s3_is_q5(self):
        assert is_isomorphic(s_frame(3), q_poset(5))[0]

    def test_s3_is_an_image_of_stacked_primes(self):
        # smallest witnesses found by searching sums of up to three primed prefixes
        for src in (p_prime(5), linear_sum(p_prime(5), p_prime(1))):
            f = surjective_pmorphisms(src, s_frame(3), limit=1)
            assert f and oracles.is_pmorphism(f[0].map, src, s_frame(3))
        assert not surjective_pmorphisms(linear_sum(p_prime(4), p_prime(4)), s_frame(3), limit=1)


def test_wpl_frames_are_boolean_sums():
    wpl_frames = AxiomSet("J123", tuple(jankov_syntactic(q_poset(i)) for i in (1, 2, 3)))
    for P in rooted_posets(6):
        assert validates_axiomset(P, wpl_frames) == is_boolean_sum(P)


def test_fork_helper():
    assert len(fork(3)) == 4 and fork(3).width() == 3

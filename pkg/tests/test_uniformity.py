from itertools import combinations

import pytest

import oracles
from ultab.bisim import full_bisim, k_bisim
from ultab.canon import canonical_form
from ultab.families import (boolean_sums, broken_combs, comb, fork, p_star, point, q_poset,
                            rooted_posets)
from ultab.poset import Poset
from ultab.semantics import Model, is_reduced
from ultab.uniformity import (certify_n_uniform, degree_of_frame_class, degree_of_uniformity,
                              enumerate_models, frame_class_of, frame_closure,
                              stack_bound_uniformity_check)


def forms(ps):
    return {canonical_form(P) for P in ps}


def brute_models(frames, v):
    """Reduced models over the frames, one per colored isomorphism class."""
    names = ["p"] if v == 1 else [f"p{i}" for i in range(1, v + 1)]
    out = []
    for P in frames:
        for colors in oracles.monotone_colorings(P, v):
            M = Model(P, names, colors)
            if not oracles.reduced(M):
                continue
            cm = {w: M.color(w) for w in P.worlds}
            if not any(oracles.isomorphic(P, N.frame, cm, {w: N.color(w) for w in N.worlds})
                       for N in out):
                out.append(M)
    return out


def brute_degree(frames, v):
    models = brute_models(frames, v)
    worst = -1
    for A, B in combinations(models, 2):
        worst = max(worst, oracles.max_level(A, B))
    return worst + 1


class TestClosure:
    def test_fork(self):
        got = frame_closure([fork(2)]).closure
        assert forms(got) == forms([point(), Poset.chain(2), fork(2)])

    def test_chain(self):
        assert forms(frame_closure([Poset.chain(2)]).closure) == forms([point(), Poset.chain(2)])

    def test_comb(self):
        want = forms(B for m in range(1, 4) for B in broken_combs(m))
        assert forms(frame_closure([comb(3)]).closure) == want

    def test_non_rooted_generator(self):
        # rooted upsets are taken first
        assert len(frame_closure([p_star(1)]).closure) == len(frame_closure(
            [p_star(1).principal("P1"), p_star(1).principal("P2")]).closure)

    def test_closed(self):
        FC = frame_closure([q_poset(5)])
        have = forms(FC.closure)
        for F in FC.closure:
            assert forms(frame_closure([F]).closure) <= have


class TestModels:
    def test_chain_examples(self):
        FC = frame_closure([Poset.chain(2)])
        assert len(enumerate_models(FC, 1).models) == 3
        zero = enumerate_models(FC, 0).models
        assert len(zero) == 1 and len(zero[0]) == 1

    @pytest.mark.parametrize("K,v", [([Poset.chain(2)], 2), ([fork(2)], 1), ([fork(2)], 2),
                                     ([Poset.chain(3)], 2), ([q_poset(6)], 1)],
                             ids=["chain2-v2", "fork-v1", "fork-v2", "chain3-v2", "diamond-v1"])
    def test_against_brute_force(self, K, v):
        FC = frame_closure(K)
        mc = enumerate_models(FC, v)
        assert all(is_reduced(M) for M in mc.models)
        assert len(mc.models) == len(brute_models(FC.closure, v))


class TestDegree:
    def test_examples(self):
        assert degree_of_uniformity(Poset.chain(2)).degree == 1
        assert degree_of_uniformity(fork(2)).degree == 2
        assert degree_of_uniformity(p_star(1)).degree == 2

    @pytest.mark.parametrize("K,v", [([Poset.chain(2)], 2), ([fork(2)], 2), ([Poset.chain(3)], 2),
                                     ([fork(3)], 1), ([q_poset(6)], 2)],
                             ids=["chain2", "fork", "chain3", "fork3", "diamond"])
    def test_against_pairwise_oracle(self, K, v):
        FC = frame_closure(K)
        assert degree_of_frame_class(FC, v_max=v).degree == brute_degree(FC.closure, v)

    def test_chains_need_at_most_two(self):
        for n in range(1, 7):
            assert degree_of_uniformity(Poset.chain(n)).degree <= 2

    def test_bound_by_depth(self):
        for P in rooted_posets(6):
            assert degree_of_uniformity(P).degree <= max(2 * P.depth() - 1, 0)

    def test_more_variables_change_nothing(self):
        for P in rooted_posets(4):
            d = degree_of_uniformity(P).degree
            assert degree_of_uniformity(P, v_max=len(P)).degree == d

    def test_enlarging_the_class(self):
        small = [Poset.chain(2), fork(2), Poset.chain(3)]
        for a in small:
            for b in rooted_posets(4):
                d1 = degree_of_frame_class(frame_class_of([a])).degree
                d2 = degree_of_frame_class(frame_class_of([a, b])).degree
                assert d1 <= d2

    def test_witness_pairs(self):
        for P in (fork(2), q_poset(6), Poset.chain(3)):
            rep = degree_of_uniformity(P).refutation
            M, N = rep.witness
            assert oracles.reduced(M) and oracles.reduced(N)
            assert oracles.k_bisimilar(M, N, M.root, N.root, rep.n)
            assert not oracles.bisimilar(M, N)
            assert oracles.max_level(M, N) == rep.witness_level


class TestCertify:
    def test_shallow_boolean_sums(self):
        FC = frame_closure(boolean_sums(6, max_stack=1))
        rep = certify_n_uniform(FC, 2)
        assert rep.certified and rep.verdict == "certified(2)"
        assert "closure frames" in rep.envelope

    def test_broken_combs(self):
        FC = frame_closure([B for m in range(1, 4) for B in broken_combs(m)])
        assert certify_n_uniform(FC, 3).certified
        rep = certify_n_uniform(FC, 2)
        assert not rep.certified and rep.verdict == "refuted(2)"
        M, N = rep.witness
        assert k_bisim(M, N, 2) is not None and full_bisim(M, N) is None

    def test_stack_bound(self):
        assert stack_bound_uniformity_check(1, size_cap=7).certified
        rep = stack_bound_uniformity_check(1, size_cap=7, n=1)
        assert not rep.certified
        M, N = rep.witness
        assert k_bisim(M, N, 1) is not None and full_bisim(M, N) is None

    def test_concrete_variables(self):
        rep = certify_n_uniform(frame_closure([fork(2)]), 1, v_max=1)
        assert not rep.certified and rep.witness[0].vars == ("p",)
        assert "at most 1 variables" in rep.envelope

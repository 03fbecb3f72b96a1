import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import oracles
from ultab.bisim import (FULL, distinguishing_formula, full_bisim, k_bisim, layers, leq_k,
                         max_bisim_level, play_game)
from ultab.canon import canonical_form
from ultab.families import (figure2_pair, figure4_pairs, m_model, n_model, rn_canonical_model,
                            rooted_posets)
from ultab.formula import impl_depth, parse
from ultab.poset import Poset
from ultab.semantics import Model, ModelError, is_reduced, reduce, satisfies
from ultab.uniformity import enumerate_models, frame_closure

pairs = st.tuples(oracles.models(max_size=5, vars=("p",)), oracles.models(max_size=5, vars=("p",)))
pairs2 = st.tuples(oracles.models(max_size=4), oracles.models(max_size=4))


class TestFigure2:
    def test_levels(self):
        M, N = figure2_pair()
        assert full_bisim(M, N) is None
        assert k_bisim(M, N, 1) is not None
        assert k_bisim(M, N, 2) is None
        assert max_bisim_level(M, N) == 1

    def test_leq_one_both_ways(self):
        M, N = figure2_pair()
        assert leq_k(M, N, 1) and leq_k(N, M, 1)
        assert oracles.k_bisimilar(M, N, M.root, N.root, 1)

    def test_distinguishing(self):
        M, N = figure2_pair()
        assert distinguishing_formula(M, N, 2) == parse("~~p")
        assert distinguishing_formula(M, N, 1) is None

    def test_fork_side_has_no_witness(self):
        # not related by leq_2, yet every depth-2 formula true at the fork root
        # also holds at the chain root
        M, N = figure2_pair()
        assert not leq_k(N, M, 2)
        assert distinguishing_formula(N, M, 2) is None

    def test_game(self):
        M, N = figure2_pair()
        assert play_game(M, N, 2).winner == "I"
        assert play_game(M, N, 1).winner == "II"
        assert len(play_game(M, N, 2).moves) <= 4


def test_vars_mismatch():
    A = Model(Poset.chain(1), ["p"], [0])
    B = Model(Poset.chain(1), ["q"], [0])
    with pytest.raises(ModelError):
        k_bisim(A, B, 0)


def test_full_bisim_with_reduction():
    M = Model(Poset.chain(3), ["p"], [0, 0, 1])
    assert full_bisim(M, M) is not None
    assert full_bisim(M, reduce(M)) is not None
    assert max_bisim_level(M, M) == FULL


@pytest.mark.parametrize("n,k", [(3, 1), (4, 1), (4, 2), (5, 1), (5, 2), (5, 3)])
def test_m_n_lemma(n, k):
    M, N = m_model(n, k), n_model(n, k - 1)
    assert max_bisim_level(M, N) == k
    assert oracles.max_level(M, N) == k


def test_m3_n3_small_levels():
    M, N = m_model(3, 1), n_model(3, 0)
    assert k_bisim(M, N, 1) is not None and k_bisim(M, N, 2) is None


@pytest.mark.parametrize("n", [1, 2])
def test_rn_neighbours(n):
    assert max_bisim_level(rn_canonical_model(2 * n), rn_canonical_model(2 * n - 1)) == 2 * n - 1


def test_figure4_levels():
    for M, N in figure4_pairs():
        assert max_bisim_level(M, N) == 2
        assert oracles.max_level(M, N) == 2


class TestAgainstOracles:
    @given(pairs, st.integers(0, 4))
    def test_k_bisim(self, pair, k):
        M, N = pair
        assert (k_bisim(M, N, k) is not None) == oracles.k_bisimilar(M, N, M.root, N.root, k)

    @given(pairs2)
    def test_max_level_and_full(self, pair):
        M, N = pair
        assert max_bisim_level(M, N) == oracles.max_level(M, N)
        assert (full_bisim(M, N) is not None) == oracles.bisimilar(M, N)

    @given(pairs, st.integers(0, 4))
    def test_layers_are_antitone(self, pair, k):
        M, N = pair
        L = layers(M, N, k)
        assert all(a >= b for a, b in zip(L.levels, L.levels[1:]))
        assert all(M.color(x) == N.color(y) for x, y in L.levels[0])
        if k_bisim(M, N, k + 1) is not None:
            assert k_bisim(M, N, k) is not None

    @given(pairs)
    def test_stabilization(self, pair):
        M, N = pair
        if k_bisim(M, N, len(M) * len(N)) is not None:
            assert full_bisim(M, N) is not None

    @given(pairs, st.integers(0, 3))
    def test_optimal_game_matches(self, pair, k):
        M, N = pair
        t = play_game(M, N, k)
        assert (t.winner == "II") == (k_bisim(M, N, k) is not None)
        assert len(t.moves) <= 2 * k

    @given(oracles.models(max_size=5), st.integers(0, 3))
    def test_self_game(self, M, k):
        assert play_game(M, M, k).winner == "II"
        assert leq_k(M, M, k)
        assert distinguishing_formula(M, M, k) is None

    def test_zero_round_game_equal_colors(self):
        A = Model(Poset.chain(2), ["p"], [0, 1])
        B = Model(Poset.chain(1), ["p"], [0])
        assert play_game(A, B, 0).winner == "II"


@settings(max_examples=60)
@given(pairs2, st.integers(0, 2), st.lists(oracles.formulas(max_leaves=8), max_size=6))
def test_leq_k_transfers_theories(pair, k, fs):
    M, N = pair
    assume(leq_k(M, N, k))
    zs = [z for z in M.frame.worlds if M.frame.leq(M.root, z)
          and oracles.k_bisimilar(M, N, z, N.root, k)]
    assert zs
    for f in fs:
        if impl_depth(f) > k:
            continue
        # the witness point agrees with N, and persistence carries truth upward from the root
        assert all(satisfies(M, f, z) == satisfies(N, f) for z in zs)
        if satisfies(M, f):
            assert satisfies(N, f)


@settings(max_examples=40)
@given(pairs, st.integers(1, 3))
def test_distinguishing_formula_sound(pair, k):
    M, N = pair
    f = distinguishing_formula(M, N, k)
    if leq_k(M, N, k):
        assert f is None
    if f is not None:
        assert impl_depth(f) <= k
        val_m, val_n = oracles.model_val(M), oracles.model_val(N)
        assert M.root in oracles.evaluate(M.frame, f, val_m)
        assert N.root not in oracles.evaluate(N.frame, f, val_n)


def test_reduced_bisimilar_models_are_isomorphic():
    # all reduced models with at most 5 points and 2 variables
    seen = {}
    for P in rooted_posets(5):
        for colors in oracles.monotone_colorings(P, 2):
            M = Model(P, ["p", "q"], colors)
            if is_reduced(M):
                seen.setdefault(canonical_form(P, M.colors), M)
    models = list(seen.values())
    assert len(models) == 133
    for i, A in enumerate(models):
        for B in models[i + 1:]:
            assert full_bisim(A, B) is None


def test_model_class_pairs_are_not_bisimilar():
    mc = enumerate_models(frame_closure([Poset.chain(3)]), 1)
    for i, A in enumerate(mc.models):
        for B in mc.models[i + 1:]:
            assert full_bisim(A, B) is None

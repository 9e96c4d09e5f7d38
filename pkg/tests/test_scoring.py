import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import wordlab as wl
from wordlab.scoring import Histogram, minimizes, validate_p

BUCKETS = st.lists(st.integers(min_value=1, max_value=40), min_size=1, max_size=12)


def hist(counts, all_green=False):
    nv = sum(counts) + (1 if all_green else 0)
    return Histogram({i: n for i, n in enumerate(counts)}, all_green, nv)


def test_policy_validation():
    with pytest.raises(ValueError):
        wl.Policy(p=0.0)
    with pytest.raises(ValueError):
        wl.Policy(p=float("nan"))
    with pytest.raises(ValueError):
        wl.Policy(p=1.0, tie_break_ps=())
    with pytest.raises(ValueError):
        validate_p(0)
    assert wl.Policy().tie_break_ps == (-1.0, 1.0, -10.0, 10.0)


def test_orientation():
    assert minimizes(1.0) and minimizes(0.25) and minimizes(math.inf)
    assert not minimizes(-1.0) and not minimizes(-math.inf)


def test_score_examples():
    assert wl.score(hist([2, 1]), 1.0) == pytest.approx(5 / 3)
    # two buckets of two plus the all-green: p=-1 gives distinct/(N_v-1)
    assert wl.score(hist([2, 2], all_green=True), -1.0) == 0.5
    assert wl.score(hist([3, 1]), math.inf) == 3.0
    assert wl.score(hist([3, 1]), -math.inf) == 1.0


def test_score_degenerate():
    only_self = Histogram({}, True, 1)
    assert wl.score(only_self, 1.0) == 0.0
    assert wl.score(only_self, -2.5) == 0.0


def test_gep_identity_exact():
    # score(h, -1) is exactly distinct_buckets / (N_v - 1_allgreen)
    rng = np.random.default_rng(3)
    for _ in range(200):
        counts = rng.integers(1, 30, size=rng.integers(1, 10)).tolist()
        ag = bool(rng.integers(0, 2))
        h = hist(counts, ag)
        den = h.viable_count - ag
        assert wl.score(h, -1.0) == len(counts) / den


@given(BUCKETS, st.booleans())
@settings(max_examples=200, deadline=None)
def test_integer_p_exact_accumulation(counts, ag):
    h = hist(counts, ag)
    for p in (1.0, 2.0, 3.0):
        den = h.viable_count - ag
        exact = Fraction(sum(n ** (int(p) + 1) for n in counts), den)
        got = wl.score(h, p)
        assert abs(got - float(exact)) <= 1e-12 * max(1.0, abs(float(exact)))


@given(BUCKETS, st.booleans())
@settings(max_examples=200, deadline=None)
def test_bucket_power_sum_matches_bruteforce(counts, ag):
    h = hist(counts, ag)
    p = -0.5
    den = h.viable_count - ag
    brute = sum(n * n**p for n in counts) / den
    assert wl.score(h, p) == pytest.approx(brute, rel=1e-12)


def test_bucket_histogram_small(mini_matrix, mini_list):
    state = wl.new_game(mini_matrix)
    row = mini_list.index_of("tares")
    h = wl.bucket_histogram(state, row)
    assert h.viable_count == mini_list.size
    assert h.has_all_green  # tares is its own viable answer
    assert sum(h.buckets.values()) + 1 == mini_list.size
    assert all(n >= 1 for n in h.buckets.values())


def test_bucket_histogram_single_viable(mini_matrix, mini_list):
    state = wl.new_game(mini_matrix)
    col = mini_list.index_of("weary")
    keep = np.asarray([col], dtype=np.int32)
    state = wl.GameState(mini_matrix, keep, (), 1, wl.NORMAL, ())
    row = mini_list.index_of("weary")
    h = wl.bucket_histogram(state, row)
    assert h.has_all_green and not h.buckets and h.viable_count == 1
    other = mini_list.index_of("tares")
    h2 = wl.bucket_histogram(state, other)
    assert h2.buckets and sum(h2.buckets.values()) == 1


def test_weighted_histogram_uniform_reduces_to_counts(mini_matrix, mini_list):
    state = wl.new_game(mini_matrix)
    prior = wl.AnswerPrior(np.ones(mini_list.size))
    row = mini_list.index_of("crane")
    w = wl.weighted_histogram(state, row, prior)
    h = wl.bucket_histogram(state, row)
    assert sum(w.values()) == pytest.approx(1.0)
    for code, count in h.buckets.items():
        assert w[code] == pytest.approx(count / mini_list.size)


def test_weighted_histogram_point_mass(mini_matrix, mini_list):
    weights = np.zeros(mini_list.size)
    weights[mini_list.index_of("weary")] = 2.5
    prior = wl.AnswerPrior(weights)
    state = wl.new_game(mini_matrix)
    w = wl.weighted_histogram(state, mini_list.index_of("trawl"), prior)
    assert len(w) == 1
    assert list(w.values())[0] == pytest.approx(1.0)


def test_weighted_histogram_scale_invariant(mini_matrix, mini_list):
    state = wl.new_game(mini_matrix)
    row = mini_list.index_of("slate")
    base = np.linspace(0.1, 2.0, mini_list.size)
    w1 = wl.weighted_histogram(state, row, wl.AnswerPrior(base))
    w2 = wl.weighted_histogram(state, row, wl.AnswerPrior(base * 2.0))
    assert w1.keys() == w2.keys()
    for code in w1:
        assert w1[code] == pytest.approx(w2[code])


def test_weighted_histogram_zero_mass_error(mini_matrix, mini_list):
    weights = np.zeros(mini_list.size)
    weights[mini_list.index_of("weary")] = 1.0
    prior = wl.AnswerPrior(weights)
    state = wl.new_game(mini_matrix)
    state = wl.apply_feedback(
        state, mini_list.index_of("weary"), wl.encode_code("BBBBB")
    )
    with pytest.raises(ValueError):
        wl.weighted_histogram(state, mini_list.index_of("tares"), prior)


def test_weighted_score_examples(mini_matrix, mini_list):
    state = wl.new_game(mini_matrix)
    prior = wl.AnswerPrior(np.ones(mini_list.size))
    row = mini_list.index_of("knoll")  # not equal to any... it is its own answer
    h = wl.bucket_histogram(state, row)
    w = wl.weighted_histogram(state, row, prior)
    got = wl.weighted_score(w, h, 1.0)
    brute = sum((n / mini_list.size) * n for n in h.buckets.values())
    assert got == pytest.approx(brute)


def test_expected_colors(mini_matrix, mini_list):
    state = wl.new_game(mini_matrix)
    keep = np.asarray([mini_list.index_of("weary")], dtype=np.int32)
    single = wl.GameState(mini_matrix, keep, (), 1, wl.NORMAL, ())
    gy, g = wl.expected_colors(single, mini_list.index_of("weary"))
    assert (gy, g) == (5.0, 5.0)
    gy2, g2 = wl.expected_colors(single, mini_list.index_of("knoll"))
    assert (gy2, g2) == (0.0, 0.0)
    gy3, g3 = wl.expected_colors(state, mini_list.index_of("tares"))
    assert g3 <= gy3


def test_rank_single_viable_word_first(mini_matrix, mini_list):
    state = wl.new_game(mini_matrix)
    keep = np.asarray([mini_list.index_of("weary")], dtype=np.int32)
    state = wl.GameState(mini_matrix, keep, (), 1, wl.NORMAL, ())
    for p in (-1.0, 1.0, -0.5, math.inf, -math.inf):
        top = wl.rank_guesses(state, wl.Policy(p=p), top_k=1)[0]
        assert top.word == "weary", p


def test_rank_two_viable_alphabetical(mini_matrix, mini_list):
    cols = sorted(
        [mini_list.index_of("bakes"), mini_list.index_of("wakes")]
    )
    state = wl.GameState(
        mini_matrix, np.asarray(cols, dtype=np.int32), (), 1, wl.NORMAL, ()
    )
    top = wl.rank_guesses(state, wl.Policy(p=-0.5), top_k=2)
    assert top[0].word == "bakes"
    assert top[0].in_viable


def test_rank_deterministic(mini_matrix):
    state = wl.new_game(mini_matrix)
    policy = wl.Policy(p=-0.5)
    first = [r.word for r in wl.rank_guesses(state, policy, top_k=8)]
    again = [r.word for r in wl.rank_guesses(state, policy, top_k=8)]
    assert first == again


def test_rank_respects_orientation(mini_matrix, mini_list):
    state = wl.new_game(mini_matrix)
    full = wl.rank_guesses(state, wl.Policy(p=1.0), top_k=mini_list.size)
    scores = [r.score for r in full if not r.degenerate]
    assert scores == sorted(scores)
    full_neg = wl.rank_guesses(state, wl.Policy(p=-1.0), top_k=mini_list.size)
    scores_neg = [r.score for r in full_neg if not r.degenerate]
    assert scores_neg == sorted(scores_neg, reverse=True)


def test_uniform_prior_ranking_matches_unweighted(matrix_500):
    state = wl.new_game(matrix_500)
    prior = wl.AnswerPrior(np.ones(matrix_500.answers.size))
    for p in (-1.0, -0.5, 1.0):
        plain = [r.word for r in wl.rank_guesses(state, wl.Policy(p=p), top_k=10)]
        weighted = [
            r.word
            for r in wl.rank_guesses(state, wl.Policy(p=p, prior=prior), top_k=10)
        ]
        assert plain == weighted, p


def test_prior_scale_invariance(matrix_500):
    state = wl.new_game(matrix_500)
    rng = np.random.default_rng(11)
    base = rng.random(matrix_500.answers.size) + 0.01
    a = wl.Policy(p=-0.5, prior=wl.AnswerPrior(base))
    b = wl.Policy(p=-0.5, prior=wl.AnswerPrior(base * 37.0))
    ra = [r.word for r in wl.rank_guesses(state, a, top_k=10)]
    rb = [r.word for r in wl.rank_guesses(state, b, top_k=10)]
    assert ra == rb


def test_select_guess_matches_rank(mini_matrix):
    state = wl.new_game(mini_matrix)
    policy = wl.Policy(p=-0.5)
    assert wl.select_guess(state, policy) == wl.rank_guesses(state, policy, 1)[0].row


def test_mode_scores_dense_and_runs_agree(matrix_500):
    # same state scored through both bucket-counting paths
    from wordlab import scoring

    state = wl.new_game(matrix_500)
    rows = state.guess_rows()
    for p in (-0.5, 1.0, -1.0, 2.0, math.inf, -math.inf):
        dense, dd = scoring._mode_scores_dense(
            matrix_500.cells, state.viable_cols, rows, p,
            matrix_500.all_green, 243, None,
        )
        runs, dr = scoring._mode_scores_runs(
            matrix_500.cells, state.viable_cols, rows, p, matrix_500.all_green, None
        )
        np.testing.assert_allclose(dense, runs, rtol=1e-12)
        assert (dd == dr).all()

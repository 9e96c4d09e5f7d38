import itertools
import math

import numpy as np
import pytest

import wordlab as wl
from oracles import reference_colorize

I4_WORDS = ["abcde", "abcdz", "abcez", "abdez"]  # abcde discerns the other three


def state_with_viable(matrix, words, viable):
    cols = sorted(matrix.answers.index_of(w) for w in viable)
    assert all(c >= 0 for c in cols)
    return wl.GameState(
        matrix, np.asarray(cols, dtype=np.int32), (), 1, wl.NORMAL, ()
    )


@pytest.fixture(scope="module")
def efds_matrix():
    # no member of {sated, dated, mated} separates the other two, but
    # dumps sees s/d/m and splits all three
    words = wl.make_word_list(["sated", "dated", "mated", "dumps", "zzzzz"])
    return wl.precompute_matrix(words, words)


@pytest.fixture(scope="module")
def ifds_matrix():
    words = wl.make_word_list(I4_WORDS + ["qqqqq", "zzzzz"])
    return wl.precompute_matrix(words, words)


def test_two_word_sets_are_ifds(mini_matrix, mini_list):
    state = state_with_viable(mini_matrix, mini_list, ["tares", "weary"])
    cls = wl.classify_fds(state, state.viable_cols)
    assert cls.kind == wl.I_FDS
    member_rows = {mini_list.index_of("tares"), mini_list.index_of("weary")}
    assert member_rows <= cls.keys


def test_single_word_set_is_ifds(mini_matrix, mini_list):
    state = state_with_viable(mini_matrix, mini_list, ["glean"])
    cls = wl.classify_fds(state, state.viable_cols)
    assert cls.kind == wl.I_FDS


def test_efds_construct_found_by_search(efds_matrix):
    """Brute-force search for the external-key set, then exhaustive verify."""
    words = efds_matrix.answers.words
    state = wl.new_game(efds_matrix)
    found = None
    for trio in itertools.combinations(range(len(words)), 3):
        trio_words = [words[i] for i in trio]
        internal_ok = any(
            len({reference_colorize(g, a) for a in trio_words}) == 3
            for g in trio_words
        )
        external_ok = any(
            len({reference_colorize(g, a) for a in trio_words}) == 3
            for g in words
            if g not in trio_words
        )
        if not internal_ok and external_ok:
            found = trio_words
            break
    assert found == ["dated", "mated", "sated"]
    st = state_with_viable(efds_matrix, efds_matrix.answers, found)
    cls = wl.classify_fds(st, st.viable_cols)
    assert cls.kind == wl.E_FDS
    assert efds_matrix.guesses.index_of("dumps") in cls.keys
    assert not any(
        efds_matrix.guesses.words[k] in found for k in cls.keys
    )
    del state


def test_ifds_four_set(ifds_matrix):
    st = state_with_viable(ifds_matrix, ifds_matrix.answers, I4_WORDS)
    cls = wl.classify_fds(st, st.viable_cols)
    assert cls.kind == wl.I_FDS
    assert ifds_matrix.guesses.index_of("abcde") in cls.keys


def test_l_tilde_values(ifds_matrix, efds_matrix):
    st4 = state_with_viable(ifds_matrix, ifds_matrix.answers, I4_WORDS)
    cols4 = st4.viable_cols
    assert wl.l_tilde(st4, cols4) == pytest.approx(2.5)  # I-FDS of 4

    st2 = state_with_viable(ifds_matrix, ifds_matrix.answers, I4_WORDS[:2])
    assert wl.l_tilde(st2, st2.viable_cols) == 2.0  # below threshold

    st3 = state_with_viable(efds_matrix, efds_matrix.answers, ["sated", "dated", "mated"])
    assert wl.l_tilde(st3, st3.viable_cols) == 3.0  # E-FDS maps to 3


def test_l_tilde_not_fds_keeps_length(efds_matrix):
    # drop the only splitting word from the guess pool: the trio has no key
    st = state_with_viable(efds_matrix, efds_matrix.answers, ["sated", "dated", "mated"])
    dumps_row = efds_matrix.guesses.index_of("dumps")
    st = wl.GameState(
        efds_matrix, st.viable_cols, (dumps_row,), 2, wl.NORMAL, ((dumps_row, 0),)
    )
    cls = wl.classify_fds(st, st.viable_cols)
    assert cls.kind == wl.NOT_FDS and not cls.keys
    assert wl.l_tilde(st, st.viable_cols) == 3.0  # length 3, unadjusted


def test_l_tilde_above_achievable_count_is_identity():
    words = wl.make_word_list(
        ["".join(t) for t in itertools.product("abcdef", repeat=2)], word_length=2
    )
    m = wl.precompute_matrix(words, words)
    state = wl.new_game(m)
    cols = state.viable_cols[:8]  # 8 > achievable code count 3^2-2 = 7
    assert wl.l_tilde(state, cols) == 8.0


def test_score_fds_reduces_to_score(mini_matrix, mini_list):
    state = state_with_viable(mini_matrix, mini_list, ["tares", "weary"])
    for row in range(mini_list.size):
        for p in (-0.5, 1.0, -1.0, math.inf, -math.inf):
            h = wl.bucket_histogram(state, row)
            assert wl.score_fds(state, row, p) == wl.score(h, p), (row, p)


def test_score_fds_single_ifds_bucket(ifds_matrix):
    st = state_with_viable(ifds_matrix, ifds_matrix.answers, I4_WORDS)
    row = ifds_matrix.guesses.index_of("qqqqq")  # one flat bucket of 4, no all-green
    h = wl.bucket_histogram(st, row)
    assert h.buckets == {0: 4} and not h.has_all_green
    assert wl.score_fds(st, row, 1.0) == pytest.approx(2.5)  # 4 * 2.5 / 4


def test_subset_closure(ifds_matrix):
    st = state_with_viable(ifds_matrix, ifds_matrix.answers, I4_WORDS)
    full = wl.classify_fds(st, st.viable_cols)
    assert full.kind != wl.NOT_FDS
    cols = [int(c) for c in st.viable_cols]
    for size in (1, 2, 3):
        for sub in itertools.combinations(cols, size):
            cls = wl.classify_fds(st, sub)
            assert cls.kind != wl.NOT_FDS, sub


def test_key_word_ranks_first_in_fds_state(ifds_matrix):
    st = state_with_viable(ifds_matrix, ifds_matrix.answers, I4_WORDS)
    keys = wl.classify_fds(st, st.viable_cols).keys
    for p in (-0.5, 1.0, -1.0, 2.0):
        top = wl.rank_guesses(st, wl.Policy(p=p), top_k=1)[0]
        assert top.row in keys, p  # a key is p-optimal for every nonzero p
        assert top.in_viable  # and the internal one is preferred


def test_external_key_chosen_for_efds(efds_matrix):
    st = state_with_viable(efds_matrix, efds_matrix.answers, ["sated", "dated", "mated"])
    top = wl.rank_guesses(st, wl.Policy(p=1.0), top_k=1)[0]
    assert top.word == "dumps"


def test_fds_policy_rank_runs(ifds_matrix):
    st = state_with_viable(ifds_matrix, ifds_matrix.answers, I4_WORDS)
    keys = wl.classify_fds(st, st.viable_cols).keys
    plain = wl.rank_guesses(st, wl.Policy(p=-0.5), top_k=3)
    adjusted = wl.rank_guesses(st, wl.Policy(p=-0.5, use_fds=True), top_k=3)
    assert plain[0].word == adjusted[0].word
    assert plain[0].row in keys


def test_fds_score_bounds(ifds_matrix):
    st = state_with_viable(ifds_matrix, ifds_matrix.answers, I4_WORDS)
    cols = st.viable_cols
    lt = wl.l_tilde(st, cols)
    n = len(cols)
    assert min(n, 2) <= lt <= max(n, 3)

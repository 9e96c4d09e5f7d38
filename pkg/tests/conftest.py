import os
from pathlib import Path

import pytest

import wordlab as wl

REPO = Path(__file__).resolve().parent.parent
TRUE_LIST = REPO / "data" / "wordle-12972.txt"
CACHE_DIR = REPO / ".cache"

# a small realistic dictionary for unit tests (subset of the game list)
MINI_WORDS = [
    "abbey", "bakes", "bases", "crane", "cares", "fakes", "glean", "hakes",
    "knoll", "nanny", "pares", "rates", "slate", "tales", "tares", "tears",
    "trawl", "tries", "wakes", "weary", "woman", "world",
]


@pytest.fixture(scope="session")
def mini_list() -> wl.WordList:
    return wl.make_word_list(MINI_WORDS)


@pytest.fixture(scope="session")
def mini_matrix(mini_list) -> wl.CodeMatrix:
    return wl.precompute_matrix(mini_list, mini_list, threads=1)


@pytest.fixture(scope="session")
def true_list() -> wl.WordList:
    if not TRUE_LIST.exists():
        pytest.skip(f"archived game dictionary not found at {TRUE_LIST}")
    return wl.load_word_list_path(TRUE_LIST)


@pytest.fixture(scope="session")
def true_matrix(true_list) -> wl.CodeMatrix:
    """Full 12972x12972 matrix, built once and cached on disk."""
    CACHE_DIR.mkdir(exist_ok=True)
    cache = CACHE_DIR / "wccm-true.bin"
    if cache.exists():
        try:
            return wl.load_matrix(cache, true_list, true_list)
        except (wl.StaleCacheError, wl.CorruptCacheError):
            cache.unlink()
    m = wl.precompute_matrix(true_list, true_list, threads=os.cpu_count())
    wl.save_matrix(m, cache)
    return m


@pytest.fixture(scope="session")
def true_500(true_list) -> wl.WordList:
    """Deterministic 500-word slice of the game dictionary."""
    words = true_list.words[::26][:500]
    return wl.make_word_list(words)


@pytest.fixture(scope="session")
def matrix_500(true_500) -> wl.CodeMatrix:
    return wl.precompute_matrix(true_500, true_500, threads=1)

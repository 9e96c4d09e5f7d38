"""Fully discernible sets and the FDS-adjusted score.

A viable set is fully discernible (FDS) when some guessable "key" row
gives every member a distinct color code, so guessing the key pins the
answer in one round. A key inside the set may also win outright, which is
worth a little more: internal-key sets (I-FDS) resolve in an expected
2*(2/L) + 3*(1-2/L) half-rounds-style accounting, external-key ones
(E-FDS) behave like a set of three regardless of size. The adjusted
bucket length folds that into scoring: prospective buckets that are FDS
get their size L replaced by the effective length L~ before the power sum.
"""

from __future__ import annotations

import math

import numpy as np

from .feedback import achievable_code_count
from .matrix import HARD, CodeMatrix, GameState

NOT_FDS = "not_fds"
E_FDS = "e_fds"
I_FDS = "i_fds"

_SCAN_CHUNK = 1024
_CACHE_LIMIT = 1_000_000


class FdsClass:
    """Classification of a viable subset: kind plus the key rows found."""

    __slots__ = ("kind", "keys")

    def __init__(self, kind: str, keys: frozenset[int]):
        self.kind = kind
        self.keys = keys

    def __repr__(self):
        return f"FdsClass({self.kind!r}, {sorted(self.keys)!r})"

    def __eq__(self, other):
        return (
            isinstance(other, FdsClass)
            and self.kind == other.kind
            and self.keys == other.keys
        )


def _distinct_rows(cells: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Boolean mask of rows whose codes over `cols` are pairwise distinct."""
    sub = cells[rows[:, None], cols[None, :]]
    s = np.sort(sub, axis=1)
    return ~np.any(s[:, 1:] == s[:, :-1], axis=1)


def classify_fds(state: GameState, viable_subset) -> FdsClass:
    """Classify a viable subset against the state's guessable rows.

    A row is a key iff its codes over the subset are pairwise distinct
    (the all-green code counts as distinct like any other). The class is
    internal if any key's word is itself in the subset.
    """
    cols = np.asarray(sorted(int(c) for c in viable_subset), dtype=np.int64)
    if len(cols) == 0:
        raise ValueError("viable subset must not be empty")
    m = state.matrix
    candidates = state.guess_rows()
    keys: list[int] = []
    for lo in range(0, len(candidates), _SCAN_CHUNK):
        chunk = candidates[lo : lo + _SCAN_CHUNK]
        good = _distinct_rows(m.cells, chunk, cols)
        keys.extend(int(r) for r in chunk[good])
    if not keys:
        return FdsClass(NOT_FDS, frozenset())
    member_rows = {int(r) for r in m.col_to_row[cols] if r >= 0}
    internal = any(k in member_rows for k in keys)
    return FdsClass(I_FDS if internal else E_FDS, frozenset(keys))


def _bucket_kind(state: GameState, bucket_cols: np.ndarray) -> str:
    """Kind only, with a short-circuit scan and a per-matrix memo.

    Candidate keys are the rows guessable in the round after this bucket
    becomes the viable set: in normal mode every unguessed row (the row
    being scored is constant over its own bucket, so excluding it never
    matters), in hard mode only the bucket's own words.
    """
    m = state.matrix
    cache = m._caches.setdefault("fds_kind", {})
    key = (state.mode, state.guessed_rows, bucket_cols.tobytes())
    hit = cache.get(key)
    if hit is not None:
        return hit
    member_rows = m.col_to_row[bucket_cols]
    member_rows = member_rows[member_rows >= 0]
    guessed = set(state.guessed_rows)
    member_rows = np.asarray(
        [r for r in member_rows if int(r) not in guessed], dtype=np.int64
    )
    kind = NOT_FDS
    if len(member_rows) and bool(_distinct_rows(m.cells, member_rows, bucket_cols).any()):
        kind = I_FDS
    elif state.mode != HARD:
        mask = np.zeros(m.guesses.size, dtype=bool)
        mask[member_rows] = True
        for g in guessed:
            mask[g] = True
        external = np.flatnonzero(~mask)
        for lo in range(0, len(external), _SCAN_CHUNK):
            chunk = external[lo : lo + _SCAN_CHUNK]
            if bool(_distinct_rows(m.cells, chunk, bucket_cols).any()):
                kind = E_FDS
                break
    if len(cache) > _CACHE_LIMIT:
        cache.clear()
    cache[key] = kind
    return kind


def l_tilde(state: GameState, bucket_cols) -> float:
    """Adjusted length of a prospective viable set.

    Sets smaller than 3 or larger than the achievable-code count keep
    their true length (no key can exist above it, and below 3 the
    adjustment changes nothing). Otherwise E-FDS maps to 3 and I-FDS to
    the weighted average 2*(2/L) + 3*(1 - 2/L).
    """
    cols = np.asarray(sorted(int(c) for c in bucket_cols), dtype=np.int64)
    n = len(cols)
    if n == 0:
        raise ValueError("bucket must not be empty")
    if n < 3 or n > achievable_code_count(state.matrix.word_length):
        return float(n)
    kind = _bucket_kind(state, cols)
    if kind == NOT_FDS:
        return float(n)
    if kind == E_FDS:
        return 3.0
    return 2.0 * (2.0 / n) + 3.0 * (1.0 - 2.0 / n)


def _row_buckets(state: GameState, row: int):
    """Sorted-run decomposition of one row: list of (code, columns)."""
    m = state.matrix
    viable = state.viable_cols
    codes = m.cells[row, viable]
    order = np.argsort(codes, kind="stable")
    s = codes[order]
    splits = np.flatnonzero(s[1:] != s[:-1]) + 1
    bounds = np.concatenate([[0], splits, [len(s)]])
    out = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        out.append((int(s[a]), viable[order[a:b]]))
    return out


def score_fds(state: GameState, row: int, p: float) -> float:
    """FDS-adjusted score for one row.

    Mirrors the plain score, with each non-all-green bucket's length L
    replaced by L~ inside the power: sum_c L_c * L~_c^p over buckets,
    divided by N_v - 1_allgreen. Under +inf the worst adjusted length is
    minimized; under -inf the count of L~ == 1 buckets is maximized.
    When no bucket is adjusted the result is identical to score(),
    bit for bit.
    """
    from .scoring import Histogram, score, validate_p

    p = validate_p(p)
    m = state.matrix
    max_fds = achievable_code_count(m.word_length)
    pairs: list[tuple[int, float]] = []  # (L, L~) per non-all-green bucket
    has_ag = False
    for code, cols in _row_buckets(state, row):
        if code == m.all_green:
            has_ag = True
            continue
        n = len(cols)
        lt = float(n) if (n < 3 or n > max_fds) else l_tilde(state, cols)
        pairs.append((n, lt))
    if all(n == lt for n, lt in pairs):
        h = Histogram({i: n for i, (n, _) in enumerate(pairs)}, has_ag, state.viable_count)
        return score(h, p)
    if p == math.inf:
        return float(max((lt for _, lt in pairs), default=0.0))
    if p == -math.inf:
        return float(sum(1 for _, lt in pairs if lt == 1.0))
    den = state.viable_count - (1 if has_ag else 0)
    if den == 0:
        return 0.0
    return float(sum(n * lt**p for n, lt in pairs)) / den


def fds_mode_scores(state: GameState, rows: np.ndarray, p: float,
                    qn: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Bulk FDS-adjusted scores for the ranking pass.

    Row-by-row; the bucket-kind memo carries most of the cost across rows
    because identical buckets recur throughout one ranking.
    """
    m = state.matrix
    max_fds = achievable_code_count(m.word_length)
    scores = np.empty(len(rows), dtype=np.float64)
    deg = np.zeros(len(rows), dtype=bool)
    viable_pos = {int(c): i for i, c in enumerate(state.viable_cols)}
    for i, row in enumerate(rows):
        if qn is None:
            scores[i] = score_fds(state, int(row), p)
            deg[i] = state.viable_count == 1 and bool(
                m.cells[row, state.viable_cols[0]] == m.all_green
            )
            continue
        num = 0.0
        w_ag = 0.0
        for code, cols in _row_buckets(state, int(row)):
            w = float(sum(qn[viable_pos[int(c)]] for c in cols))
            if code == m.all_green:
                w_ag = w
                continue
            n = len(cols)
            lt = float(n) if (n < 3 or n > max_fds) else l_tilde(state, cols)
            num += w * lt**p
        den = 1.0 - w_ag
        if den <= 1e-15:
            scores[i] = 0.0
            deg[i] = True
        else:
            scores[i] = num / den
    return scores, deg

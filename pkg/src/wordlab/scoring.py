"""Guess scoring and ranking.

The score family is parameterized by a nonzero real p: a guess row's
score is the bucket-size power sum sum_c L_c^(p+1) over its non-all-green
feedback buckets, divided by the viable count less one when the row's own
word is viable. Small p+1 powers favor many distinct buckets (p=-1 is the
expected probability of winning next round), large ones punish big
buckets (p=1 is the expected size of the next viable set). The limits
p -> +inf (minimize the worst bucket) and p -> -inf (maximize singleton
buckets) are distinct modes, represented here by the float infinities.

Scores with p > 0 or p = +inf are minimized; p < 0 or p = -inf are
maximized. Ranking prefers viable words among tied rows, then walks a
cascade of secondary p values, then expected green+yellow counts, then
greens, then alphabetical order.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import numpy as np

from .feedback import code_count, color_count_tables
from .matrix import CodeMatrix, GameState

_TIE_RTOL = 1e-9
# viable-set size above which bucket counting switches from per-row sorted
# runs to a dense bincount over the full code range
_DENSE_THRESHOLD = 96
_BLOCK_CELLS = 4_000_000

DEFAULT_TIE_BREAK_PS = (-1.0, 1.0, -10.0, 10.0)


def validate_p(p: float) -> float:
    """Check a score parameter: any nonzero real, or +-inf for the limits."""
    p = float(p)
    if math.isnan(p):
        raise ValueError("p must not be NaN")
    if p == 0.0:
        raise ValueError("p = 0 is degenerate (the score is constant); use a nonzero p")
    return p


def minimizes(p: float) -> bool:
    """True when lower scores are better for this mode."""
    return p > 0  # +inf minimizes, -inf maximizes, sign rule otherwise


class AnswerPrior:
    """Nonnegative per-answer weights, renormalized over each viable set."""

    def __init__(self, weights):
        arr = np.asarray(weights, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("prior weights must be one-dimensional")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError("prior weights must be finite and nonnegative")
        if not np.any(arr > 0):
            raise ValueError("prior must have at least one positive weight")
        arr = arr.copy()
        arr.setflags(write=False)
        self.weights = arr
        self.digest = hashlib.sha256(arr.tobytes()).hexdigest()

    def __len__(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class Policy:
    """Strategy configuration: primary score mode plus tie-break settings."""

    p: float = -0.5
    use_fds: bool = False
    tie_break_ps: tuple[float, ...] = DEFAULT_TIE_BREAK_PS
    prior: AnswerPrior | None = None

    def __post_init__(self):
        validate_p(self.p)
        if not self.tie_break_ps:
            raise ValueError("tie_break_ps must not be empty")
        for q in self.tie_break_ps:
            validate_p(q)

    def key(self) -> tuple:
        """Hashable identity for caches."""
        return (
            self.p,
            self.use_fds,
            self.tie_break_ps,
            self.prior.digest if self.prior is not None else None,
        )


@dataclass(frozen=True)
class Histogram:
    """Bucket sizes of one guess row over the current viable set.

    buckets maps code -> count and never contains the all-green code;
    has_all_green records whether the row's own word is viable.
    """

    buckets: dict[int, int]
    has_all_green: bool
    viable_count: int

    @property
    def distinct(self) -> int:
        return len(self.buckets)


@dataclass(frozen=True)
class ScoreReport:
    row: int
    word: str
    score: float
    in_viable: bool
    expected_gy: float
    expected_g: float
    degenerate: bool = False


def bucket_histogram(state: GameState, row: int) -> Histogram:
    """Count feedback buckets for one guess row over the viable columns."""
    m = state.matrix
    codes = m.cells[row, state.viable_cols]
    counts = np.bincount(codes, minlength=code_count(m.word_length))
    ag = int(counts[m.all_green]) > 0
    counts[m.all_green] = 0
    nz = np.flatnonzero(counts)
    buckets = {int(c): int(counts[c]) for c in nz}
    return Histogram(buckets, ag, len(state.viable_cols))


def score(h: Histogram, p: float) -> float:
    """Evaluate one histogram under mode p.

    Finite p: sum_c L_c^(p+1) / (N_v - 1 if the all-green bucket exists).
    +inf: the largest bucket (to be minimized). -inf: the number of
    singleton buckets (to be maximized). The degenerate case N_v == 1 with
    only the all-green bucket scores 0; ranking resolves it through the
    viable-membership preference.

    Integer p >= -1 accumulates the numerator in exact integer arithmetic,
    so e.g. score(h, -1) equals distinct_buckets / (N_v - 1_allgreen)
    exactly.
    """
    p = validate_p(p)
    if p == math.inf:
        return float(max(h.buckets.values(), default=0))
    if p == -math.inf:
        return float(sum(1 for n in h.buckets.values() if n == 1))
    den = h.viable_count - (1 if h.has_all_green else 0)
    if den == 0:
        return 0.0
    e = p + 1.0
    if e.is_integer() and e >= 0:
        num = float(sum(n ** int(e) for n in h.buckets.values()))
    else:
        num = float(sum(n * n**p for n in h.buckets.values()))
    return num / den


def weighted_histogram(state: GameState, row: int, prior: AnswerPrior) -> dict[int, float]:
    """Bucket weights W(code) = renormalized prior mass landing in each bucket.

    Includes the all-green bucket when present; weights sum to one.
    """
    m = state.matrix
    if len(prior) != m.answers.size:
        raise ValueError("prior length does not match the answer pool")
    q = prior.weights[state.viable_cols]
    total = q.sum()
    if total <= 0:
        raise ValueError("prior has zero mass on the viable set")
    qn = q / total
    codes = m.cells[row, state.viable_cols]
    w = np.bincount(codes, weights=qn, minlength=code_count(m.word_length))
    nz = np.flatnonzero(w > 0)
    return {int(c): float(w[c]) for c in nz}


def weighted_score(weights: Mapping[int, float], counts: Histogram, p: float) -> float:
    """sum_c W_c * L_c^p over the non-all-green buckets."""
    p = validate_p(p)
    return float(sum(weights.get(c, 0.0) * n**p for c, n in counts.buckets.items()))


def expected_colors(state: GameState, row: int) -> tuple[float, float]:
    """(mean greens+yellows, mean greens) of the row's codes over the viable set."""
    gy, g = _color_sums(state, row)
    nv = state.viable_count
    return gy / nv, g / nv


def _color_sums(state: GameState, row: int) -> tuple[int, int]:
    """Exact integer (greens+yellows, greens) sums over viable columns."""
    m = state.matrix
    greens, yellows = color_count_tables(m.word_length)
    codes = m.cells[row, state.viable_cols]
    g = int(greens[codes].sum())
    y = int(yellows[codes].sum())
    return g + y, g


def _normalized_prior(state: GameState, prior: AnswerPrior) -> np.ndarray:
    if len(prior) != state.matrix.answers.size:
        raise ValueError("prior length does not match the answer pool")
    q = prior.weights[state.viable_cols]
    total = q.sum()
    if total <= 0:
        raise ValueError("prior has zero mass on the viable set")
    return q / total


def _pow_counts(counts: np.ndarray, exponent: float) -> np.ndarray:
    """counts**exponent with zero cells mapped to zero (not inf)."""
    safe = np.where(counts > 0, counts.astype(np.float64), 1.0)
    out = np.power(safe, exponent)
    return np.where(counts > 0, out, 0.0)


def _mode_scores_dense(cells, viable, rows, p, ag_code, ncodes, qn):
    """Bucket stats via per-row bincount over the full code range."""
    nv = len(viable)
    scores = np.empty(len(rows), dtype=np.float64)
    deg = np.zeros(len(rows), dtype=bool)
    block = max(1, _BLOCK_CELLS // max(nv, 1))
    for lo in range(0, len(rows), block):
        rblk = rows[lo : lo + block]
        nb = len(rblk)
        sub = cells[rblk[:, None], viable[None, :]].astype(np.int32)
        sub += (np.arange(nb, dtype=np.int32) * ncodes)[:, None]
        if qn is not None:
            wcounts = np.bincount(
                sub.ravel(), weights=np.tile(qn, nb), minlength=nb * ncodes
            ).reshape(nb, ncodes)
        counts = np.bincount(sub.ravel(), minlength=nb * ncodes).reshape(nb, ncodes)
        ag = counts[:, ag_code] > 0
        counts[:, ag_code] = 0
        dblk = ag & (nv == 1)  # only the lone viable word's own row
        if qn is not None:
            w_ag = wcounts[:, ag_code].copy()
            wcounts[:, ag_code] = 0.0
            num = (wcounts * _pow_counts(counts, p)).sum(axis=1)
            den = 1.0 - np.where(ag, w_ag, 0.0)
            dblk = dblk | (den <= 1e-15)
            scores[lo : lo + block] = np.where(dblk, 0.0, num / np.where(dblk, 1.0, den))
            deg[lo : lo + block] = dblk
            continue
        if p == math.inf:
            scores[lo : lo + block] = np.where(dblk, 0.0, counts.max(axis=1))
            deg[lo : lo + block] = dblk
            continue
        if p == -math.inf:
            scores[lo : lo + block] = np.where(dblk, 0.0, (counts == 1).sum(axis=1))
            deg[lo : lo + block] = dblk
            continue
        e = p + 1.0
        if e.is_integer() and 0 <= e <= 3:
            ei = int(e)
            if ei == 0:
                num = (counts > 0).sum(axis=1).astype(np.float64)
            elif ei == 1:
                num = counts.sum(axis=1).astype(np.float64)
            elif ei == 2:
                num = (counts * counts).sum(axis=1).astype(np.float64)
            else:
                num = (counts * counts * counts).sum(axis=1).astype(np.float64)
        else:
            num = _pow_counts(counts, e).sum(axis=1)
        den = nv - ag.astype(np.int64)
        scores[lo : lo + block] = np.where(dblk, 0.0, num / np.where(dblk, 1, den))
        deg[lo : lo + block] = dblk
    return scores, deg


def _mode_scores_runs(cells, viable, rows, p, ag_code, qn):
    """Bucket stats via sorted runs; cheap when the viable set is small.

    Works in the column formulation: if L_a is the size of the bucket that
    column a falls into, then sum_c L_c^(p+1) == sum_a L_a^p.
    """
    nv = len(viable)
    scores = np.empty(len(rows), dtype=np.float64)
    deg = np.zeros(len(rows), dtype=bool)
    idx = np.arange(nv)
    block = max(1, _BLOCK_CELLS // max(nv, 1))
    for lo in range(0, len(rows), block):
        rblk = rows[lo : lo + block]
        nb = len(rblk)
        sub = cells[rblk[:, None], viable[None, :]]
        if qn is not None:
            order = np.argsort(sub, axis=1, kind="stable")
            s = np.take_along_axis(sub, order, axis=1)
            qs = qn[order]
        else:
            s = np.sort(sub, axis=1)
        starts = np.ones((nb, nv), dtype=bool)
        if nv > 1:
            starts[:, 1:] = s[:, 1:] != s[:, :-1]
        run_start = np.maximum.accumulate(np.where(starts, idx, 0), axis=1)
        nxt_src = np.where(starts, idx, nv)
        run_min = np.flip(np.minimum.accumulate(np.flip(nxt_src, axis=1), axis=1), axis=1)
        run_end = np.concatenate([run_min[:, 1:], np.full((nb, 1), nv)], axis=1)
        sizes = run_end - run_start  # bucket size per column
        ag = s[:, -1] == ag_code  # all-green is the maximal code, so it sorts last
        valid = np.ones((nb, nv), dtype=bool)
        valid[:, -1] = ~ag
        dblk = ag & (nv == 1)  # only the lone viable word's own row
        if qn is not None:
            num = (qs * np.power(sizes.astype(np.float64), p) * valid).sum(axis=1)
            den = 1.0 - np.where(ag, qs[:, -1], 0.0)
            dblk = dblk | (den <= 1e-15)
            scores[lo : lo + block] = np.where(dblk, 0.0, num / np.where(dblk, 1.0, den))
            deg[lo : lo + block] = dblk
            continue
        if p == math.inf:
            scores[lo : lo + block] = np.where(
                dblk, 0.0, np.where(valid, sizes, 0).max(axis=1)
            )
            deg[lo : lo + block] = dblk
            continue
        if p == -math.inf:
            scores[lo : lo + block] = np.where(
                dblk, 0.0, ((sizes == 1) & valid).sum(axis=1)
            )
            deg[lo : lo + block] = dblk
            continue
        if p == -1.0:
            num = (starts.sum(axis=1) - ag).astype(np.float64)  # distinct buckets
        elif p == 1.0:
            num = np.where(valid, sizes, 0).sum(axis=1).astype(np.float64)
        elif p == 2.0:
            sq = sizes * sizes
            num = np.where(valid, sq, 0).sum(axis=1).astype(np.float64)
        else:
            num = (np.power(sizes.astype(np.float64), p) * valid).sum(axis=1)
        den = nv - ag.astype(np.int64)
        scores[lo : lo + block] = np.where(dblk, 0.0, num / np.where(dblk, 1, den))
        deg[lo : lo + block] = dblk
    return scores, deg


def _mode_scores(state: GameState, rows: np.ndarray, p: float,
                 prior: AnswerPrior | None) -> tuple[np.ndarray, np.ndarray]:
    """Primary scores for each row in `rows`; also a degenerate-row mask."""
    m = state.matrix
    viable = state.viable_cols
    qn = None
    if prior is not None and not math.isinf(p):
        # prior applies to finite modes only; the +-inf limits stay unweighted
        qn = _normalized_prior(state, prior)
    if len(viable) > _DENSE_THRESHOLD:
        return _mode_scores_dense(
            m.cells, viable, rows, p, m.all_green, code_count(m.word_length), qn
        )
    return _mode_scores_runs(m.cells, viable, rows, p, m.all_green, qn)


def _exact_fraction_score(h: Histogram, p: float) -> Fraction:
    """Exact score for integer p, for splitting float near-ties."""
    den = h.viable_count - (1 if h.has_all_green else 0)
    if den == 0:
        return Fraction(0)
    e = int(p) + 1
    if e >= 0:
        num = Fraction(sum(n**e for n in h.buckets.values()))
    else:
        num = sum((Fraction(1, n**-e) for n in h.buckets.values()), Fraction(0))
    return num / den


def _rel_close(a: float, b: float) -> bool:
    return abs(a - b) <= _TIE_RTOL * max(abs(a), abs(b))


def _chain_groups(values: Sequence, items: Sequence[int]) -> list[list[int]]:
    """Group consecutive items whose values sit within the tie tolerance."""
    groups: list[list[int]] = []
    prev = None
    for value, item in zip(values, items):
        if prev is not None and _rel_close(value, prev):
            groups[-1].append(item)
        else:
            groups.append([item])
        prev = value
    return groups


class _Ranker:
    """One ranking pass: bulk primary scores plus lazy per-row refinements."""

    def __init__(self, state: GameState, policy: Policy):
        self.state = state
        self.policy = policy
        self.rows = state.guess_rows()
        if len(self.rows) == 0:
            raise ValueError("no guessable rows remain")
        if state.viable_count == 0:
            raise ValueError("viable set is empty")
        if policy.use_fds:
            from . import fds  # local import; fds builds on this module's types

            self.scores, self.deg = fds.fds_mode_scores(
                state, self.rows, policy.p,
                _normalized_prior(state, policy.prior) if policy.prior is not None
                and not math.isinf(policy.p) else None,
            )
        else:
            self.scores, self.deg = _mode_scores(state, self.rows, policy.p, policy.prior)
        self._hists: dict[int, Histogram] = {}
        viable_rows = state.matrix.col_to_row[state.viable_cols]
        self._viable_rows = set(int(r) for r in viable_rows if r >= 0)

    def histogram(self, row: int) -> Histogram:
        h = self._hists.get(row)
        if h is None:
            h = bucket_histogram(self.state, row)
            self._hists[row] = h
        return h

    def in_viable(self, row: int) -> bool:
        return row in self._viable_rows

    # -- tie groups over the primary score ------------------------------

    def groups(self) -> Iterator[list[int]]:
        """Yield row groups from best to worst under the primary mode."""
        minimize = minimizes(self.policy.p)
        order = np.argsort(self.scores, kind="stable")
        if not minimize:
            order = order[::-1]
        deg_rows = [int(self.rows[i]) for i in order if self.deg[i]]
        live = [i for i in order if not self.deg[i]]
        if deg_rows:
            # only the lone viable word's row can be degenerate; it wins
            yield deg_rows
        values = [float(self.scores[i]) for i in live]
        items = [int(self.rows[i]) for i in live]
        for group in _chain_groups(values, items):
            yield from self._split_exact(group)

    def _split_exact(self, group: list[int]) -> list[list[int]]:
        """Split a float-tolerance group by exact scores for integer p."""
        p = self.policy.p
        if (
            len(group) == 1
            or math.isinf(p)  # integer-valued scores; 1e-9 cannot merge distinct ints
            or not float(p).is_integer()
            or self.policy.use_fds
            or self.policy.prior is not None
        ):
            return [group]
        keyed: dict[Fraction, list[int]] = {}
        for row in group:
            keyed.setdefault(_exact_fraction_score(self.histogram(row), p), []).append(row)
        keys = sorted(keyed, reverse=not minimizes(p))
        return [keyed[k] for k in keys]

    # -- ordering within a tie group -------------------------------------

    def order_group(self, group: list[int]) -> list[int]:
        """Viable rows first, then the tie-break cascade within each part."""
        if len(group) == 1:
            return group
        viable = [r for r in group if self.in_viable(r)]
        rest = [r for r in group if not self.in_viable(r)]
        stages = [
            q for q in self.policy.tie_break_ps
            if not (q == self.policy.p and not self.policy.use_fds
                    and self.policy.prior is None)
        ]
        out = []
        for part in (viable, rest):
            if part:
                out.extend(self._cascade(part, stages, 0))
        return out

    def _cascade(self, rows: list[int], stages: list[float], si: int) -> list[int]:
        if len(rows) == 1:
            return rows
        if si == len(stages):
            return self._final_order(rows)
        q = stages[si]
        minimize = minimizes(q)
        if math.isinf(q) or float(q).is_integer():
            keyed: dict = {}
            for row in rows:
                h = self.histogram(row)
                if math.isinf(q):
                    key = score(h, q)  # exact small integer
                else:
                    key = _exact_fraction_score(h, q)
                keyed.setdefault(key, []).append(row)
            groups = [keyed[k] for k in sorted(keyed, reverse=not minimize)]
        else:
            scored = sorted(
                ((score(self.histogram(row), q), row) for row in rows),
                key=lambda t: (t[0] if minimize else -t[0], t[1]),
            )
            groups = _chain_groups([s for s, _ in scored], [r for _, r in scored])
        out = []
        for g in groups:
            out.extend(self._cascade(g, stages, si + 1))
        return out

    def _final_order(self, rows: list[int]) -> list[int]:
        """Expected G+Y desc, then expected G desc, then alphabetical.

        Guess rows are in byte order of their words, so the row index is
        the alphabetical tie-break.
        """
        sums = {row: _color_sums(self.state, row) for row in rows}
        return sorted(rows, key=lambda r: (-sums[r][0], -sums[r][1], r))

    def report(self, row: int, rank_index: int) -> ScoreReport:
        i = int(np.searchsorted(self.rows, row))
        gy, g = expected_colors(self.state, row)
        return ScoreReport(
            row=row,
            word=self.state.matrix.guesses.words[row],
            score=float(self.scores[i]),
            in_viable=self.in_viable(row),
            expected_gy=gy,
            expected_g=g,
            degenerate=bool(self.deg[i]),
        )


def rank_guesses(state: GameState, policy: Policy, top_k: int = 10) -> list[ScoreReport]:
    """Rank guessable rows under the policy, best first.

    Groups of primary-score ties are resolved by: membership in the viable
    set, the tie-break p cascade, expected green+yellow count, expected
    green count, and finally alphabetical order.
    """
    if top_k < 1:
        raise ValueError("top_k must be positive")
    ranker = _Ranker(state, policy)
    out: list[ScoreReport] = []
    for group in ranker.groups():
        for row in ranker.order_group(group):
            out.append(ranker.report(row, len(out)))
            if len(out) == top_k:
                return out
    return out


def select_guess(state: GameState, policy: Policy) -> int:
    """Row index of the single best guess under the policy."""
    return rank_guesses(state, policy, top_k=1)[0].row

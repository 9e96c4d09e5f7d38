"""Full-game playout and exhaustive benchmarking.

Games stop early once the viable set is down to one word (one more round
wins for sure) or two words (guessing either wins in 1.5 expected
rounds), so recorded round counts can be half-integers. No six-round cap
is applied; losses are read off the round histogram afterwards (6.5 is a
possible loss, anything at 7 or above is a definite loss).
"""

from __future__ import annotations

import concurrent.futures
import math
import os
import time
from dataclasses import dataclass

from .matrix import NORMAL, CodeMatrix, apply_feedback, new_game
from .scoring import Policy, ScoreReport, rank_guesses, select_guess

WON_EXACT = "won_exact"
RESOLVED_TO_ONE = "resolved_to_one"
RESOLVED_TO_TWO = "resolved_to_two"


@dataclass(frozen=True)
class GameRecord:
    """One played game: and how many (possibly half) rounds it took."""

    answer: str
    guesses: tuple[str, ...]
    rounds: float
    outcome: str


@dataclass(frozen=True)
class SimulationSummary:
    """Aggregate over one game per answer."""

    answers_count: int
    mean_rounds: float
    histogram: dict[float, int]
    count_at_6_5: int
    count_ge_7: int
    fail_words: tuple[tuple[str, float], ...]
    opener: str | None
    wallclock_seconds: float


def play_game(matrix: CodeMatrix, answer: str, policy: Policy, mode: str = NORMAL,
              decisions: dict | None = None) -> GameRecord:
    """Play one game against a known answer.

    `decisions` optionally memoizes guess choices keyed by feedback
    history; all games of one benchmark share it, so each distinct game
    tree node is ranked once.
    """
    col = matrix.answers.index_of(answer)
    if col < 0:
        raise ValueError(f"{answer!r} is not in the answer pool")
    state = new_game(matrix, mode)
    guesses: list[str] = []
    while True:
        nv = state.viable_count
        if nv == 1:
            if not guesses:
                # forced single guess; play it rather than scoring the round
                return GameRecord(answer, (state.viable_words()[0],), 1.0, WON_EXACT)
            return GameRecord(answer, tuple(guesses), len(guesses) + 1.0, RESOLVED_TO_ONE)
        if nv == 2:
            return GameRecord(answer, tuple(guesses), len(guesses) + 1.5, RESOLVED_TO_TWO)
        row = decisions.get(state.history) if decisions is not None else None
        if row is None:
            row = select_guess(state, policy)
            if decisions is not None:
                decisions[state.history] = row
        guesses.append(matrix.guesses.words[row])
        code = int(matrix.cells[row, col])
        if code == matrix.all_green:
            return GameRecord(answer, tuple(guesses), float(len(guesses)), WON_EXACT)
        state = apply_feedback(state, row, code)
        if len(guesses) > matrix.answers.size:
            raise RuntimeError(f"game against {answer!r} did not terminate")


def simulate_all(matrix: CodeMatrix, policy: Policy, mode: str = NORMAL,
                 answers=None, threads: int | None = None) -> SimulationSummary:
    """Play every answer (or a given subset) and aggregate the results.

    Guessing always ranges over the full guess pool regardless of the
    answer subset. Games are independent and may run on several threads;
    records are aggregated in answer order, so the summary is identical
    for any thread count.
    """
    t0 = time.perf_counter()
    if answers is None:
        words = list(matrix.answers.words)
    else:
        words = [w.lower() for w in answers]
        for w in words:
            if matrix.answers.index_of(w) < 0:
                raise ValueError(f"{w!r} is not in the answer pool")
    if not words:
        raise ValueError("no answers to simulate")

    decisions: dict = {}
    opener = None
    st0 = new_game(matrix, mode)
    if st0.viable_count > 2:
        # seed the shared cache so threads do not all redo the big round-1 pass
        decisions[()] = select_guess(st0, policy)
        opener = matrix.guesses.words[decisions[()]]

    records: list[GameRecord | None] = [None] * len(words)

    def run(i: int) -> None:
        records[i] = play_game(matrix, words[i], policy, mode, decisions)

    if threads is None:
        threads = min(4, os.cpu_count() or 1)
    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(len(words))))
    else:
        for i in range(len(words)):
            run(i)

    histogram: dict[float, int] = {}
    total = 0.0
    fails: list[tuple[str, float]] = []
    for rec in records:
        assert rec is not None
        total += rec.rounds
        histogram[rec.rounds] = histogram.get(rec.rounds, 0) + 1
        if rec.rounds >= 6.5:
            fails.append((rec.answer, rec.rounds))
    if opener is None:
        opener = records[0].guesses[0] if records[0].guesses else None
    return SimulationSummary(
        answers_count=len(words),
        mean_rounds=total / len(words),
        histogram=dict(sorted(histogram.items())),
        count_at_6_5=histogram.get(6.5, 0),
        count_ge_7=sum(n for r, n in histogram.items() if r >= 7),
        fail_words=tuple(fails),
        opener=opener,
        wallclock_seconds=time.perf_counter() - t0,
    )


def best_opener(matrix: CodeMatrix, policy: Policy, mode: str = NORMAL) -> ScoreReport:
    """Best round-1 guess; answer-independent, so cached per matrix+policy."""
    cache = matrix._caches.setdefault("opener", {})
    key = (policy.key(), mode)
    hit = cache.get(key)
    if hit is None:
        hit = rank_guesses(new_game(matrix, mode), policy, top_k=1)[0]
        cache[key] = hit
    return hit


def _json_p(p: float):
    if p == math.inf:
        return "+inf"
    if p == -math.inf:
        return "-inf"
    return p


def summary_report(summary: SimulationSummary, policy: Policy, mode: str) -> dict:
    """Machine-readable report of one benchmark run."""
    return {
        "policy": {"p": _json_p(policy.p), "fds": policy.use_fds, "mode": mode},
        "opener": summary.opener,
        "answers": summary.answers_count,
        "mean_rounds": summary.mean_rounds,
        "histogram": [[r, n] for r, n in sorted(summary.histogram.items())],
        "count_at_6_5": summary.count_at_6_5,
        "count_ge_7": summary.count_ge_7,
        "fail_words": [[w, r] for w, r in summary.fail_words],
        "wallclock_seconds": summary.wallclock_seconds,
    }

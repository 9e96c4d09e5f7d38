"""Independent reference implementations used only to check the engine.

Nothing here shares code with the production path: the colorizer below is
written directly from the marking rules (greens deleted from the answer,
then a left-to-right yellow scan against the leftover letters), and the
expectimax solver enumerates whole guess trees.
"""

from __future__ import annotations

from functools import lru_cache


def reference_colorize(guess: str, answer: str) -> str:
    """Mark a guess against an answer using plain list surgery."""
    assert len(guess) == len(answer)
    n = len(guess)
    marks = ["?"] * n
    leftover: list[str] = []
    for i in range(n):
        if guess[i] == answer[i]:
            marks[i] = "G"
        else:
            leftover.append(answer[i])
    for i in range(n):
        if marks[i] == "G":
            continue
        if guess[i] in leftover:
            marks[i] = "Y"
            leftover.remove(guess[i])
        else:
            marks[i] = "B"
    return "".join(marks)


def optimal_mean_rounds(words: list[str]) -> float:
    """Exact expectimax mean rounds over a tiny dictionary.

    Same accounting as the simulator: reaching one viable word costs one
    more round, reaching two costs 1.5; guesses come from the full pool
    minus words already guessed. Answers are uniform over `words`.
    """
    n = len(words)
    all_green = "G" * len(words[0])
    feedback = [[reference_colorize(g, a) for a in words] for g in words]

    @lru_cache(maxsize=None)
    def expected(viable: frozenset, guessed: frozenset) -> float:
        nv = len(viable)
        if nv == 1:
            return 1.0
        if nv == 2:
            return 1.5
        best = float("inf")
        for g in range(n):
            if g in guessed:
                continue
            buckets: dict[str, list[int]] = {}
            for a in viable:
                buckets.setdefault(feedback[g][a], []).append(a)
            total = 0.0
            for mark, members in buckets.items():
                if mark == all_green:
                    total += 1.0  # guessed the answer this round
                else:
                    total += len(members) * (
                        1.0 + expected(frozenset(members), guessed | {g})
                    )
            best = min(best, total / nv)
        return best

    return expected(frozenset(range(n)), frozenset())

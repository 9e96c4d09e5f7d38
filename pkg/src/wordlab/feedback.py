"""Per-letter color feedback and its integer encoding.

A color code marks each guess letter Green (right letter, right spot),
Yellow (right letter, wrong spot, counted against unmatched answer
letters), or Black (neither). Codes are carried around the engine as
base-3 integers: B=0, Y=1, G=2, leftmost letter most significant, so the
all-green code is 3^L - 1 and fits a single byte for L <= 5.
"""

from __future__ import annotations

from collections import Counter
from functools import lru_cache

import numpy as np

GREEN = "G"
YELLOW = "Y"
BLACK = "B"

_MARK_VALUE = {BLACK: 0, YELLOW: 1, GREEN: 2}
_VALUE_MARK = (BLACK, YELLOW, GREEN)


def code_count(word_length: int = 5) -> int:
    """Number of representable codes, 3^L (including unreachable ones)."""
    return 3**word_length


def all_green_code(word_length: int = 5) -> int:
    """Integer code of the all-green pattern, 3^L - 1."""
    return 3**word_length - 1


def achievable_code_count(word_length: int = 5) -> int:
    """Count of codes a real (guess, answer) pair can produce.

    The L patterns with L-1 greens plus one yellow are logically
    impossible, so 3^L - L codes remain achievable.
    """
    return 3**word_length - word_length


def colorize(guess: str, answer: str) -> str:
    """Color `guess` against `answer`, returning marks like "BYGYB".

    Pass 1 marks greens and removes those answer letters from play.
    Pass 2 walks guess positions left to right: a letter still present in
    the residual answer multiset is marked yellow and consumes one
    occurrence; everything else is black.
    """
    if len(guess) != len(answer):
        raise ValueError(f"length mismatch: {guess!r} vs {answer!r}")
    marks = [BLACK] * len(guess)
    residual: Counter[str] = Counter()
    for i, (g, a) in enumerate(zip(guess, answer)):
        if g == a:
            marks[i] = GREEN
        else:
            residual[a] += 1
    for i, g in enumerate(guess):
        if marks[i] != GREEN and residual[g] > 0:
            marks[i] = YELLOW
            residual[g] -= 1
    return "".join(marks)


def encode_code(code: str) -> int:
    """Base-3 integer for a mark string ("BYGYB" -> 0*81+1*27+2*9+1*3+0)."""
    value = 0
    for mark in code:
        value = value * 3 + _MARK_VALUE[mark]
    return value


def decode_code(value: int, word_length: int = 5) -> str:
    """Inverse of encode_code."""
    if not 0 <= value < 3**word_length:
        raise ValueError(f"code {value} out of range for length {word_length}")
    marks = []
    for _ in range(word_length):
        value, trit = divmod(value, 3)
        marks.append(_VALUE_MARK[trit])
    return "".join(reversed(marks))


def count_colors(code: str) -> tuple[int, int]:
    """(greens, yellows) in a mark string."""
    return code.count(GREEN), code.count(YELLOW)


def parse_code(text: str, word_length: int = 5) -> str:
    """Validate a user-entered code string; case-insensitive, returns uppercase."""
    code = text.strip().upper()
    if len(code) != word_length or any(ch not in _MARK_VALUE for ch in code):
        raise ValueError(
            f"color code must be {word_length} characters from G/Y/B, got {text!r}"
        )
    return code


@lru_cache(maxsize=8)
def color_count_tables(word_length: int = 5) -> tuple[np.ndarray, np.ndarray]:
    """(greens, yellows) lookup arrays indexed by integer code."""
    n = 3**word_length
    greens = np.zeros(n, dtype=np.int8)
    yellows = np.zeros(n, dtype=np.int8)
    for value in range(n):
        v = value
        g = y = 0
        for _ in range(word_length):
            v, trit = divmod(v, 3)
            if trit == 2:
                g += 1
            elif trit == 1:
                y += 1
        greens[value] = g
        yellows[value] = y
    greens.setflags(write=False)
    yellows.setflags(write=False)
    return greens, yellows

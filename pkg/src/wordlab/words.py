"""Word list loading, validation, normalization, and fingerprinting.

A word list is canonical once loaded: lowercase, deduplicated, and sorted
ascending by byte order. The sort order doubles as the alphabetical
tie-break order used by the guess ranker, so it must never change.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

DEFAULT_WORD_LENGTH = 5


class WordListError(ValueError):
    """A word list or one of its lines failed validation."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class WordLengthError(WordListError):
    """A word does not have the configured length."""


class NonAsciiLetterError(WordListError):
    """A word contains characters outside a-z after lowercasing."""


def validate_word(word: str, word_length: int = DEFAULT_WORD_LENGTH) -> str:
    """Lowercase `word` and check it is exactly `word_length` letters a-z."""
    w = word.lower()
    if len(w) != word_length:
        raise WordLengthError(f"{word!r}: expected {word_length} letters, got {len(w)}")
    for ch in w:
        if not ("a" <= ch <= "z"):
            raise NonAsciiLetterError(f"{word!r}: character {ch!r} is not a-z")
    return w


@dataclass(frozen=True)
class WordList:
    """Canonical, immutable word list.

    words are unique, lowercase, sorted ascending by byte order; digest is
    a content fingerprint used to validate cached matrices against the
    lists they were computed from.
    """

    words: tuple[str, ...]
    word_length: int
    digest: str

    @property
    def size(self) -> int:
        return len(self.words)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.words)}

    def index_of(self, word: str) -> int:
        """Index of `word`, or -1 if absent."""
        return self._index.get(word.lower(), -1)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._index

    def __len__(self) -> int:
        return len(self.words)

    def __getitem__(self, i: int) -> str:
        return self.words[i]


def word_list_digest(words: Iterable[str]) -> str:
    """SHA-256 hex digest of the newline-joined sorted word sequence."""
    joined = "\n".join(words)
    return hashlib.sha256(joined.encode("ascii")).hexdigest()


def make_word_list(words: Iterable[str], word_length: int = DEFAULT_WORD_LENGTH) -> WordList:
    """Canonicalize an in-memory word sequence (lowercase, dedupe, sort)."""
    seen = {validate_word(w, word_length) for w in words}
    if not seen:
        raise WordListError("word list is empty")
    ordered = tuple(sorted(seen))
    return WordList(ordered, word_length, word_list_digest(ordered))


def load_word_list(source: Iterable[str], word_length: int = DEFAULT_WORD_LENGTH) -> WordList:
    """Load a word list from line-delimited text.

    `source` is any iterable of lines (an open text file qualifies).
    Blank lines and lines starting with `#` are ignored. Every other line
    must normalize to exactly `word_length` letters a-z; offending lines
    are reported with their 1-based line number. Duplicates (after
    lowercasing) collapse to one entry.
    """
    seen: set[str] = set()
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            seen.add(validate_word(line, word_length))
        except WordListError as exc:
            raise type(exc)(str(exc), line_number=lineno) from None
    if not seen:
        raise WordListError("word list is empty")
    ordered = tuple(sorted(seen))
    return WordList(ordered, word_length, word_list_digest(ordered))


def load_word_list_path(path, word_length: int = DEFAULT_WORD_LENGTH) -> WordList:
    """Load a word list from a UTF-8 text file, one word per line."""
    with open(path, "r", encoding="utf-8") as f:
        return load_word_list(f, word_length)


def dump_word_list(word_list: WordList, path) -> None:
    """Write the canonical form back out, one word per line."""
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(word_list.words))
        f.write("\n")

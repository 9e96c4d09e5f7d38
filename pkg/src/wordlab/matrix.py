"""Precomputed guess x answer code matrix and the live game view.

The full code table is computed once per dictionary pair and cached on
disk; a game in progress is just the immutable table plus index sets (the
viable answer columns and the not-yet-guessed rows), so cloning game
states is cheap and thousands of simulated games can share one table.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import os
import struct
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .feedback import all_green_code, code_count
from .words import WordList

CACHE_MAGIC = b"WCCM"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sII QQ 32s 32s")

NORMAL = "normal"
HARD = "hard"


class CacheError(IOError):
    """Base class for matrix cache file problems."""


class StaleCacheError(CacheError):
    """Cache header digests do not match the supplied word lists."""


class CorruptCacheError(CacheError):
    """Cache file is truncated or fails its checksum."""


class InconsistentFeedbackError(ValueError):
    """An entered color code contradicts every remaining answer.

    Recoverable: the game state is left untouched so the caller can fix a
    typo and retry.
    """


def cell_dtype(word_length: int) -> np.dtype:
    """Smallest unsigned dtype that can hold 3^L - 1."""
    return np.dtype(np.uint8) if code_count(word_length) <= 256 else np.dtype(np.uint16)


@dataclass(frozen=True, eq=False)
class CodeMatrix:
    """Dense code table: cells[i, j] = code of guess word i vs answer word j."""

    cells: np.ndarray
    guesses: WordList
    answers: WordList
    _caches: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.cells.shape != (self.guesses.size, self.answers.size):
            raise ValueError("cells shape does not match word lists")

    @property
    def word_length(self) -> int:
        return self.guesses.word_length

    @property
    def guess_digest(self) -> str:
        return self.guesses.digest

    @property
    def answer_digest(self) -> str:
        return self.answers.digest

    @property
    def all_green(self) -> int:
        return all_green_code(self.word_length)

    @cached_property
    def row_to_col(self) -> np.ndarray:
        """For each guess row, the answer column with the same word (-1 if none)."""
        out = np.full(self.guesses.size, -1, dtype=np.int32)
        for i, w in enumerate(self.guesses.words):
            out[i] = self.answers.index_of(w)
        out.setflags(write=False)
        return out

    @cached_property
    def col_to_row(self) -> np.ndarray:
        """For each answer column, the guess row with the same word (-1 if none)."""
        out = np.full(self.answers.size, -1, dtype=np.int32)
        for j, w in enumerate(self.answers.words):
            out[j] = self.guesses.index_of(w)
        out.setflags(write=False)
        return out


def _letter_grid(words: tuple[str, ...], word_length: int) -> np.ndarray:
    """(n, L) uint8 array of letter indices 0..25."""
    flat = np.frombuffer("".join(words).encode("ascii"), dtype=np.uint8)
    return (flat - ord("a")).reshape(len(words), word_length)


def _code_block(gletters: np.ndarray, aletters: np.ndarray, acounts: np.ndarray,
                out: np.ndarray) -> None:
    """Fill one row block of the code matrix.

    Vectorized form of the two-pass coloring rule: greens first, then a
    left-to-right yellow sweep that consumes residual answer letters.
    `acounts` is the (26, n_answers) per-letter count table of the answer
    pool; `out` is the (block, n_answers) destination slice.
    """
    nblock, length = gletters.shape
    green = gletters[:, None, :] == aletters[None, :, :]  # (B, N, L)
    rows = np.arange(nblock)
    # residual letter counts after green consumption, per (letter, guess, answer)
    resid = np.broadcast_to(acounts[:, None, :], (26,) + green.shape[:2]).copy()
    for k in range(length):
        resid[gletters[:, k], rows] -= green[:, :, k]
    out[:] = 0
    for k in range(length):
        out *= 3
        letters_k = gletters[:, k]
        left = resid[letters_k, rows]
        yellow = (left > 0) & ~green[:, :, k]
        out += green[:, :, k].astype(out.dtype) << 1
        out += yellow
        resid[letters_k, rows] = left - yellow


def precompute_matrix(guesses: WordList, answers: WordList, *,
                      threads: int | None = None, block_rows: int = 128) -> CodeMatrix:
    """Compute the full code table for guess pool x answer pool.

    Work is partitioned over contiguous row blocks; every cell is a pure
    function of its word pair, so the result is independent of block size
    and thread count.
    """
    if guesses.word_length != answers.word_length:
        raise ValueError("guess and answer lists have different word lengths")
    length = guesses.word_length
    gl = _letter_grid(guesses.words, length)
    al = _letter_grid(answers.words, length)
    acounts = np.zeros((26, answers.size), dtype=np.int8)
    for k in range(length):
        np.add.at(acounts, (al[:, k], np.arange(answers.size)), 1)

    try:
        cells = np.empty((guesses.size, answers.size), dtype=cell_dtype(length))
    except MemoryError:
        need = guesses.size * answers.size * cell_dtype(length).itemsize
        raise MemoryError(
            f"code matrix needs {need / 1e9:.1f} GB "
            f"({guesses.size} x {answers.size} cells)"
        ) from None

    starts = range(0, guesses.size, block_rows)

    def fill(start: int) -> None:
        stop = min(start + block_rows, guesses.size)
        _code_block(gl[start:stop], al, acounts, cells[start:stop])

    if threads is None:
        threads = min(8, os.cpu_count() or 1)
    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, starts))
    else:
        for start in starts:
            fill(start)
    cells.setflags(write=False)
    return CodeMatrix(cells, guesses, answers)


def save_matrix(matrix: CodeMatrix, path) -> None:
    """Write the cache file: header, row-major cells, trailing checksum.

    Layout (little-endian): magic "WCCM", format version u32, word_length
    u32, rows u64, cols u64, guess digest (32 bytes), answer digest (32
    bytes), cells (one byte each for word_length <= 5, else two), then a
    SHA-256 checksum of everything before it.
    """
    header = _HEADER.pack(
        CACHE_MAGIC, CACHE_VERSION, matrix.word_length,
        matrix.guesses.size, matrix.answers.size,
        bytes.fromhex(matrix.guess_digest), bytes.fromhex(matrix.answer_digest),
    )
    payload = matrix.cells.astype("<" + matrix.cells.dtype.str[1:], copy=False).tobytes()
    checksum = hashlib.sha256(header + payload).digest()
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "wb") as f:
        f.write(header)
        f.write(payload)
        f.write(checksum)
    os.replace(tmp, path)


def load_matrix(path, guesses: WordList, answers: WordList) -> CodeMatrix:
    """Load a cache file and bind it to the word lists it was built from.

    Raises StaleCacheError when the header digests do not match the
    supplied lists, CorruptCacheError on truncation or checksum failure.
    """
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < _HEADER.size + 32:
        raise CorruptCacheError(f"{path}: truncated header")
    magic, version, length, rows, cols, gdig, adig = _HEADER.unpack_from(data)
    if magic != CACHE_MAGIC:
        raise CorruptCacheError(f"{path}: bad magic {magic!r}")
    if version != CACHE_VERSION:
        raise CorruptCacheError(f"{path}: unsupported format version {version}")
    dtype = cell_dtype(length)
    expect = _HEADER.size + rows * cols * dtype.itemsize + 32
    if len(data) != expect:
        raise CorruptCacheError(f"{path}: expected {expect} bytes, found {len(data)}")
    body, checksum = data[:-32], data[-32:]
    if hashlib.sha256(body).digest() != checksum:
        raise CorruptCacheError(f"{path}: checksum mismatch")
    if gdig.hex() != guesses.digest or adig.hex() != answers.digest:
        raise StaleCacheError(
            f"{path}: cache was built from different word lists; re-run precompute"
        )
    if length != guesses.word_length or rows != guesses.size or cols != answers.size:
        raise StaleCacheError(f"{path}: dimensions do not match word lists")
    cells = np.frombuffer(body, dtype="<" + dtype.str[1:], offset=_HEADER.size)
    cells = cells.astype(dtype, copy=False).reshape(rows, cols)
    cells.setflags(write=False)
    return CodeMatrix(cells, guesses, answers)


@dataclass(frozen=True, eq=False)
class GameState:
    """One game in progress: index sets over an immutable CodeMatrix.

    viable_cols is the sorted set of answer columns still consistent with
    all feedback so far; guessed_rows records guesses in order. States are
    immutable: apply_feedback returns a new state.
    """

    matrix: CodeMatrix
    viable_cols: np.ndarray
    guessed_rows: tuple[int, ...]
    round: int
    mode: str
    history: tuple[tuple[int, int], ...]

    @property
    def viable_count(self) -> int:
        return len(self.viable_cols)

    def allowed_row_mask(self) -> np.ndarray:
        """Boolean mask over guess rows that may be guessed this round."""
        m = self.matrix
        if self.mode == HARD:
            mask = np.zeros(m.guesses.size, dtype=bool)
            rows = m.col_to_row[self.viable_cols]
            mask[rows[rows >= 0]] = True
        else:
            mask = np.ones(m.guesses.size, dtype=bool)
        for r in self.guessed_rows:
            mask[r] = False
        return mask

    def guess_rows(self) -> np.ndarray:
        """Sorted row indices that may be guessed this round."""
        return np.flatnonzero(self.allowed_row_mask()).astype(np.int32)

    def viable_words(self) -> list[str]:
        return [self.matrix.answers.words[j] for j in self.viable_cols]

    def is_viable_row(self, row: int) -> bool:
        col = self.matrix.row_to_col[row]
        return col >= 0 and bool(np.isin(col, self.viable_cols).item())


def new_game(matrix: CodeMatrix, mode: str = NORMAL) -> GameState:
    """Round-1 state: every answer viable, every word guessable."""
    if mode not in (NORMAL, HARD):
        raise ValueError(f"mode must be {NORMAL!r} or {HARD!r}, got {mode!r}")
    viable = np.arange(matrix.answers.size, dtype=np.int32)
    viable.setflags(write=False)
    return GameState(matrix, viable, (), 1, mode, ())


def apply_feedback(state: GameState, guess_row: int, code: int) -> GameState:
    """Filter the viable set by one (guess, code) observation.

    The new viable set is the columns of the guess row whose cell equals
    the observed code. An all-green code ends the game and is rejected
    here; a code matching zero remaining answers raises
    InconsistentFeedbackError and leaves the state unchanged.
    """
    m = state.matrix
    if code == m.all_green:
        raise ValueError("all-green ends the game; there is nothing to apply")
    if not 0 <= code < code_count(m.word_length):
        raise ValueError(f"code {code} out of range")
    if guess_row in state.guessed_rows:
        raise ValueError(f"row {guess_row} was already guessed")
    row = m.cells[guess_row]
    keep = state.viable_cols[row[state.viable_cols] == code]
    if len(keep) == 0:
        raise InconsistentFeedbackError(
            "that color code contradicts every remaining answer"
        )
    keep.setflags(write=False)
    return GameState(
        matrix=m,
        viable_cols=keep,
        guessed_rows=state.guessed_rows + (guess_row,),
        round=state.round + 1,
        mode=state.mode,
        history=state.history + ((guess_row, code),),
    )


def replay(matrix: CodeMatrix, mode: str, history) -> GameState:
    """Rebuild a state by replaying (guess_row, code) pairs from round 1."""
    state = new_game(matrix, mode)
    for guess_row, code in history:
        state = apply_feedback(state, guess_row, code)
    return state

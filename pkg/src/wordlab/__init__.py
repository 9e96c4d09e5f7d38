"""wordlab: a solver workbench for five-letter word-guessing games.

Precomputes the guess x answer color-code matrix, ranks guesses under a
one-parameter family of bucket-power scores (with an optional
fully-discernible-set refinement), benchmarks strategies exhaustively
over every possible answer, and backs an interactive assistant (CLI and
HTTP service) for humans playing a live game.
"""

from .feedback import (
    achievable_code_count,
    all_green_code,
    colorize,
    count_colors,
    decode_code,
    encode_code,
    parse_code,
)
from .fds import E_FDS, I_FDS, NOT_FDS, FdsClass, classify_fds, l_tilde, score_fds
from .matrix import (
    HARD,
    NORMAL,
    CodeMatrix,
    CorruptCacheError,
    GameState,
    InconsistentFeedbackError,
    StaleCacheError,
    apply_feedback,
    load_matrix,
    new_game,
    precompute_matrix,
    replay,
    save_matrix,
)
from .scoring import (
    AnswerPrior,
    Histogram,
    Policy,
    ScoreReport,
    bucket_histogram,
    expected_colors,
    rank_guesses,
    score,
    select_guess,
    weighted_histogram,
    weighted_score,
)
from .simulate import (
    GameRecord,
    SimulationSummary,
    best_opener,
    play_game,
    simulate_all,
    summary_report,
)
from .words import (
    NonAsciiLetterError,
    WordLengthError,
    WordList,
    WordListError,
    load_word_list,
    load_word_list_path,
    make_word_list,
    word_list_digest,
)

__version__ = "0.1.0"

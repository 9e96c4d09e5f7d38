"""Command-line entry point.

Subcommands: precompute (build and cache the code matrix), openers (rank
round-1 guesses), simulate (exhaustive benchmark with a JSON report),
assist (interactive helper for a live game), serve (HTTP session API for
the web assistant).

Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

from .feedback import all_green_code, encode_code, parse_code
from .matrix import (
    HARD,
    NORMAL,
    CodeMatrix,
    InconsistentFeedbackError,
    apply_feedback,
    load_matrix,
    new_game,
    precompute_matrix,
    save_matrix,
)
from .scoring import AnswerPrior, Policy, rank_guesses, validate_p
from .simulate import simulate_all, summary_report
from .words import WordList, WordListError, dump_word_list, load_word_list_path


def _parse_p(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "+inf", "infinity"):
        return math.inf
    if t in ("-inf", "-infinity"):
        return -math.inf
    try:
        p = float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid p value {text!r}") from None
    try:
        return validate_p(p)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _sidecar_paths(cache_path: str) -> tuple[str, str]:
    return cache_path + ".guesses.txt", cache_path + ".answers.txt"


def _load_cached_matrix(cache_path: str, word_length: int = 5) -> CodeMatrix:
    """Load a cache plus the word-list sidecars written next to it."""
    gpath, apath = _sidecar_paths(cache_path)
    guesses = load_word_list_path(gpath, word_length)
    answers = load_word_list_path(apath, word_length)
    return load_matrix(cache_path, guesses, answers)


def _policy_from_args(args) -> Policy:
    prior = None
    if getattr(args, "prior", None):
        prior = _load_prior(args.prior, args._answers)
    return Policy(p=args.p, use_fds=args.fds, prior=prior)


def _load_prior(path: str, answers: WordList) -> AnswerPrior:
    import numpy as np

    weights = np.zeros(answers.size, dtype=float)
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise WordListError("expected 'word weight'", line_number=lineno)
            word, weight = parts
            idx = answers.index_of(word)
            if idx < 0:
                raise WordListError(f"unknown answer word {word!r}", line_number=lineno)
            try:
                weights[idx] = float(weight)
            except ValueError:
                raise WordListError(f"bad weight {weight!r}", line_number=lineno) from None
    return AnswerPrior(weights)


def cmd_precompute(args) -> int:
    guesses = load_word_list_path(args.words, args.length)
    answers = load_word_list_path(args.answers, args.length) if args.answers else guesses
    t0 = time.perf_counter()
    m = precompute_matrix(guesses, answers, threads=args.threads)
    elapsed = time.perf_counter() - t0
    save_matrix(m, args.out)
    gpath, apath = _sidecar_paths(args.out)
    dump_word_list(guesses, gpath)
    dump_word_list(answers, apath)
    print(f"{guesses.size} rows x {answers.size} cols in {elapsed:.1f}s -> {args.out}")
    return 0


def cmd_openers(args) -> int:
    m = _load_cached_matrix(args.cache, args.length)
    args._answers = m.answers
    policy = _policy_from_args(args)
    state = new_game(m, NORMAL)
    reports = rank_guesses(state, policy, top_k=args.top)
    rows = [
        {
            "rank": i + 1,
            "word": r.word.upper(),
            "score": r.score,
            "in_viable": r.in_viable,
            "expected_gy": r.expected_gy,
        }
        for i, r in enumerate(reports)
    ]
    worst_rows = []
    if args.worst:
        full = rank_guesses(state, policy, top_k=m.guesses.size)
        worst_rows = [
            {
                "rank": m.guesses.size - 1 + i,
                "word": r.word.upper(),
                "score": r.score,
                "in_viable": r.in_viable,
                "expected_gy": r.expected_gy,
            }
            for i, r in enumerate(full[-2:])
        ]
    if args.json:
        print(json.dumps({"p": args.p if not math.isinf(args.p) else
                          ("+inf" if args.p > 0 else "-inf"),
                          "fds": args.fds, "top": rows, "worst": worst_rows}, indent=2))
        return 0
    print(f"{'rank':>5}  {'word':<8} {'score':>12}  {'E[G+Y]':>7}")
    for r in rows + worst_rows:
        print(f"{r['rank']:>5}  {r['word']:<8} {r['score']:>12.5g}  {r['expected_gy']:>7.3f}")
    return 0


def cmd_simulate(args) -> int:
    m = _load_cached_matrix(args.cache, args.length)
    args._answers = m.answers
    policy = _policy_from_args(args)
    mode = HARD if args.hard else NORMAL
    answers = None
    if args.answers:
        answers = load_word_list_path(args.answers, args.length).words
    summary = simulate_all(m, policy, mode, answers=answers, threads=args.threads)
    report = summary_report(summary, policy, mode)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2)
    pshow = report["policy"]["p"]
    print(
        f"p={pshow} fds={policy.use_fds} mode={mode}: opener "
        f"{(summary.opener or '?').upper()} mean {summary.mean_rounds:.4f} "
        f"R=6.5 x{summary.count_at_6_5} R>=7 x{summary.count_ge_7} "
        f"({summary.wallclock_seconds:.0f}s)"
    )
    if args.json:
        print(json.dumps(report, indent=2))
    return 0


def _print_suggestions(state, policy, top=10) -> None:
    reports = rank_guesses(state, policy, top_k=top)
    print(f"  viable answers: {state.viable_count}")
    for i, r in enumerate(reports, start=1):
        star = "*" if r.in_viable else " "
        print(f"  {i:>2}. {r.word.upper()}{star} score={r.score:.5g} E[G+Y]={r.expected_gy:.2f}")


def cmd_assist(args) -> int:
    m = _load_cached_matrix(args.cache, args.length)
    policy = Policy(p=args.p, use_fds=args.fds)
    mode = HARD if args.hard else NORMAL
    state = new_game(m, mode)
    undo_stack = [state]
    print(f"assistant ready ({m.guesses.size} guess words, {m.answers.size} answers).")
    print("enter: WORD CODE   (e.g. 'tares BYGYB'; G=green Y=yellow B=black)")
    print("       undo | quit")
    _print_suggestions(state, policy)
    while True:
        try:
            line = input("> ").strip()
        except EOFError:
            return 0
        if not line:
            continue
        if line.lower() in ("quit", "exit", "q"):
            return 0
        if line.lower() == "undo":
            if len(undo_stack) > 1:
                undo_stack.pop()
                state = undo_stack[-1]
                print(f"undone; back to round {state.round}")
                _print_suggestions(state, policy)
            else:
                print("nothing to undo")
            continue
        parts = line.split()
        if len(parts) != 2:
            print("expected: WORD CODE (or undo / quit)")
            continue
        word, code_text = parts
        row = m.guesses.index_of(word)
        if row < 0:
            print(f"{word!r} is not in the guess list")
            continue
        try:
            code = encode_code(parse_code(code_text, m.word_length))
        except ValueError as exc:
            print(exc)
            continue
        if code == all_green_code(m.word_length):
            print(f"solved in {state.round} rounds - congratulations!")
            return 0
        try:
            state = apply_feedback(state, row, code)
        except InconsistentFeedbackError as exc:
            print(f"!! {exc}; state unchanged")
            continue
        except ValueError as exc:
            print(exc)
            continue
        undo_stack.append(state)
        if state.viable_count <= 20:
            print("  remaining: " + " ".join(w.upper() for w in state.viable_words()))
        _print_suggestions(state, policy)


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    m = _load_cached_matrix(args.cache, args.length)
    app = create_app(m, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wordlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("precompute", help="build the code matrix cache")
    pc.add_argument("--words", required=True, help="guess-pool word list file")
    pc.add_argument("--answers", help="answer-pool word list (default: same as --words)")
    pc.add_argument("--out", required=True, help="cache file to write")
    pc.add_argument("--length", type=int, default=5)
    pc.add_argument("--threads", type=int, default=None)
    pc.set_defaults(func=cmd_precompute)

    op = sub.add_parser("openers", help="rank round-1 guesses")
    op.add_argument("--cache", required=True)
    op.add_argument("--p", type=_parse_p, default=-0.5)
    op.add_argument("--fds", action="store_true")
    op.add_argument("--top", type=int, default=10)
    op.add_argument("--worst", action="store_true", help="also show the two worst")
    op.add_argument("--json", action="store_true")
    op.add_argument("--length", type=int, default=5)
    op.set_defaults(func=cmd_openers)

    si = sub.add_parser("simulate", help="benchmark a policy over every answer")
    si.add_argument("--cache", required=True)
    si.add_argument("--p", type=_parse_p, default=-0.5)
    si.add_argument("--fds", action="store_true")
    si.add_argument("--hard", action="store_true")
    si.add_argument("--answers", help="restrict simulated answers to this list")
    si.add_argument("--prior", help="answer prior file: lines of 'word weight'")
    si.add_argument("--report", help="write a JSON report here")
    si.add_argument("--threads", type=int, default=None)
    si.add_argument("--json", action="store_true")
    si.add_argument("--length", type=int, default=5)
    si.set_defaults(func=cmd_simulate)

    asst = sub.add_parser("assist", help="interactive helper for a live game")
    asst.add_argument("--cache", required=True)
    asst.add_argument("--p", type=_parse_p, default=-0.5)
    asst.add_argument("--fds", action="store_true")
    asst.add_argument("--hard", action="store_true")
    asst.add_argument("--length", type=int, default=5)
    asst.set_defaults(func=cmd_assist)

    sv = sub.add_parser("serve", help="run the HTTP session API")
    sv.add_argument("--cache", required=True)
    sv.add_argument("--port", type=int, default=8000)
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--static", help="directory of built web-UI assets to serve")
    sv.add_argument("--length", type=int, default=5)
    sv.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (WordListError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 1


if __name__ == "__main__":
    sys.exit(main())

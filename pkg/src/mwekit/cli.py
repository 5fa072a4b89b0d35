"""Command-line entry point.

One executable with subcommands covering the whole workflow: convert,
identify, tag-types, evaluate, stats, check-consistency, llm-format, and
serve. Subcommands read CUPT on stdin ("-") and write to stdout unless
told otherwise, so they compose in pipelines. Exit codes: 0 success,
1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

from . import consistency as consistency_mod
from . import llm_io
from .cupt import read_cupt, write_cupt
from .errors import MwekitError
from .evaluation import CorpusStats, EvalReport, full_report, merge_stats, stats
from .identify import MatchConfig, OverlapPolicy, identify
from .lexicon import load_lexicon
from .model import Corpus
from .type_tagging import tag_sentence

LEXICON_ENV = "MWEKIT_LEXICON"
REPORT_SCHEMA_VERSION = 1


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@contextmanager
def _open_in(path: str):
    if path == "-":
        yield sys.stdin
    else:
        with open(path, encoding="utf-8") as f:
            yield f


@contextmanager
def _open_out(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as f:
            yield f


def _read_corpus(path: str, columns: str = "auto") -> Corpus:
    with _open_in(path) as f:
        return read_cupt(f, columns=columns)


def _load_lexicon_arg(path: str | None, parser: _Parser):
    if path is None:
        path = os.environ.get(LEXICON_ENV)
    if path is None:
        parser.error(f"a lexicon is required (--lexicon or ${LEXICON_ENV})")
    with _open_in(path) as f:
        return load_lexicon(f)


def _drop_unclear(corpus: Corpus) -> Corpus:
    kept = tuple(s for s in corpus.sentences if "unclear" not in s.flags)
    return Corpus(kept, dict(corpus.metadata))


def _map_sentences(fn, sentences, threads: int):
    if threads <= 1:
        return [fn(s) for s in sentences]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, sentences))


# ----------------------------------------------------------------------
# report formatting

def _pct(x: float | None) -> str:
    return "n/a" if x is None else f"{100 * x:.1f}"


def _category_json(categories) -> list[dict]:
    return [
        {"category": c.category, "n_gold": c.n_gold, "n_matched": c.n_matched,
         "recall": c.recall}
        for c in categories
    ]


def _eval_json(report: EvalReport) -> dict:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "counts": {"gold": report.n_gold, "pred": report.n_pred,
                   "matched": report.n_matched},
        "precision": report.precision,
        "recall": report.recall,
        "f1": report.f1,
        "breakdowns": {name: _category_json(cats)
                       for name, cats in report.breakdowns.items()},
    }


def _print_eval_text(report: EvalReport, out) -> None:
    print(f"gold={report.n_gold} pred={report.n_pred} matched={report.n_matched}", file=out)
    print(f"P={_pct(report.precision)} R={_pct(report.recall)} F1={_pct(report.f1)}", file=out)
    for name, cats in report.breakdowns.items():
        parts = ", ".join(
            f"{c.category}: {_pct(c.recall)} ({c.n_matched}/{c.n_gold})" for c in cats
        )
        print(f"recall by {name}: {parts}", file=out)


def _stats_json(name: str, s: CorpusStats) -> dict:
    return {
        "name": name,
        "sentences": s.n_sentences,
        "words": s.n_words,
        "mwes": s.n_mwes,
        "mwe_tokens": s.n_mwe_tokens,
        "density": s.density,
        "type_counts": dict(s.type_counts),
        "type_proportions": s.type_proportions,
        "discontinuity_by_type": s.discontinuity_by_type,
    }


def _print_stats_text(rows: list[tuple[str, CorpusStats]], out) -> None:
    types = ("Noun", "Verb", "Mod/Conn", "Clause", "Other")
    header = ["name", "sentences", "words", "mwes", "density%"] + [f"{t}%" for t in types]
    print("\t".join(header), file=out)
    for name, s in rows:
        proportions = s.type_proportions
        cells = [name, str(s.n_sentences), str(s.n_words), str(s.n_mwes), _pct(s.density)]
        cells += [_pct(proportions.get(t)) if proportions else "n/a" for t in types]
        print("\t".join(cells), file=out)
    print("", file=out)
    print("discontinuous% by type", file=out)
    for name, s in rows:
        discont = s.discontinuity_by_type
        cells = [name] + [f"{t}: {_pct(discont.get(t))}" for t in types if t in discont]
        print("\t".join(cells), file=out)


# ----------------------------------------------------------------------
# subcommands

def _cmd_convert(args, parser) -> int:
    corpus = _read_corpus(args.input, columns="cupt11" if args.cupt11 else "auto")
    if args.drop_unclear:
        corpus = _drop_unclear(corpus)
    with _open_out(args.output) as out:
        write_cupt(corpus, out)
    return 0


def _cmd_identify(args, parser) -> int:
    lexicon = _load_lexicon_arg(args.lexicon, parser)
    cfg = MatchConfig(
        max_gap=args.max_gap,
        allow_reorder=args.reorder,
        overlap_policy=OverlapPolicy.ALL if args.overlap == "all"
        else OverlapPolicy.LONGEST_NON_OVERLAPPING,
    )
    corpus = _read_corpus(args.input)

    def run(s):
        predictions = identify(s, lexicon, cfg)
        base = s.mwes if args.append else ()
        return s.with_mwes(tuple(base) + tuple(predictions))

    sentences = _map_sentences(run, corpus.sentences, args.threads)
    with _open_out(args.output) as out:
        write_cupt(Corpus(tuple(sentences), dict(corpus.metadata)), out)
    return 0


def _cmd_tag_types(args, parser) -> int:
    corpus = _read_corpus(args.input)
    results = _map_sentences(
        lambda s: tag_sentence(s, force=args.force), corpus.sentences, args.threads
    )
    sentences = [s for s, _ in results]
    for _, diags in results:
        for d in diags:
            print(f"tag-types: {d.sentence_id}: {d.reason}", file=sys.stderr)
    with _open_out(args.output) as out:
        write_cupt(Corpus(tuple(sentences), dict(corpus.metadata)), out)
    return 0


def _cmd_evaluate(args, parser) -> int:
    gold = _read_corpus(args.gold)
    pred = _read_corpus(args.pred)
    train = _read_corpus(args.train) if args.train else None
    lexicon = None
    if args.lexicon or os.environ.get(LEXICON_ENV):
        lexicon = _load_lexicon_arg(args.lexicon, parser)
    report = full_report(gold, pred, lexicon=lexicon, train=train)
    with _open_out(args.output) as out:
        if args.json:
            json.dump(_eval_json(report), out, indent=2)
            out.write("\n")
        else:
            _print_eval_text(report, out)
    return 0


def _cmd_stats(args, parser) -> int:
    rows = []
    for path in args.inputs:
        corpus = _read_corpus(path)
        if args.drop_unclear:
            corpus = _drop_unclear(corpus)
        name = corpus.metadata.get("source") or (path if path == "-" else os.path.basename(path))
        rows.append((name, stats(corpus)))
    if len(rows) > 1:
        rows.append(("Total", merge_stats([s for _, s in rows])))
    with _open_out(args.output) as out:
        if args.json:
            payload = {
                "schema_version": REPORT_SCHEMA_VERSION,
                "reports": [_stats_json(name, s) for name, s in rows],
            }
            json.dump(payload, out, indent=2)
            out.write("\n")
        else:
            _print_stats_text(rows, out)
    return 0


def _cmd_check_consistency(args, parser) -> int:
    corpus = _read_corpus(args.input)
    mined = consistency_mod.mine_labeled_set(corpus)
    candidates = consistency_mod.find_candidates(
        corpus, mined, MatchConfig(max_gap=args.max_gap)
    )
    payload = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "mined_entries": len(mined),
        "count": len(candidates),
        "candidates": [
            {
                "id": c.candidate_id,
                "sentence_id": c.sentence_id,
                "token_indices": list(c.token_indices),
                "matched_entry": c.matched_entry,
                "exemplar": {
                    "sentence_id": c.exemplar[0],
                    "token_indices": list(c.exemplar[1]),
                },
            }
            for c in candidates
        ],
    }
    with _open_out(args.report) as out:
        json.dump(payload, out, indent=2)
        out.write("\n")
    return 0


def _cmd_llm_format(args, parser) -> int:
    corpus = _read_corpus(args.input)
    if args.mode == "prompts":
        with _open_out(args.output) as out:
            for s in corpus.sentences:
                record = {
                    "sent_id": s.id,
                    "system": llm_io.SYSTEM_PROMPT,
                    "user": llm_io.build_prompt(s, args.definition),
                }
                out.write(json.dumps(record) + "\n")
        return 0
    if args.mode == "gold":
        with _open_out(args.output) as out:
            for s in corpus.sentences:
                out.write(json.dumps({"sent_id": s.id, "output": llm_io.to_llm_output(s)}) + "\n")
        return 0
    # parse mode: untrusted model responses back into a prediction corpus
    if not args.responses:
        parser.error("llm-format parse needs --responses FILE")
    responses: dict[str, str] = {}
    with _open_in(args.responses) as f:
        for line in f:
            if line.strip():
                record = json.loads(line)
                responses[record["sent_id"]] = record["output"]
    sentences = []
    for s in corpus.sentences:
        text = responses.get(s.id)
        if text is None:
            print(f"llm-format: no response for {s.id}", file=sys.stderr)
            sentences.append(s.with_mwes(()))
            continue
        instances, diagnostics = llm_io.parse_llm_output(text, s)
        for d in diagnostics:
            print(f"llm-format: {s.id}: line {d.line}: {d.reason}", file=sys.stderr)
        sentences.append(s.with_mwes(tuple(instances)))
    with _open_out(args.output) as out:
        write_cupt(Corpus(tuple(sentences), dict(corpus.metadata)), out)
    return 0


def _cmd_serve(args, parser) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(args.data), host=args.host, port=args.port)
    return 0


# ----------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="mwekit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_io(p, *, positional=True):
        if positional:
            p.add_argument("input", nargs="?", default="-",
                           help="input corpus file (default: stdin)")
        p.add_argument("-o", "--output", default=None,
                       help="output file (default: stdout)")

    p = sub.add_parser("convert", help="normalize a corpus file to the 7-column layout")
    add_io(p)
    p.add_argument("--cupt11", action="store_true",
                   help="force the 11-column compatibility reader")
    p.add_argument("--drop-unclear", action="store_true",
                   help="drop sentences flagged unclear")
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("identify", help="rule-based MWE identification")
    add_io(p)
    p.add_argument("--lexicon", help=f"lexicon file (default: ${LEXICON_ENV})")
    p.add_argument("--max-gap", type=int, default=3,
                   help="max skipped tokens inside a match (default 3)")
    p.add_argument("--reorder", action="store_true",
                   help="match lemma multisets instead of ordered sequences")
    p.add_argument("--overlap", choices=("all", "longest"), default="all",
                   help="keep all matches or suppress overlaps greedily")
    p.add_argument("--append", action="store_true",
                   help="keep existing annotations next to the predictions")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_identify)

    p = sub.add_parser("tag-types", help="assign MWE types from dependencies")
    add_io(p)
    p.add_argument("--force", action="store_true",
                   help="overwrite existing type tags")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_tag_types)

    p = sub.add_parser("evaluate", help="exact-match scoring with recall breakdowns")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--train", help="training corpus for the seen/unseen breakdown")
    p.add_argument("--lexicon", help="lexicon for the in-lexicon breakdown")
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("stats", help="corpus statistics (density, types, continuity)")
    p.add_argument("inputs", nargs="+", help="corpus files")
    p.add_argument("--drop-unclear", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("check-consistency", help="audit for unlabeled repeat occurrences")
    p.add_argument("input", nargs="?", default="-",
                   help="input corpus file (default: stdin)")
    p.add_argument("--report", default=None, help="report file (default: stdout)")
    p.add_argument("--max-gap", type=int, default=3)
    p.set_defaults(func=_cmd_check_consistency)

    p = sub.add_parser("llm-format", help="prompt building and response parsing")
    p.add_argument("mode", choices=("prompts", "gold", "parse"))
    add_io(p)
    p.add_argument("--definition", choices=llm_io.DEFINITIONS, default="long")
    p.add_argument("--responses", help="JSONL responses for parse mode")
    p.set_defaults(func=_cmd_llm_format)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--data", required=True, help="service data directory")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args, parser)
    except SystemExit as exc:  # argparse exits; surface its code as a return value
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 1
    except MwekitError as exc:
        print(f"mwekit: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"mwekit: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands: ingest, stats, score, tamper, evaluate, rank, serve. Exit
codes: 0 success, 1 data error (typed message on stderr), 2 usage error.
Every command with randomness requires an explicit --seed so runs are
reproducible by construction.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import EngineConfig
from .evaluation import collection_retrieval, reports_to_csv, save_report
from .exceptions import EngineError
from .manifest import canonical_json, load_manifest, save_manifest
from .measures import MEASURE_FOR_TYPE, score_document
from .metrics import RankedCollection, RankEntry
from .model import corpus_stats, filter_by_document_frequency
from .tamper import (
    TamperStrategy,
    generate_testset,
    load_testset,
    save_testset,
    tampered_document,
)

SUBSETS = {"all": None, "top25": 0.25, "top50": 0.5}


def _load_config(path: str | None) -> EngineConfig:
    return EngineConfig.from_file(path) if path else EngineConfig()


def _cmd_ingest(args: argparse.Namespace) -> int:
    corpus = load_manifest(args.manifest)
    minimums = {
        "person": args.min_person_docs,
        "location": args.min_location_docs,
        "event": args.min_event_docs,
    }
    minimums = {k: v for k, v in minimums.items() if v}
    if minimums:
        corpus = filter_by_document_frequency(corpus, minimums)
    target = save_manifest(corpus, args.out)
    print(
        f"ingested corpus {corpus.corpus_id!r}: "
        f"{len(corpus.documents)} documents, {len(corpus.entities)} entities "
        f"-> {target}"
    )
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    corpus = load_manifest(args.manifest)
    stats = corpus_stats(corpus)
    print(
        f"corpus {corpus.corpus_id!r}: {len(corpus.documents)} documents, "
        f"{len(corpus.entities)} entities"
    )
    print(f"{'type':<10} {'documents':>9} {'entities':>9} {'mean/doc':>9}")
    for name in ("person", "location", "event", "context"):
        row = stats[name]
        entities = "-" if row.unique_entities is None else str(row.unique_entities)
        mean = "-" if row.mean_unique is None else f"{row.mean_unique:.2f}"
        print(f"{name:<10} {row.documents:>9} {entities:>9} {mean:>9}")
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    corpus = load_manifest(args.manifest)
    config = _load_config(args.config)
    if args.doc not in corpus.documents:
        raise EngineError(f"unknown document {args.doc!r}")
    scored = score_document(corpus.documents[args.doc], corpus, config.scoring)
    text = canonical_json(scored.to_payload())
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_tamper(args: argparse.Namespace) -> int:
    corpus = load_manifest(args.manifest)
    strategy = TamperStrategy.parse(args.type, args.strategy)
    testset = generate_testset(corpus, args.type, strategy, args.seed)
    save_testset(testset, args.out)
    print(
        f"testset {args.type}/{strategy.spec()} seed={args.seed}: "
        f"{len(testset.substitutions)} documents, "
        f"{len(testset.fallback_log)} fallbacks, "
        f"{len(testset.skipped)} skipped -> {args.out}"
    )
    return 0


def _cmd_evaluate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    corpus = load_manifest(args.manifest)
    config = _load_config(args.config)
    if args.testset:
        testset = load_testset(args.testset)
    else:
        if not (args.type and args.strategy):
            parser.error("evaluate needs --testset or both --type and --strategy")
        if args.seed is None:
            parser.error("inline tampering requires --seed")
        strategy = TamperStrategy.parse(args.type, args.strategy)
        testset = generate_testset(corpus, args.type, strategy, args.seed)
    report = collection_retrieval(
        corpus,
        testset,
        config.scoring,
        subset=SUBSETS[args.subset],
        recall_levels=config.recall_levels,
    )
    save_report(report, args.out)
    if args.csv:
        Path(args.csv).write_text(reports_to_csv([report]))
    print(
        f"{report.entity_type}/{report.strategy} subset={report.subset} "
        f"n={report.n_documents} va={report.va:.4f} auc={report.auc:.4f} "
        f"-> {args.out}"
    )
    return 0


def _cmd_rank(args: argparse.Namespace) -> int:
    corpus = load_manifest(args.manifest)
    config = _load_config(args.config)
    measure = MEASURE_FOR_TYPE[args.type]
    direction = "ascending" if args.order == "asc" else "descending"
    entries = []
    if args.testset:
        testset = load_testset(args.testset)
        for doc_id in testset.doc_ids():
            clean = score_document(
                corpus.documents[doc_id], corpus, config.scoring
            ).measure(measure)
            tampered = score_document(
                tampered_document(corpus, testset, doc_id), corpus, config.scoring
            ).measure(measure)
            if clean.value is None or tampered.value is None:
                continue
            entries.append(RankEntry(doc_id, "clean", clean.value))
            entries.append(RankEntry(doc_id, "tampered", tampered.value))
    else:
        for doc_id in corpus.sorted_doc_ids():
            result = score_document(
                corpus.documents[doc_id], corpus, config.scoring
            ).measure(measure)
            if result.value is not None:
                entries.append(RankEntry(doc_id, "clean", result.value))
    ranking = RankedCollection.build(entries, direction)
    limit = args.limit if args.limit else len(ranking.entries)
    for position, entry in enumerate(ranking.entries[:limit], start=1):
        print(f"{position:>5}  {entry.doc_id}  {entry.variant:<8}  {entry.score:.6f}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    corpus = load_manifest(args.manifest)
    config = _load_config(args.config)
    app = create_app(corpus, config)
    port = args.port or int(os.environ.get("XMEC_PORT", "8000"))
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xmec",
        description="Cross-modal entity consistency: scoring, tampering, evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a manifest and write it back normalized")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--min-person-docs", type=int, default=0)
    p.add_argument("--min-location-docs", type=int, default=0)
    p.add_argument("--min-event-docs", type=int, default=0)

    p = sub.add_parser("stats", help="per-type corpus statistics")
    p.add_argument("--manifest", required=True)

    p = sub.add_parser("score", help="score one document")
    p.add_argument("--manifest", required=True)
    p.add_argument("--doc", required=True)
    p.add_argument("--config")
    p.add_argument("--out")

    p = sub.add_parser("tamper", help="generate a tampered test set")
    p.add_argument("--manifest", required=True)
    p.add_argument(
        "--type", required=True, choices=["person", "location", "event", "context"]
    )
    p.add_argument("--strategy", required=True)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("evaluate", help="run verification and retrieval evaluation")
    p.add_argument("--manifest", required=True)
    p.add_argument("--testset")
    p.add_argument(
        "--type", choices=["person", "location", "event", "context"]
    )
    p.add_argument("--strategy")
    p.add_argument("--seed", type=int)
    p.add_argument("--subset", choices=sorted(SUBSETS), default="all")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--csv")

    p = sub.add_parser("rank", help="rank documents by a measure")
    p.add_argument("--manifest", required=True)
    p.add_argument(
        "--type", required=True, choices=["person", "location", "event", "context"]
    )
    p.add_argument("--testset")
    p.add_argument("--order", choices=["asc", "desc"], default="asc")
    p.add_argument("--limit", type=int, default=0)
    p.add_argument("--config")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=0)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "ingest": _cmd_ingest,
        "stats": _cmd_stats,
        "score": _cmd_score,
        "tamper": _cmd_tamper,
        "rank": _cmd_rank,
        "serve": _cmd_serve,
    }
    try:
        if args.command == "evaluate":
            return _cmd_evaluate(args, parser)
        return handlers[args.command](args)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

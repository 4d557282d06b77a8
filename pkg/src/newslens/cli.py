"""Command-line entry point wiring the pipeline stages together.

Commands: ingest, cluster, analyze, serve, eval-tags, synth, report.
Exit codes: 0 success, 1 validation failure (bad arguments, bad data,
stage order), 2 I/O failure. Writer commands take a per-store lock so only
one pipeline process mutates a store at a time; `serve` stays read-only.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import filelock

from . import ingest as ingest_mod
from . import report as report_mod
from . import synth as synth_mod
from .api import create_app
from .config import CONFIG_KEYS_DOC, PipelineConfig, load_config
from .pipeline import StageError, stage_analyze, stage_cluster
from .records import ParseError, SchemaError
from .store import Store

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2

LOCK_NAME = "pipeline.lock"
LOCK_TIMEOUT_S = 10.0
BIND_ENV = "NEWSLENS_BIND"


class _Parser(argparse.ArgumentParser):
    # Usage mistakes are validation failures, not I/O failures.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="newslens",
        description="News-event clustering, scoring, and discussion analysis.",
        epilog=CONFIG_KEYS_DOC,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--store", default="./newslens-store", metavar="DIR",
                        help="store directory (default: ./newslens-store)")
    parser.add_argument("--config", default=None, metavar="PATH",
                        help="TOML config file; omit for defaults")
    parser.add_argument("--seed", type=int, default=None, metavar="U64",
                        help="seed override for seeded commands")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at INFO level")

    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="load article/discussion JSONL files")
    p_ingest.add_argument("--articles", action="append", default=[], metavar="JSONL")
    p_ingest.add_argument("--discussions", action="append", default=[], metavar="JSONL")

    sub.add_parser("cluster", help="cluster ingested articles into labeled events")
    sub.add_parser("analyze", help="score stored events and scan discussions")

    p_serve = sub.add_parser("serve", help="serve the query API (read-only)")
    p_serve.add_argument("--host", default=None)
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--static", default=None, metavar="DIR",
                         help="directory of dashboard assets to serve at /")

    p_eval = sub.add_parser("eval-tags", help="score tag extraction against gold tags")
    p_eval.add_argument("--gold", required=True, metavar="JSONL",
                        help="articles with gold_tags")
    p_eval.add_argument("--k", default="1,3,5,10", metavar="K1,K2,..")
    p_eval.add_argument("--out", default=".", metavar="DIR",
                        help="directory for recall.csv and recall.png")

    p_synth = sub.add_parser("synth", help="generate a labeled synthetic corpus")
    p_synth.add_argument("--events", type=int, default=10)
    p_synth.add_argument("--articles", type=int, default=200)
    p_synth.add_argument("--threads", type=int, default=60)
    p_synth.add_argument("--no-socks", action="store_true",
                         help="omit the planted sockpuppet group")
    p_synth.add_argument("--out", required=True, metavar="DIR")

    p_report = sub.add_parser("report", help="export event CSV and metric figures")
    p_report.add_argument("--out", required=True, metavar="DIR")
    p_report.add_argument("--metrics", default="suspicion,sentiment,popularity_discussions",
                          metavar="M1,M2,..")
    p_report.add_argument("--bucket-hours", type=float, default=24.0)

    return parser


def _store_lock(store_dir: Path) -> filelock.FileLock:
    store_dir.mkdir(parents=True, exist_ok=True)
    return filelock.FileLock(store_dir / LOCK_NAME, timeout=LOCK_TIMEOUT_S)


def _resolve_bind(args, config: PipelineConfig) -> tuple[str, int]:
    host, port = config.server.host, config.server.port
    bound = os.environ.get(BIND_ENV)
    if bound:
        raw_host, _, raw_port = bound.rpartition(":")
        if not raw_host or not raw_port.isdigit():
            raise ValueError(f"{BIND_ENV} must look like host:port, got {bound!r}")
        host, port = raw_host, int(raw_port)
    if args.host is not None:
        host = args.host
    if args.port is not None:
        port = args.port
    return host, port


def cmd_ingest(args, config: PipelineConfig) -> int:
    if not args.articles and not args.discussions:
        print("ingest: provide --articles and/or --discussions", file=sys.stderr)
        return EXIT_VALIDATION
    with _store_lock(Path(args.store)), Store(args.store) as store:
        store.add_run("ingest", args.seed, args.config)
        total_accepted = 0
        total_rejected = 0
        for kind, paths in (("articles", args.articles), ("discussions", args.discussions)):
            for path in paths:
                result = ingest_mod.ingest_batch(store, path, kind)
                total_accepted += result.accepted
                total_rejected += len(result.rejected_lines)
                for line_no in result.rejected_lines:
                    log.warning("%s:%d rejected", path, line_no)
        print(f"ingested {total_accepted} records ({total_rejected} rejected lines)")
    return EXIT_OK


def cmd_cluster(args, config: PipelineConfig) -> int:
    with _store_lock(Path(args.store)), Store(args.store) as store:
        store.add_run("cluster", args.seed, args.config)
        summary = stage_cluster(store, config)
    print(f"clustered {summary['articles']} articles into {summary['events']} events")
    return EXIT_OK


def cmd_analyze(args, config: PipelineConfig) -> int:
    if args.seed is not None:
        config = replace(
            config,
            opinion=replace(config.opinion, embedding=replace(config.opinion.embedding, seed=args.seed)),
        )
    with _store_lock(Path(args.store)), Store(args.store) as store:
        store.add_run("analyze", args.seed, args.config)
        summary = stage_analyze(store, config)
    print(f"analyzed {summary['events']} events ({summary['flagged']} flagged)")
    return EXIT_OK


def cmd_serve(args, config: PipelineConfig) -> int:
    import uvicorn

    host, port = _resolve_bind(args, config)
    store = Store(args.store)
    app = create_app(store, static_dir=args.static)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    finally:
        store.close()
    return EXIT_OK


def cmd_eval_tags(args, config: PipelineConfig) -> int:
    ks = [int(part) for part in args.k.split(",") if part.strip()]
    articles, rejected = ingest_mod.read_articles(args.gold)
    for line_no in rejected:
        log.warning("%s:%d rejected", args.gold, line_no)
    rows = report_mod.evaluate_tags(articles, ks=ks, min_df=config.vectorizer.min_df)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = report_mod.write_recall_csv(rows, out / "recall.csv")
    report_mod.render_recall_curve(rows, out / "recall.png")
    sys.stdout.write(csv_path.read_text("utf-8"))
    return EXIT_OK


def cmd_synth(args, config: PipelineConfig) -> int:
    params = synth_mod.SynthParams(
        events=args.events,
        articles=args.articles,
        threads=args.threads,
        sock_users=0 if args.no_socks else 8,
        seed=args.seed if args.seed is not None else 7,
    )
    corpus = synth_mod.generate_corpus(params)
    paths = synth_mod.write_corpus(corpus, args.out)
    print(f"wrote {len(corpus.articles)} articles, {len(corpus.threads)} threads to {args.out}")
    for name in sorted(paths):
        log.info("%s: %s", name, paths[name])
    return EXIT_OK


def cmd_report(args, config: PipelineConfig) -> int:
    metrics = [part.strip() for part in args.metrics.split(",") if part.strip()]
    with Store(args.store) as store:
        written = report_mod.write_report(store, args.out, metrics=metrics,
                                          bucket_hours=args.bucket_hours)
    print(f"wrote {len(written)} report files to {args.out}")
    return EXIT_OK


_COMMANDS = {
    "ingest": cmd_ingest,
    "cluster": cmd_cluster,
    "analyze": cmd_analyze,
    "serve": cmd_serve,
    "eval-tags": cmd_eval_tags,
    "synth": cmd_synth,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_config(args.config)
        return _COMMANDS[args.command](args, config)
    except StageError as exc:
        print(f"newslens {args.command}: {exc} (stage: {exc.stage})", file=sys.stderr)
        return EXIT_VALIDATION
    except (ParseError, SchemaError, ValueError) as exc:
        print(f"newslens {args.command}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except filelock.Timeout:
        print(f"newslens {args.command}: store is locked by another pipeline process",
              file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"newslens {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

"""Batch command-line interface.

Subcommands:
  process             run the pipeline over a corpus and write a table
  validate-rules      compile every configured rule file, report problems
  rules-from-template generate section rules from an empty template
  build-index         build and persist the concept n-gram index

Exit codes: 0 success, 1 configuration or rule errors, 2 I/O errors.
Per-document failures are logged to stderr and counted but never change
the exit code. Stderr carries one line per event: timestamp, doc id (or
"-"), event text.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import normalizer, sectionizer, visualizer
from .errors import ConfigError, NoteMillError, RuleLoadError
from .pipeline import Pipeline, load_config, run_pipeline
from .tabular import read_corpus, to_rows, write_rows


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _log(event: str, doc_id: str = "-") -> None:
    stamp = time.strftime("%Y-%m-%dT%H:%M:%S")
    print(f"{stamp}\t{doc_id}\t{event}", file=sys.stderr)


def _build_parser() -> _Parser:
    parser = _Parser(prog="notemill", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("process", help="run the pipeline over a corpus")
    p.add_argument("--config", help="pipeline config JSON (default: packaged)")
    p.add_argument("--input", help="corpus: directory of .txt files or a JSONL file")
    p.add_argument("--output", help="output table path")
    p.add_argument("--format", choices=("csv", "jsonl"), help="output format")
    p.add_argument("--viz-dir", help="also write per-document HTML views here")
    p.add_argument("--parallelism", type=int, help="worker count (overrides config)")
    p.add_argument("--batch-size", type=int, help="batch size (overrides config)")

    v = sub.add_parser("validate-rules", help="compile all rule files")
    v.add_argument("--config", help="pipeline config JSON (default: packaged)")

    t = sub.add_parser("rules-from-template", help="derive section rules from a template")
    t.add_argument("--template", required=True, help="empty template text file")
    t.add_argument("--prefix", default="", help="category prefix for generated rules")
    t.add_argument("--output", required=True, help="where to write the rule JSON")

    b = sub.add_parser("build-index", help="build and persist the n-gram index")
    b.add_argument("--dict", dest="dictionary", required=True, help="TSV dictionary")
    b.add_argument("--n", type=int, default=3, help="n-gram length (default 3)")
    b.add_argument("--output", required=True, help="index cache path")
    return parser


def _cmd_process(args) -> int:
    config = load_config(args.config)
    overrides = {}
    if args.parallelism is not None:
        overrides["parallelism"] = args.parallelism
    if args.batch_size is not None:
        overrides["batch_size"] = args.batch_size
    if overrides:
        from dataclasses import replace

        config = replace(config, **overrides)

    input_path = args.input or config.io_defaults.get("input")
    output_path = args.output or config.io_defaults.get("output")
    fmt = args.format or config.io_defaults.get("format", "csv")
    viz_dir = args.viz_dir or config.io_defaults.get("viz_dir")
    if not input_path or not output_path:
        raise ConfigError("process needs --input and --output (flag or config)")
    if not Path(input_path).exists():
        raise OSError(f"input not found: {input_path}")

    pipeline = Pipeline(config)
    _log(f"pipeline ready: stages={','.join(config.stages)}")

    if viz_dir:
        Path(viz_dir).mkdir(parents=True, exist_ok=True)

    rows = []
    processed = skipped = 0
    for result in run_pipeline(pipeline, read_corpus(input_path)):
        if result.error is not None:
            skipped += 1
            _log(f"skipped: {result.error}", doc_id=result.doc_id)
            continue
        processed += 1
        rows.extend(to_rows(result.doc, result.doc_id))
        if viz_dir:
            stem = Path(viz_dir) / result.doc_id
            Path(f"{stem}.highlight.html").write_text(
                visualizer.render_highlight(result.doc), encoding="utf-8"
            )
            Path(f"{stem}.links.html").write_text(
                visualizer.render_links(result.doc), encoding="utf-8"
            )
    written = write_rows(rows, fmt, output_path)
    _log(f"done: processed={processed} skipped={skipped} rows={written}")
    return 0


def _cmd_validate(args) -> int:
    config = load_config(args.config)
    Pipeline(config)
    print(f"configuration valid: stages={','.join(config.stages)}")
    return 0


def _cmd_rules_from_template(args) -> int:
    try:
        template_text = Path(args.template).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read template: {exc}") from exc
    rules = sectionizer.rules_from_template(template_text, args.prefix)
    sectionizer.save_section_rules(rules, args.output)
    print(f"wrote {len(rules)} section rules to {args.output}")
    return 0


def _cmd_build_index(args) -> int:
    entries = normalizer.load_dictionary(args.dictionary)
    index = normalizer.build_index(entries, args.n)
    digest = normalizer.dictionary_digest(args.dictionary)
    normalizer.save_index(index, args.output, digest)
    print(
        f"indexed {len(index.entries)} entries "
        f"(n={args.n}, {len(index.buckets)} size buckets) to {args.output}"
    )
    return 0


_COMMANDS = {
    "process": _cmd_process,
    "validate-rules": _cmd_validate,
    "rules-from-template": _cmd_rules_from_template,
    "build-index": _cmd_build_index,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, RuleLoadError, NoteMillError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()

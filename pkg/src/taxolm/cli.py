"""Command-line interface: induce, score, evaluate, analyze, sweep.

Every induce run writes a JSON manifest recording the merged configuration
(file settings overridden by flags), input hashes and skipped terms, so a
run is reproducible from the manifest plus its input files. Exit codes:
0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .analysis import count_prompt_frequency, filter_single_token, single_token_report
from .backends import load_backend
from .errors import TaxoLMError
from .evaluation import average_metrics, evaluate, harmonic_f, stats
from .induction import METHODS, InductionConfig, TaxonomyInducer, induce
from .prompts import PromptTemplate, builtin_templates, load_templates, lookup
from .terminology import Taxonomy, load_taxonomy, load_terminology, write_taxonomy

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

_METHOD_FLAGS = tuple(m.replace("_", "-") for m in METHODS)


@dataclass
class RunManifest:
    """Reproducibility record, written once per induce run."""

    method: str
    template: str
    pattern: str
    k: int
    model: str
    model_kind: str
    terminology_path: str
    terminology_sha256: str
    terminology_format: str
    out_path: str
    started_at: str
    finished_at: str
    skipped_terms: list[str] = field(default_factory=list)
    length_normalize: bool = False
    period: bool = False
    tool_version: str = __version__
    merged_config: dict = field(default_factory=dict)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2) + "\n", encoding="utf-8")


def _sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; this tool reserves 2 for data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_config_file(path: str | Path) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise TaxoLMError(f"{path}: line {lineno}: expected key = value")
        out[key.strip()] = value.strip()
    return out


class _Settings:
    """Flag values override config-file values override defaults."""

    def __init__(self, args: argparse.Namespace) -> None:
        self._args = args
        self._file = _load_config_file(args.config) if getattr(args, "config", None) else {}
        self.merged: dict = {}

    def get(self, name: str, default=None, cast=str, required: bool = False):
        value = getattr(self._args, name.replace("-", "_"), None)
        if value is None:
            raw = self._file.get(name)
            if raw is not None:
                value = cast(raw) if cast is not bool else raw.lower() in ("1", "true", "yes", "on")
        if value is None:
            value = default
        if required and value is None:
            raise TaxoLMError(f"missing required setting {name!r} (flag or config file)")
        self.merged[name] = value
        return value


def _resolve_template(name: str, templates_file: str | None, period: bool) -> PromptTemplate:
    extra = load_templates(templates_file) if templates_file else []
    template = lookup(name, extra)
    return template.with_period() if period else template


# --- subcommands ----------------------------------------------------------


def _cmd_induce(args: argparse.Namespace) -> int:
    settings = _Settings(args)
    method = settings.get("method", required=True).replace("-", "_")
    template_name = settings.get("template", default="type")
    k = settings.get("k", default=1, cast=int)
    model = settings.get("model", required=True)
    terminology_path = settings.get("terminology", required=True)
    terminology_format = settings.get("terminology-format", default="plain")
    out_path = settings.get("out", required=True)
    period = settings.get("period", default=False, cast=bool)
    length_normalize = settings.get("length-normalize", default=False, cast=bool)
    manifest_path = settings.get("manifest", default=f"{out_path}.manifest.json")

    started = _now()
    backend = load_backend(model)
    template = _resolve_template(template_name, getattr(args, "templates_file", None), period)
    terminology = load_terminology(terminology_path, terminology_format)
    inducer = TaxonomyInducer(method=method, template=template, k=k,
                              backend=backend, length_normalize=length_normalize)
    taxonomy = inducer.fit(terminology).induce()
    write_taxonomy(taxonomy, out_path)
    manifest = RunManifest(
        method=method,
        template=template.name,
        pattern=template.pattern,
        k=k,
        model=model,
        model_kind=backend.descriptor.kind,
        terminology_path=str(terminology_path),
        terminology_sha256=_sha256(terminology_path),
        terminology_format=terminology_format,
        out_path=str(out_path),
        started_at=started,
        finished_at=_now(),
        skipped_terms=[t.surface for t in inducer.skipped_terms_],
        length_normalize=length_normalize,
        period=period,
        merged_config=settings.merged,
    )
    manifest.write(manifest_path)
    print(f"induced {len(taxonomy)} edge(s) over {len(terminology)} term(s) "
          f"({len(inducer.skipped_terms_)} skipped) -> {out_path}")
    print(f"manifest -> {manifest_path}")
    return EXIT_OK


def _cmd_score(args: argparse.Namespace) -> int:
    backend = load_backend(args.model)
    source = open(args.input, encoding="utf-8") if args.input else sys.stdin
    sink = open(args.output, "w", encoding="utf-8", newline="\n") if args.output else sys.stdout
    from .scoring import score_sentence

    try:
        for line in source:
            sentence = line.rstrip("\n")
            if not sentence.strip():
                continue
            score = score_sentence(backend, sentence)
            sink.write(f"{score.log_score:.6f}\t{sentence}\n")
    finally:
        if args.input:
            source.close()
        if args.output:
            sink.close()
    return EXIT_OK


def _metrics_row(label, m):
    return (f"{label:<12} {m.precision:>7.1f} {m.recall:>7.1f} {m.f_score:>7.1f} "
            f"{m.n_predicted:>10d} {m.n_gold:>7d} {m.n_correct:>8d}")


def _cmd_evaluate(args: argparse.Namespace) -> int:
    pairs = [(args.pred, args.gold)] + [tuple(extra) for extra in (args.avg or [])]
    rows = []
    for pred_path, gold_path in pairs:
        metrics = evaluate(load_taxonomy(pred_path), load_taxonomy(gold_path))
        rows.append((Path(pred_path).name, metrics))
    print(f"{'pair':<12} {'P':>7} {'R':>7} {'F':>7} {'predicted':>10} {'gold':>7} {'correct':>8}")
    for label, metrics in rows:
        print(_metrics_row(label, metrics))
    payload = {label: asdict(metrics) for label, metrics in rows}
    if len(rows) > 1:
        avg = average_metrics([m for _, m in rows])
        print(_metrics_row("average", avg))
        payload["average"] = asdict(avg)
        if args.verbose:
            alt = harmonic_f(avg.precision, avg.recall)
            print(f"{'':12} F of averaged P/R = {alt:.1f} (averaged F = {avg.f_score:.1f})")
            payload["average"]["f_of_averaged_pr"] = alt
    if args.json:
        Path(args.json).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_stats(args: argparse.Namespace) -> int:
    for path in args.taxonomy:
        vertices, edges = stats(load_taxonomy(path))
        print(f"{path}\tV={vertices}\tE={edges}")
    return EXIT_OK


def _cmd_analyze_single_token(args: argparse.Namespace) -> int:
    backend = load_backend(args.model)
    terminology = load_terminology(args.terminology, args.terminology_format)
    gold = load_taxonomy(args.gold)
    template = _resolve_template(args.template, None, args.period)
    config = InductionConfig(method=args.method.replace("-", "_"), template=template,
                             k=args.k, backend=backend)
    report = single_token_report(backend, config, terminology, gold)
    print(f"total terms     {report.total_terms}")
    print(f"% retained      {report.retained_pct:.2f}")
    print(f"F original      {report.f_original:.1f}")
    print(f"F filtered      {report.f_filtered:.1f}")
    print(f"% increase      {report.increase_pct:.2f}")
    if args.json:
        Path(args.json).write_text(json.dumps(asdict(report), indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_analyze_prompt_freq(args: argparse.Namespace) -> int:
    patterns = [line for line in Path(args.patterns).read_text(encoding="utf-8").splitlines()
                if line.strip() and not line.lstrip().startswith("#")]
    if not patterns:
        raise TaxoLMError(f"{args.patterns}: no patterns found")
    frequencies = count_prompt_frequency(args.corpus, patterns)
    for freq in frequencies:
        print(f"{freq.count}\t{freq.pattern}")
    if args.json:
        Path(args.json).write_text(
            json.dumps([asdict(f) for f in frequencies], indent=2) + "\n", encoding="utf-8")
    if args.tsv:
        with open(args.tsv, "w", encoding="utf-8", newline="\n") as fh:
            for freq in frequencies:
                fh.write(f"{freq.pattern}\t{freq.count}\n")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    backend = load_backend(args.model)
    terminology = load_terminology(args.terminology, args.terminology_format)
    gold = load_taxonomy(args.gold)
    template_names = [t.strip() for t in args.templates.split(",") if t.strip()]
    ks = [int(v) for v in args.k.split(",") if v.strip()]
    if not template_names or not ks:
        raise TaxoLMError("sweep needs at least one template and one k")
    rows = []
    for name in template_names:
        template = _resolve_template(name, None, args.period)
        for k in ks:
            inducer = TaxonomyInducer(method=args.method.replace("-", "_"), template=template,
                                      k=k, backend=backend)
            metrics = evaluate(inducer.fit(terminology).induce(), gold)
            rows.append((name, k, metrics))
    print(f"{'template':<10} {'k':>3} {'P':>7} {'R':>7} {'F':>7}")
    for name, k, m in rows:
        print(f"{name:<10} {k:>3} {m.precision:>7.1f} {m.recall:>7.1f} {m.f_score:>7.1f}")
    best = min(rows, key=lambda row: (-row[2].f_score, row[0], row[1]))
    print(f"best: template={best[0]} k={best[1]} F={best[2].f_score:.1f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("template\tk\tP\tR\tF\n")
            for name, k, m in rows:
                fh.write(f"{name}\t{k}\t{m.precision:.1f}\t{m.recall:.1f}\t{m.f_score:.1f}\n")
    return EXIT_OK


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="taxolm", description="Zero-shot taxonomy induction from language models.")
    parser.add_argument("--version", action="version", version=f"taxolm {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    induce_p = sub.add_parser("induce", help="predict a taxonomy over a terminology")
    induce_p.add_argument("--method", choices=_METHOD_FLAGS)
    induce_p.add_argument("--template", help="template name (builtin or from --templates-file)")
    induce_p.add_argument("--k", type=int, help="edges per term")
    induce_p.add_argument("--model", help="backend spec: mock:PATH | hf-masked:NAME | hf-causal:NAME")
    induce_p.add_argument("--terminology", help="terminology file")
    induce_p.add_argument("--terminology-format", choices=("plain", "tsv-id-term"))
    induce_p.add_argument("--out", help="output taxonomy TSV")
    induce_p.add_argument("--manifest", help="manifest path (default: OUT.manifest.json)")
    induce_p.add_argument("--templates-file", help="extra templates, name<TAB>pattern per line")
    induce_p.add_argument("--period", action="store_const", const=True, help="append a terminal period")
    induce_p.add_argument("--length-normalize", action="store_const", const=True,
                          help="rank lm-scorer candidates by per-token score")
    induce_p.add_argument("--config", help="key = value file mirroring these flags")
    induce_p.set_defaults(func=_cmd_induce)

    score_p = sub.add_parser("score", help="score sentences, one per line")
    score_p.add_argument("--model", required=True)
    score_p.add_argument("--input", help="sentence file (default: stdin)")
    score_p.add_argument("--output", help="output file (default: stdout)")
    score_p.set_defaults(func=_cmd_score)

    eval_p = sub.add_parser("evaluate", help="edge-level P/R/F against a gold taxonomy")
    eval_p.add_argument("--pred", required=True)
    eval_p.add_argument("--gold", required=True)
    eval_p.add_argument("--avg", nargs=2, metavar=("PRED", "GOLD"), action="append",
                        help="additional pred/gold pair to average over (repeatable)")
    eval_p.add_argument("--json", help="write machine-readable metrics here")
    eval_p.add_argument("-v", "--verbose", action="store_true")
    eval_p.set_defaults(func=_cmd_evaluate)

    stats_p = sub.add_parser("stats", help="vertex and edge counts of taxonomy files")
    stats_p.add_argument("taxonomy", nargs="+")
    stats_p.set_defaults(func=_cmd_stats)

    analyze_p = sub.add_parser("analyze", help="diagnostic analyses")
    analyze_sub = analyze_p.add_subparsers(dest="analysis", metavar="ANALYSIS")

    single_p = analyze_sub.add_parser("single-token", help="single-token hypernym filtering report")
    single_p.add_argument("--model", required=True)
    single_p.add_argument("--terminology", required=True)
    single_p.add_argument("--terminology-format", choices=("plain", "tsv-id-term"), default="plain")
    single_p.add_argument("--gold", required=True)
    single_p.add_argument("--method", choices=_METHOD_FLAGS, default="restrict-mlm")
    single_p.add_argument("--template", default="type")
    single_p.add_argument("--k", type=int, default=1)
    single_p.add_argument("--period", action="store_true")
    single_p.add_argument("--json")
    single_p.set_defaults(func=_cmd_analyze_single_token)

    freq_p = analyze_sub.add_parser("prompt-freq", help="pattern frequency over a corpus")
    freq_p.add_argument("--corpus", nargs="+", required=True)
    freq_p.add_argument("--patterns", required=True, help="file with one pattern per line")
    freq_p.add_argument("--json")
    freq_p.add_argument("--tsv")
    freq_p.set_defaults(func=_cmd_analyze_prompt_freq)

    sweep_p = sub.add_parser("sweep", help="grid over templates and k, report best cell")
    sweep_p.add_argument("--method", choices=_METHOD_FLAGS, default="restrict-mlm")
    sweep_p.add_argument("--model", required=True)
    sweep_p.add_argument("--terminology", required=True)
    sweep_p.add_argument("--terminology-format", choices=("plain", "tsv-id-term"), default="plain")
    sweep_p.add_argument("--gold", required=True)
    sweep_p.add_argument("--templates", default="gen,spec,type", help="comma-separated template names")
    sweep_p.add_argument("--k", default="1,3,5", help="comma-separated k values")
    sweep_p.add_argument("--period", action="store_true")
    sweep_p.add_argument("--out", help="write the grid as TSV")
    sweep_p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (TaxoLMError, OSError, ValueError, KeyError) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())

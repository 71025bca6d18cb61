"""Command-line front end: generate, simulate, analyze, dims, report.

Statistical non-significance is data, not failure; only operational errors
(bad flags, unreadable files, invalid configs) yield a nonzero exit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis, lexicon, parupa, pipeline, reporting
from .change import ChangeError, RuleError, Schedule, apply_change, parse_rules
from .corpus import Condition, CorpusError, load_plain_corpus, save_plain_corpus
from .embedding import EmbeddingError
from .parupa import GenerationError
from .stats import StatsError

_ERRORS = (CorpusError, RuleError, ChangeError, EmbeddingError, StatsError,
           GenerationError, analysis.AnalysisError, pipeline.ConfigError, OSError)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n",
                    encoding="utf-8")


def cmd_generate(args) -> int:
    out = Path(args.out)
    ss = np.random.SeedSequence(args.seed)
    s_target, s_control = ss.spawn(2)
    if args.kind == "parupa":
        spec = parupa.PhonotacticSpec.from_file(args.spec) if args.spec else parupa.PhonotacticSpec()
        target = parupa.generate_corpus(spec, args.words, args.bins, s_target)
        control = parupa.generate_corpus(spec, args.words, args.bins, s_control,
                                         condition=Condition.CONTROL)
    else:
        target = lexicon.generate_corpus(args.words, args.bins, s_target,
                                         lexicon_path=args.lexicon)
        control = lexicon.generate_corpus(args.words, args.bins, s_control,
                                          lexicon_path=args.lexicon,
                                          condition=Condition.CONTROL)
    save_plain_corpus(target, out / "target")
    save_plain_corpus(control, out / "control")
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "generate_config.json", {
        "kind": args.kind, "bins": args.bins, "words": args.words,
        "seed": args.seed, "spec": args.spec, "lexicon": args.lexicon,
    })
    print(f"wrote {target.n_bins} target + {control.n_bins} control bins to {out}")
    return 0


def cmd_simulate(args) -> int:
    corpus = load_plain_corpus(args.corpus)
    rules = parse_rules(args.rules)
    if len(rules) != 1:
        raise RuleError(f"{args.rules}: simulate needs exactly one rule, found {len(rules)}")
    probs = [float(p) for p in args.schedule.split(",")]
    schedule = Schedule(tuple(probs))
    target = apply_change(corpus, rules[0], schedule, args.seed)
    out = Path(args.out)
    save_plain_corpus(target, out / "target")
    save_plain_corpus(corpus.with_condition(Condition.CONTROL), out / "control")
    _write_json(out / "simulate_config.json", {
        "corpus": str(args.corpus), "rule": str(rules[0]),
        "schedule": probs, "seed": args.seed,
    })
    print(f"applied {rules[0]} over {corpus.n_bins} bins; wrote {out}")
    return 0


def _load_config(args) -> pipeline.ExperimentConfig:
    cfg = pipeline.ExperimentConfig.from_file(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.replicates is not None:
        cfg.replicates = args.replicates
    if args.window is not None:
        cfg.window = args.window
    if args.out is not None:
        cfg.output_dir = args.out
    return cfg


def cmd_analyze(args) -> int:
    cfg = _load_config(args)
    result, dims = pipeline.run(cfg)
    paths = reporting.write_results(cfg.output_dir, result.fit, result.series, dims,
                                    config=cfg.to_dict(),
                                    title=f"Distance({cfg.ref_char}, {cfg.moving_char}) ~ Bin * Corpus")
    print(reporting.format_coefficient_table(result.fit))
    print(f"wrote {len(paths)} files to {cfg.output_dir}")
    return 0


def cmd_dims(args) -> int:
    cfg = _load_config(args)
    result, dims = pipeline.run(cfg)
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    reporting.write_dimensions_csv(outdir / "dimensions.csv", dims.reports)
    print(f"{len(dims.reports)} dimension(s) kept, {dims.n_constant_skipped} constant skipped")
    for d in dims.reports[:10]:
        print(f"  {d.pattern}\t{d.slope:+.4f}\tr={d.pearson_r:+.3f}\tp={d.p_value:.4f}")
    return 0


def cmd_report(args) -> int:
    results = Path(args.results)
    coeffs = results / "coefficients.txt"
    if coeffs.exists():
        print(coeffs.read_text(encoding="utf-8"))
    figures = reporting.render_figures(results)
    if not figures:
        raise CorpusError(f"no distances.csv or dimensions.csv found in {results}")
    for f in figures:
        print(f"wrote {f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soundtrace",
        description="Detect sound change via diachronic PPMI character embeddings.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic target/control corpus pair")
    p.add_argument("--kind", choices=("parupa", "lexicon"), default="parupa")
    p.add_argument("--bins", type=int, required=True)
    p.add_argument("--words", type=int, required=True, help="tokens per bin")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--spec", help="phonotactic spec JSON (parupa kind)")
    p.add_argument("--lexicon", help="word<TAB>weight list (lexicon kind)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("simulate", help="apply a sound-change rule to a stored corpus")
    p.add_argument("--corpus", required=True, help="corpus directory or manifest.tsv")
    p.add_argument("--rules", required=True, help="rule file, one rule per line")
    p.add_argument("--schedule", required=True, help="comma-separated per-bin probabilities")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    for name, func, desc in (("analyze", cmd_analyze, "run the full experiment from a config"),
                             ("dims", cmd_dims, "per-dimension context analysis only")):
        p = sub.add_parser(name, help=desc)
        p.add_argument("--config", required=True)
        p.add_argument("--seed", type=int)
        p.add_argument("--replicates", type=int)
        p.add_argument("--window", type=int)
        p.add_argument("--out")
        p.set_defaults(func=func)

    p = sub.add_parser("report", help="render figures and print the coefficient table")
    p.add_argument("--results", required=True, help="directory written by analyze")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

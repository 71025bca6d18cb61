"""Config-driven experiment orchestration.

A declarative JSON config names the corpus source, the optional injected
change, the window size and character pair, and the replication scheme. All
randomness flows from one root seed, split per stage, so re-running a config
reproduces its outputs byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from . import analysis, lexicon, parupa
from .change import ChangeRule, Schedule, apply_change, parse_rule
from .corpus import (Condition, TimeBinnedCorpus, bin_attestations,
                     load_attestation_table, load_plain_corpus, make_shuffle_control)

SOURCE_KINDS = ("parupa", "lexicon", "manifest", "attestations")
CONTROL_MODES = ("independent", "twin", "shuffle")


class ConfigError(Exception):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    source: dict[str, Any]
    window: int
    ref_char: str
    moving_char: str
    change: dict[str, Any] | None = None
    replicates: int = 10
    seed: int = 0
    output_dir: str = "results"
    r_threshold: float = -0.2
    p_threshold: float = 0.05

    def __post_init__(self):
        kind = self.source.get("kind")
        if kind not in SOURCE_KINDS:
            raise ConfigError(f"source.kind must be one of {SOURCE_KINDS}, got {kind!r}")
        if self.window < 2:
            raise ConfigError("window size must be >= 2")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if len(self.ref_char) != 1 or len(self.moving_char) != 1:
            raise ConfigError("ref_char and moving_char must be single characters")
        if self.change is not None:
            if "rule" not in self.change or "schedule" not in self.change:
                raise ConfigError("change needs 'rule' and 'schedule'")
        mode = self.source.get("control", self._default_control())
        if mode not in CONTROL_MODES:
            raise ConfigError(f"control must be one of {CONTROL_MODES}, got {mode!r}")
        self.source = dict(self.source)
        self.source["control"] = mode

    def _default_control(self) -> str:
        # Parupa's control corpora are generated separately; loaded corpora
        # fall back to the shuffle control; the lexicon source keeps the
        # unchanged twin.
        kind = self.source.get("kind")
        if kind == "parupa":
            return "independent"
        if kind == "lexicon":
            return "twin"
        return "shuffle"

    @classmethod
    def from_dict(cls, d: Mapping) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"source", "window", "ref_char", "moving_char"} - set(d)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        return cls(**dict(d))

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from None

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "change": self.change,
            "window": self.window,
            "ref_char": self.ref_char,
            "moving_char": self.moving_char,
            "replicates": self.replicates,
            "seed": self.seed,
            "output_dir": self.output_dir,
            "r_threshold": self.r_threshold,
            "p_threshold": self.p_threshold,
        }


def parse_change(change: Mapping, n_bins: int) -> tuple[ChangeRule, Schedule]:
    rule = parse_rule(change["rule"])
    sched = change["schedule"]
    if sched == "linear":
        schedule = Schedule.linear(n_bins)
    else:
        schedule = Schedule(tuple(float(p) for p in sched))
    if len(schedule.probabilities) != n_bins:
        raise ConfigError(f"schedule length {len(schedule.probabilities)} does not "
                          f"match bin count {n_bins}")
    return rule, schedule


def _generated_pair_factory(cfg: ExperimentConfig):
    src = cfg.source
    kind = src["kind"]
    n_bins = int(src.get("n_bins", 5))
    control_mode = src["control"]
    if kind == "parupa":
        spec = (parupa.PhonotacticSpec.from_file(src["spec"]) if src.get("spec")
                else parupa.PhonotacticSpec())
        words = int(src.get("words_per_bin", 20000))

        def make_base(ss):
            return parupa.generate_corpus(spec, words, n_bins, ss)
    else:
        tokens = int(src.get("tokens_per_bin", 16000))
        lex_path = src.get("path")

        def make_base(ss):
            return lexicon.generate_corpus(tokens, n_bins, ss, lexicon_path=lex_path)

    rule_schedule = parse_change(cfg.change, n_bins) if cfg.change else None

    def factory(seed: int):
        ss = np.random.SeedSequence(seed)
        s_target, s_control, s_change, s_shuffle = ss.spawn(4)
        base = make_base(s_target)
        if rule_schedule is not None:
            rule, schedule = rule_schedule
            target = apply_change(base, rule, schedule, s_change)
        else:
            target = base
        if control_mode == "independent":
            control = make_base(s_control).with_condition(Condition.CONTROL)
        elif control_mode == "twin":
            control = base.with_condition(Condition.CONTROL)
        else:
            control = make_shuffle_control(target, int(s_shuffle.generate_state(1)[0]))
        return target, control

    return factory


def _load_pair(cfg: ExperimentConfig) -> tuple[TimeBinnedCorpus, TimeBinnedCorpus]:
    src = cfg.source
    kind = src["kind"]
    ss = np.random.SeedSequence(cfg.seed).spawn(1)[0]
    if kind == "manifest":
        target = load_plain_corpus(src["target"])
    else:
        attestations, warnings = load_attestation_table(src["path"])
        for w in warnings:
            print(f"warning: {w}")
        target, dropped = bin_attestations(
            attestations, int(src["start_year"]), int(src["bin_width_years"]),
            int(src["n_bins"]), fold_early=bool(src.get("fold_early", True)))
        if dropped:
            print(f"warning: {dropped} attestation(s) outside the bin range dropped")
    if cfg.change is not None:
        rule, schedule = parse_change(cfg.change, target.n_bins)
        target = apply_change(target, rule, schedule, ss)
    mode = src["control"]
    if mode == "shuffle":
        control = make_shuffle_control(target, int(ss.generate_state(2)[1]))
    elif mode == "twin":
        control = target.with_condition(Condition.CONTROL)
    else:
        if kind != "manifest" or not src.get("control_manifest"):
            raise ConfigError("control mode 'independent' needs source.control_manifest")
        control = load_plain_corpus(src["control_manifest"], condition=Condition.CONTROL)
    return target, control


def run(cfg: ExperimentConfig) -> tuple[analysis.ExperimentResult, analysis.PerDimensionResult]:
    """Run the full experiment described by a config."""
    kind = cfg.source["kind"]
    if kind in ("parupa", "lexicon"):
        factory = _generated_pair_factory(cfg)
        result = analysis.run_generated_experiment(
            factory, cfg.ref_char, cfg.moving_char, cfg.window,
            replicates=cfg.replicates, seed=cfg.seed)
    else:
        target, control = _load_pair(cfg)
        result = analysis.run_experiment(
            target, control, cfg.ref_char, cfg.moving_char, cfg.window,
            replicates=cfg.replicates, seed=cfg.seed)
    dims = analysis.per_dimension_analysis(
        result.target_embeddings, cfg.ref_char, cfg.moving_char,
        cfg.r_threshold, cfg.p_threshold)
    return result, dims

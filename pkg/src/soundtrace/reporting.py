"""Result serialization: coefficient tables, delimited outputs, figures.

The CSV files are the machine contract; the figures are rendered from them so
any other tool can reproduce the plots from the same data.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path
from typing import Sequence

from .analysis import DimensionReport, DistanceSeries, PerDimensionResult
from .corpus import Condition
from .stats import RegressionFit, TERMS

STAR_LEVELS = ((0.001, "***"), (0.01, "**"), (0.05, "*"))


def significance_stars(p: float) -> str:
    for level, stars in STAR_LEVELS:
        if p < level:
            return stars
    return ""


def format_coefficient_table(fit: RegressionFit, title: str | None = None) -> str:
    lines = []
    if title:
        lines.append(title)
    lines.append(f"{'Effect':<14}{'Estimate':>12}{'Std. Error':>12}{'p-value':>12}")
    for term in TERMS:
        p = fit.p_values[term]
        p_txt = "<.001" if p < 0.001 else f"{p:.3f}"
        lines.append(f"{term:<14}{fit.coefficients[term]:>12.4f}"
                     f"{fit.std_errors[term]:>12.4f}{p_txt:>9} {significance_stars(p):<3}")
    lines.append(f"residual df = {fit.residual_df}, R^2 = {fit.r_squared:.4f}")
    return "\n".join(lines)


def fit_to_dict(fit: RegressionFit) -> dict:
    return {
        "terms": {
            term: {
                "estimate": fit.coefficients[term],
                "std_error": fit.std_errors[term],
                "t": fit.t_stats[term],
                "p": fit.p_values[term],
                "stars": significance_stars(fit.p_values[term]),
            }
            for term in TERMS
        },
        "residual_df": fit.residual_df,
        "r_squared": fit.r_squared,
    }


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_distances_csv(path, series: Sequence[DistanceSeries]) -> None:
    path = Path(path)
    rows = ["replicate,condition,bin,distance"]
    for s in series:
        for b, d in s.points:
            rows.append(f"{s.replicate_id},{s.condition.value},{b},{d!r}")
    _atomic_write(path, "\n".join(rows) + "\n")


def read_distances_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        out = []
        for row in csv.DictReader(fh):
            out.append({"replicate": int(row["replicate"]), "condition": row["condition"],
                        "bin": int(row["bin"]), "distance": float(row["distance"])})
    return out


def write_dimensions_csv(path, reports: Sequence[DimensionReport]) -> None:
    path = Path(path)
    rows = ["pattern,slope,pearson_r,p_value"]
    for d in reports:
        rows.append(f"{d.pattern},{d.slope!r},{d.pearson_r!r},{d.p_value!r}")
    _atomic_write(path, "\n".join(rows) + "\n")


def read_dimensions_csv(path) -> list[DimensionReport]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [DimensionReport(row["pattern"], float(row["slope"]),
                                float(row["pearson_r"]), float(row["p_value"]))
                for row in csv.DictReader(fh)]


def write_results(outdir, fit: RegressionFit, series: Sequence[DistanceSeries],
                  dims: PerDimensionResult | None = None,
                  config: dict | None = None, title: str | None = None) -> dict[str, Path]:
    """Write coefficients.json/.txt, distances.csv, dimensions.csv, config.json."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {}
    paths["coefficients_json"] = outdir / "coefficients.json"
    _atomic_write(paths["coefficients_json"],
                  json.dumps(fit_to_dict(fit), indent=2) + "\n")
    paths["coefficients_txt"] = outdir / "coefficients.txt"
    _atomic_write(paths["coefficients_txt"], format_coefficient_table(fit, title) + "\n")
    paths["distances"] = outdir / "distances.csv"
    write_distances_csv(paths["distances"], series)
    if dims is not None:
        paths["dimensions"] = outdir / "dimensions.csv"
        write_dimensions_csv(paths["dimensions"], dims.reports)
    if config is not None:
        paths["config"] = outdir / "config.json"
        _atomic_write(paths["config"], json.dumps(config, ensure_ascii=False, indent=2) + "\n")
    return paths


def render_figures(results_dir, max_dims: int = 15) -> list[Path]:
    """Render interaction and dimension figures next to the CSV outputs."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    results_dir = Path(results_dir)
    written = []

    dist_path = results_dir / "distances.csv"
    if dist_path.exists():
        rows = read_distances_csv(dist_path)
        fig, ax = plt.subplots(figsize=(6, 4))
        for condition, color in ((Condition.TARGET.value, "tab:blue"),
                                 (Condition.CONTROL.value, "tab:orange")):
            per_bin: dict[int, list[float]] = {}
            for row in rows:
                if row["condition"] == condition:
                    per_bin.setdefault(row["bin"], []).append(row["distance"])
            if not per_bin:
                continue
            bins = sorted(per_bin)
            means = [sum(per_bin[b]) / len(per_bin[b]) for b in bins]
            spreads = []
            for b in bins:
                vals = per_bin[b]
                mu = sum(vals) / len(vals)
                spreads.append((sum((v - mu) ** 2 for v in vals) / max(1, len(vals) - 1)) ** 0.5)
            ax.errorbar(bins, means, yerr=spreads, marker="o", capsize=3,
                        color=color, label=condition)
        ax.set_xlabel("Bin")
        ax.set_ylabel("Distance")
        ax.set_title("Distance between character distributions over time")
        ax.legend()
        fig.tight_layout()
        out = results_dir / "interaction.png"
        fig.savefig(out, dpi=150)
        plt.close(fig)
        written.append(out)

    dims_path = results_dir / "dimensions.csv"
    if dims_path.exists():
        reports = read_dimensions_csv(dims_path)
        if reports:
            top = reports[:max_dims]
            fig, ax = plt.subplots(figsize=(6, 0.35 * len(top) + 1.5))
            ax.barh([d.pattern for d in top][::-1], [d.slope for d in top][::-1],
                    color="tab:blue")
            ax.set_xlabel("Slope")
            ax.set_title("Steepest converging context dimensions")
            fig.tight_layout()
            out = results_dir / "dimensions.png"
            fig.savefig(out, dpi=150)
            plt.close(fig)
            written.append(out)
    return written

"""Human-readable summaries and figure data derived from fit results alone."""

from __future__ import annotations

import csv
from pathlib import Path

from .force_model.fitting import FitResult
from .io import fmt


def _label(result: FitResult, fallback: str) -> str:
    return str(result.metadata.get("label", fallback))


def _interval(result: FitResult, name):
    if result.ci and name in result.ci:
        return result.ci[name]
    return (float("nan"), float("nan"))


def summary_text(result: FitResult, label: str = "") -> str:
    form = result.model_form
    lines = [
        f"[{label or _label(result, 'fit')}] model {form.variant.value}, {result.n_rows} rows",
        f"  rss={result.rss:.6g}  angular_sse={result.angular_sse:.6g} "
        f"(excluded {result.n_angular_excluded})  R^2={result.r_squared:.4f}",
        f"  group term active on {100 * result.activation_rate_cm:.1f}% of rows",
    ]
    for name, value in result.parameters().items():
        lo, hi = _interval(result, name)
        ci = "" if lo != lo else f"  95% CI ({lo:.4g}, {hi:.4g})"
        lines.append(f"  {name:>12s} = {value:.6g}{ci}")
    return "\n".join(lines)


def coefficient_rows(results: dict[str, FitResult]):
    """Weight estimates per fit: the data behind coefficient bar charts."""
    for label, res in results.items():
        for name in res.model_form.weight_names:
            lo, hi = _interval(res, name)
            yield [label, name, res.parameters()[name], lo, hi]


def gate_rows(results: dict[str, FitResult]):
    """Gate estimates against resolution and extent."""
    for label, res in results.items():
        meta = res.metadata
        for name in res.model_form.gate_names:
            lo, hi = _interval(res, name)
            yield [label, meta.get("resolution_min", ""), meta.get("extent_h", ""), name,
                   res.parameters()[name], lo, hi]


def write_report(results: dict[str, FitResult], outdir) -> dict:
    """Write ``summary.txt``, ``coefficients.csv`` and ``gates.csv``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "summary": outdir / "summary.txt",
        "coefficients": outdir / "coefficients.csv",
        "gates": outdir / "gates.csv",
    }
    paths["summary"].write_text(
        "\n\n".join(summary_text(r, label) for label, r in results.items()) + "\n", encoding="utf-8"
    )

    def dump(path, header, rows):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([fmt(v) if isinstance(v, float) else v for v in r])

    dump(paths["coefficients"], ["label", "parameter", "estimate", "ci_low", "ci_high"],
         coefficient_rows(results))
    dump(paths["gates"], ["label", "resolution_min", "extent_h", "parameter", "estimate", "ci_low", "ci_high"],
         gate_rows(results))
    return paths

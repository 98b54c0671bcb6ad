"""Render failure-probability curves and bound tables from cpbandit CSVs.

Reads only the two documented CSV schemas (never the simulation package
itself):

* sweep rows:
  ``policy,T,replications,failures,p_hat,ci_halfwidth,mean_abs_error,
  dispatch_shb_rate,valid``
* bound tables:
  ``T,t1,shb_upper,shb_upper_valid,sh_upper,sh_upper_valid,
  large_lower,large_lower_valid,small_lower,small_lower_valid``

Sweep figures use a linear y axis over [0, 1]; bound figures use log y
with the regime boundary T1 drawn as a vertical rule. Inputs are opened
read-only; saved images carry pinned metadata so identical inputs give
identical files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

SWEEP_HEADER = [
    "policy", "T", "replications", "failures", "p_hat", "ci_halfwidth",
    "mean_abs_error", "dispatch_shb_rate", "valid",
]
BOUNDS_HEADER = [
    "T", "t1", "shb_upper", "shb_upper_valid", "sh_upper", "sh_upper_valid",
    "large_lower", "large_lower_valid", "small_lower", "small_lower_valid",
]

# consistent per-policy styling across figures
POLICY_COLORS = {
    "sh": "tab:blue",
    "shb": "tab:orange",
    "sha": "tab:green",
    "grid_ls": "tab:red",
}
FALLBACK_COLORS = ["tab:purple", "tab:brown", "tab:pink", "tab:gray", "tab:olive"]

BOUND_STYLES = {
    "shb_upper": ("tab:orange", "-"),
    "sh_upper": ("tab:blue", "-"),
    "large_lower": ("tab:orange", "--"),
    "small_lower": ("tab:blue", "--"),
}

_SAVE_METADATA = {
    ".png": {"Software": "cpbandit-plots"},
    ".svg": {"Date": None, "Creator": "cpbandit-plots"},
}


class SchemaError(ValueError):
    """Input CSV does not conform to the documented schema."""


@dataclass
class PlotSpec:
    """What to draw: sweep CSVs, output image, optional bound overlay."""

    inputs: list[str]
    output: str
    overlay: str | None = None
    title: str | None = None
    xlabel: str = "budget T"
    ylabel: str = "failure proportion"
    log_x: bool = False
    log_y: bool = False


def _read_csv(path: str | Path, expected_header: list[str]) -> list[dict]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{path}: empty file") from None
            if header != expected_header:
                raise SchemaError(
                    f"{path}: header mismatch; expected {expected_header}, "
                    f"got {header}"
                )
            rows = [dict(zip(header, row)) for row in reader if row]
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def read_sweep_rows(path: str | Path) -> list[dict]:
    return _read_csv(path, SWEEP_HEADER)


def read_bounds_rows(path: str | Path) -> list[dict]:
    return _read_csv(path, BOUNDS_HEADER)


def _save(fig: Figure, output: str | Path) -> list[Path]:
    """Write the figure as PNG and SVG next to each other."""
    out = Path(output)
    paths = []
    with matplotlib.rc_context({"svg.hashsalt": "cpbandit-plots"}):
        for suffix in (".png", ".svg"):
            target = out.with_suffix(suffix)
            fig.savefig(target, metadata=_SAVE_METADATA[suffix])
            paths.append(target)
    return paths


def _series_color(name: str, index: int) -> str:
    base = name.split(":")[-1]
    if base in POLICY_COLORS:
        return POLICY_COLORS[base]
    return FALLBACK_COLORS[index % len(FALLBACK_COLORS)]


def plot_sweep(spec: PlotSpec) -> tuple[Figure, list[Path]]:
    """One p_hat-vs-T line per policy with a shaded +/- CI band.

    Invalid rows are skipped. With several input files, series labels are
    prefixed by the file stem. An optional bounds CSV is overlaid dashed,
    clipped at 1 with a marker wherever the bound is vacuous (>= 1).
    """
    series: dict[str, list[tuple[int, float, float]]] = {}
    multi = len(spec.inputs) > 1
    for path in spec.inputs:
        stem = Path(path).stem
        for row in read_sweep_rows(path):
            if row["valid"] != "true":
                continue
            label = f"{stem}:{row['policy']}" if multi else row["policy"]
            series.setdefault(label, []).append(
                (int(row["T"]), float(row["p_hat"]), float(row["ci_halfwidth"]))
            )
    if not series:
        raise SchemaError("no valid rows to plot")

    fig = Figure(figsize=(7, 4.5), dpi=120)
    ax = fig.subplots()
    for i, (label, pts) in enumerate(series.items()):
        pts.sort()
        ts = [p[0] for p in pts]
        ps = [p[1] for p in pts]
        cis = [p[2] for p in pts]
        color = _series_color(label, i)
        ax.plot(ts, ps, marker="o", ms=3.5, color=color, label=label)
        ax.fill_between(
            ts,
            [max(p - c, 0.0) for p, c in zip(ps, cis)],
            [min(p + c, 1.0) for p, c in zip(ps, cis)],
            color=color,
            alpha=0.2,
            linewidth=0,
        )

    if spec.overlay:
        for name, rows in _overlay_curves(spec.overlay):
            ts = [t for t, _ in rows]
            vals = [v for _, v in rows]
            color, _ = BOUND_STYLES[name]
            clipped = [min(v, 1.0) for v in vals]
            ax.plot(ts, clipped, linestyle=":", color=color,
                    label=f"bound:{name}")
            vac_t = [t for t, v in rows if v >= 1.0]
            if vac_t:
                ax.plot(vac_t, [1.0] * len(vac_t), linestyle="none",
                        marker="^", ms=5, color=color)

    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    ax.set_ylim(-0.03, 1.08)
    if spec.log_x:
        ax.set_xscale("log")
    if spec.log_y:
        ax.set_yscale("log")
        ax.set_ylim(auto=True)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    return fig, _save(fig, spec.output)


def _overlay_curves(path: str | Path):
    rows = read_bounds_rows(path)
    for name in ("shb_upper", "sh_upper", "large_lower", "small_lower"):
        pts = [
            (int(r["T"]), float(r[name]))
            for r in rows
            if r[f"{name}_valid"] == "true"
        ]
        if pts:
            yield name, sorted(pts)


def plot_bounds(
    bounds_csv: str | Path,
    output: str | Path,
    title: str | None = None,
) -> tuple[Figure, list[Path]]:
    """Bound curves vs T on a log-y axis with the T1 boundary as a rule."""
    rows = read_bounds_rows(bounds_csv)
    t1 = float(rows[0]["t1"])

    fig = Figure(figsize=(7, 4.5), dpi=120)
    ax = fig.subplots()
    plotted = 0
    for name, pts in _overlay_curves(bounds_csv):
        ts = [t for t, _ in pts]
        vals = [v for _, v in pts]
        color, style = BOUND_STYLES[name]
        ax.plot(ts, vals, linestyle=style, color=color, label=name)
        plotted += 1
    if plotted == 0:
        raise SchemaError(f"{bounds_csv}: no valid bound values to plot")
    ax.axvline(t1, color="black", linestyle="-.", linewidth=1.2,
               label=f"T1 = {t1:.1f}")
    ax.set_yscale("log")
    ax.set_xlabel("budget T")
    ax.set_ylabel("failure-probability bound")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3, which="both")
    ax.legend()
    return fig, _save(fig, output)

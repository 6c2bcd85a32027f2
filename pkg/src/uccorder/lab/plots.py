"""SVG rendering of scan tables: energies above, errors against FCI below.

Uses matplotlib's SVG backend with a fixed hash salt and no date stamp, so
the same CSV and style give the same bytes.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


class PlotError(ValueError):
    pass


@dataclass(frozen=True)
class PlotStyle:
    width: float = 6.0
    height: float = 7.0
    title: str = ""
    band_alpha: float = 0.25


_SERIES = [
    # column stem, legend label, matplotlib format
    ("fci", "FCI", "k-"),
    ("untrotterized", "un-Trotterized", "b--"),
    ("ens_mean", "ensemble mean", "r-"),
    ("sgo", "SGO", "g:"),
]


def read_scan_csv(path: str | Path) -> dict[str, list[float | None]]:
    """Columns of a scan CSV; raises PlotError naming the offending row."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise PlotError(f"cannot read {path}: {exc}") from exc
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise PlotError(f"{path}: row 1: missing header")
    header = rows[0]
    need = {"bond_length"} | {c + "_rel_kcal" for c, _, _ in _SERIES} | {c + "_err_kcal" for c, _, _ in _SERIES}
    absent = sorted(need - set(header))
    if absent:
        raise PlotError(f"{path}: row 1: missing column(s) {', '.join(absent)}")
    cols: dict[str, list[float | None]] = {h: [] for h in header}
    for n, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise PlotError(f"{path}: row {n}: expected {len(header)} fields, got {len(row)}")
        for h, cell in zip(header, row):
            if cell == "":
                cols[h].append(None)
                continue
            try:
                cols[h].append(float(cell))
            except ValueError:
                raise PlotError(f"{path}: row {n}: column {h!r} is not a number: {cell!r}") from None
        if cols["bond_length"][-1] is None:
            raise PlotError(f"{path}: row {n}: empty bond_length")
    return cols


def _series(cols, key):
    xs, ys = [], []
    for x, y in zip(cols["bond_length"], cols[key]):
        if y is not None:
            xs.append(x)
            ys.append(y)
    return xs, ys


def render_scan(cols: dict, style: PlotStyle = PlotStyle()):
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(style.width, style.height))
    for stem, label, fmt in _SERIES:
        for ax, suffix in ((top, "_rel_kcal"), (bottom, "_err_kcal")):
            xs, ys = _series(cols, stem + suffix)
            if xs:
                ax.plot(xs, ys, fmt, marker="o", markersize=3, label=label)
    for ax, suffix in ((top, "_rel_kcal"), (bottom, "_err_kcal")):
        x_lo, lo = _series(cols, "ens_min" + suffix)
        x_hi, hi = _series(cols, "ens_max" + suffix)
        if x_lo and x_lo == x_hi:
            ax.fill_between(x_lo, lo, hi, color="r", alpha=style.band_alpha, linewidth=0, label="ensemble min/max")
    top.set_ylabel("E - E(FCI, dissociated) / kcal/mol")
    bottom.set_ylabel("E - E(FCI) / kcal/mol")
    bottom.set_xlabel("R / Å")
    bottom.axhline(1.0, color="0.6", linewidth=0.8)
    if style.title:
        top.set_title(style.title)
    if top.get_legend_handles_labels()[0]:
        top.legend(fontsize=8)
    fig.tight_layout()
    return fig


def emit_plots(csv_paths: Sequence[str | Path], out_dir: str | Path, style: PlotStyle = PlotStyle()) -> list[Path]:
    """One SVG per scan CSV, named after it."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for path in csv_paths:
        cols = read_scan_csv(path)
        if not cols["bond_length"]:
            warnings.warn(f"{path}: no data rows; writing axes only", stacklevel=2)
        fig = render_scan(cols, style)
        target = out_dir / (Path(path).stem + ".svg")
        with matplotlib.rc_context({"svg.hashsalt": "uccorder", "svg.fonttype": "path"}):
            fig.savefig(target, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(target)
    return written


"""Benchmark output: delimited rows plus a log-scale timing figure."""

from __future__ import annotations

import csv
import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import log_slope  # noqa: E402

FIELDS = ("bag", "naive_ns", "fast_ns")


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=FIELDS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def plot_rows(rows, path: Path, title: str) -> Path:
    fig, ax = plt.subplots(figsize=(5.5, 4))
    bags = [r["bag"] for r in rows]
    for mode, marker in (("naive", "o"), ("fast", "s")):
        key = f"{mode}_ns"
        if all(key in r for r in rows):
            secs = [r[key] / 1e9 for r in rows]
            label = mode
            if len(rows) >= 2:
                label += f" (log-slope {log_slope(bags, secs):.2f})"
            ax.semilogy(bags, secs, marker=marker, label=label)
    ax.set_xlabel("bag size")
    ax.set_ylabel("join time [s]")
    ax.set_title(title)
    ax.set_xticks(bags)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_report(rows, outdir, problem: str) -> tuple[Path, Path]:
    """Write ``<problem>_bench.csv`` and ``<problem>_bench.png`` into ``outdir``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / f"{problem}_bench.csv"
    csv_path.write_text(rows_to_csv(rows))
    png_path = plot_rows(rows, outdir / f"{problem}_bench.png", f"{problem} join: naive vs fast")
    return csv_path, png_path

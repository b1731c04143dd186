"""Delimited report rows and matplotlib figure rendering.

Every table the CLI prints is also written as comma-separated rows, and
the report paths render a figure next to the delimited output so runs
can be eyeballed without replotting.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .searcher import BoundsRow, SpectrumReport

_PROVENANCE_COLORS = {"ladder": "tab:blue", "search": "tab:orange", "spread": "tab:green"}


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def bounds_table_line(row: BoundsRow) -> str:
    m, d, mx, boundary, full = row.table_cells()
    return f"{m} | δ≥{d} | ≤{mx} | {boundary} | {full}"


def bounds_csv_rows(rows: list[BoundsRow]):
    header = [
        "q",
        "min_size",
        "epsilon",
        "delta_min",
        "max_size",
        "interval_boundary",
        "spread_size",
        "density_low_ln",
        "density_low_log2",
        "modified_low_ln",
        "modified_low_log2",
    ]
    data = [
        [
            r.q,
            r.min_size,
            r.epsilon,
            r.delta_min,
            r.max_size,
            r.interval_boundary,
            r.spread_size,
            f"{r.density_low_ln:.3f}",
            f"{r.density_low_log2:.3f}",
            f"{r.modified_low_ln:.3f}",
            f"{r.modified_low_log2:.3f}",
        ]
        for r in rows
    ]
    return header, data


def render_bounds_figure(rows: list[BoundsRow], path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    qs = [r.q for r in rows]
    ax.plot(qs, [r.min_size for r in rows], "o-", label="smallest MPS")
    ax.plot(qs, [r.max_size for r in rows], "s-", label="largest MPS bound")
    ax.plot(qs, [r.spread_size for r in rows], "^--", label="spread")
    ax.set_yscale("log")
    ax.set_xlabel("q")
    ax.set_ylabel("size")
    ax.set_title("Maximal partial line spread size window in PG(5,q)")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def spectrum_csv_rows(report: SpectrumReport):
    header = ["size", "status", "provenance", "seconds", "best_size", "certificate"]
    data = []
    for e in report.entries:
        cert_name = f"size_{e.size}.cert" if e.certificate else ""
        data.append(
            [
                e.size,
                e.status,
                e.provenance or "",
                f"{e.seconds:.3f}",
                e.best_size if e.best_size is not None else "",
                cert_name,
            ]
        )
    return header, data


def spectrum_table(report: SpectrumReport) -> str:
    lines = [f"size spectrum for PG(5,{report.q}), budget={report.budget}"]
    lines.append(f"{'size':>6}  {'status':<9} {'provenance':<10} {'seconds':>8}")
    for e in report.entries:
        extra = f" best={e.best_size}" if e.status == "missed" else ""
        lines.append(
            f"{e.size:>6}  {e.status:<9} {e.provenance or '-':<10} {e.seconds:>8.2f}{extra}"
        )
    achieved = ", ".join(str(s) for s in report.achieved())
    lines.append(f"achieved: {achieved}")
    return "\n".join(lines)


def render_spectrum_figure(report: SpectrumReport, path) -> None:
    fig, ax = plt.subplots(figsize=(7.0, 2.8))
    seen = set()
    for e in report.entries:
        if e.status != "achieved":
            continue
        kind = e.provenance.split("-")[0] if e.provenance else "search"
        color = _PROVENANCE_COLORS.get(kind, "tab:gray")
        label = kind if kind not in seen else None
        seen.add(kind)
        ax.scatter([e.size], [1], marker="|", s=600, color=color, label=label)
    missed = [e.size for e in report.entries if e.status == "missed"]
    if missed:
        ax.scatter(missed, [1] * len(missed), marker="x", s=40, color="tab:red",
                   label="missed")
    excluded = [e.size for e in report.entries if e.status == "excluded"]
    if excluded:
        ax.scatter(excluded, [1] * len(excluded), marker=".", s=30, color="black",
                   label="excluded")
    ax.set_yticks([])
    ax.set_xlabel("certified maximal partial spread size")
    ax.set_title(f"PG(5,{report.q}) size spectrum")
    ax.legend(loc="upper left", ncols=5, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_spectrum_outputs(report: SpectrumReport, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for e in report.entries:
        if e.certificate is not None:
            (out / f"size_{e.size}.cert").write_text(e.certificate.text())
    header, rows = spectrum_csv_rows(report)
    write_csv(out / "summary.csv", header, rows)
    (out / "summary.txt").write_text(spectrum_table(report) + "\n")
    render_spectrum_figure(report, out / "spectrum.png")


def write_bounds_outputs(rows: list[BoundsRow], out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header, data = bounds_csv_rows(rows)
    write_csv(out / "bounds.csv", header, data)
    render_bounds_figure(rows, out / "bounds.png")

"""Deterministic, atomic output: CSV tables and optional SVG plots."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np

DEFAULT_DIGITS = 12


def atomic_write(path: str | Path, text: str) -> None:
    """Write ``text`` to a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_number(value: float, digits: int = DEFAULT_DIGITS) -> str:
    """Fixed rounding to ``digits`` decimals with negative zero printed as zero."""
    rounded = round(float(value), digits)
    if rounded == 0:
        rounded = 0.0
    return f"{rounded:.{digits}f}"


def csv_text(header: Sequence[str], rows: Iterable[Sequence], digits: int = DEFAULT_DIGITS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v, digits) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence], digits: int = DEFAULT_DIGITS) -> None:
    atomic_write(path, csv_text(header, rows, digits))


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, list(reader)


def write_svg(path: str | Path, panels: Sequence[tuple[str, np.ndarray, dict[str, np.ndarray]]]) -> None:
    """Static line plot, one panel per ``(xlabel, x, {label: y})``; byte-stable across runs."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "fanosim", "svg.fonttype": "path"}):
        fig, axes = plt.subplots(len(panels), 1, figsize=(6, 3 * len(panels)), squeeze=False)
        for ax, (xlabel, x, series) in zip(axes[:, 0], panels):
            for label, y in series.items():
                ax.plot(x, y, label=label, marker="." if len(x) < 40 else None)
            ax.set_xlabel(xlabel)
            ax.legend(loc="best")
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    atomic_write(path, buf.getvalue())

"""Deterministic report serialization: JSON, CSV, hashes and figures.

Reports are plain dicts of scalars, lists and row tables.  Floats are
written with 17 significant digits (lossless for binary64), keys are
sorted, and files are written atomically, so identical reports are
byte-identical on disk.  The content hash covers the delimited outputs
(JSON and CSV) only; rendered figures are documentation and stay outside
the hash.
"""

from __future__ import annotations

import csv
import hashlib
import io
import os
import tempfile

import numpy as np

__all__ = [
    "sanitize",
    "dumps_json",
    "rows_to_csv",
    "atomic_write",
    "content_hash",
    "write_report",
    "render_figure",
]


def sanitize(obj):
    """Recursively convert numpy scalars/arrays and tuples to JSON-ready types."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": float(obj.real), "im": float(obj.imag)}
    return obj


def _fmt_float(x: float) -> str:
    if x != x:
        return '"nan"'
    if x in (float("inf"), float("-inf")):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _emit(obj, out: list, indent: int):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj)
        for i, k in enumerate(keys):
            out.append(f'{pad}  "{k}": ')
            _emit(obj[k], out, indent + 1)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad + "  ")
            _emit(v, out, indent + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_fmt_float(obj))
    elif obj is None:
        out.append("null")
    elif isinstance(obj, str):
        import json as _json
        out.append(_json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def dumps_json(report: dict) -> str:
    """Deterministic JSON: sorted keys, 17-significant-digit floats."""
    out: list[str] = []
    _emit(sanitize(report), out, 0)
    return "".join(out) + "\n"


def rows_to_csv(rows: list[dict], columns: list[str] | None = None) -> str:
    """CSV text with a stable column order; header-only when rows is empty."""
    if columns is None:
        columns = []
        for row in rows:
            for k in row:
                if k not in columns:
                    columns.append(str(k))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        rec = []
        for c in columns:
            v = sanitize(row.get(c))
            if isinstance(v, float):
                rec.append(format(v, ".17g"))
            elif v is None:
                rec.append("")
            else:
                rec.append(v)
        writer.writerow(rec)
    return buf.getvalue()


def atomic_write(path: str, text: str):
    """Write via a temp file + rename so readers never see partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def content_hash(texts: list[str]) -> str:
    """sha256 over the concatenated delimited outputs."""
    h = hashlib.sha256()
    for t in texts:
        h.update(t.encode("utf-8"))
    return h.hexdigest()


def write_report(out_dir: str, name: str, report: dict,
                 rows: list[dict] | None = None,
                 columns: list[str] | None = None) -> dict:
    """Write <name>.json (+ <name>.csv when rows given) with an embedded hash.

    The hash covers the JSON body (with the hash field blanked) plus the
    CSV text; it is stored in the JSON and returned with the paths.
    """
    report = dict(sanitize(report))
    csv_text = rows_to_csv(rows, columns) if rows is not None else None
    report["content_hash"] = ""
    body = dumps_json(report)
    digest = content_hash([body] + ([csv_text] if csv_text is not None else []))
    report["content_hash"] = digest
    paths = {}
    json_path = os.path.join(out_dir, f"{name}.json")
    atomic_write(json_path, dumps_json(report))
    paths["json"] = json_path
    if csv_text is not None:
        csv_path = os.path.join(out_dir, f"{name}.csv")
        atomic_write(csv_path, csv_text)
        paths["csv"] = csv_path
    return {"hash": digest, "paths": paths}


def render_figure(out_dir: str, name: str, draw) -> str:
    """Render a matplotlib figure to <name>.png alongside the reports.

    ``draw(ax)`` receives a fresh axes; figures are documentation only and
    are excluded from the content hash.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(out_dir, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    draw(ax)
    fig.tight_layout()
    path = os.path.join(out_dir, f"{name}.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path

"""Report serialization: determinism, float formatting, atomicity."""

import json
import os

import numpy as np
import pytest

from parastable.report import (
    atomic_write,
    content_hash,
    dumps_json,
    render_figure,
    rows_to_csv,
    sanitize,
    write_report,
)


def test_sanitize_numpy_types():
    out = sanitize({"a": np.float64(1.5), "b": np.int32(2),
                    "c": np.array([1.0, 2.0]), "d": np.bool_(True),
                    "e": (1, 2), "f": 1 + 2j})
    assert out == {"a": 1.5, "b": 2, "c": [1.0, 2.0], "d": True,
                   "e": [1, 2], "f": {"re": 1.0, "im": 2.0}}


def test_json_roundtrips_floats_exactly():
    vals = [1.0 / 3.0, 1e-17, 123456.789012345678, np.pi]
    text = dumps_json({"vals": vals})
    back = json.loads(text)
    assert back["vals"] == vals  # 17 significant digits are lossless


def test_json_is_deterministic_and_sorted():
    a = dumps_json({"b": 1, "a": [2.5, {"z": 0.1, "y": 0.2}]})
    b = dumps_json({"a": [2.5, {"y": 0.2, "z": 0.1}], "b": 1})
    assert a == b
    assert a.index('"a"') < a.index('"b"')


def test_csv_header_only_for_empty_report():
    text = rows_to_csv([], columns=["x", "y"])
    assert text == "x,y\n"


def test_csv_stable_column_order_and_floats():
    rows = [{"x": 1.0 / 3.0, "y": 1}, {"y": 2, "x": 0.5}]
    text = rows_to_csv(rows, columns=["x", "y"])
    lines = text.strip().split("\n")
    assert lines[0] == "x,y"
    assert lines[1].startswith("0.33333333333333331")


def test_atomic_write_replaces_and_leaves_no_temp(tmp_path):
    path = os.path.join(tmp_path, "r.json")
    atomic_write(path, "one")
    atomic_write(path, "two")
    assert open(path).read() == "two"
    assert [p for p in os.listdir(tmp_path) if p.endswith(".tmp")] == []


def test_write_report_embeds_consistent_hash(tmp_path):
    rows = [{"a": 1, "b": 2.5}]
    out = write_report(str(tmp_path), "rep", {"value": 1.0}, rows=rows,
                       columns=["a", "b"])
    data = json.loads(open(out["paths"]["json"]).read())
    assert data["content_hash"] == out["hash"]
    # the hash covers the JSON body with the hash blanked plus the CSV
    data["content_hash"] = ""
    recomputed = content_hash([dumps_json(data),
                               open(out["paths"]["csv"]).read()])
    assert recomputed == out["hash"]


def test_write_report_is_byte_identical(tmp_path):
    report = {"value": np.pi, "rows": [{"x": 1e-8}]}
    a = write_report(str(tmp_path / "a"), "rep", report)
    b = write_report(str(tmp_path / "b"), "rep", report)
    assert open(a["paths"]["json"], "rb").read() == \
        open(b["paths"]["json"], "rb").read()


def test_render_figure_writes_png(tmp_path):
    path = render_figure(str(tmp_path), "fig",
                         lambda ax: ax.plot([0, 1], [0, 1]))
    assert os.path.exists(path)
    with open(path, "rb") as fh:
        assert fh.read(8) == b"\x89PNG\r\n\x1a\n"


def test_nan_and_inf_are_serializable():
    text = dumps_json({"a": float("nan"), "b": float("inf")})
    back = json.loads(text)
    assert back == {"a": "nan", "b": "inf", }

"""
Tests for the artifact writers.
"""
import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pandas as pd

from marginal_pgm.utils.file_utils import (
    dumps,
    ensure_directory_exists,
    write_csv,
    write_json,
    write_text,
)


def test_floats_read_back_exactly():
    values = np.random.default_rng(50).standard_normal(100).tolist() + [0.1, 1 / 3, 1e-300, 2.0 ** 60]
    assert json.loads(dumps({"values": values}))["values"] == values
    assert "0.10000000000000001" in dumps(0.1)


def test_non_finite_numbers_become_null():
    payload = {"a": float("nan"), "b": [np.inf, -np.inf, 1.5]}
    assert json.loads(dumps(payload)) == {"a": None, "b": [None, None, 1.5]}


def test_plain_conversion_of_library_types():
    data = {
        ("A", "B"): np.arange(3),
        "count": np.int64(4),
        "flag": np.bool_(True),
        "share": Fraction(1, 4),
        "path": Path("out") / "x.json",
        "empty": {},
        "nested": [{"x": np.float64(2.5)}],
    }
    assert json.loads(dumps(data)) == {
        "A,B": [0, 1, 2],
        "count": 4,
        "flag": True,
        "share": 0.25,
        "path": str(Path("out") / "x.json"),
        "empty": {},
        "nested": [{"x": 2.5}],
    }


def test_writers_create_directories(tmp_path):
    target = tmp_path / "a" / "b"
    assert ensure_directory_exists(target)
    assert target.is_dir()
    path = write_json({"x": 1}, tmp_path / "c" / "out.json")
    assert json.loads(path.read_text()) == {"x": 1}
    assert write_text("hello\n", tmp_path / "d" / "note.txt").read_text() == "hello\n"
    csv = write_csv(pd.DataFrame({"A": [0, 1]}), tmp_path / "e" / "data.csv")
    assert pd.read_csv(csv)["A"].tolist() == [0, 1]


def test_directory_over_a_file_fails(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert not ensure_directory_exists(blocker)

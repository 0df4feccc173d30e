import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gouysplit.io import GridOutput, long_format, read_grid, write_grid


def test_long_format_2x2(tmp_path):
    out = long_format("g", (("x", [0.0, 1.0]), ("y", [10.0, 20.0])),
                      np.array([[1.0, 2.0], [3.0, 4.0]]), "value", {"scenario": "t"})
    path = write_grid(out, tmp_path / out.filename)
    back = read_grid(path)
    assert back.columns == ("x", "y", "value")
    assert back.data.tolist() == [[0, 10, 1], [0, 20, 2], [1, 10, 3], [1, 20, 4]]
    assert back.metadata == {"scenario": "t"}


def test_profile_layout(tmp_path):
    out = GridOutput("p", ("x", "rate"), np.column_stack([[0.1, 0.2], [1 / 3, 2 / 3]]),
                     {"theta_c": math.pi, "engine": "closed_form"})
    path = write_grid(out, tmp_path / "p.csv")
    raw = open(path, "rb").read()
    assert b"\r" not in raw
    assert raw.decode().splitlines() == [
        "# theta_c=3.1415926535897931",
        "# engine=closed_form",
        "x,rate",
        "0.10000000000000001,0.33333333333333331",
        "0.20000000000000001,0.66666666666666663",
    ]


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 20), st.just(3)),
              elements=st.floats(allow_nan=False, allow_infinity=False, width=64)))
def test_round_trip_bit_exact(tmp_path_factory, data):
    path = tmp_path_factory.mktemp("rt") / "a.csv"
    write_grid(GridOutput("a", ("a", "b", "c"), data), path)
    back = read_grid(path).data
    assert np.array_equal(back.view(np.int64), data.view(np.int64))


def test_column_count_checked():
    with pytest.raises(ValueError):
        GridOutput("a", ("x",), np.zeros((2, 2)))


def test_unwritable_path_names_it(tmp_path):
    target = tmp_path / "missing" / "a.csv"
    with pytest.raises(OSError) as exc:
        write_grid(GridOutput("a", ("x",), np.zeros((1, 1))), target)
    assert str(target) in str(exc.value)

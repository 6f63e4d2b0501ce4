import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from saddlefocus import AxisSpec, FieldSpec, run_sweep
from saddlefocus.curves import Curve, CurveLabel, CurveSet
from saddlefocus.formats import FormatError, decode_curves, decode_grid, encode_curves, encode_grid
from saddlefocus.sweep import DIVERGED, UNDEFINED


@pytest.fixture(scope="module")
def grid():
    return run_sweep(AxisSpec("rho", 0.2, 1.5, 7), AxisSpec("mu", -0.3, 0.3, 5),
                     FieldSpec("embedding", {"omega": 3.6, "phi": 0.25}, max_len=40))


def test_grid_header_and_payload(grid):
    data = encode_grid(grid)
    head, _, payload = data.partition(b"\n\n")
    meta = dict(line.split("=", 1) for line in head.decode().split("\n"))
    assert meta["format"] == "HSFG1"
    assert meta["xparam"] == "rho" and meta["ycount"] == "5"
    assert meta["field"] == "embedding:40"
    assert meta["fixed.omega"] == "3.6" and meta["zero_eps"] == "1e-12"
    assert float(meta["sentinel.undefined"]) == UNDEFINED
    assert len(payload) == 8 * 35
    assert struct.unpack("<d", payload[8 * 7 * 2:8 * 7 * 2 + 8])[0] == UNDEFINED  # mu = 0 row
    assert np.array_equal(np.frombuffer(payload, "<f8").reshape(5, 7), grid.values)


def test_grid_round_trip_is_byte_identical(grid):
    data = encode_grid(grid)
    again = decode_grid(data)
    assert encode_grid(again) == data
    assert again.field == grid.field and again.x_axis == grid.x_axis


def test_grid_decode_errors(grid):
    data = encode_grid(grid)
    with pytest.raises(FormatError):
        decode_grid(data[:-8])
    with pytest.raises(FormatError):
        decode_grid(data.replace(b"HSFG1", b"HSFG2"))
    with pytest.raises(FormatError):
        decode_grid(b"format=HSFG1")
    with pytest.raises(FormatError):
        decode_grid(data.replace(b"xcount=7", b"xcount=x"))


def _curves():
    return CurveSet([
        Curve(CurveLabel("gamma_g"), [(1.5, 0.1), (2.0, 0.25)]),
        Curve(CurveLabel("belyakov_explicit", 3), [(0.2, -1e-300), (0.3, 0.1 + 0.2)]),
        Curve(CurveLabel("homoclinic_order_n", 2), [(0.5, 0.0123)]),
    ])


def test_curve_csv_layout():
    text = encode_curves(_curves())
    lines = text.split("\n")
    assert lines[0] == "kind,k_or_n,rho,mu"
    assert lines[1] == "gamma_g,,1.5,0.10000000000000001"
    assert lines[3] == ""
    assert "\r" not in text
    assert lines[5] == "belyakov_explicit,3,0.29999999999999999,0.30000000000000004"


def test_curve_round_trip():
    text = encode_curves(_curves())
    back = decode_curves(text)
    assert encode_curves(back) == text
    for a, b in zip(_curves(), back):
        assert a.label == b.label and np.array_equal(a.points, b.points)


floats = st.floats(allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.lists(st.tuples(floats, floats), min_size=1, max_size=5), max_size=4))
def test_curve_round_trip_exact(polys):
    cs = CurveSet([Curve(CurveLabel("belyakov_implicit", i), p) for i, p in enumerate(polys)])
    back = decode_curves(encode_curves(cs))
    assert len(back) == len(cs)
    for a, b in zip(cs, back):
        assert a.points.tobytes() == b.points.tobytes()


def test_curve_decode_errors():
    with pytest.raises(FormatError):
        decode_curves("a,b\n")
    with pytest.raises(FormatError):
        decode_curves("kind,k_or_n,rho,mu\ngamma_g,,1\n")
    with pytest.raises(FormatError):
        decode_curves("kind,k_or_n,rho,mu\ngamma_g,,1,2\ngamma_p,,1,2\n")
    assert len(decode_curves("kind,k_or_n,rho,mu\n")) == 0


def test_sentinel_payload_is_exact():
    assert struct.pack("<d", DIVERGED) == np.array([DIVERGED], "<f8").tobytes()

import numpy as np
import pytest

from fracnls import Field, TorusGrid
from fracnls import ngsf


def test_round_trip_single_record(tmp_path, rng):
    g = TorusGrid(2, (3.0, 4.5), (8, 16))
    u = Field(g, rng.standard_normal(g.shape))
    path = tmp_path / "u.ngsf"
    ngsf.write_field(path, u, 0.75)
    v, alpha = ngsf.read_field(path)
    assert alpha == 0.75
    assert v.grid == g
    assert np.array_equal(v.values, u.values)


def test_record_layout_is_little_endian():
    g = TorusGrid(1, 2.0, 8)
    buf = ngsf.encode(Field(g, np.arange(8.0)), 1.5)
    assert buf[:4] == b"NGSF"
    assert int.from_bytes(buf[4:8], "little") == ngsf.VERSION
    assert int.from_bytes(buf[8:12], "little") == 1
    assert len(buf) == 12 + 4 + 8 + 8 + 8 * 8


def test_complex_sequence(tmp_path, rng):
    g = TorusGrid(1, 2.0, 16)
    seq = [rng.standard_normal(16) + 1j * rng.standard_normal(16) for _ in range(3)]
    path = tmp_path / "traj.ngsf"
    ngsf.write_complex_sequence(path, g, seq, 0.5)
    back = ngsf.read_complex_sequence(path)
    assert len(back) == 3
    for a, b in zip(seq, back):
        assert np.array_equal(a, b)
    assert len(ngsf.read_records(path)) == 6


def test_corrupt_input_is_rejected():
    g = TorusGrid(1, 2.0, 8)
    buf = ngsf.encode(Field(g, 1.0), 1.0)
    with pytest.raises(ValueError, match="magic"):
        ngsf.decode(b"XXXX" + buf[4:])
    with pytest.raises(ValueError, match="truncated"):
        ngsf.decode(buf[:-8])

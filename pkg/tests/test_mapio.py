import numpy as np
import pytest

from helpers import random_grid
from trajrefine.errors import MapFormatError
from trajrefine.mapio import format_ascii, format_pgm, load_map, parse_ascii, parse_pgm, save_map


ASCII = """cells 4 2 cell_size 0.5 origin 1.0 -2.0
#...
..##
"""


def test_parse_ascii_orientation():
    g = parse_ascii(ASCII)
    assert (g.width, g.height, g.cell_size, g.origin) == (4, 2, 0.5, (1.0, -2.0))
    # first text line is the top row (iy = 1)
    assert g.occupancy[1].tolist() == [True, False, False, False]
    assert g.occupancy[0].tolist() == [False, False, True, True]


@pytest.mark.parametrize("text", [
    "",
    "cells 4 2 0.5 origin 0 0\n....\n....\n",
    "cells 4 2 cell_size 0.5 origin 0 0\n....\n",
    "cells 4 2 cell_size 0.5 origin 0 0\n....\n..x.\n",
    "cells 4 2 cell_size 0.5 origin 0 0\n....\n...\n",
    "cells 4 2 cell_size zero origin 0 0\n....\n....\n",
    "cells 4 2 cell_size -1 origin 0 0\n....\n....\n",
])
def test_parse_ascii_errors(text):
    with pytest.raises(MapFormatError):
        parse_ascii(text)


def test_ascii_round_trip():
    g = random_grid(np.random.default_rng(0), 20)
    back = parse_ascii(format_ascii(g))
    assert np.array_equal(back.occupancy, g.occupancy)
    assert (back.cell_size, back.origin) == (g.cell_size, g.origin)


def test_pgm_round_trip_and_threshold():
    g = random_grid(np.random.default_rng(1), 16)
    back = parse_pgm(format_pgm(g), g.cell_size, g.origin)
    assert np.array_equal(back.occupancy, g.occupancy)
    raw = b"P5\n# comment\n3 1\n255\n" + bytes([0, 127, 128])
    assert parse_pgm(raw).occupancy.tolist() == [[True, True, False]]


def test_pgm_16_bit():
    raw = b"P5 2 1 1000\n" + np.array([0, 900], dtype=">u2").tobytes()
    assert parse_pgm(raw).occupancy.tolist() == [[True, False]]


@pytest.mark.parametrize("raw", [b"P2\n1 1\n255\n\x00", b"P5\n2 2\n255\n\x00", b"P5\n2"])
def test_pgm_errors(raw):
    with pytest.raises(MapFormatError):
        parse_pgm(raw)


def test_load_save_by_suffix(tmp_path):
    g = random_grid(np.random.default_rng(3), 12)
    for name in ("m.map", "m.pgm"):
        save_map(g, tmp_path / name)
        back = load_map(tmp_path / name, g.cell_size, g.origin)
        assert np.array_equal(back.occupancy, g.occupancy)

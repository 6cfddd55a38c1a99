"""Reading and writing occupancy grids.

ASCII format::

    cells W H cell_size CS origin OX OY
    ....#####
    ....#####

followed by exactly ``H`` lines of ``W`` characters, ``#`` occupied and
``.`` free.  The first grid line is the *top* row (``iy = H - 1``), as in an
image.  ``origin`` is the world position of the center of cell ``(0, 0)``,
the bottom-left cell.

PGM: binary ``P5`` with 8- or 16-bit samples (big-endian), top row first.
A sample ``>= maxval / 2`` is free.  PGM carries no geometry, so cell size
and origin are supplied by the caller.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .errors import MapFormatError
from .grid_map import GridMap

ASCII_SUFFIXES = {".txt", ".map", ".grid", ".ascii"}


def parse_ascii(text: str) -> GridMap:
    lines = [ln.rstrip("\r") for ln in text.split("\n")]
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise MapFormatError("empty map file")
    head = lines[0].split()
    if len(head) != 8 or head[0] != "cells" or head[3] != "cell_size" or head[5] != "origin":
        raise MapFormatError(f"bad header line: {lines[0]!r}")
    try:
        w, h = int(head[1]), int(head[2])
        cs = float(head[4])
        origin = (float(head[6]), float(head[7]))
    except ValueError as exc:
        raise MapFormatError(f"bad header values: {lines[0]!r}") from exc
    rows = lines[1:]
    if w < 1 or h < 1 or len(rows) != h:
        raise MapFormatError(f"header announces {h} rows, file has {len(rows)}")
    occ = np.zeros((h, w), dtype=bool)
    for k, row in enumerate(rows):
        if len(row) != w or set(row) - {"#", "."}:
            raise MapFormatError(f"grid line {k + 1} must be {w} characters of '#' or '.'")
        occ[h - 1 - k] = np.frombuffer(row.encode(), dtype=np.uint8) == ord("#")
    try:
        return GridMap(occ, cs, origin)
    except ValueError as exc:
        raise MapFormatError(str(exc)) from exc


def format_ascii(grid: GridMap) -> str:
    head = f"cells {grid.width} {grid.height} cell_size {grid.cell_size!r} origin {grid.origin[0]!r} {grid.origin[1]!r}"
    rows = ["".join("#" if v else "." for v in grid.occupancy[iy]) for iy in range(grid.height - 1, -1, -1)]
    return "\n".join([head, *rows]) + "\n"


_PGM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n)*(\S+)")


def parse_pgm(data: bytes, cell_size: float = 1.0, origin=(0.0, 0.0)) -> GridMap:
    pos = 0
    tokens = []
    for _ in range(4):
        m = _PGM_TOKEN.match(data, pos)
        if not m:
            raise MapFormatError("truncated PGM header")
        tokens.append(m.group(1))
        pos = m.end()
    if tokens[0] != b"P5":
        raise MapFormatError(f"only binary P5 PGM is supported, got {tokens[0]!r}")
    try:
        w, h, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise MapFormatError("bad PGM header values") from exc
    if not (0 < maxval < 65536) or w < 1 or h < 1:
        raise MapFormatError("PGM dimensions or maxval out of range")
    pos += 1  # single whitespace byte before the raster
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    need = w * h * dtype.itemsize
    raster = data[pos:pos + need]
    if len(raster) != need:
        raise MapFormatError(f"PGM raster has {len(raster)} bytes, expected {need}")
    img = np.frombuffer(raster, dtype=dtype).reshape(h, w)
    free = img.astype(np.int64) * 2 >= maxval
    return GridMap(~free[::-1], cell_size, origin)


def format_pgm(grid: GridMap) -> bytes:
    img = np.where(grid.occupancy[::-1], 0, 255).astype(np.uint8)
    return f"P5\n{grid.width} {grid.height}\n255\n".encode() + img.tobytes()


def load_map(path: str | Path, cell_size: float | None = None, origin=None) -> GridMap:
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        return parse_pgm(path.read_bytes(), 1.0 if cell_size is None else cell_size,
                         (0.0, 0.0) if origin is None else tuple(origin))
    return parse_ascii(path.read_text())


def save_map(grid: GridMap, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        path.write_bytes(format_pgm(grid))
    else:
        path.write_text(format_ascii(grid))

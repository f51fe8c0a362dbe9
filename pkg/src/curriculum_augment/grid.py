"""Tile equally sized images into a padded grid."""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidParameterError, ShapeError
from .validation import check_image


@dataclass(frozen=True)
class GridLayout:
    columns: int = 5
    cell_padding: int = 2
    background: tuple = (255, 255, 255)

    def __post_init__(self):
        if self.columns < 1:
            raise InvalidParameterError(f"columns must be >= 1, got {self.columns}")
        if self.cell_padding < 0:
            raise InvalidParameterError(f"cell_padding must be >= 0, got {self.cell_padding}")


def cell_origin(index, cell_w, cell_h, layout):
    """Top-left pixel of cell ``index`` inside the composed grid."""
    row, col = divmod(index, layout.columns)
    pad = layout.cell_padding
    return col * (cell_w + 2 * pad) + pad, row * (cell_h + 2 * pad) + pad


def compose_grid(cells, layout=None):
    """Lay ``cells`` out row-major; each occupies ``cell + 2 * padding`` per axis."""
    layout = layout or GridLayout()
    cells = [check_image(c, name=f"cells[{i}]") for i, c in enumerate(cells)]
    if not cells:
        raise InvalidParameterError("need at least one cell")
    cell_h, cell_w = cells[0].shape[:2]
    for i, c in enumerate(cells):
        if c.shape != cells[0].shape:
            raise ShapeError(f"cells[{i}] is {c.shape[1]}x{c.shape[0]}, expected {cell_w}x{cell_h}")
    rows = math.ceil(len(cells) / layout.columns)
    pad = layout.cell_padding
    canvas = np.empty((rows * (cell_h + 2 * pad), layout.columns * (cell_w + 2 * pad), 3), dtype=np.uint8)
    canvas[...] = np.asarray(layout.background, dtype=np.uint8)
    for i, c in enumerate(cells):
        x, y = cell_origin(i, cell_w, cell_h, layout)
        canvas[y:y + cell_h, x:x + cell_w] = c
    return canvas

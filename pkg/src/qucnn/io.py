"""File formats: MNIST IDX images, filter vectors and CSV outputs.

CSV floats are written with 17 significant digits so ``float(text)``
recovers the exact double.
"""

from __future__ import annotations

import gzip
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .encoding import ImageGrid

log = logging.getLogger(__name__)

IDX_IMAGES_MAGIC = 2051
IDX_LABELS_MAGIC = 2049


class DataError(ValueError):
    """Malformed or unusable input data (CLI exit code 2)."""


@dataclass(frozen=True)
class MnistSet:
    images: list[ImageGrid]

    @property
    def count(self) -> int:
        return len(self.images)


def _read_bytes(path: Path) -> bytes:
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as fh:
        return fh.read()


def load_mnist(path, count: int | None = None) -> MnistSet:
    """Read the first ``count`` images of an IDX3 file (gzip accepted)."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"dataset not found: {path}")
    raw = _read_bytes(path)
    if len(raw) < 16:
        raise DataError(f"{path}: truncated header")
    magic, n, rows, cols = struct.unpack(">IIII", raw[:16])
    if magic == IDX_LABELS_MAGIC:
        raise DataError(f"{path}: not an image file (IDX label file, magic 2049)")
    if magic != IDX_IMAGES_MAGIC:
        raise DataError(f"{path}: not an image file (magic {magic})")
    count = n if count is None else count
    if not 0 <= count <= n:
        raise DataError(f"{path}: requested {count} images, file holds {n}")
    need = 16 + count * rows * cols
    if len(raw) < need:
        raise DataError(f"{path}: truncated, {len(raw)} bytes < {need}")
    data = np.frombuffer(raw, dtype=np.uint8, count=count * rows * cols, offset=16)
    data = data.reshape(count, rows, cols)
    return MnistSet([ImageGrid.from_bytes(img) for img in data])


def write_idx_images(path, images: np.ndarray) -> None:
    """Write a uint8 array of shape ``(n, rows, cols)`` as an IDX3 file."""
    images = np.asarray(images, dtype=np.uint8)
    n, rows, cols = images.shape
    with open(path, "wb") as fh:
        fh.write(struct.pack(">IIII", IDX_IMAGES_MAGIC, n, rows, cols))
        fh.write(images.tobytes())


def load_filter_vector(path, expected: int = 16) -> np.ndarray:
    """One decimal value per line; renormalized (with a warning) if off unit norm."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"filter file not found: {path}")
    try:
        vals = np.array(
            [float(line) for line in path.read_text().splitlines() if line.strip()]
        )
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    if vals.size != expected:
        raise DataError(f"{path}: expected {expected} values, got {vals.size}")
    norm = np.linalg.norm(vals)
    if norm == 0:
        raise DataError(f"{path}: filter vector is all zeros")
    if abs(norm - 1.0) > 1e-6:
        log.warning("filter vector norm is %.6g; renormalizing", norm)
        vals = vals / norm
    return vals


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_grid(path, grid) -> None:
    grid = np.asarray(grid)
    with open(path, "w", newline="") as fh:
        for row in grid:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_grid(path) -> np.ndarray:
    with open(path) as fh:
        return np.array([[float(v) for v in line.split(",")] for line in fh if line.strip()])


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_rows(path) -> tuple[list[str], list[list[str]]]:
    with open(path) as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    return lines[0].split(","), [line.split(",") for line in lines[1:]]

"""Amplitude encoding of image windows.

Window values are flattened row-major, so pixel ``(r, c)`` of an ``hh x ww``
window lands on basis index ``r * ww + c`` (qubit 0 = least-significant bit).
All-zero windows cannot be normalized; they encode as the ground state and
carry ``degenerate=True`` all the way into the feature map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .statevector import StateVector, UnitaryMatrix, apply_unitary, new_state


def _is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True)
class ImageGrid:
    pixels: np.ndarray

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2:
            raise ValueError(f"image must be 2-D, got shape {px.shape}")
        if px.size and (px.min() < 0.0 or px.max() > 1.0):
            raise ValueError("pixel values must lie in [0, 1]")
        object.__setattr__(self, "pixels", px)

    @classmethod
    def from_bytes(cls, raw: np.ndarray) -> "ImageGrid":
        return cls(np.asarray(raw, dtype=np.float64) / 255.0)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class Patch:
    origin_row: int
    origin_col: int
    values: np.ndarray
    degenerate: bool = field(init=False)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64).ravel()
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "degenerate", not np.any(vals))


@dataclass(frozen=True)
class EncodedPatch:
    state: StateVector
    source: Patch

    @property
    def degenerate(self) -> bool:
        return self.source.degenerate


def output_shape(height: int, width: int, hh: int, ww: int, stride: int) -> tuple[int, int]:
    return (height - hh) // stride + 1, (width - ww) // stride + 1


def _check_window(image: ImageGrid, hh: int, ww: int, stride: int) -> None:
    if not _is_pow2(hh * ww) or hh * ww < 2:
        raise ValueError(f"window {hh}x{ww} does not hold a power-of-two (>= 2) pixel count")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    if hh > image.height or ww > image.width:
        raise ValueError(f"window {hh}x{ww} larger than image {image.height}x{image.width}")


def window_stack(image: ImageGrid, hh: int, ww: int, stride: int) -> np.ndarray:
    """All windows as an array of shape ``(rows, cols, hh * ww)`` (row-major)."""
    _check_window(image, hh, ww, stride)
    win = sliding_window_view(image.pixels, (hh, ww))[::stride, ::stride]
    return win.reshape(win.shape[0], win.shape[1], hh * ww)


def extract_patches(image: ImageGrid, hh: int, ww: int, stride: int = 1) -> list[Patch]:
    stack = window_stack(image, hh, ww, stride)
    rows, cols = stack.shape[:2]
    return [
        Patch(i * stride, j * stride, stack[i, j].copy())
        for i in range(rows)
        for j in range(cols)
    ]


def normalize_patch(patch: Patch) -> tuple[np.ndarray, bool]:
    """Unit-norm copy of the patch values and its degenerate flag.

    Degenerate patches return the basis vector e0 (the ground-state amplitudes).
    """
    vals = patch.values
    norm = np.linalg.norm(vals)
    if norm == 0.0:
        e0 = np.zeros_like(vals)
        e0[0] = 1.0
        return e0, True
    return vals / norm, False


def preparation_unitary(target: np.ndarray) -> UnitaryMatrix:
    """Unitary whose first column is ``target``, so ``U|0...0> = target``.

    Built as a phase times a Householder reflection that swaps e0 and the
    target; only the first column is meaningful.
    """
    t = np.asarray(target, dtype=np.complex128).ravel()
    dim = t.size
    if not _is_pow2(dim) or dim < 2:
        raise ValueError(f"target length {dim} is not a power of two >= 2")
    norm = np.linalg.norm(t)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"target is not unit norm (norm={norm!r})")
    phase = t[0] / abs(t[0]) if abs(t[0]) > 0 else 1.0
    t = t * np.conj(phase)  # now t[0] is real and >= 0
    v = -t
    v[0] += 1.0
    vv = np.vdot(v, v).real
    if vv < 1e-30:
        return UnitaryMatrix(phase * np.eye(dim, dtype=np.complex128))
    h = np.eye(dim, dtype=np.complex128) - (2.0 / vv) * np.outer(v, v.conj())
    return UnitaryMatrix(phase * h)


def encode_vector(vector: np.ndarray) -> StateVector:
    """Load a unit vector into a fresh register via its preparation unitary."""
    u = preparation_unitary(vector)
    state = new_state(u.num_qubits)
    return apply_unitary(state, range(u.num_qubits), u)


def encode_patch(patch: Patch) -> EncodedPatch:
    if not _is_pow2(patch.values.size) or patch.values.size < 2:
        raise ValueError(f"patch length {patch.values.size} is not a power of two >= 2")
    vec, _ = normalize_patch(patch)
    return EncodedPatch(encode_vector(vec), patch)

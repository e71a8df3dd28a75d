"""Classical reference convolution and map comparison statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoding import ImageGrid, window_stack


@dataclass(frozen=True)
class ClassicalFilter:
    hh: int
    ww: int
    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if w.size != self.hh * self.ww:
            raise ValueError(f"expected {self.hh * self.ww} weights, got {w.size}")
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_grid(cls, grid) -> "ClassicalFilter":
        g = np.asarray(grid, dtype=np.float64)
        return cls(g.shape[0], g.shape[1], g.ravel())

    def is_unit(self, tol: float = 1e-10) -> bool:
        return abs(np.linalg.norm(self.weights) - 1.0) <= tol

    def normalized(self) -> "ClassicalFilter":
        return ClassicalFilter(self.hh, self.ww, self.weights / np.linalg.norm(self.weights))


def classical_conv(image: ImageGrid, filt: ClassicalFilter, stride: int = 1) -> np.ndarray:
    """Valid cross-correlation ``y_ij = sum_kl w_kl x_{s*i+k, s*j+l}``."""
    windows = window_stack(image, filt.hh, filt.ww, stride)
    return windows @ filt.weights


def normalized_similarity_map(image: ImageGrid, filt: ClassicalFilter, stride: int = 1) -> np.ndarray:
    """Per-window ``(w . x_hat)^2`` with ``x_hat`` the unit-norm window.

    All-zero windows use ``x_hat = e0`` (the quantum side's ground-state
    fallback), giving ``w[0]^2``.
    """
    if not filt.is_unit():
        raise ValueError("filter weights must be unit norm")
    windows = window_stack(image, filt.hh, filt.ww, stride)
    norms = np.linalg.norm(windows, axis=-1)
    degenerate = norms == 0.0
    dots = (windows @ filt.weights) / np.where(degenerate, 1.0, norms)
    dots = np.where(degenerate, filt.weights[0], dots)
    return dots**2


def degenerate_mask(image: ImageGrid, hh: int, ww: int, stride: int = 1) -> np.ndarray:
    return ~np.any(window_stack(image, hh, ww, stride), axis=-1)


@dataclass(frozen=True)
class ComparisonStats:
    max_abs_error: float
    mean_abs_error: float
    pearson_r: float


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation; for a constant input, 1.0 if the inputs are equal else 0.0."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    da, db = a - a.mean(), b - b.mean()
    denom = np.sqrt(np.dot(da, da) * np.dot(db, db))
    if denom == 0.0:
        return 1.0 if np.array_equal(a, b) else 0.0
    return float(np.clip(np.dot(da, db) / denom, -1.0, 1.0))


def compare_maps(a, b) -> ComparisonStats:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    err = np.abs(a - b)
    return ComparisonStats(float(err.max()), float(err.mean()), pearson(a, b))

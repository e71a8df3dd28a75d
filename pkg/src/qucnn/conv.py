"""SWAP-test convolution layer.

Register layout for every SWAP test: qubit 0 is the ancilla, qubits
``1..k`` hold the filter state and qubits ``k+1..2k`` hold the data state.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .encoding import (
    EncodedPatch,
    ImageGrid,
    encode_patch,
    extract_patches,
    output_shape,
    preparation_unitary,
)
from .statevector import (
    MeasurementResult,
    Shots,
    StateVector,
    UnitaryMatrix,
    apply_cnot,
    apply_cswap,
    apply_h,
    apply_ry,
    apply_rz,
    apply_unitary,
    measure,
    new_state,
    product_state,
)

RY_LAYER, RZ_LAYER = 0, 1


@dataclass(frozen=True)
class FilterParams:
    """Ansatz angles, shaped ``(n_reps, 2, num_qubits)``.

    Axis 1 selects the RY (0) or RZ (1) layer.  The flat parameter index used
    by the gradient functions is the C-order index into this array.
    """

    num_qubits: int
    n_reps: int
    thetas: np.ndarray

    def __post_init__(self) -> None:
        if self.num_qubits < 1 or self.n_reps < 1:
            raise ValueError("num_qubits and n_reps must be >= 1")
        th = np.asarray(self.thetas, dtype=np.float64)
        if th.size != 2 * self.n_reps * self.num_qubits:
            raise ValueError(
                f"expected {2 * self.n_reps * self.num_qubits} angles, got {th.size}"
            )
        object.__setattr__(self, "thetas", th.reshape(self.n_reps, 2, self.num_qubits).copy())

    @classmethod
    def zeros(cls, num_qubits: int, n_reps: int) -> "FilterParams":
        return cls(num_qubits, n_reps, np.zeros(2 * n_reps * num_qubits))

    @classmethod
    def random(cls, num_qubits: int, n_reps: int, rng: np.random.Generator) -> "FilterParams":
        return cls(num_qubits, n_reps, rng.uniform(-np.pi, np.pi, size=2 * n_reps * num_qubits))

    @property
    def size(self) -> int:
        return self.thetas.size

    @property
    def flat(self) -> np.ndarray:
        return self.thetas.ravel().copy()

    def with_flat(self, flat: np.ndarray) -> "FilterParams":
        return FilterParams(self.num_qubits, self.n_reps, flat)

    def shifted(self, index: int, delta: float) -> "FilterParams":
        if not 0 <= index < self.size:
            raise IndexError(f"parameter index {index} out of range [0, {self.size})")
        flat = self.flat
        flat[index] += delta
        return self.with_flat(flat)

    def label(self, index: int) -> tuple[int, str, int]:
        rep, layer, qubit = np.unravel_index(index, self.thetas.shape)
        return int(rep), ("RY", "RZ")[layer], int(qubit)


@dataclass(frozen=True)
class FilterState:
    """A realized filter: either an ansatz or an ideal preparation unitary."""

    realized: StateVector
    params: FilterParams | None = None
    unitary: UnitaryMatrix | None = None

    @property
    def num_qubits(self) -> int:
        return self.realized.num_qubits

    @classmethod
    def from_unitary(cls, u: UnitaryMatrix) -> "FilterState":
        state = apply_unitary(new_state(u.num_qubits), range(u.num_qubits), u)
        return cls(realized=state, unitary=u)

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> "FilterState":
        return cls.from_unitary(preparation_unitary(vector))


def ansatz_state(params: FilterParams) -> StateVector:
    state = new_state(params.num_qubits)
    n = params.num_qubits
    for rep in range(params.n_reps):
        for q in range(n):
            apply_ry(state, q, params.thetas[rep, RY_LAYER, q])
        for q in range(n):
            apply_rz(state, q, params.thetas[rep, RZ_LAYER, q])
        for q in range(n - 1):
            apply_cnot(state, q, q + 1)
    return state


def build_filter_state(params: FilterParams) -> FilterState:
    return FilterState(realized=ansatz_state(params), params=params)


def register_state(x) -> StateVector:
    """The k-qubit register held by a filter, encoded patch or bare state."""
    if isinstance(x, StateVector):
        return x
    if isinstance(x, FilterState):
        return x.realized
    if isinstance(x, EncodedPatch):
        return x.state
    raise TypeError(f"cannot take a register state from {type(x).__name__}")


def swap_test_circuit(filt, data) -> StateVector:
    """Joint state after H, CSWAPs, H (before reading the ancilla)."""
    f, d = register_state(filt), register_state(data)
    if f.num_qubits != d.num_qubits:
        raise ValueError(f"register width mismatch: {f.num_qubits} vs {d.num_qubits}")
    k = f.num_qubits
    state = product_state(new_state(1), f, d)
    apply_h(state, 0)
    for q in range(k):
        apply_cswap(state, 0, 1 + q, 1 + k + q)
    apply_h(state, 0)
    return state


def swap_test(filt, data, mode: Shots | None = None) -> MeasurementResult:
    return measure(swap_test_circuit(filt, data), 0, mode)


class Cell(NamedTuple):
    p0: float
    similarity: float
    degenerate: bool
    shots_used: int


@dataclass(frozen=True)
class FeatureMap:
    p0: np.ndarray
    similarity: np.ndarray
    degenerate: np.ndarray
    shots_used: np.ndarray

    @property
    def rows(self) -> int:
        return self.p0.shape[0]

    @property
    def cols(self) -> int:
        return self.p0.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.p0.shape

    def cell(self, i: int, j: int) -> Cell:
        return Cell(
            float(self.p0[i, j]),
            float(self.similarity[i, j]),
            bool(self.degenerate[i, j]),
            int(self.shots_used[i, j]),
        )


def similarity_from_p0(p0: float, sampled: bool) -> float:
    s = 2.0 * p0 - 1.0
    return min(max(s, 0.0), 1.0) if sampled else s


def _evaluate_window(filt: FilterState, patch, mode: Shots | None) -> tuple[MeasurementResult, bool]:
    encoded = encode_patch(patch)
    return swap_test(filt, encoded, mode), encoded.degenerate


def conv_forward(
    image: ImageGrid,
    filters: FilterState | Sequence[FilterState],
    hh: int = 4,
    ww: int = 4,
    stride: int = 1,
    mode: Shots | None = None,
    workers: int = 1,
) -> FeatureMap | list[FeatureMap]:
    """Slide each filter over ``image`` and SWAP-test every window.

    Window ``w`` (row-major index) of filter ``f`` samples from
    ``mode.child(f, w)``, so results do not depend on ``workers`` or on
    evaluation order.  A single ``FilterState`` yields a single map; a
    sequence yields one map per filter.
    """
    single = isinstance(filters, FilterState)
    filter_list = [filters] if single else list(filters)
    patches = extract_patches(image, hh, ww, stride)
    rows, cols = output_shape(image.height, image.width, hh, ww, stride)
    k = (hh * ww).bit_length() - 1
    for filt in filter_list:
        if filt.num_qubits != k:
            raise ValueError(f"filter has {filt.num_qubits} qubits, windows need {k}")

    jobs = [
        (filt, patch, None if mode is None else mode.child(f, w))
        for f, filt in enumerate(filter_list)
        for w, patch in enumerate(patches)
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _evaluate_window(*job), jobs))
    else:
        results = [_evaluate_window(*job) for job in jobs]

    maps = []
    n = len(patches)
    for f in range(len(filter_list)):
        chunk = results[f * n : (f + 1) * n]
        p0 = np.array([r.p0 for r, _ in chunk]).reshape(rows, cols)
        sampled = mode is not None
        sim = np.array([similarity_from_p0(r.p0, sampled) for r, _ in chunk]).reshape(rows, cols)
        degen = np.array([d for _, d in chunk], dtype=bool).reshape(rows, cols)
        used = np.array([r.shots for r, _ in chunk], dtype=np.int64).reshape(rows, cols)
        maps.append(FeatureMap(p0, sim, degen, used))
    return maps[0] if single else maps


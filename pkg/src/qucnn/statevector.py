"""Dense statevector simulator.

Qubit 0 is the least-significant bit of the basis index: amplitude ``k`` of an
``n``-qubit state is the coefficient of the basis state whose qubit ``q``
holds ``(k >> q) & 1``.

Gate functions run compiled kernels that mutate ``state.amplitudes`` in place and return the same
object, so ``apply_h(s, 0) is s``.  Copy first (``state.copy()``) if the
pre-gate state is still needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels

MAX_QUBITS = 24


class QubitIndexError(IndexError):
    pass


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"expected {1 << self.num_qubits} amplitudes for {self.num_qubits} qubits, "
                f"got shape {self.amplitudes.shape}"
            )

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> "StateVector":
        amps = np.array(amplitudes, dtype=np.complex128).ravel()
        n = amps.size.bit_length() - 1
        if n < 1 or amps.size != 1 << n:
            raise ValueError(f"amplitude count {amps.size} is not a power of two >= 2")
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise ValueError("cannot normalize the zero vector")
            amps /= norm
        elif abs(norm - 1.0) > 1e-10:
            raise ValueError(f"amplitudes are not normalized (norm={norm!r})")
        return cls(n, amps)

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def _tensor(self) -> np.ndarray:
        # axis n-1-q carries qubit q (C order puts the LSB on the last axis)
        return self.amplitudes.reshape((2,) * self.num_qubits)



@dataclass(frozen=True)
class UnitaryMatrix:
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128)
        dim = m.shape[0] if m.ndim == 2 else 0
        if m.ndim != 2 or m.shape != (dim, dim) or dim < 2 or dim & (dim - 1):
            raise ValueError(f"unitary must be square with power-of-two dimension, got {m.shape}")
        err = np.linalg.norm(m.conj().T @ m - np.eye(dim))
        if err > 1e-10:
            raise ValueError(f"matrix is not unitary (||U^dag U - I||_F = {err:.3e})")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1


@dataclass(frozen=True)
class MeasurementResult:
    """Outcome of reading one qubit in the Z basis.

    ``shots == 0`` marks an exact (analytic) result; ``zero_count`` is then 0
    and ``p0`` falls back to ``exact_p0``.
    """

    shots: int
    zero_count: int
    exact_p0: float

    def __post_init__(self) -> None:
        if self.shots < 0 or not 0 <= self.zero_count <= max(self.shots, 0):
            raise ValueError(f"invalid counts: {self.zero_count}/{self.shots}")

    @property
    def exact(self) -> bool:
        return self.shots == 0

    @property
    def p0(self) -> float:
        if self.shots == 0:
            return self.exact_p0
        return self.zero_count / self.shots


@dataclass(frozen=True)
class Shots:
    """Sampling mode: ``count`` shots drawn from a stream keyed by ``seed``.

    ``seed`` is a tuple of non-negative ints fed to ``numpy.random.SeedSequence``.
    ``child`` appends keys, which is how per-window and per-shift streams are
    derived from one master seed without any shared generator state.
    """

    count: int
    seed: tuple[int, ...] = (0,)

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError(f"shot count must be >= 1, got {self.count}")
        seed = (self.seed,) if isinstance(self.seed, (int, np.integer)) else tuple(self.seed)
        object.__setattr__(self, "seed", tuple(int(s) for s in seed))

    def child(self, *keys: int) -> "Shots":
        return Shots(self.count, self.seed + tuple(int(k) for k in keys))


def make_rng(seed) -> np.random.Generator:
    """Counter-based Philox generator keyed by an int or a tuple of ints."""
    if isinstance(seed, (int, np.integer)):
        seed = (int(seed),)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(seed))))


def new_state(num_qubits: int, max_qubits: int = MAX_QUBITS) -> StateVector:
    if not 1 <= num_qubits <= max_qubits:
        raise ValueError(f"num_qubits must be in [1, {max_qubits}], got {num_qubits}")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def product_state(*registers: StateVector) -> StateVector:
    """Tensor product; the first register occupies the lowest qubit indices."""
    amps = registers[0].amplitudes
    for reg in registers[1:]:
        amps = np.kron(reg.amplitudes, amps)
    n = sum(r.num_qubits for r in registers)
    if n > MAX_QUBITS:
        raise ValueError(f"product state would need {n} qubits (cap {MAX_QUBITS})")
    return StateVector(n, amps)


def _check(state: StateVector, *qubits: int) -> None:
    n = state.num_qubits
    for q in qubits:
        if not 0 <= q < n:
            raise QubitIndexError(f"qubit {q} out of range for {n}-qubit state")
    if len(qubits) > 1 and len(set(qubits)) != len(qubits):
        raise ValueError(f"qubit indices must be distinct, got {qubits}")


def ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


H_MATRIX = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


def apply_1q(state: StateVector, qubit: int, m: np.ndarray) -> StateVector:
    _check(state, qubit)
    _kernels.apply_1q(state.amplitudes, qubit, np.ascontiguousarray(m, dtype=np.complex128))
    return state


def apply_ry(state: StateVector, qubit: int, theta: float) -> StateVector:
    _check(state, qubit)
    half = 0.5 * float(theta)
    _kernels.apply_ry(state.amplitudes, qubit, math.cos(half), math.sin(half))
    return state


def apply_rz(state: StateVector, qubit: int, theta: float) -> StateVector:
    _check(state, qubit)
    half = 0.5 * float(theta)
    c, s = math.cos(half), math.sin(half)
    _kernels.apply_diag(state.amplitudes, qubit, complex(c, -s), complex(c, s))
    return state


def apply_h(state: StateVector, qubit: int) -> StateVector:
    return apply_1q(state, qubit, H_MATRIX)


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    _check(state, control, target)
    _kernels.apply_cnot(state.amplitudes, control, target)
    return state


def apply_cswap(state: StateVector, control: int, a: int, b: int) -> StateVector:
    _check(state, control, a, b)
    _kernels.apply_cswap(state.amplitudes, control, a, b)
    return state


def apply_unitary(state: StateVector, qubits: Sequence[int], u) -> StateVector:
    """Apply ``u`` to the sub-register ``qubits``.

    ``qubits[0]`` is the least-significant bit of ``u``'s row/column index, so
    ``apply_unitary(s, [q], ry_matrix(t))`` matches ``apply_ry(s, q, t)``.
    ``u`` may be a ``UnitaryMatrix`` or a raw array (validated on entry).
    """
    if not isinstance(u, UnitaryMatrix):
        u = UnitaryMatrix(u)
    qubits = list(qubits)
    if u.dim != 1 << len(qubits):
        raise ValueError(f"unitary of dim {u.dim} cannot act on {len(qubits)} qubits")
    _check(state, *qubits)
    axes = [state.num_qubits - 1 - q for q in qubits]
    k = len(qubits)
    # most-significant sub-register qubit first, matching u's index layout
    front = axes[::-1]
    t = np.moveaxis(state._tensor(), front, range(k))
    shape = t.shape
    out = (u.matrix @ t.reshape(1 << k, -1)).reshape(shape)
    state._tensor()[...] = np.moveaxis(out, range(k), front)
    return state


def prob_zero(state: StateVector, qubit: int) -> float:
    """Exact probability that measuring ``qubit`` in Z yields 0 (no collapse)."""
    _check(state, qubit)
    return float(_kernels.prob_zero(state.amplitudes, qubit))


def sample_measure(state: StateVector, qubit: int, shots: int, rng_seed) -> MeasurementResult:
    """Draw ``shots`` Z measurements of ``qubit`` from a seeded Philox stream."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    p0 = prob_zero(state, qubit)
    zeros = int(make_rng(rng_seed).binomial(shots, min(max(p0, 0.0), 1.0)))
    return MeasurementResult(shots=shots, zero_count=zeros, exact_p0=p0)


def measure(state: StateVector, qubit: int, mode: Shots | None = None) -> MeasurementResult:
    if mode is None:
        return MeasurementResult(shots=0, zero_count=0, exact_p0=prob_zero(state, qubit))
    return sample_measure(state, qubit, mode.count, mode.seed)


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"qubit count mismatch: {a.num_qubits} vs {b.num_qubits}")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def random_state(num_qubits: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state."""
    amps = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    return StateVector(num_qubits, amps / np.linalg.norm(amps))

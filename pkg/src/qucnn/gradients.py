"""Parameter-shift gradients and on-device scaling by an upstream gradient.

Two routes to dL/dtheta are implemented:

* host chain rule: run the SWAP test at theta +/- shift and multiply each
  window's difference by dL/dO on the classical side;
* entangled ancilla: rotate an extra qubit by ``theta_beta`` so that
  P(SWAP ancilla = 0) = 1/2 + dL/dO * F, then read the same two-point
  difference straight off the device.

The scaled probability carries a plus sign (derived directly from the
statevector; see ``ancilla_scaled_probability``).  Upstream values are bounded
to [-0.5, 0.5]; ``range_map_upstream`` rescales anything larger.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .conv import FilterParams, build_filter_state, swap_test, swap_test_circuit
from .statevector import (
    MeasurementResult,
    Shots,
    StateVector,
    apply_cnot,
    apply_h,
    apply_ry,
    measure,
    new_state,
    product_state,
)

DEFAULT_SHIFT = np.pi / 2
UPSTREAM_BOUND = 0.5


@dataclass(frozen=True)
class UpstreamGradient:
    values: np.ndarray
    raw: np.ndarray
    scale: float

    def __post_init__(self) -> None:
        if np.any(np.abs(self.values) > UPSTREAM_BOUND + 1e-15):
            raise ValueError("upstream values must lie in [-0.5, 0.5]")

    def __len__(self) -> int:
        return len(self.values)

    def rescale(self, grad):
        """Convert a gradient computed from ``values`` back to raw units."""
        return grad * self.scale


def range_map_upstream(raw: Sequence[float]) -> UpstreamGradient:
    raw = np.atleast_1d(np.asarray(raw, dtype=np.float64))
    peak = float(np.max(np.abs(raw))) if raw.size else 0.0
    if peak <= UPSTREAM_BOUND:
        return UpstreamGradient(raw.copy(), raw, 1.0)
    scale = 2.0 * peak
    values = np.clip(raw / scale, -UPSTREAM_BOUND, UPSTREAM_BOUND)
    return UpstreamGradient(values, raw, scale)


@dataclass(frozen=True)
class AncillaAngle:
    theta_beta: float
    dl_do: float
    beta_sq: float


def theta_beta(dl_do: float) -> AncillaAngle:
    """RY angle whose |1> population is 1/2 - dl_do.

    Uses ``2 * arcsin(sqrt(1/2 - dl_do))``; the square root alone does not
    satisfy ``beta^2 = sin^2(theta/2)`` (at dl_do = 0 it gives sqrt(2), not pi/2).
    """
    if not -UPSTREAM_BOUND <= dl_do <= UPSTREAM_BOUND:
        raise ValueError(f"dl_do={dl_do} outside [-0.5, 0.5]; range-map it first")
    theta = 2.0 * np.arcsin(np.sqrt(min(max(0.5 - dl_do, 0.0), 1.0)))
    return AncillaAngle(float(theta), float(dl_do), float(np.sin(theta / 2) ** 2))


def _as_angle(angle) -> AncillaAngle:
    return angle if isinstance(angle, AncillaAngle) else theta_beta(float(angle))


def ancilla_scaled_circuit(filt, data, angle) -> tuple[StateVector, int, int]:
    """Build the scaled SWAP-test state.

    Returns ``(state, swap_qubit, anc_qubit)``.  The SWAP-test register uses
    the usual layout (ancilla 0, filter 1..k, data k+1..2k) and Q_Anc sits
    on qubit 2k+1.
    """
    angle = _as_angle(angle)
    swap_state = swap_test_circuit(filt, data)
    anc = apply_ry(new_state(1), 0, angle.theta_beta)
    state = product_state(swap_state, anc)
    anc_q = state.num_qubits - 1
    apply_cnot(state, anc_q, 0)
    return state, 0, anc_q


def ancilla_scaled_probability(
    filt, data, angle, mode: Shots | None = None, readout: str = "swap"
) -> MeasurementResult:
    """Read the SWAP-test qubit after CNOT(Q_Anc -> Q_SWAP).

    Exact result: ``1/2 + (1/2 - beta^2) * F``.  ``readout="anc"`` measures
    Q_Anc instead, whose marginal is ``cos^2(theta_beta / 2)`` for every F.
    """
    state, swap_q, anc_q = ancilla_scaled_circuit(filt, data, angle)
    if readout == "swap":
        return measure(state, swap_q, mode)
    if readout == "anc":
        return measure(state, anc_q, mode)
    raise ValueError(f"unknown readout {readout!r}")


def _split(mode: Shots | None, *keys: int) -> Shots | None:
    return None if mode is None else mode.child(*keys)


def _shift_pair(fn, params: FilterParams, index: int, shift: float, mode: Shots | None) -> float:
    plus = fn(build_filter_state(params.shifted(index, shift)), _split(mode, index, 0))
    minus = fn(build_filter_state(params.shifted(index, -shift)), _split(mode, index, 1))
    return plus.p0 - minus.p0


def param_shift_grad(
    params: FilterParams,
    index: int,
    data,
    mode: Shots | None = None,
    shift: float = DEFAULT_SHIFT,
) -> float:
    """d p0 / d theta_index from two shifted SWAP tests.

    For shift ``s`` the estimate is ``(p0(+s) - p0(-s)) / (2 sin s)``, which is
    exact for RY/RZ generators and reduces to ``(p0(+) - p0(-)) / 2`` at pi/2.
    """
    diff = _shift_pair(lambda f, m: swap_test(f, data, m), params, index, shift, mode)
    return diff / (2.0 * np.sin(shift))


def finite_diff_grad(params: FilterParams, index: int, data, epsilon: float = 1e-5) -> float:
    """Central difference of the exact SWAP-test p0."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    plus = swap_test(build_filter_state(params.shifted(index, epsilon)), data).p0
    minus = swap_test(build_filter_state(params.shifted(index, -epsilon)), data).p0
    return (plus - minus) / (2.0 * epsilon)


def _upstream(upstream) -> UpstreamGradient:
    return upstream if isinstance(upstream, UpstreamGradient) else range_map_upstream(upstream)


def chain_grad_host(
    upstream,
    params: FilterParams,
    patches: Sequence,
    index: int,
    mode: Shots | None = None,
    shift: float = DEFAULT_SHIFT,
) -> float:
    """Sum over windows of dL/dO_j times the host-side parameter-shift gradient.

    Works in the range-mapped units of ``upstream``; multiply by
    ``upstream.scale`` to recover the raw gradient.
    """
    up = _upstream(upstream)
    if len(up) != len(patches):
        raise ValueError(f"{len(up)} upstream values for {len(patches)} windows")
    total = 0.0
    for j, (g, patch) in enumerate(zip(up.values, patches)):
        total += g * param_shift_grad(params, index, patch, _split(mode, j), shift)
    return float(total)


def entangled_grad(
    dl_do: float,
    params: FilterParams,
    index: int,
    data,
    mode: Shots | None = None,
    shift: float = DEFAULT_SHIFT,
) -> float:
    """dL/dtheta for one window with dL/dO folded into the circuit.

    ``(P(+s) - P(-s)) / (4 sin s)`` on the scaled probability; equals
    ``dl_do * param_shift_grad`` because the 1/2 offsets cancel.
    """
    angle = theta_beta(dl_do)
    diff = _shift_pair(
        lambda f, m: ancilla_scaled_probability(f, data, angle, m), params, index, shift, mode
    )
    return diff / (4.0 * np.sin(shift))


def chain_grad_entangled(
    upstream,
    params: FilterParams,
    patches: Sequence,
    index: int,
    mode: Shots | None = None,
    shift: float = DEFAULT_SHIFT,
) -> float:
    """Window sum of ``entangled_grad``, in the range-mapped units of ``upstream``."""
    up = _upstream(upstream)
    if len(up) != len(patches):
        raise ValueError(f"{len(up)} upstream values for {len(patches)} windows")
    return float(
        sum(
            entangled_grad(g, params, index, patch, _split(mode, j), shift)
            for j, (g, patch) in enumerate(zip(up.values, patches))
        )
    )


@dataclass(frozen=True)
class GradientRecord:
    """Gradients of L = dl_do * O with respect to one angle."""

    index: int
    param_shift: float
    entangled: float
    finite_diff: float
    shots: int

    @property
    def abs_error(self) -> float:
        return abs(self.param_shift - self.entangled)


@dataclass(frozen=True)
class GradientReport:
    dl_do: float
    records: list[GradientRecord]

    def max_abs_error(self) -> float:
        return max(r.abs_error for r in self.records)

    def median_abs_error(self) -> float:
        return float(np.median([r.abs_error for r in self.records]))


def gradient_report(
    params: FilterParams,
    data,
    dl_do: float,
    mode: Shots | None = None,
    epsilon: float = 1e-5,
) -> GradientReport:
    """Compare host, entangled and finite-difference gradients for every angle.

    In shots mode the host and entangled estimates draw from disjoint seed
    streams; the finite-difference column is always exact.
    """
    records = []
    for i in range(params.size):
        host = dl_do * param_shift_grad(params, i, data, _split(mode, 0))
        ent = entangled_grad(dl_do, params, i, data, _split(mode, 1))
        fd = dl_do * finite_diff_grad(params, i, data, epsilon)
        records.append(GradientRecord(i, host, ent, fd, 0 if mode is None else mode.count))
    return GradientReport(dl_do, records)


def uniform_superposition(num_qubits: int) -> StateVector:
    """H on every qubit of |0...0>: equal weight on all basis states."""
    state = new_state(num_qubits)
    for q in range(num_qubits):
        apply_h(state, q)
    return state


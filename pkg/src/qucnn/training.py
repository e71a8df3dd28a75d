"""Fit an ansatz filter to a target state by descending the SWAP-test loss."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .conv import FilterParams, FilterState, build_filter_state, swap_test
from .gradients import DEFAULT_SHIFT, param_shift_grad
from .statevector import Shots, make_rng


@dataclass(frozen=True)
class TrainingConfig:
    n_reps: int = 3
    learning_rate: float = 0.5
    momentum: float = 0.95
    max_iters: int = 500
    seed: int = 0
    target_fidelity: float = 0.99
    shots: int | None = None
    init: str = "uniform"
    keep_params: bool = False

    def __post_init__(self) -> None:
        if self.n_reps < 1:
            raise ValueError("n_reps must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if not 0 <= self.momentum < 1:
            raise ValueError("momentum must lie in [0, 1)")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if not 0 < self.target_fidelity <= 1:
            raise ValueError("target_fidelity must lie in (0, 1]")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be >= 1 or None for exact mode")
        if self.init not in ("uniform", "zeros"):
            raise ValueError(f"unknown init {self.init!r}")

    def mode(self, *keys: int) -> Shots | None:
        return None if self.shots is None else Shots(self.shots, (self.seed, *keys))


@dataclass(frozen=True)
class TrainingStep:
    iter: int
    fidelity: float
    loss: float
    params: np.ndarray | None = None


@dataclass
class TrainingTrajectory:
    steps: list[TrainingStep] = field(default_factory=list)
    converged: bool = False
    final_params: FilterParams | None = None

    @property
    def final_fidelity(self) -> float:
        return self.steps[-1].fidelity

    @property
    def losses(self) -> np.ndarray:
        return np.array([s.loss for s in self.steps])

    @property
    def fidelities(self) -> np.ndarray:
        return np.array([s.fidelity for s in self.steps])


def state_fidelity_loss(params: FilterParams, target, mode: Shots | None = None) -> float:
    """``1 - p0`` of the SWAP test between the ansatz and ``target``."""
    return 1.0 - swap_test(build_filter_state(params), target, mode).p0


def initial_params(num_qubits: int, config: TrainingConfig) -> FilterParams:
    if config.init == "zeros":
        return FilterParams.zeros(num_qubits, config.n_reps)
    return FilterParams.random(num_qubits, config.n_reps, make_rng((config.seed,)))


def loss_gradient(params: FilterParams, target, mode: Shots | None = None) -> np.ndarray:
    # d(1 - p0)/dtheta = -dp0/dtheta
    return -np.array(
        [
            param_shift_grad(params, i, target, None if mode is None else mode.child(i), DEFAULT_SHIFT)
            for i in range(params.size)
        ]
    )


def train_filter(
    target: FilterState, config: TrainingConfig, init: FilterParams | None = None
) -> TrainingTrajectory:
    """Gradient descent with Nesterov momentum on ``1 - p0``.

    The velocity update is ``v <- momentum * v - lr * grad(theta + momentum * v)``;
    ``momentum=0`` is plain gradient descent.  Iteration ``t`` records the loss
    at the current angles, stops if the fidelity estimate ``1 - 2 * loss`` has
    reached ``config.target_fidelity``, and otherwise takes one step.
    ``max_iters`` counts update steps, so a trajectory holds at most
    ``max_iters + 1`` records.
    """
    params = init if init is not None else initial_params(target.num_qubits, config)
    traj = TrainingTrajectory()
    velocity = np.zeros(params.size)
    for it in range(config.max_iters + 1):
        loss = state_fidelity_loss(params, target, config.mode(it, 0))
        fid = 1.0 - 2.0 * loss
        traj.steps.append(
            TrainingStep(it, fid, loss, params.flat if config.keep_params else None)
        )
        if fid >= config.target_fidelity:
            traj.converged = True
            break
        if it == config.max_iters:
            break
        ahead = params.with_flat(params.flat + config.momentum * velocity)
        grad = loss_gradient(ahead, target, config.mode(it, 1))
        velocity = config.momentum * velocity - config.learning_rate * grad
        params = params.with_flat(params.flat + velocity)
    traj.final_params = params
    return traj

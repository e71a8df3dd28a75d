"""Experiment drivers behind the CLI subcommands.

Every driver writes plain CSV into ``config.output_dir`` and returns a small
summary dict.  Randomness is keyed by ``config.seed`` (plus image, window,
run and shift indices), so reruns produce byte-identical files regardless of
``config.workers``.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .conv import FilterParams, FilterState, build_filter_state, conv_forward
from .encoding import encode_vector
from .gradients import (
    entangled_grad,
    finite_diff_grad,
    param_shift_grad,
    range_map_upstream,
    uniform_superposition,
)
from .io import DataError, load_filter_vector, load_mnist, write_grid, write_rows
from .oracle import ClassicalFilter, classical_conv, compare_maps, normalized_similarity_map
from .statevector import Shots, make_rng
from .training import TrainingConfig, train_filter

log = logging.getLogger(__name__)


class InvariantError(RuntimeError):
    """An internal consistency check failed (CLI exit code 3)."""


def _out_dir(config: ExperimentConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def random_unit_vector(dim: int, seed) -> np.ndarray:
    v = make_rng(seed).normal(size=dim)
    return v / np.linalg.norm(v)


def forward_filter(config: ExperimentConfig) -> np.ndarray:
    dim = config.window[0] * config.window[1]
    if config.filter_source == "random":
        return random_unit_vector(dim, (config.filter_seed,))
    return load_filter_vector(config.filter_source, expected=dim)


def band_fraction(exact_p0: np.ndarray, sampled_p0: np.ndarray, shots: int, k: float = 4.0) -> float:
    """Share of cells whose sampled p0 lies within ``k`` binomial sigmas of exact."""
    sigma = np.sqrt(np.clip(exact_p0 * (1.0 - exact_p0), 0.0, None) / shots)
    return float(np.mean(np.abs(sampled_p0 - exact_p0) <= k * sigma))


def run_forward_experiment(config: ExperimentConfig) -> dict:
    """Classical vs quantum feature maps over the first ``image_count`` images.

    Per image ``NN`` this writes ``image_NN_{classical,normalized,
    quantum_exact,quantum_shots,degenerate}.csv`` (quantum maps hold p0; the
    shots map is skipped in exact mode), then ``summary.csv`` and the filter
    actually used as ``filter.txt``.
    """
    if config.dataset_path is None:
        raise DataError("forward experiment needs dataset_path")
    images = load_mnist(config.dataset_path, config.image_count).images
    out = _out_dir(config)
    hh, ww = config.window
    weights = forward_filter(config)
    (out / "filter.txt").write_text("".join(f"{w:.17g}\n" for w in weights))
    cfilt = ClassicalFilter(hh, ww, weights)
    qfilt = FilterState.from_vector(weights)

    rows = []
    worst = 0.0
    for i, image in enumerate(images):
        classical = classical_conv(image, cfilt, config.stride)
        normalized = normalized_similarity_map(image, cfilt, config.stride)
        exact = conv_forward(image, qfilt, hh, ww, config.stride, None, config.workers)
        stats = compare_maps(exact.similarity, normalized)
        worst = max(worst, stats.max_abs_error)
        tag = f"image_{i:02d}"
        write_grid(out / f"{tag}_classical.csv", classical)
        write_grid(out / f"{tag}_normalized.csv", normalized)
        write_grid(out / f"{tag}_quantum_exact.csv", exact.p0)
        write_grid(out / f"{tag}_degenerate.csv", exact.degenerate.astype(int))
        row = [
            i,
            stats.max_abs_error,
            stats.mean_abs_error,
            compare_maps(classical, exact.similarity).pearson_r,
            int(exact.degenerate.sum()),
        ]
        if config.shots is not None:
            mode = Shots(config.shots, (config.seed, i))
            sampled = conv_forward(image, qfilt, hh, ww, config.stride, mode, config.workers)
            write_grid(out / f"{tag}_quantum_shots.csv", sampled.p0)
            row += [
                compare_maps(exact.p0, sampled.p0).pearson_r,
                band_fraction(exact.p0, sampled.p0, config.shots),
            ]
        rows.append(row)

    header = ["image", "max_abs_error", "mean_abs_error", "pearson_classical_quantum", "degenerate_cells"]
    if config.shots is not None:
        header += ["pearson_exact_shots", "band_fraction_4sigma"]
    write_rows(out / "summary.csv", header, rows)
    log.info("forward: %d images, exact-vs-normalized max error %.3e", len(images), worst)
    if worst > 1e-8:
        raise InvariantError(f"exact quantum map deviates from classical oracle by {worst:.3e}")
    return {"images": len(images), "max_abs_error": worst}


def _backprop_setup(config: ExperimentConfig):
    k = config.num_qubits
    params = FilterParams.random(k, config.n_reps, make_rng((config.filter_seed,)))
    return params, uniform_superposition(k)


def run_backprop_validation(config: ExperimentConfig) -> dict:
    """Host-side vs entangled-ancilla gradients across the shot schedule.

    Writes ``backprop.csv`` (one row per shot count and angle) and
    ``backprop_summary.csv``.  Gradients are in range-mapped units; the
    ``scale`` column converts them back.
    """
    out = _out_dir(config)
    params, data = _backprop_setup(config)
    upstream = range_map_upstream([config.dl_do])
    dl_do, scale = float(upstream.values[0]), upstream.scale
    if scale != 1.0:
        log.warning("dl_do=%g outside [-0.5, 0.5]; mapped to %g (scale %g)", config.dl_do, dl_do, scale)

    rows, summary = [], []
    for s, shots in enumerate(config.schedule()):
        mode = None if shots is None else Shots(shots, (config.seed, s))
        errors = []
        for i in range(params.size):
            host = dl_do * param_shift_grad(params, i, data, None if mode is None else mode.child(0))
            ent = entangled_grad(dl_do, params, i, data, None if mode is None else mode.child(1))
            fd = dl_do * finite_diff_grad(params, i, data, config.epsilon)
            err = abs(host - ent)
            errors.append(err)
            rep, layer, qubit = params.label(i)
            rows.append([shots or 0, i, rep, layer, qubit, host, ent, fd, err])
        summary.append([shots or 0, float(np.median(errors)), max(errors), dl_do, scale])
    header = ["shots", "param", "rep", "layer", "qubit", "host", "entangled", "finite_diff", "abs_error"]
    write_rows(out / "backprop.csv", header, rows)
    write_rows(
        out / "backprop_summary.csv",
        ["shots", "median_abs_error", "max_abs_error", "dl_do", "scale"],
        summary,
    )
    exact_rows = [r for r in summary if r[0] == 0]
    if exact_rows and exact_rows[0][2] > 1e-8:
        raise InvariantError(f"exact entangled gradient off by {exact_rows[0][2]:.3e}")
    return {"rows": len(rows), "scale": scale}


def run_gradcheck(config: ExperimentConfig) -> dict:
    """Parameter-shift vs finite-difference vs entangled gradients, exact mode."""
    out = _out_dir(config)
    k = config.num_qubits
    params = FilterParams.random(k, config.n_reps, make_rng((config.filter_seed,)))
    data = encode_vector(random_unit_vector(1 << k, (config.seed, 7)))
    dl_do = float(range_map_upstream([config.dl_do]).values[0])
    rows = []
    worst = 0.0
    for i in range(params.size):
        ps = param_shift_grad(params, i, data)
        fd = finite_diff_grad(params, i, data, config.epsilon)
        ent = entangled_grad(dl_do, params, i, data)
        worst = max(worst, abs(ps - fd))
        rows.append([i, ps, fd, abs(ps - fd), ent, abs(ent - dl_do * ps)])
    write_rows(
        out / "gradcheck.csv",
        ["param", "param_shift", "finite_diff", "abs_diff", "entangled", "entangled_error"],
        rows,
    )
    return {"params": params.size, "max_fd_error": worst}


def learning_target(config: ExperimentConfig, run: int) -> FilterState:
    if config.target_source == "random":
        rng = make_rng((1000 + config.seed + run,))
        return build_filter_state(FilterParams.random(config.num_qubits, config.target_reps, rng))
    return FilterState.from_vector(load_filter_vector(config.target_source, 1 << config.num_qubits))


def _train_one(args):
    config, run, n = args
    target = learning_target(config, run)
    tcfg = TrainingConfig(
        n_reps=n,
        learning_rate=config.learning_rate,
        momentum=config.momentum,
        max_iters=config.max_iters,
        seed=config.seed + run,
        target_fidelity=config.target_fidelity,
        shots=config.shots,
        init=config.init,
    )
    traj = train_filter(target, tcfg)
    return run, n, [(s.iter, s.fidelity, s.loss) for s in traj.steps], traj.converged


def run_state_learning(config: ExperimentConfig) -> dict:
    """Train each depth in ``config.depths`` against ``config.runs`` targets.

    Writes ``trajectory_runRR_nN.csv`` (iter, fidelity, loss) per job and
    ``training_summary.csv``.  Jobs run in separate processes when
    ``workers > 1``; outputs do not depend on the worker count.
    """
    out = _out_dir(config)
    jobs = [(config, r, n) for r in range(config.runs) for n in config.depths]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_train_one, jobs))
    else:
        results = [_train_one(job) for job in jobs]

    summary = []
    for run, n, steps, converged in results:
        write_rows(out / f"trajectory_run{run:02d}_n{n}.csv", ["iter", "fidelity", "loss"], steps)
        summary.append([run, n, len(steps) - 1, steps[-1][1], steps[-1][2], int(converged)])
    write_rows(
        out / "training_summary.csv",
        ["run", "n_reps", "iterations", "final_fidelity", "final_loss", "converged"],
        summary,
    )
    return {"jobs": len(results), "summary": summary}


RUNNERS = {
    "forward": run_forward_experiment,
    "backprop-validate": run_backprop_validation,
    "train-filter": run_state_learning,
    "gradcheck": run_gradcheck,
}

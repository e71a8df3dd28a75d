import gzip
import logging

import numpy as np
import pytest

from qucnn.config import ConfigError, ExperimentConfig
from qucnn.io import (
    DataError,
    fmt,
    load_filter_vector,
    load_mnist,
    read_grid,
    read_rows,
    write_grid,
    write_idx_images,
    write_rows,
)


def test_load_fixture(mnist_path):
    data = load_mnist(mnist_path)
    assert data.count == 16
    img = data.images[0]
    assert (img.height, img.width) == (28, 28)
    assert 0.0 <= img.pixels.min() and img.pixels.max() <= 1.0
    assert img.pixels.max() == 1.0  # MNIST digits saturate at 255


def test_load_count_and_zero(mnist_path):
    assert load_mnist(mnist_path, 3).count == 3
    assert load_mnist(mnist_path, 0).count == 0
    with pytest.raises(DataError):
        load_mnist(mnist_path, 17)


def test_idx_round_trip_and_gzip(tmp_path, rng):
    raw = rng.integers(0, 256, size=(3, 5, 4), dtype=np.uint8)
    path = tmp_path / "x-idx3-ubyte"
    write_idx_images(path, raw)
    got = load_mnist(path)
    assert np.array_equal(np.stack([g.pixels for g in got.images]) * 255, raw)
    gz = tmp_path / "x.gz"
    gz.write_bytes(gzip.compress(path.read_bytes()))
    assert load_mnist(gz).count == 3


def test_label_file_rejected(tmp_path):
    path = tmp_path / "labels"
    path.write_bytes((2049).to_bytes(4, "big") + (1).to_bytes(4, "big") + bytes(8) + b"\x07")
    with pytest.raises(DataError, match="not an image file"):
        load_mnist(path)


def test_truncated_and_missing(tmp_path, mnist_path):
    short = tmp_path / "short"
    short.write_bytes(mnist_path.read_bytes()[:1000])
    with pytest.raises(DataError, match="truncated"):
        load_mnist(short)
    with pytest.raises(DataError):
        load_mnist(tmp_path / "nope")
    (tmp_path / "tiny").write_bytes(b"\x00\x00")
    with pytest.raises(DataError):
        load_mnist(tmp_path / "tiny")


def test_filter_vector(tmp_path, caplog):
    p = tmp_path / "f.txt"
    p.write_text("\n".join(["0.25"] * 16) + "\n")
    assert np.allclose(load_filter_vector(p), 0.25)
    p.write_text("\n".join(["1"] * 16))
    with caplog.at_level(logging.WARNING):
        v = load_filter_vector(p)
    assert np.linalg.norm(v) == pytest.approx(1.0) and "renormalizing" in caplog.text
    p.write_text("1\n2\n")
    with pytest.raises(DataError):
        load_filter_vector(p)
    p.write_text("\n".join(["0"] * 16))
    with pytest.raises(DataError):
        load_filter_vector(p)


def test_csv_round_trip_exact(tmp_path, rng):
    grid = rng.normal(size=(4, 5))
    write_grid(tmp_path / "g.csv", grid)
    assert np.array_equal(read_grid(tmp_path / "g.csv"), grid)
    write_rows(tmp_path / "r.csv", ["a", "b", "c"], [[1, 0.1, "RY"], [True, 1e-300, "RZ"]])
    header, rows = read_rows(tmp_path / "r.csv")
    assert header == ["a", "b", "c"]
    assert rows == [["1", "0.10000000000000001", "RY"], ["1", "1e-300", "RZ"]]
    assert float(rows[0][1]) == 0.1


def test_fmt():
    assert fmt(np.int64(3)) == "3"
    assert fmt(np.bool_(False)) == "0"
    assert float(fmt(np.pi)) == np.pi


def test_config_defaults_and_validation():
    c = ExperimentConfig()
    assert c.num_qubits == 4 and c.shots == 10000
    assert ExperimentConfig(shots="exact").shots is None
    assert c.replace(shot_schedule=[10, "exact"]).schedule() == [10, None]
    for bad in (dict(experiment="x"), dict(shots=0), dict(window=(3, 3)), dict(stride=0), dict(workers=0)):
        with pytest.raises(ConfigError):
            ExperimentConfig(**bad)


def test_config_file(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("experiment: gradcheck\nshots: exact\nwindow: [2, 4]\nn_reps: 1\n")
    c = ExperimentConfig.from_file(p)
    assert (c.experiment, c.shots, c.window, c.num_qubits) == ("gradcheck", None, (2, 4), 3)
    p.write_text("bogus: 1\n")
    with pytest.raises(ConfigError, match="unknown"):
        ExperimentConfig.from_file(p)
    p.write_text("- a\n")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(p)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(tmp_path / "missing.yaml")

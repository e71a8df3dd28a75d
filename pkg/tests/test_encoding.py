import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qucnn.encoding import (
    ImageGrid,
    Patch,
    encode_patch,
    encode_vector,
    extract_patches,
    normalize_patch,
    output_shape,
    preparation_unitary,
)


def test_patch_count_mnist_shape():
    img = ImageGrid(np.zeros((28, 28)))
    patches = extract_patches(img, 4, 4, 1)
    assert len(patches) == 625
    assert (patches[0].origin_row, patches[0].origin_col) == (0, 0)
    assert (patches[-1].origin_row, patches[-1].origin_col) == (24, 24)


def test_patch_count_stride_four():
    img = ImageGrid(np.zeros((28, 28)))
    assert len(extract_patches(img, 4, 4, 4)) == 49


@settings(max_examples=50, deadline=None)
@given(
    h=st.integers(4, 20),
    w=st.integers(4, 20),
    stride=st.integers(1, 5),
    shape=st.sampled_from([(4, 4), (2, 2), (2, 4), (1, 2), (4, 2)]),
)
def test_patch_count_formula(h, w, stride, shape):
    hh, ww = shape
    patches = extract_patches(ImageGrid(np.zeros((h, w))), hh, ww, stride)
    rows, cols = output_shape(h, w, hh, ww, stride)
    assert len(patches) == rows * cols == ((h - hh) // stride + 1) * ((w - ww) // stride + 1)
    assert all(p.values.size == hh * ww for p in patches)


def test_patch_values_row_major():
    px = np.arange(36, dtype=float).reshape(6, 6) / 35
    p = extract_patches(ImageGrid(px), 4, 4, 2)[1]  # origin (0, 2)
    assert (p.origin_row, p.origin_col) == (0, 2)
    assert np.array_equal(p.values, px[0:4, 2:6].ravel())


@pytest.mark.parametrize(
    "shape,kwargs",
    [((3, 3), dict(hh=4, ww=4)), ((8, 8), dict(hh=3, ww=3)), ((8, 8), dict(hh=4, ww=4, stride=0))],
)
def test_extract_rejects_bad_windows(shape, kwargs):
    with pytest.raises(ValueError):
        extract_patches(ImageGrid(np.zeros(shape)), **kwargs)


def test_image_grid_validation():
    with pytest.raises(ValueError):
        ImageGrid(np.full((2, 2), 1.5))
    with pytest.raises(ValueError):
        ImageGrid(np.zeros(4))
    assert ImageGrid.from_bytes(np.array([[0, 255]], dtype=np.uint8)).pixels.tolist() == [[0.0, 1.0]]


def test_normalize_examples():
    vec, deg = normalize_patch(Patch(0, 0, np.full(16, 0.5)))
    assert not deg
    assert np.allclose(vec, 0.25, atol=1e-15)

    vec, deg = normalize_patch(Patch(0, 0, np.zeros(16)))
    assert deg
    assert vec[0] == 1 and not vec[1:].any()

    vals = np.zeros(16)
    vals[5] = 0.2
    vec, deg = normalize_patch(Patch(0, 0, vals))
    assert not deg and vec[5] == 1.0


def test_preparation_unitary_first_column(rng):
    worst = 0.0
    for _ in range(1000):
        t = rng.normal(size=16) + 1j * rng.normal(size=16)
        t /= np.linalg.norm(t)
        u = preparation_unitary(t).matrix
        worst = max(worst, np.max(np.abs(u[:, 0] - t)))
        assert np.linalg.norm(u.conj().T @ u - np.eye(16)) < 1e-10
    assert worst < 1e-10


@pytest.mark.parametrize("k", [0, 1, 7, 15])
def test_preparation_unitary_basis_targets(k):
    t = np.zeros(16)
    t[k] = 1
    assert np.allclose(preparation_unitary(t).matrix[:, 0], t, atol=1e-14)


def test_preparation_unitary_rejects():
    with pytest.raises(ValueError):
        preparation_unitary(np.ones(16))
    with pytest.raises(ValueError):
        preparation_unitary(np.ones(3) / np.sqrt(3))


def test_encoding_round_trip(rng):
    for _ in range(50):
        vals = rng.uniform(0, 1, size=16)
        enc = encode_patch(Patch(0, 0, vals))
        expected = vals / np.linalg.norm(vals)
        assert np.allclose(enc.state.amplitudes, expected, atol=1e-10)
        assert not enc.degenerate


def test_encoding_degenerate_patch():
    enc = encode_patch(Patch(3, 4, np.zeros(16)))
    assert enc.degenerate
    assert enc.state.amplitudes[0] == 1


def test_encode_vector_complex(rng):
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    v /= np.linalg.norm(v)
    assert np.allclose(encode_vector(v).amplitudes, v, atol=1e-12)

import numpy as np
import pytest

from qucnn.encoding import ImageGrid
from qucnn.oracle import (
    ClassicalFilter,
    classical_conv,
    compare_maps,
    degenerate_mask,
    normalized_similarity_map,
    pearson,
)


def test_all_ones_filter_sums_windows():
    img = ImageGrid(np.full((6, 6), 0.5))
    out = classical_conv(img, ClassicalFilter(4, 4, np.ones(16)))
    assert out.shape == (3, 3)
    assert np.allclose(out, 8.0)


def test_delta_filter_picks_pixel(rng):
    px = rng.uniform(0, 1, (7, 7))
    w = np.zeros(16)
    w[1 * 4 + 2] = 1.0
    out = classical_conv(ImageGrid(px), ClassicalFilter(4, 4, w), stride=1)
    assert np.array_equal(out, px[1:5, 2:6])


def test_classical_conv_matches_loops(rng):
    px = rng.uniform(0, 1, (9, 8))
    w = rng.normal(size=(2, 4))
    out = classical_conv(ImageGrid(px), ClassicalFilter.from_grid(w), stride=2)
    expected = np.array(
        [[np.sum(w * px[2 * i : 2 * i + 2, 2 * j : 2 * j + 4]) for j in range(3)] for i in range(4)]
    )
    assert np.allclose(out, expected, atol=1e-14)


def test_classical_conv_linear(rng):
    a, b = rng.uniform(0, 0.5, (6, 6)), rng.uniform(0, 0.5, (6, 6))
    f = ClassicalFilter(4, 4, rng.normal(size=16))
    lhs = classical_conv(ImageGrid(a + b), f)
    assert np.allclose(lhs, classical_conv(ImageGrid(a), f) + classical_conv(ImageGrid(b), f), atol=1e-13)


def test_normalized_similarity_examples():
    w = np.full(16, 0.25)
    img = np.zeros((5, 4))
    img[1:5, :] = 0.3
    sim = normalized_similarity_map(ImageGrid(img), ClassicalFilter(4, 4, w))
    # window 0 holds 12 equal pixels and 4 zeros: (12 * 0.25 / sqrt(12))^2 = 0.75
    assert sim[0, 0] == pytest.approx(0.75, abs=1e-14)
    assert sim[1, 0] == pytest.approx(1.0, abs=1e-14)


def test_normalized_similarity_degenerate_and_scale_invariance(rng):
    w = rng.normal(size=16)
    f = ClassicalFilter(4, 4, w).normalized()
    assert normalized_similarity_map(ImageGrid(np.zeros((4, 4))), f)[0, 0] == pytest.approx(f.weights[0] ** 2)
    px = rng.uniform(0, 0.5, (6, 6))
    a = normalized_similarity_map(ImageGrid(px), f)
    b = normalized_similarity_map(ImageGrid(2 * px), f)
    assert np.allclose(a, b, atol=1e-14)
    with pytest.raises(ValueError):
        normalized_similarity_map(ImageGrid(px), ClassicalFilter(4, 4, w * 3))


def test_degenerate_mask():
    px = np.zeros((5, 5))
    px[4, 4] = 1
    mask = degenerate_mask(ImageGrid(px), 4, 4)
    assert mask.tolist() == [[True, True], [True, False]]


def test_filter_weight_count_checked():
    with pytest.raises(ValueError):
        ClassicalFilter(4, 4, np.ones(15))


def test_compare_maps():
    a = np.array([[0.0, 1.0], [2.0, 3.0]])
    stats = compare_maps(a, a + np.array([[0.0, 0.1], [0.0, -0.3]]))
    assert stats.max_abs_error == pytest.approx(0.3)
    assert stats.mean_abs_error == pytest.approx(0.1)
    assert compare_maps(a, 2 * a + 1).pearson_r == pytest.approx(1.0)
    assert compare_maps(a, -a).pearson_r == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        compare_maps(a, a.ravel())


def test_pearson_constant_maps():
    assert pearson(np.ones(4), np.ones(4)) == 1.0
    assert pearson(np.ones(4), np.arange(4)) == 0.0

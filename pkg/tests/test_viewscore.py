import math

import numpy as np
import pytest

from tspn import InsufficientCoverageError, Point3
from tspn.errors import ContractError
from tspn.viewscore import (
    DIAMETER_PROFILES,
    GrayImage,
    ObjectMask,
    OrientationHistogram,
    ViewSample,
    build_region_from_scores,
    edge_orientation_histogram,
    histogram_entropy,
    read_mask_pgm,
    read_pgm,
    read_score_csv,
    region_from_profile,
    viewing_score,
    write_pgm,
    write_score_csv,
)

from oracles import brute_farthest_pair, manual_sobel


def full_mask(img):
    return ObjectMask.from_array(np.ones((img.height, img.width), dtype=bool))


def uniform_orientation_image():
    """360 isolated gradient cells, one per one-degree orientation bin.

    Each 5x5 cell holds a 3x3 linear ramp whose central Sobel response is
    (8a, 8b) with (a, b) on a circle, so with a high edge fraction exactly
    one edge pixel lands in every bin.
    """
    rows, cols = 15, 24
    img = np.full((rows * 5, cols * 5), 128.0)
    s = 10.0
    for k in range(360):
        rb, cb = divmod(k, cols)
        r0, c0 = rb * 5 + 2, cb * 5 + 2
        theta = math.radians(k + 0.5)
        a, b = s * math.cos(theta), s * math.sin(theta)
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                img[r0 + dr, c0 + dc] = 128.0 + a * dc + b * dr
    return GrayImage.from_array(img)


# ------------------------------------------------------------------ histogram


def test_constant_image_has_no_edges():
    img = GrayImage.from_array(np.full((8, 8), 77.0))
    hist = edge_orientation_histogram(img)
    assert hist.total_edge_pixels == 0
    assert viewing_score(img, full_mask(img)) == 0.0


def test_vertical_step_edge_mass_at_0_and_180():
    arr = np.zeros((5, 5))
    arr[:, 2:] = 200.0
    hist = edge_orientation_histogram(GrayImage.from_array(arr))
    assert hist.total_edge_pixels > 0
    assert hist.bins[0] == hist.total_edge_pixels

    flipped = edge_orientation_histogram(GrayImage.from_array(arr[:, ::-1].copy()))
    assert flipped.bins[180] == flipped.total_edge_pixels


def test_diagonal_fixture_matches_hand_computed_sobel():
    # I[r, c] = 100 where r + c >= 5: a 45-degree step across the image.
    arr = np.zeros((5, 5))
    for r in range(5):
        for c in range(5):
            if r + c >= 5:
                arr[r, c] = 100.0
    # Hand-computed 3x3 Sobel responses for the nine interior pixels.
    expected = {
        (1, 1): (0.0, 0.0),
        (1, 2): (100.0, 100.0),
        (1, 3): (300.0, 300.0),
        (2, 1): (100.0, 100.0),
        (2, 2): (300.0, 300.0),
        (2, 3): (300.0, 300.0),
        (3, 1): (300.0, 300.0),
        (3, 2): (300.0, 300.0),
        (3, 3): (100.0, 100.0),
    }
    for r, c, gx, gy in manual_sobel(arr):
        assert (gx, gy) == expected[(r, c)]

    hist = edge_orientation_histogram(GrayImage.from_array(arr), edge_fraction=0.1)
    want = np.zeros(360, dtype=int)
    want[45] = 8  # every nonzero-gradient pixel points along the diagonal
    assert hist.total_edge_pixels == 8
    assert np.array_equal(hist.bins, want)


def test_uniform_orientation_image_fills_every_bin_once():
    img = uniform_orientation_image()
    hist = edge_orientation_histogram(img, edge_fraction=0.99)
    assert hist.total_edge_pixels == 360
    assert np.array_equal(hist.bins, np.ones(360, dtype=int))
    assert math.isclose(histogram_entropy(hist), math.log(360.0), rel_tol=1e-12)


def test_entropy_bounds():
    rng = np.random.default_rng(0)
    for _ in range(10):
        img = GrayImage.from_array(rng.uniform(0, 255, size=(16, 16)))
        h = histogram_entropy(edge_orientation_histogram(img))
        assert 0.0 <= h <= math.log(360.0) + 1e-12


# ------------------------------------------------------------------ score


def test_score_uniform_orientations_full_mask_is_ln_360():
    img = uniform_orientation_image()
    s = viewing_score(img, full_mask(img), edge_fraction=0.99)
    assert abs(s - math.log(360.0)) < 1e-9


def test_score_halves_with_half_mask():
    img = uniform_orientation_image()
    bits = np.zeros((img.height, img.width), dtype=bool)
    bits[:, : img.width // 2] = True
    assert bits.sum() * 2 == img.width * img.height
    s_full = viewing_score(img, full_mask(img), edge_fraction=0.99)
    s_half = viewing_score(img, ObjectMask.from_array(bits), edge_fraction=0.99)
    assert abs(s_half - 0.5 * s_full) <= 1e-12 * s_full


def test_score_zero_for_empty_mask():
    rng = np.random.default_rng(1)
    img = GrayImage.from_array(rng.uniform(0, 255, size=(10, 10)))
    mask = ObjectMask.from_array(np.zeros((10, 10), dtype=bool))
    assert viewing_score(img, mask) == 0.0


def test_score_dimension_mismatch_rejected():
    img = GrayImage.from_array(np.zeros((5, 5)))
    mask = ObjectMask.from_array(np.ones((5, 6), dtype=bool))
    with pytest.raises(ContractError):
        viewing_score(img, mask)


def test_score_invariant_under_intensity_inversion():
    rng = np.random.default_rng(7)
    for _ in range(5):
        arr = rng.uniform(0, 255, size=(20, 20))
        img = GrayImage.from_array(arr)
        inv = GrayImage.from_array(255.0 - arr)
        h1 = edge_orientation_histogram(img)
        h2 = edge_orientation_histogram(inv)
        assert np.array_equal(h2.bins, np.roll(h1.bins, 180))
        assert math.isclose(histogram_entropy(h1), histogram_entropy(h2), rel_tol=1e-12)
        m = full_mask(img)
        assert math.isclose(viewing_score(img, m), viewing_score(inv, m), rel_tol=1e-12)


def test_score_monotone_in_mask():
    rng = np.random.default_rng(9)
    arr = rng.uniform(0, 255, size=(12, 12))
    img = GrayImage.from_array(arr)
    big = np.zeros((12, 12), dtype=bool)
    big[2:10, 2:10] = True
    small = np.zeros((12, 12), dtype=bool)
    small[4:8, 4:8] = True
    assert viewing_score(img, ObjectMask.from_array(small)) <= viewing_score(
        img, ObjectMask.from_array(big)
    )


# ------------------------------------------------------------------ regions


def shell_grid_samples(r=5.0, score=1.0):
    out = []
    for az_step in range(12):
        for el_step in range(-4, 5):
            out.append(
                ViewSample(
                    azimuth=az_step * math.pi / 6.0,
                    elevation=el_step * math.pi / 10.0,
                    distance=r,
                    score=score,
                )
            )
    return out


def test_region_from_uniform_shell():
    region = build_region_from_scores(Point3(1, 2, 3), shell_grid_samples(r=5.0), threshold=0.3)
    assert math.isclose(region.d_max, 10.0, rel_tol=1e-9)
    assert math.isclose(region.d_min, 10.0, rel_tol=1e-9)


def test_region_threshold_filters_band():
    samples = []
    for az_step in range(16):
        az = az_step * math.pi / 8.0
        for el_step in range(-3, 4):
            el = el_step * math.pi / 8.0
            low_band = 0.0 <= az < math.pi / 2.0
            samples.append(
                ViewSample(azimuth=az, elevation=el, distance=4.0, score=0.1 if low_band else 0.9)
            )
    region = build_region_from_scores(Point3(0, 0, 0), samples, threshold=0.3)
    pts = region.shape.points
    az = np.arctan2(pts[:, 1], pts[:, 0]) % (2 * math.pi)
    assert not np.any((az >= 1e-9) & (az < math.pi / 2.0 - 1e-9))
    i, j, d = brute_farthest_pair(pts)
    assert math.isclose(region.d_max, d, rel_tol=1e-12)


def test_region_requires_enough_survivors():
    samples = shell_grid_samples(score=0.1)
    with pytest.raises(InsufficientCoverageError):
        build_region_from_scores(Point3(0, 0, 0), samples, threshold=0.3)


def test_raising_threshold_never_grows_d_max():
    rng = np.random.default_rng(21)
    samples = []
    for az_step in range(18):
        for el_step in range(-4, 5):
            samples.append(
                ViewSample(
                    azimuth=az_step * math.pi / 9.0,
                    elevation=el_step * math.pi / 10.0,
                    distance=float(rng.uniform(3.0, 5.0)),
                    score=float(rng.uniform(0.0, 1.0)),
                )
            )
    prev = None
    for thr in (0.1, 0.2, 0.3, 0.4):
        region = build_region_from_scores(Point3(0, 0, 0), samples, threshold=thr)
        if prev is not None:
            assert region.d_max <= prev + 1e-12
        prev = region.d_max


def test_profile_defaults_match_table():
    region = region_from_profile(Point3(0, 0, 0), "car")
    assert region.d_max == 8.2 and region.d_min == 5.4
    assert DIAMETER_PROFILES["bus"].d_max == 17.3
    assert DIAMETER_PROFILES["bus"].d_min == 13.4
    assert DIAMETER_PROFILES["piano"].d_max == 6.2
    assert DIAMETER_PROFILES["table"].d_min == 3.3
    assert DIAMETER_PROFILES["chair"].unit_distance == 0.5
    assert DIAMETER_PROFILES["bed"].d_max == 5.2


# ------------------------------------------------------------------ file formats


def test_pgm_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    arr = rng.integers(0, 256, size=(9, 7)).astype(float)
    img = GrayImage.from_array(arr)
    path = tmp_path / "img.pgm"
    write_pgm(path, img)
    back = read_pgm(path)
    assert back.width == 7 and back.height == 9
    assert np.array_equal(back.pixels, arr)
    mask = read_mask_pgm(path)
    assert np.array_equal(mask.bits, arr > 0)


def test_score_csv_roundtrip(tmp_path):
    samples = [
        ViewSample(azimuth=0.1, elevation=-0.2, distance=3.5, score=0.42),
        ViewSample(azimuth=2.0, elevation=0.7, distance=5.0, score=0.0),
    ]
    path = tmp_path / "scores.csv"
    write_score_csv(path, samples)
    back = read_score_csv(path)
    assert back == samples


def test_histogram_type_validation():
    with pytest.raises(ContractError):
        OrientationHistogram(bins=np.zeros(10, dtype=int), total_edge_pixels=0)
    with pytest.raises(ContractError):
        OrientationHistogram(bins=np.ones(360, dtype=int), total_edge_pixels=5)


def test_single_orientation_image_scores_plus_zero():
    # one-bin distributions have zero entropy; make sure the sign is clean
    arr = np.zeros((16, 16))
    arr[:, 8:] = 200.0
    img = GrayImage.from_array(arr)
    s = viewing_score(img, full_mask(img))
    assert s == 0.0 and math.copysign(1.0, s) == 1.0

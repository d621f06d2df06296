"""Acceptance gate: one test per shipped guarantee, one printed line each.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
verdicts; every check compares against the independent oracles in
_oracles.py or against exact ground truth, never against the package's
own output.
"""

import time
from contextlib import contextmanager

import numpy as np

from leafscan.clustering import assign, kmeanspp_seed, lloyd, update_centers
from leafscan.histogram import Histogram, equalize
from leafscan.imaging import GrayImage, RgbImage, decode_image, encode_image
from leafscan.pipeline import PipelineConfig, emit_region_histograms, run_pipeline
from leafscan.synthetic import SyntheticLeafParams, generate_leaf
from leafscan.threshold import otsu_threshold

import _oracles
from _gen import (
    delta_mixture_histogram,
    gaussian_mixture_histogram,
    random_gray_array,
    random_rgb_array,
)


@contextmanager
def criterion(num: int, label: str):
    try:
        yield
    except BaseException:
        print(f"[{num}/7] {label}: FAIL")
        raise
    print(f"[{num}/7] {label}: PASS")


def test_c1_otsu_matches_exhaustive_scan():
    with criterion(1, "Otsu threshold matches the exhaustive scan on 1000 histograms"):
        rng = np.random.default_rng(101)
        start = time.perf_counter()
        for i in range(1000):
            if i % 2 == 0:
                counts = delta_mixture_histogram(rng)
            else:
                counts = gaussian_mixture_histogram(rng)
            res = otsu_threshold(Histogram(counts))
            raw = counts.tolist()
            t_ref, score_ref = _oracles.otsu_scan(raw)
            assert res.threshold == t_ref
            assert abs(res.between_class_variance - score_ref) <= 1e-12 * max(1.0, score_ref)

            sigma2 = _oracles.histogram_variance(raw)
            for sigma_w2, sigma_b2 in _oracles.otsu_scan_full(raw):
                assert abs(sigma_w2 + sigma_b2 - sigma2) <= 1e-9 * max(1.0, sigma2)
        elapsed = time.perf_counter() - start
        assert elapsed < 5.0, f"took {elapsed:.2f}s"


def test_c2_kmeans_descends_and_finds_small_optima():
    with criterion(2, "k-means objective descends; tiny instances hit the optimum"):
        start = time.perf_counter()

        # objective is non-increasing across update/assign rounds
        rng = np.random.default_rng(102)
        for trial in range(100):
            n = int(rng.integers(10, 201))
            k = int(rng.integers(2, 6))
            pts = rng.normal(size=(n, 3)) * 10
            step_rng = np.random.default_rng(5000 + trial)
            centers = kmeanspp_seed(pts, k, step_rng)
            labels = assign(pts, centers)
            tuples = [tuple(p) for p in pts]
            prev = _oracles.clustering_cost(tuples, labels.tolist(), [tuple(c) for c in centers])
            for _ in range(15):
                centers = update_centers(pts, labels, k)
                labels = assign(pts, centers)
                cur = _oracles.clustering_cost(
                    tuples, labels.tolist(), [tuple(c) for c in centers]
                )
                assert cur <= prev * (1 + 1e-12) + 1e-9
                prev = cur

        # best of 10 restarts vs the enumerated k=2 global optimum
        hits = 0
        for trial in range(100):
            inst_rng = np.random.default_rng(7000 + trial)
            n = int(inst_rng.integers(4, 13))
            pts = inst_rng.normal(size=(n, 2)) * 5
            best = min(
                lloyd(pts, 2, np.random.default_rng(90_000 + 10 * trial + r)).objective
                for r in range(10)
            )
            opt = _oracles.best_two_partition_fast(pts)
            if best <= opt * (1 + 1e-9) + 1e-9:
                hits += 1
        assert hits >= 95, f"only {hits}/100 matched the enumerated optimum"

        elapsed = time.perf_counter() - start
        assert elapsed < 10.0, f"took {elapsed:.2f}s"


def test_c3_equalization_exact_and_monotone():
    with criterion(3, "equalization worked example is bit-exact and remaps monotonically"):
        img = GrayImage(np.array([[0, 64], [128, 255]], dtype=np.uint8))
        assert equalize(img).pixels.tolist() == [[0, 85], [170, 255]]

        ramp = np.arange(256, dtype=np.uint8).reshape(16, 16)
        assert np.array_equal(equalize(GrayImage(ramp)).pixels, ramp)

        rng = np.random.default_rng(103)
        for _ in range(100):
            arr = random_gray_array(rng, max_side=32)
            out = equalize(GrayImage(arr)).pixels
            levels = np.unique(arr)
            mapped = np.array([out[arr == v][0] for v in levels], dtype=np.int64)
            for v, m in zip(levels, mapped):
                assert (out[arr == v] == m).all()
            assert (np.diff(mapped) >= 0).all()


def test_c4_synthetic_leaf_end_to_end():
    with criterion(4, "synthetic leaves score within 0.02 of ground truth in under 1s"):
        config = PipelineConfig()

        image, disk, lesion = generate_leaf(SyntheticLeafParams())
        start = time.perf_counter()
        res = run_pipeline(image, config)
        elapsed = time.perf_counter() - start
        truth = lesion.count / disk.count
        assert abs(res.fault_ratio - truth) <= 0.02
        assert not (res.faulty_mask.bits & ~disk.bits).any()
        assert elapsed < 1.0, f"took {elapsed:.2f}s"

        image, _, _ = generate_leaf(SyntheticLeafParams(lesion_fraction=0.0))
        start = time.perf_counter()
        res = run_pipeline(image, config)
        elapsed = time.perf_counter() - start
        assert res.fault_ratio <= 0.02
        assert elapsed < 1.0, f"took {elapsed:.2f}s"


CORPUS = (
    SyntheticLeafParams(),
    SyntheticLeafParams(size=128),
    SyntheticLeafParams(size=96, lesion_fraction=0.25, lesion_color=(60, 40, 30)),
    SyntheticLeafParams(noise=6, seed=4),
    SyntheticLeafParams(lesion_fraction=0.0),
    SyntheticLeafParams(size=96, disk_fraction=0.45),
    SyntheticLeafParams(
        size=96,
        bg_color=(20, 20, 20),
        leaf_color=(200, 200, 200),
        leaf_color_inner=(190, 190, 190),
    ),
)


def test_c5_region_histograms_conserve():
    with criterion(5, "region histograms sum exactly and cover every frame pixel"):
        for params in CORPUS:
            image, _, _ = generate_leaf(params)
            res = run_pipeline(image, PipelineConfig())
            sample, faulty, normal = emit_region_histograms(image, res)
            assert np.array_equal(sample.counts, faulty.counts + normal.counts)
            covered = res.background_mask.count + faulty.total + normal.total
            assert covered == image.width * image.height


def test_c6_analysis_runs_are_byte_identical(tmp_path):
    with criterion(6, "repeated runs with the same seed are byte-identical"):
        from leafscan.cli import main

        image, _, _ = generate_leaf(SyntheticLeafParams(size=128))
        src = tmp_path / "leaf.ppm"
        src.write_bytes(encode_image(image, "p6"))
        for out in ("a", "b"):
            code = main(
                ["analyze", str(src), "--out", str(tmp_path / out), "--seed", "7"]
            )
            assert code == 0
        names = [
            "leaf.report.json",
            "leaf.faulty.pgm",
            "leaf.normal.pgm",
            "leaf.overlay.ppm",
            "leaf.sample.hist.csv",
            "leaf.faulty.hist.csv",
            "leaf.normal.hist.csv",
        ]
        for name in names:
            a = (tmp_path / "a" / name).read_bytes()
            b = (tmp_path / "b" / name).read_bytes()
            assert a == b, f"{name} differs between runs"


def test_c7_codec_round_trips():
    with criterion(7, "PPM/PGM encode then decode reproduces 50 random images"):
        rng = np.random.default_rng(107)
        for _ in range(50):
            img = RgbImage(random_rgb_array(rng, max_side=32))
            for fmt in ("p6", "p3"):
                back = decode_image(encode_image(img, fmt))
                assert np.array_equal(back.pixels, img.pixels)
        for _ in range(50):
            gray = GrayImage(random_gray_array(rng, max_side=32))
            expected = np.repeat(gray.pixels[:, :, None], 3, axis=2)
            for fmt in ("p5", "p2"):
                back = decode_image(encode_image(gray, fmt))
                assert np.array_equal(back.pixels, expected)

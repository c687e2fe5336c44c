import numpy as np
import pytest
from hypothesis import given, strategies as st

from comstab import grader
from comstab.errors import ConfigError, InsufficientDataError, ParameterError
from comstab.grader import (StabilitySample, TABLE1, classify, kmeans_train, table1_model,
                            weighted_distance)


def blobs(axis="X", n=10_000, spread=0.03, seed=0):
    rng = np.random.default_rng(seed)
    c = np.array(TABLE1[axis])
    idx = rng.integers(0, 5, n)
    return np.abs(c[idx] * (1 + spread * rng.standard_normal((n, 2))))


def test_table1_extremes():
    m = table1_model()
    assert classify((0.0079, 0.0195), m) == 1
    assert classify((0.1149, 0.0586), m) == 5
    assert classify(StabilitySample(-0.1149, -0.0586, "X"), m) == 5


@pytest.mark.parametrize("axis", ["X", "Y"])
def test_each_centre_classifies_to_its_level(axis):
    m = table1_model()
    for i, c in enumerate(TABLE1[axis]):
        assert classify(c, m, axis) == i + 1


def test_weighted_distance():
    assert weighted_distance((1.0, 0.0), (0.0, 0.0)) == pytest.approx(np.sqrt(0.7))
    assert weighted_distance((0.0, 1.0), (0.0, 0.0)) == pytest.approx(np.sqrt(0.3))


def test_sample_validation():
    with pytest.raises(ParameterError):
        StabilitySample(float("nan"), 0.0)
    with pytest.raises(ParameterError):
        StabilitySample(0.0, 0.0, "Z")


@pytest.mark.parametrize("axis", ["X", "Y"])
def test_kmeans_recovers_blob_centres(axis):
    res = kmeans_train(blobs(axis), seed=1)
    ref = np.array(TABLE1[axis])
    assert np.all(np.abs(res.centers - ref) / ref < 0.10)


def test_inertia_monotone_on_every_restart():
    res = kmeans_train(blobs(n=3000, spread=0.2), seed=4, n_init=6)
    assert len(res.histories) == 6
    for h in res.histories:
        assert np.all(np.diff(h) <= 1e-12 * max(h))
    assert res.inertia == min(h[-1] for h in res.histories)


def test_kmeans_deterministic_and_sorted():
    data = blobs(n=2000, spread=0.15)
    a = kmeans_train(data, seed=3)
    b = kmeans_train(data, seed=3)
    np.testing.assert_array_equal(a.centers, b.centers)
    assert np.all(np.diff(a.centers[:, 0]) >= 0)


def test_kmeans_accepts_samples():
    data = [StabilitySample(e, ec) for e, ec in blobs(n=200)]
    assert kmeans_train(data, n_init=2).centers.shape == (5, 2)


def test_kmeans_insufficient_data():
    with pytest.raises(InsufficientDataError):
        kmeans_train(np.zeros((3, 2)))
    with pytest.raises(InsufficientDataError):
        kmeans_train(np.tile([[0.1, 0.2], [0.3, 0.4]], (10, 1)))


def test_empty_cluster_reseeded():
    # two far outliers and a tight lump: some restarts start with empty clusters
    rng = np.random.default_rng(0)
    pts = np.vstack([rng.normal(0.01, 1e-4, (100, 2)), [[1.0, 1.0], [2.0, 2.0], [3.0, 3.0], [4.0, 4.0]]])
    res = kmeans_train(np.abs(pts), seed=0, n_init=3)
    assert len(np.unique(res.centers, axis=0)) == 5


def test_model_validation():
    with pytest.raises(ParameterError):
        grader.ClusterModel({"X": np.zeros((4, 2))})
    with pytest.raises(ParameterError):
        grader.ClusterModel({"X": np.array(TABLE1["X"])[::-1]})


def test_model_text_roundtrip(tmp_path):
    m = table1_model()
    path = tmp_path / "model.txt"
    grader.save_model(m, path)
    back = grader.load_model(path)
    for axis in grader.AXES:
        np.testing.assert_array_equal(back.axis(axis), m.axis(axis))


@pytest.mark.parametrize("text,line", [
    ("L1 0 0\n", 1),
    ("[X]\nL1 0 0 0\n", 2),
    ("[Q]\n", 1),
    ("[X]\nL1 a b\n", 2),
    ("[X]\nL1 0 0\nL1 0 0\n", 3),
    ("[X]\n[X]\n", 2),
])
def test_model_parse_errors(text, line):
    with pytest.raises(ConfigError) as exc:
        grader.loads_model(text)
    assert exc.value.line == line


def test_model_missing_levels():
    with pytest.raises(ConfigError):
        grader.loads_model("[X]\nL1 0 0\n")
    with pytest.raises(ConfigError):
        grader.loads_model("# nothing\n")


def test_dataset_generation_cycles_noise_levels():
    seen = []

    def fake(noise, seed):
        seen.append(noise)
        rng = np.random.default_rng(seed)
        return {k: rng.normal(0, noise + 0.01, 100) for k in ("zmpe_x", "zmpec_x", "zmpe_y", "zmpec_y")}

    data = grader.generate_dataset(fake, [0.0, 0.2], 120, seed=1, decimate=2)
    assert data["X"].shape == (120, 2) and data["Y"].shape == (120, 2)
    assert seen == [0.0, 0.2, 0.0]
    assert len(grader.dataset_samples(data)) == 240
    with pytest.raises(InsufficientDataError):
        grader.generate_dataset(fake, [0.0], 10)


@given(st.floats(-0.3, 0.3), st.floats(-0.3, 0.3), st.sampled_from(grader.AXES))
def test_classification_uses_magnitudes(e, ec, axis):
    m = table1_model()
    lv = classify((e, ec), m, axis)
    assert 1 <= lv <= 5
    assert classify((-e, ec), m, axis) == lv == classify((e, -ec), m, axis)


def test_classify_many_matches_classify():
    rng = np.random.default_rng(5)
    pts = rng.uniform(-0.15, 0.15, (500, 2))
    m = table1_model()
    many = grader.classify_many(pts[:, 0], pts[:, 1], m.axis("Y"))
    assert many.tolist() == [classify(p, m, "Y") for p in pts]

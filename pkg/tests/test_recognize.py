import json

import numpy as np
import pytest

from qface.dataset import ColorImage, SyntheticSpec, TrainingSet, synth_dataset
from qface.errors import DataError
from qface.model import Mode, train
from qface.quaternion import QMatrix, Quaternion, fro_norm
from qface.recognize import (
    FeatureMatrix,
    Gallery,
    build_gallery,
    classify,
    d_norm_distance,
    evaluate,
    project,
    project_set,
)


def random_set(rng, sizes, m=4, n=5):
    labels = [f"k{a}" for a, size in enumerate(sizes) for _ in range(size)]
    return TrainingSet.from_matrices([QMatrix.random(m, n, rng) for _ in labels], labels)


def test_projection_matches_per_column_products(rng):
    t = random_set(rng, [2, 2])
    model = train(t, 3)
    f = QMatrix.random(4, 5, rng)
    p = project(f, model).P
    centered = f - model.mean
    for c in range(3):
        col = centered @ model.V.column(c)
        assert fro_norm(QMatrix(p.planes[:, :, c : c + 1]) - col) <= 1e-13 * fro_norm(col)
    feats = project_set(t, model)
    assert feats.shape == (4, 4, 4, 3)
    assert np.allclose(feats[:, 1], project(t.matrix(1), model).P.planes, rtol=0, atol=1e-13)


def test_projection_of_mean_is_zero(rng):
    model = train(random_set(rng, [3]), 2)
    assert fro_norm(project(model.mean, model).P) == 0.0


def test_projection_is_affine(rng):
    model = train(random_set(rng, [2, 2]), 3)
    a, b = QMatrix.random(4, 5, rng), QMatrix.random(4, 5, rng)
    pa, pb = project(a, model).P, project(b, model).P
    diff = (a - b) @ model.V
    assert fro_norm((pa - pb) - diff) <= 1e-12 * fro_norm(diff)


def test_projection_shape_check(rng):
    model = train(random_set(rng, [2, 2]), 2)
    with pytest.raises(DataError):
        project(QMatrix.random(3, 5, rng), model)


def test_d_norm_example():
    p = QMatrix.from_real(np.array([[1.0, 2.0]]))
    q = QMatrix.zeros(1, 2)
    # ||[1 2] diag(3, 1)|| = sqrt(9 + 4)
    assert np.isclose(d_norm_distance(p, q, [3.0, 1.0]), np.sqrt(13), rtol=1e-15)
    assert np.isclose(d_norm_distance(p, q, weighted=False), np.sqrt(5), rtol=1e-15)
    quat = QMatrix.from_quaternions([[Quaternion(0, 1, 1, 1)]])
    assert np.isclose(d_norm_distance(quat, QMatrix.zeros(1, 1), [2.0]), 2 * np.sqrt(3))
    with pytest.raises(DataError):
        d_norm_distance(p, QMatrix.zeros(2, 2), [1.0, 1.0])
    with pytest.raises(DataError):
        d_norm_distance(p, q, [1.0])


def test_d_norm_is_a_metric(rng):
    d = rng.uniform(0.1, 3.0, 3)
    for _ in range(50):
        a, b, c = (QMatrix.random(2, 3, rng) for _ in range(3))
        ab, bc, ac = d_norm_distance(a, b, d), d_norm_distance(b, c, d), d_norm_distance(a, c, d)
        assert d_norm_distance(a, a, d) == 0.0
        assert ab == d_norm_distance(b, a, d)
        assert ac <= ab + bc + 1e-12


def test_d_scaling_does_not_change_the_winner(rng):
    t = random_set(rng, [2, 2, 2])
    model = train(t, 3)
    gal = build_gallery(t, model)
    scaled = type(model)(model.mean, model.V, model.D * 7.5, model.W, model.mode, model.classes, model.spectrum)
    for _ in range(10):
        f = QMatrix.random(4, 5, rng)
        assert classify(f, model, gal).index == classify(f, scaled, gal).index


def test_classify_training_samples_find_themselves(rng):
    t = random_set(rng, [2, 2, 2])
    for mode in Mode:
        model = train(t, 5, mode)
        gal = build_gallery(t, model)
        for s in range(t.size):
            res = classify(t.matrix(s), model, gal)
            assert res.index == s and res.label == t.labels[s] and res.distance <= 1e-10


def test_classify_ties_go_to_first_entry(rng):
    t = random_set(rng, [2])
    model = train(t, 2)
    p = project(t.matrix(0), model)
    gal = Gallery.from_features([FeatureMatrix(p.P, "first"), FeatureMatrix(p.P, "second")])
    res = classify(t.matrix(0), model, gal)
    assert res.label == "first" and res.index == 0
    assert np.array_equal(res.distances, [0.0, 0.0])


def test_classify_accepts_feature_list_and_color_image(rng):
    train_set, tests = synth_dataset(SyntheticSpec(3, 3, 5, 4, noise=2.0, test=1, gap=60), 3)
    model = train(train_set, 3)
    feats = [project(train_set.matrix(s), model) for s in range(train_set.size)]
    feats = [FeatureMatrix(f.P, lab) for f, lab in zip(feats, train_set.labels)]
    img = ColorImage(tests.matrix(0))
    assert classify(img, model, feats).label == classify(img, model, build_gallery(train_set, model)).label


def test_classify_errors(rng):
    t = random_set(rng, [2, 2])
    model = train(t, 2)
    with pytest.raises(DataError):
        classify(t.matrix(0), model, [])
    with pytest.raises(DataError):
        classify(t.matrix(0), model, build_gallery(t, train(t, 3)))


def test_evaluate_report(rng):
    train_set, tests = synth_dataset(SyntheticSpec(3, 3, 6, 5, noise=1.0, test=2, gap=60), 4)
    model = train(train_set, 3)
    rep = evaluate(model, build_gallery(train_set, model), tests)
    assert rep.total == 6 and rep.accuracy == 1.0
    lines = rep.to_csv().splitlines()
    assert lines[0] == "query,predicted,actual,distance,correct"
    assert len(lines) == 7 and all(line.endswith(",1") for line in lines[1:])
    summary = json.loads(rep.to_json())
    assert summary["method"] == "sr-2dcpca" and summary["r"] == 3
    assert summary["confusion"] == {lab: {lab: 2} for lab in train_set.classes}

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qface import pnm
from qface.dataset import (
    ColorImage,
    SyntheticSpec,
    TrainingSet,
    load_manifest,
    synth_dataset,
    to_grayscale,
)
from qface.errors import DataError
from qface.quaternion import QMatrix, Quaternion


@settings(max_examples=40, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 6), st.integers(1, 6), st.just(3))))
def test_ppm_roundtrip_is_byte_identical(px):
    buf = pnm.encode(px)
    assert np.array_equal(pnm.decode(buf), px)
    assert pnm.encode(pnm.decode(buf)) == buf


def test_pgm_roundtrip():
    px = np.arange(12, dtype=np.uint8).reshape(3, 4)
    buf = pnm.encode(px)
    assert buf.startswith(b"P5\n4 3\n255\n")
    assert np.array_equal(pnm.decode(buf), px)


def test_single_red_pixel():
    rgb = pnm.decode(b"P6\n1 1\n255\n" + bytes([255, 0, 0]))
    img = ColorImage.from_rgb(rgb)
    assert img.pixels[0, 0] == Quaternion(0, 255, 0, 0)


def test_header_comments_and_whitespace():
    buf = b"P6 # comment\n2\t1\n# another\n255\n" + bytes(range(6))
    assert pnm.decode(buf).tolist() == [[[0, 1, 2], [3, 4, 5]]]


@pytest.mark.parametrize(
    "buf, msg",
    [
        (b"P3\n1 1\n255\n0 0 0", "magic"),
        (b"P6\n1 1\n65535\n" + bytes(6), "maxval"),
        (b"P6\n2 2\n255\n" + bytes(5), "truncated"),
        (b"P6\n1 1\n", "truncated"),
        (b"P6\nx 1\n255\n" + bytes(3), "malformed"),
    ],
)
def test_decode_errors(buf, msg):
    with pytest.raises(DataError, match=msg):
        pnm.decode(buf)


def test_color_image_validation():
    with pytest.raises(DataError, match="pure"):
        ColorImage(QMatrix.from_real(np.ones((2, 2))))
    with pytest.raises(DataError, match=r"\[0, 255\]"):
        ColorImage.from_rgb(np.full((1, 1, 3), 300.0))
    gray = ColorImage.from_rgb(np.array([[7.0]]))
    assert gray.pixels[0, 0] == Quaternion(0, 7, 7, 7)


def test_grayscale_luma():
    rgb = np.array([[[255, 0, 0], [255, 255, 255], [0, 0, 0]]], dtype=float)
    g = to_grayscale(ColorImage.from_rgb(rgb))
    assert np.allclose(g, [[76.245, 255.0, 0.0]], rtol=0, atol=1e-12)


def _write_manifest(tmp_path, rows, images):
    for name, rgb in images.items():
        pnm.write(tmp_path / name, rgb)
    text = "path,label,split\n" + "".join(",".join(r) + "\n" for r in rows)
    (tmp_path / "m.csv").write_text(text)
    return tmp_path / "m.csv"


def test_manifest_two_images(tmp_path):
    a = np.zeros((2, 3, 3), np.uint8)
    b = np.full((2, 3, 3), 9, np.uint8)
    m = _write_manifest(tmp_path, [("a.ppm", "alice", "train"), ("b.ppm", "bob", "train")],
                        {"a.ppm": a, "b.ppm": b})
    train, test = load_manifest(m)
    assert test is None
    assert train.size == 2 and train.image_shape == (2, 3)
    assert train.classes == ("alice", "bob")
    assert np.all(train.data[1:, 1] == 9) and np.all(train.data[0] == 0)


def test_manifest_relative_to_its_directory(tmp_path, monkeypatch):
    sub = tmp_path / "set"
    sub.mkdir()
    m = _write_manifest(sub, [("a.ppm", "x", "train"), ("a.ppm", "x", "test")],
                        {"a.ppm": np.ones((2, 2, 3), np.uint8)})
    monkeypatch.chdir(tmp_path)
    train, test = load_manifest("set/m.csv")
    assert train.size == 1 and test.size == 1


def test_manifest_inconsistent_dims(tmp_path):
    m = _write_manifest(tmp_path, [("a.ppm", "x", "train"), ("b.ppm", "y", "train")],
                        {"a.ppm": np.zeros((2, 3, 3), np.uint8), "b.ppm": np.zeros((3, 3, 3), np.uint8)})
    with pytest.raises(DataError, match="inconsistent dimensions"):
        load_manifest(m)


def test_manifest_errors(tmp_path):
    (tmp_path / "bad.csv").write_text("file,who\n")
    with pytest.raises(DataError, match="header"):
        load_manifest(tmp_path / "bad.csv")
    (tmp_path / "a.ppm").write_bytes(b"P6\n1 1\n15\n" + bytes(3))
    (tmp_path / "m.csv").write_text("path,label,split\na.ppm,x,train\n")
    with pytest.raises(DataError, match="maxval"):
        load_manifest(tmp_path / "m.csv")
    (tmp_path / "t.csv").write_text("path,label,split\na.ppm,x,test\n")
    with pytest.raises(DataError):
        load_manifest(tmp_path / "t.csv")
    with pytest.raises(DataError, match="cannot read"):
        load_manifest(tmp_path / "missing.csv")


def test_manifest_blank_labels_become_singletons(tmp_path):
    px = {"a.ppm": np.zeros((2, 2, 3), np.uint8), "b.ppm": np.ones((2, 2, 3), np.uint8)}
    m = _write_manifest(tmp_path, [("a.ppm", "", "train"), ("b.ppm", "", "train")], px)
    train, _ = load_manifest(m)
    assert len(train.classes) == 2


def test_training_set_class_structure():
    data = np.zeros((4, 5, 2, 2))
    t = TrainingSet(data, ("b", "a", "b", "c", "a"))
    assert t.classes == ("b", "a", "c")
    assert t.class_index.tolist() == [0, 1, 0, 2, 1]
    assert t.class_sizes.tolist() == [2, 2, 1]
    assert t.members("a").tolist() == [1, 4]
    assert t.subset([3, 0]).labels == ("c", "b")
    assert len(t.singletons().classes) == 5
    with pytest.raises(DataError):
        TrainingSet(data, ("a",) * 4)


def test_synthetic_spec_parse():
    s = SyntheticSpec.parse("classes=4,per=5,w=10,h=12,noise=3.5,gap=20")
    assert (s.classes, s.per, s.width, s.height, s.noise, s.gap) == (4, 5, 10, 12, 3.5, 20.0)
    with pytest.raises(DataError, match="missing"):
        SyntheticSpec.parse("classes=4,per=5")
    with pytest.raises(DataError, match="bad"):
        SyntheticSpec.parse("classes=4,per=5,w=10,h=12,noise=1,color=3")
    with pytest.raises(DataError):
        synth_dataset(SyntheticSpec(0, 5, 10, 12, 1.0), 0)


def test_synthetic_is_deterministic():
    spec = SyntheticSpec(3, 4, 6, 5, noise=5.0, test=1)
    a, at = synth_dataset(spec, 7)
    b, bt = synth_dataset(spec, 7)
    c, _ = synth_dataset(spec, 8)
    assert np.array_equal(a.data, b.data) and np.array_equal(at.data, bt.data)
    assert not np.array_equal(a.data, c.data)
    assert a.size == 12 and at.size == 3 and a.image_shape == (5, 6)
    assert np.all(a.data[0] == 0)
    assert a.data.min() >= 0 and a.data.max() <= 255


def test_synthetic_noise_zero_has_identical_class_members():
    t, _ = synth_dataset(SyntheticSpec(3, 4, 6, 5, noise=0.0, test=0), 1)
    for lab in t.classes:
        block = t.data[:, t.members(lab)]
        assert np.all(block == block[:, :1])

"""Labeled color image sets: manifest loading, grayscale conversion, synthetic data.

Images are encoded as pure quaternion matrices ``R i + G j + B k``.  Sets of
images are kept as one plane array of shape ``(4, l, m, n)`` so the model code
can center and project them in a single call.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from . import pnm
from .errors import DataError
from .quaternion import QMatrix

__all__ = [
    "ColorImage",
    "LabeledSample",
    "TrainingSet",
    "SyntheticSpec",
    "load_manifest",
    "to_grayscale",
    "synth_dataset",
]

LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class ColorImage:
    pixels: QMatrix

    def __post_init__(self):
        p = self.pixels.planes
        if np.any(p[0] != 0.0):
            raise DataError("color image must be a pure quaternion matrix")
        if p[1:].min(initial=0.0) < 0.0 or p[1:].max(initial=0.0) > 255.0:
            raise DataError("channel values must lie in [0, 255]")

    @classmethod
    def from_rgb(cls, rgb: np.ndarray) -> ColorImage:
        rgb = np.asarray(rgb, dtype=np.float64)
        if rgb.ndim == 2:
            rgb = np.repeat(rgb[:, :, None], 3, axis=2)
        if rgb.ndim != 3 or rgb.shape[2] != 3:
            raise DataError(f"expected an (h, w, 3) array, got {rgb.shape}")
        return cls(QMatrix.from_components(x=rgb[..., 0], y=rgb[..., 1], z=rgb[..., 2]))

    @classmethod
    def read(cls, path: str | os.PathLike) -> ColorImage:
        return cls.from_rgb(pnm.read(path))

    @property
    def height(self) -> int:
        return self.pixels.rows

    @property
    def width(self) -> int:
        return self.pixels.cols

    def rgb(self) -> np.ndarray:
        """Channel values as an (h, w, 3) float array."""
        return np.moveaxis(self.pixels.planes[1:], 0, -1).copy()

    def to_uint8(self) -> np.ndarray:
        return np.clip(np.rint(self.rgb()), 0, 255).astype(np.uint8)

    def write(self, path: str | os.PathLike) -> None:
        pnm.write(path, self.to_uint8())


def export_rgb(q: QMatrix) -> np.ndarray:
    """Clamp and round the imaginary planes of any quaternion matrix to uint8 RGB."""
    return np.clip(np.rint(np.moveaxis(q.planes[1:], 0, -1)), 0, 255).astype(np.uint8)


@dataclass(frozen=True)
class LabeledSample:
    image: ColorImage
    label: str
    source: str = ""

    def __post_init__(self):
        if not self.label:
            raise DataError("sample label must be non-empty")


@dataclass(frozen=True, eq=False)
class TrainingSet:
    """Labeled quaternion images of a common size.

    ``data`` has shape ``(4, l, m, n)``.  Classes are ordered by first
    appearance of their label.  The same container holds held-out test sets.
    """

    data: np.ndarray
    labels: tuple[str, ...]
    sources: tuple[str, ...] = field(default=())

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.ndim != 4 or data.shape[0] != 4:
            raise DataError(f"expected data of shape (4, l, m, n), got {data.shape}")
        if len(self.labels) != data.shape[1]:
            raise DataError("one label per sample is required")
        if any(not lab for lab in self.labels):
            raise DataError("sample label must be non-empty")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "labels", tuple(str(lab) for lab in self.labels))
        if not self.sources:
            object.__setattr__(self, "sources", tuple(f"#{s}" for s in range(data.shape[1])))
        elif len(self.sources) != data.shape[1]:
            raise DataError("one source per sample is required")

    @classmethod
    def from_samples(cls, samples: Sequence[LabeledSample]) -> TrainingSet:
        if not samples:
            raise DataError("empty sample list")
        shape = samples[0].image.pixels.shape
        for s in samples:
            if s.image.pixels.shape != shape:
                raise DataError(f"inconsistent dimensions: {s.source or s.label} is {s.image.pixels.shape}, expected {shape}")
        data = np.stack([s.image.pixels.planes for s in samples], axis=1)
        return cls(data, tuple(s.label for s in samples), tuple(s.source for s in samples))

    @classmethod
    def from_matrices(cls, mats: Sequence[QMatrix], labels: Sequence[str] | None = None) -> TrainingSet:
        """Build from arbitrary (not necessarily pure) quaternion matrices."""
        if not mats:
            raise DataError("empty sample list")
        if len({m.shape for m in mats}) != 1:
            raise DataError("inconsistent dimensions")
        if labels is None:
            labels = [str(s) for s in range(len(mats))]
        return cls(np.stack([m.planes for m in mats], axis=1), tuple(labels))

    # basic shape info -----------------------------------------------------

    def __len__(self) -> int:
        return self.data.shape[1]

    @property
    def size(self) -> int:
        return self.data.shape[1]

    @property
    def image_shape(self) -> tuple[int, int]:
        return self.data.shape[2], self.data.shape[3]

    def matrix(self, s: int) -> QMatrix:
        return QMatrix(self.data[:, s])

    def image(self, s: int) -> ColorImage:
        return ColorImage(self.matrix(s))

    def __iter__(self):
        return (self.matrix(s) for s in range(self.size))

    # class structure ------------------------------------------------------

    @cached_property
    def classes(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(self.labels))

    @cached_property
    def class_index(self) -> np.ndarray:
        """Class number (position in :attr:`classes`) of each sample."""
        lookup = {lab: a for a, lab in enumerate(self.classes)}
        return np.array([lookup[lab] for lab in self.labels], dtype=np.intp)

    @cached_property
    def class_sizes(self) -> np.ndarray:
        return np.bincount(self.class_index, minlength=len(self.classes))

    def members(self, label: str) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.labels) == label)

    def subset(self, idx) -> TrainingSet:
        idx = np.asarray(idx, dtype=np.intp)
        return TrainingSet(
            self.data[:, idx],
            tuple(self.labels[s] for s in idx),
            tuple(self.sources[s] for s in idx),
        )

    def relabel(self, labels: Sequence[str]) -> TrainingSet:
        return TrainingSet(self.data, tuple(labels), self.sources)

    def singletons(self) -> TrainingSet:
        """Same images, each sample its own class (the unlabeled case)."""
        return self.relabel([f"s{s}" for s in range(self.size)])


def load_manifest(path: str | os.PathLike) -> tuple[TrainingSet, TrainingSet | None]:
    """Read a ``path,label,split`` CSV manifest.

    Image paths are resolved relative to the manifest's directory.  Training
    rows may leave the label blank; each such image becomes its own class.
    Returns the training set and the held-out test set (``None`` if there are
    no test rows).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise DataError(f"cannot read manifest {path}: {exc.strerror}") from None
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames is None or not {"path", "label", "split"} <= set(reader.fieldnames):
        raise DataError("manifest header must be path,label,split")
    rows = {"train": [], "test": []}
    for lineno, row in enumerate(reader, start=2):
        split = (row["split"] or "").strip()
        if split not in rows:
            raise DataError(f"{path}:{lineno}: split must be train or test, got {split!r}")
        rel = (row["path"] or "").strip()
        label = (row["label"] or "").strip()
        if not rel:
            raise DataError(f"{path}:{lineno}: empty path")
        if not label:
            if split == "test":
                raise DataError(f"{path}:{lineno}: test rows need a label")
            # an unlabeled training image forms a class of its own
            label = f"_unlabeled{lineno}"
        img_path = path.parent / rel
        rows[split].append(LabeledSample(ColorImage.read(img_path), label, rel))
    if not rows["train"]:
        raise DataError("empty training split")
    train = TrainingSet.from_samples(rows["train"])
    test = TrainingSet.from_samples(rows["test"]) if rows["test"] else None
    if test is not None and test.image_shape != train.image_shape:
        raise DataError(f"inconsistent dimensions: test images are {test.image_shape}, training images {train.image_shape}")
    return train, test


def to_grayscale(img) -> np.ndarray:
    """BT.601 luma ``0.299 R + 0.587 G + 0.114 B``.

    Accepts a :class:`ColorImage`, a :class:`QMatrix`, or a plane array of
    shape ``(4, ..., m, n)``; the real plane is ignored.
    """
    if isinstance(img, ColorImage):
        img = img.pixels
    planes = img.planes if isinstance(img, QMatrix) else np.asarray(img)
    return np.tensordot(LUMA, planes[1:], axes=(0, 0))


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of the synthetic face-like benchmark.

    Each class gets a base image (a shared random template plus a per-class
    offset uniform in ``[-gap, gap]`` per channel), and each sample adds
    Gaussian channel noise with standard deviation ``noise * s_a``, where
    ``s_a = exp(hetero * u_a)`` and ``u_a`` is uniform in ``[-1, 1]``.
    Channel values are clipped to ``[0, 255]``.
    """

    classes: int
    per: int
    width: int
    height: int
    noise: float
    test: int = 2
    gap: float = 40.0
    hetero: float = 0.0

    _KEYS = {"classes": "classes", "per": "per", "w": "width", "h": "height", "noise": "noise",
             "test": "test", "gap": "gap", "hetero": "hetero"}

    @classmethod
    def parse(cls, text: str) -> SyntheticSpec:
        """Parse ``classes=K,per=N,w=W,h=H,noise=S[,test=T,gap=G,hetero=H]``."""
        kw = {}
        for item in filter(None, (p.strip() for p in text.split(","))):
            key, sep, val = item.partition("=")
            if not sep or key not in cls._KEYS:
                raise DataError(f"bad synthetic spec item {item!r}")
            name = cls._KEYS[key]
            kw[name] = float(val) if name in ("noise", "gap", "hetero") else int(val)
        missing = {"classes", "per", "width", "height", "noise"} - kw.keys()
        if missing:
            raise DataError(f"synthetic spec is missing {sorted(missing)}")
        return cls(**kw)

    def validate(self) -> None:
        if self.classes < 1 or self.per < 1 or self.test < 0:
            raise DataError("synthetic spec needs classes >= 1, per >= 1, test >= 0")
        if self.width < 2 or self.height < 2:
            raise DataError("synthetic images must be at least 2x2")
        if self.noise < 0 or self.gap < 0 or self.hetero < 0:
            raise DataError("noise, gap and hetero must be non-negative")


def synth_dataset(spec: SyntheticSpec, seed: int) -> tuple[TrainingSet, TrainingSet | None]:
    spec.validate()
    rng = np.random.default_rng(seed)
    shape = (spec.height, spec.width, 3)
    template = rng.uniform(64.0, 192.0, shape)
    train, test = [], []
    for a in range(spec.classes):
        base = template + rng.uniform(-spec.gap, spec.gap, shape)
        sigma = spec.noise * np.exp(spec.hetero * rng.uniform(-1.0, 1.0))
        label = f"c{a:02d}"
        for s in range(spec.per + spec.test):
            rgb = np.clip(base + sigma * rng.standard_normal(shape), 0.0, 255.0)
            dest, split = (train, "train") if s < spec.per else (test, "test")
            dest.append(LabeledSample(ColorImage.from_rgb(rgb), label, f"{label}/{split}{s:03d}"))
    return TrainingSet.from_samples(train), (TrainingSet.from_samples(test) if test else None)

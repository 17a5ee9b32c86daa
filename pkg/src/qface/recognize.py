"""Feature extraction and nearest-neighbour recognition."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import ColorImage, TrainingSet
from .errors import DataError
from .model import EigenfaceModel
from .quaternion import QMatrix, fro_norm, hmatmul

__all__ = [
    "FeatureMatrix",
    "Gallery",
    "RecognitionResult",
    "EvaluationReport",
    "project",
    "project_set",
    "build_gallery",
    "d_norm_distance",
    "classify",
    "evaluate",
]


@dataclass(frozen=True)
class FeatureMatrix:
    P: QMatrix
    label: str | None = None
    source: str | None = None


@dataclass(frozen=True, eq=False)
class Gallery:
    """Stacked training features, shape (4, l, m, r)."""

    features: np.ndarray
    labels: tuple[str, ...]
    sources: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.sources:
            object.__setattr__(self, "sources", tuple(f"#{s}" for s in range(len(self.labels))))

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, s: int) -> FeatureMatrix:
        return FeatureMatrix(QMatrix(self.features[:, s]), self.labels[s], self.sources[s])

    @classmethod
    def from_features(cls, feats: Sequence[FeatureMatrix]) -> Gallery:
        if not feats:
            raise DataError("empty gallery")
        return cls(np.stack([f.P.planes for f in feats], axis=1),
                   tuple(f.label or "" for f in feats), tuple(f.source or "" for f in feats))

    def truncate(self, r: int) -> Gallery:
        return Gallery(self.features[..., :r], self.labels, self.sources)


@dataclass(frozen=True)
class RecognitionResult:
    label: str
    index: int
    distance: float
    distances: np.ndarray = field(repr=False, compare=False)


def _as_matrix(img) -> QMatrix:
    return img.pixels if isinstance(img, ColorImage) else img


def project(img, model: EigenfaceModel) -> FeatureMatrix:
    """Feature matrix ``(F - mean) V``."""
    f = _as_matrix(img)
    if f.shape != model.image_shape:
        raise DataError(f"image is {f.shape}, model expects {model.image_shape}")
    return FeatureMatrix(QMatrix(hmatmul(f.planes - model.mean.planes, model.V.planes)))


def project_set(t: TrainingSet, model: EigenfaceModel) -> np.ndarray:
    """Features of every image in ``t`` at once, shape (4, l, m, r)."""
    if t.image_shape != model.image_shape:
        raise DataError(f"images are {t.image_shape}, model expects {model.image_shape}")
    return hmatmul(t.data - model.mean.planes[:, None], model.V.planes[:, None])


def build_gallery(t: TrainingSet, model: EigenfaceModel) -> Gallery:
    return Gallery(project_set(t, model), t.labels, t.sources)


def d_norm_distance(p, q, d=None, weighted: bool = True) -> float:
    """Frobenius distance ``||(P - Q) D||``, or ``||P - Q||`` when unweighted."""
    p = p.P if isinstance(p, FeatureMatrix) else p
    q = q.P if isinstance(q, FeatureMatrix) else q
    if p.shape != q.shape:
        raise DataError(f"feature shapes differ: {p.shape} vs {q.shape}")
    diff = p.planes - q.planes
    if weighted:
        d = np.asarray(d, dtype=np.float64).reshape(-1)
        if d.size != p.cols:
            raise DataError(f"D has {d.size} entries for {p.cols} feature columns")
        diff = diff * d
    return fro_norm(QMatrix(diff))


def _distances(p: np.ndarray, gallery: Gallery, d: np.ndarray | None) -> np.ndarray:
    diff = gallery.features - p[:, None]
    if d is not None:
        diff = diff * d
    return np.sqrt(np.einsum("clmr,clmr->l", diff, diff))


def classify(img, model: EigenfaceModel, gallery: Gallery | Sequence[FeatureMatrix]) -> RecognitionResult:
    """Nearest gallery entry; ties go to the lowest gallery index."""
    if not isinstance(gallery, Gallery):
        gallery = Gallery.from_features(gallery)
    if len(gallery) == 0:
        raise DataError("empty gallery")
    if gallery.features.shape[-1] != model.r:
        raise DataError(f"gallery has {gallery.features.shape[-1]} feature columns, model r={model.r}")
    p = project(img, model).P.planes
    dist = _distances(p, gallery, model.D if model.weighted else None)
    best = int(np.argmin(dist))
    return RecognitionResult(gallery.labels[best], best, float(dist[best]), dist)


@dataclass
class EvaluationReport:
    method: str
    r: int
    rows: list[tuple[str, str, str, float, bool]]
    latency_ms: float

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def correct(self) -> int:
        return sum(row[4] for row in self.rows)

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.rows else 0.0

    def confusion(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for _, pred, actual, _, _ in self.rows:
            out.setdefault(actual, {}).setdefault(pred, 0)
            out[actual][pred] += 1
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["query", "predicted", "actual", "distance", "correct"])
        for q, pred, actual, dist, ok in self.rows:
            w.writerow([q, pred, actual, repr(dist), int(ok)])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "method": self.method,
            "r": self.r,
            "total": self.total,
            "correct": self.correct,
            "accuracy": self.accuracy,
            "confusion": self.confusion(),
            "mean_latency_ms": self.latency_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def run_queries(classify_one, tests: TrainingSet, method: str, r: int) -> EvaluationReport:
    """Shared evaluation loop for any ``classify_one(s) -> RecognitionResult``."""
    rows = []
    t0 = time.perf_counter()
    for s in range(tests.size):
        res = classify_one(s)
        actual = tests.labels[s]
        rows.append((tests.sources[s], res.label, actual, res.distance, res.label == actual))
    elapsed = time.perf_counter() - t0
    return EvaluationReport(method, r, rows, 1000.0 * elapsed / max(tests.size, 1))


def evaluate(model: EigenfaceModel, gallery: Gallery, tests: TrainingSet) -> EvaluationReport:
    return run_queries(lambda s: classify(tests.matrix(s), model, gallery), tests, model.mode.value, model.r)

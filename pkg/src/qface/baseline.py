"""Grayscale 2DPCA baseline in real arithmetic."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import TrainingSet, to_grayscale
from .errors import DataError, RankDeficientError
from .qeig import RANK_TOL
from .recognize import EvaluationReport, RecognitionResult, run_queries

__all__ = ["RealEigenfaceModel", "RealGallery", "train_2dpca", "build_gallery_2dpca", "classify_2dpca", "evaluate_2dpca"]


@dataclass(frozen=True, eq=False)
class RealEigenfaceModel:
    mean: np.ndarray  # m x n
    V: np.ndarray  # n x r
    eigenvalues: np.ndarray  # r, descending
    spectrum: np.ndarray

    @property
    def r(self) -> int:
        return self.V.shape[1]

    def truncate(self, r: int) -> RealEigenfaceModel:
        return RealEigenfaceModel(self.mean, self.V[:, :r], self.eigenvalues[:r], self.spectrum)


@dataclass(frozen=True, eq=False)
class RealGallery:
    features: np.ndarray  # l x m x r
    labels: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.labels)

    def truncate(self, r: int) -> RealGallery:
        return RealGallery(self.features[..., :r], self.labels)


def _gray_stack(samples) -> np.ndarray:
    if isinstance(samples, TrainingSet):
        return to_grayscale(samples.data)
    arr = np.asarray(samples, dtype=np.float64)
    return arr[None] if arr.ndim == 2 else arr


def fit_2dpca(samples) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Mean, eigenvalues (descending) and eigenvectors of the 2DPCA covariance."""
    x = _gray_stack(samples)
    if x.shape[0] == 0:
        raise DataError("empty training set")
    mean = x.sum(axis=0) / x.shape[0]
    y = (x - mean).reshape(-1, x.shape[2])
    g = y.T @ y / x.shape[0]
    vals, vecs = np.linalg.eigh(0.5 * (g + g.T))
    order = np.argsort(-vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    # sign gauge: largest-magnitude entry of each eigenvector is positive
    piv = np.argmax(np.abs(vecs), axis=0)
    vecs = vecs * np.sign(vecs[piv, np.arange(vecs.shape[1])])
    return mean, vals, vecs


def train_2dpca(samples, r: int) -> RealEigenfaceModel:
    """2DPCA on grayscale images.

    ``samples`` is a :class:`TrainingSet` (converted with BT.601 luma) or a
    real array of shape (l, m, n).
    """
    mean, vals, vecs = fit_2dpca(samples)
    return model_2dpca(mean, vals, vecs, r)


def model_2dpca(mean, vals, vecs, r: int) -> RealEigenfaceModel:
    n = vals.size
    if not 1 <= r <= n:
        raise ValueError(f"r must lie in [1, {n}], got {r}")
    if vals[0] <= 0 or vals[r - 1] <= RANK_TOL * vals[0]:
        raise RankDeficientError(f"rank deficient: lambda_{r} = {vals[r - 1]:.3e}; reduce r")
    return RealEigenfaceModel(mean, vecs[:, :r].copy(), vals[:r].copy(), vals.copy())


def build_gallery_2dpca(t: TrainingSet, model: RealEigenfaceModel) -> RealGallery:
    return RealGallery((to_grayscale(t.data) - model.mean) @ model.V, t.labels)


def classify_2dpca(query, model: RealEigenfaceModel, gallery: RealGallery) -> RecognitionResult:
    """Unweighted Frobenius nearest neighbour; ``query`` is a grayscale matrix or a color image."""
    q = np.asarray(query if isinstance(query, np.ndarray) else to_grayscale(query), dtype=np.float64)
    if q.shape != model.mean.shape:
        raise DataError(f"query is {q.shape}, model expects {model.mean.shape}")
    if len(gallery) == 0:
        raise DataError("empty gallery")
    p = (q - model.mean) @ model.V
    diff = gallery.features - p
    dist = np.sqrt(np.einsum("lmr,lmr->l", diff, diff))
    best = int(np.argmin(dist))
    return RecognitionResult(gallery.labels[best], best, float(dist[best]), dist)


def evaluate_2dpca(model: RealEigenfaceModel, gallery: RealGallery, tests: TrainingSet) -> EvaluationReport:
    gray = to_grayscale(tests.data)
    return run_queries(lambda s: classify_2dpca(gray[s], model, gallery), tests, "2dpca", model.r)

"""Two-class 2-D point example comparing 2DCPCA and SR-2DCPCA directions.

Every point is a 1 x 2 real matrix pushed through the quaternion pipeline.
Each class is a Gaussian cloud with a random mean in ``[-2, 2]^2``, random
axis standard deviations in ``[0.5, 2]`` and a random orientation.  The
first ``train_per_class`` points of each class form the training set.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .dataset import TrainingSet
from .model import Mode, fit, model_from_fit
from .recognize import project_set

__all__ = ["ToyCase", "toy_points", "toy_case", "toy_table_csv"]


def toy_points(seed: int, per_class: int = 200, train_per_class: int = 100) -> tuple[TrainingSet, TrainingSet]:
    """Training set and the full point set (training points first within each class)."""
    rng = np.random.default_rng(seed)
    classes = []
    for _ in range(2):
        ang = rng.uniform(0.0, np.pi)
        s = rng.uniform(0.5, 2.0, 2)
        rot = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
        cov = rot @ np.diag(s**2) @ rot.T
        mu = rng.uniform(-2.0, 2.0, 2)
        classes.append(rng.multivariate_normal(mu, cov, per_class))

    def as_set(blocks):
        pts = np.concatenate(blocks)
        data = np.zeros((4, len(pts), 1, 2))
        data[0, :, 0, :] = pts
        labels = [lab for lab, b in zip(("x", "o"), blocks) for _ in range(len(b))]
        return TrainingSet(data, tuple(labels))

    return as_set([c[:train_per_class] for c in classes]), as_set(classes)


@dataclass
class ToyCase:
    seed: int
    weights: np.ndarray
    direction: dict[str, np.ndarray]
    train_var: dict[str, float]
    whole_var: dict[str, float]
    whole_var_quadratic: dict[str, float]


def _projected_variance(t: TrainingSet, model) -> float:
    y = project_set(t, model)[:, :, 0, 0]  # (4, l)
    y = y - y.mean(axis=1, keepdims=True)
    return float(np.sum(y * y) / y.shape[1])


def toy_case(seed: int, per_class: int = 200, train_per_class: int = 100) -> ToyCase:
    train, whole = toy_points(seed, per_class, train_per_class)
    pts = whole.data[0, :, 0, :]
    centered = pts - pts.mean(axis=0)
    cov_all = centered.T @ centered / len(pts)
    case = ToyCase(seed, np.zeros(2), {}, {}, {}, {})
    for mode in (Mode.CPCA, Mode.SR):
        rep, mean = fit(train, mode)
        model = model_from_fit(rep, mean, 1, mode, train.classes)
        v = model.V.planes[0, :, 0]
        case.direction[mode.value] = v
        case.train_var[mode.value] = _projected_variance(train, model)
        case.whole_var[mode.value] = _projected_variance(whole, model)
        case.whole_var_quadratic[mode.value] = float(v @ cov_all @ v)
        if mode is Mode.SR:
            case.weights = rep.weights.weights
    return case


def toy_table_csv(cases: list[ToyCase]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case", "seed", "w1", "w2",
                "dir_2dcpca_x", "dir_2dcpca_y", "dir_sr_x", "dir_sr_y",
                "train_var_2dcpca", "train_var_sr", "whole_var_2dcpca", "whole_var_sr"])
    for k, c in enumerate(cases, start=1):
        d0, d1 = c.direction["2dcpca"], c.direction["sr-2dcpca"]
        w.writerow([k, c.seed, f"{c.weights[0]:.4f}", f"{c.weights[1]:.4f}",
                    f"{d0[0]:.6f}", f"{d0[1]:.6f}", f"{d1[0]:.6f}", f"{d1[1]:.6f}",
                    f"{c.train_var['2dcpca']:.4f}", f"{c.train_var['sr-2dcpca']:.4f}",
                    f"{c.whole_var['2dcpca']:.4f}", f"{c.whole_var['sr-2dcpca']:.4f}"])
    return buf.getvalue()

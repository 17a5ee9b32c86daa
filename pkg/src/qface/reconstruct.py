"""Reconstruction from feature matrices and the reconstruction ratio."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .dataset import ColorImage, TrainingSet
from .errors import DataError
from .model import EigenfaceModel
from .quaternion import QMatrix, fro_norm, hconj_t, hmatmul
from .recognize import FeatureMatrix, project_set

__all__ = [
    "ReconstructionReport",
    "reconstruct",
    "reconstruction_ratio",
    "orthonormal_complement",
    "reconstruction_report",
]


def reconstruct(p, model: EigenfaceModel) -> QMatrix:
    """``P V^* + mean``; values are not clamped."""
    p = p.P if isinstance(p, FeatureMatrix) else p
    if p.shape != (model.image_shape[0], model.r):
        raise DataError(f"feature matrix is {p.shape}, model expects {(model.image_shape[0], model.r)}")
    return QMatrix(hmatmul(p.planes, hconj_t(model.V.planes)) + model.mean.planes)


def reconstruction_ratio(f, rec: QMatrix, mean: QMatrix | None = None) -> float:
    """``1 - ||R - F|| / ||F - mean||`` (Frobenius norms).

    With ``mean=None`` the image is taken as already centered.
    """
    f = f.pixels if isinstance(f, ColorImage) else f
    if f.shape != rec.shape:
        raise DataError(f"shape mismatch: {f.shape} vs {rec.shape}")
    denom = fro_norm(f if mean is None else f - mean)
    if denom == 0.0:
        raise DataError("reconstruction ratio is undefined for a zero-norm (centered) image")
    return 1.0 - fro_norm(rec - f) / denom


def orthonormal_complement(v: QMatrix, tol: float = 1e-10) -> QMatrix:
    """Columns completing ``V`` to a unitary quaternion matrix.

    Canonical basis vectors are orthogonalized against the current basis
    (modified Gram-Schmidt, two passes); the candidate with the largest
    residual is taken at each step.
    """
    n, r = v.shape
    if fro_norm(v.H @ v - QMatrix.identity(r)) > tol:
        raise ValueError("V must have orthonormal columns")
    basis = v.planes
    cands = QMatrix.identity(n).planes
    out = []
    for _ in range(n - r):
        resid = cands
        for _ in range(2):
            resid = resid - hmatmul(basis, hmatmul(hconj_t(basis), resid))
        norms = np.sqrt(np.einsum("cij,cij->j", resid, resid))
        best = int(np.argmax(norms))
        if norms[best] < tol:
            raise ArithmeticError("could not extend V to a unitary matrix")
        q = resid[:, :, best : best + 1] / norms[best]
        out.append(q)
        basis = np.concatenate([basis, q], axis=2)
        cands = np.delete(cands, best, axis=2)
    if not out:
        return QMatrix(np.zeros((4, n, 0)))
    return QMatrix(np.concatenate(out, axis=2))


@dataclass
class ReconstructionReport:
    r: int
    sources: tuple[str, ...]
    ratios: np.ndarray
    residuals: np.ndarray

    def rows(self):
        for s, src in enumerate(self.sources):
            yield src, self.r, float(self.ratios[s]), float(self.residuals[s])


def reconstruction_report(t: TrainingSet, model: EigenfaceModel) -> ReconstructionReport:
    """Per-sample ratios and residual norms ``||P_s V^* - (F_s - mean)||``.

    Samples equal to the mean get a ratio of NaN.
    """
    feats = project_set(t, model)
    centered = t.data - model.mean.planes[:, None]
    approx = hmatmul(feats, hconj_t(model.V.planes)[:, None])
    resid = np.sqrt(np.einsum("clmn,clmn->l", approx - centered, approx - centered))
    energy = np.sqrt(np.einsum("clmn,clmn->l", centered, centered))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(energy > 0, 1.0 - resid / energy, np.nan)
    return ReconstructionReport(model.r, t.sources, ratios, resid)


def ratio_table_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sample", "r", "ratio", "residual"])
    for rep in reports:
        for src, r, ratio, resid in rep.rows():
            w.writerow([src, r, repr(ratio), repr(resid)])
    return buf.getvalue()

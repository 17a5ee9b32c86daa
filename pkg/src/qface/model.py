"""Training: mean image, covariance matrices, relaxation weights, eigenfaces.

Two modes share one pipeline:

``Mode.SR``    sample-relaxed 2DCPCA.  Each class is weighted by a softmax of
               the largest eigenvalue of its within-class covariance, and the
               classifier uses eigenvalue-weighted (D-norm) distances.
``Mode.CPCA``  plain 2DCPCA.  The total covariance is used and distances are
               unweighted.
"""

from __future__ import annotations

import enum
import io
import json
import os
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import TrainingSet
from .errors import DataError
from .qeig import HermitianEigen, heig, top_r
from .quaternion import QMatrix, fro_norm, hconj_t, hmatmul

__all__ = [
    "Mode",
    "RelaxationVector",
    "EigenfaceModel",
    "CovarianceReport",
    "mean_image",
    "covariance_total",
    "within_class_covariance",
    "relaxation_vector",
    "covariance_relaxed",
    "covariance_report",
    "train",
    "fit",
    "total_scatter",
    "save_model",
    "load_model",
]


class Mode(str, enum.Enum):
    SR = "sr-2dcpca"
    CPCA = "2dcpca"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, eq=False)
class RelaxationVector:
    weights: np.ndarray

    def __len__(self) -> int:
        return self.weights.size

    def __getitem__(self, a: int) -> float:
        return float(self.weights[a])

    @classmethod
    def uniform(cls, x: int) -> RelaxationVector:
        return cls(np.full(x, 1.0 / x))


def _require_samples(t: TrainingSet) -> None:
    if t.size == 0:
        raise DataError("empty training set")


def _gram(dev: np.ndarray, weights: np.ndarray | None = None) -> np.ndarray:
    """``sum_s c_s D_s^* D_s`` for deviations ``dev`` of shape (4, l, m, n)."""
    _, l, m, n = dev.shape
    y = dev.reshape(4, l * m, n)
    yh = hconj_t(y)
    if weights is not None:
        yh = yh * np.repeat(weights, m)
    g = hmatmul(yh, y)
    # exact Hermitian symmetry; the product is Hermitian up to rounding
    return 0.5 * (g + hconj_t(g))


def mean_image(t: TrainingSet) -> QMatrix:
    _require_samples(t)
    return QMatrix(t.data.sum(axis=1) / t.size)


def covariance_total(t: TrainingSet) -> QMatrix:
    """``G_t = (1/l) sum_s (F_s - mean)^* (F_s - mean)``."""
    _require_samples(t)
    dev = t.data - mean_image(t).planes[:, None]
    return QMatrix(_gram(dev) / t.size)


def within_class_covariance(t: TrainingSet, label: str) -> QMatrix:
    """Scatter of one class around its own class mean."""
    idx = t.members(label)
    if idx.size == 0:
        raise DataError(f"no samples with label {label!r}")
    block = t.data[:, idx]
    dev = block - (block.sum(axis=1) / idx.size)[:, None]
    return QMatrix(_gram(dev) / idx.size)


def relaxation_vector(lmax) -> RelaxationVector:
    """Softmax of per-class maximal within-class eigenvalues.

    The exponent is shifted by its maximum, so large variances do not
    overflow.  Weights of classes far below the maximum may underflow to 0.
    """
    lam = np.asarray(lmax, dtype=np.float64)
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("need a non-empty 1-d list of eigenvalues")
    if np.any(lam < 0) or not np.all(np.isfinite(lam)):
        raise ValueError("within-class eigenvalues must be finite and non-negative")
    e = np.exp(lam - lam.max())
    return RelaxationVector(e / e.sum())


def covariance_relaxed(t: TrainingSet, w: RelaxationVector, *, normalize: bool = True) -> QMatrix:
    """Class-weighted covariance around the global mean.

    Sample ``s`` of class ``a`` contributes with weight ``w_a / l_a``.  Those
    weights sum to one, so with ``normalize=True`` (the default) the result is
    a proper weighted covariance and coincides with :func:`covariance_total`
    when every sample is its own class.  ``normalize=False`` adds the extra
    ``1/l`` factor of the unnormalized form; this only rescales the spectrum.
    """
    _require_samples(t)
    if len(w) != len(t.classes):
        raise ValueError(f"relaxation vector has {len(w)} weights for {len(t.classes)} classes")
    per_sample = w.weights[t.class_index] / t.class_sizes[t.class_index]
    if not normalize:
        per_sample = per_sample / t.size
    dev = t.data - mean_image(t).planes[:, None]
    return QMatrix(_gram(dev, per_sample))


@dataclass(frozen=True, eq=False)
class CovarianceReport:
    G: QMatrix
    within: tuple[QMatrix, ...]
    lmax: np.ndarray
    weights: RelaxationVector
    eigen: HermitianEigen

    def epsilon(self, r: int) -> float:
        """Variance of the projected training samples, ``sum_{s<=r} lambda_s(G)``."""
        return float(self.eigen.eigenvalues[:r].sum())


def covariance_report(t: TrainingSet, mode: Mode | str = Mode.SR) -> CovarianceReport:
    mode = Mode(mode)
    within = tuple(within_class_covariance(t, lab) for lab in t.classes)
    # a zero within-class scatter has lambda_max = 0 exactly; clip rounding noise
    lmax = np.array([max(heig(n).eigenvalues[0], 0.0) for n in within])
    if mode is Mode.SR:
        w = relaxation_vector(lmax)
        g = covariance_relaxed(t, w)
    else:
        w = RelaxationVector.uniform(len(t.classes))
        g = covariance_total(t)
    return CovarianceReport(g, within, lmax, w, heig(g))


@dataclass(frozen=True, eq=False)
class EigenfaceModel:
    mean: QMatrix
    V: QMatrix  # n x r
    D: np.ndarray  # r leading eigenvalues, descending
    W: RelaxationVector
    mode: Mode
    classes: tuple[str, ...] = ()
    spectrum: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def r(self) -> int:
        return self.V.cols

    @property
    def image_shape(self) -> tuple[int, int]:
        return self.mean.shape

    @property
    def weighted(self) -> bool:
        return self.mode is Mode.SR

    def truncate(self, r: int) -> EigenfaceModel:
        if not 1 <= r <= self.r:
            raise ValueError(f"cannot truncate a rank-{self.r} model to r={r}")
        return EigenfaceModel(self.mean, QMatrix(self.V.planes[:, :, :r]), self.D[:r].copy(),
                              self.W, self.mode, self.classes, self.spectrum)


def fit(t: TrainingSet, mode: Mode | str = Mode.SR) -> tuple[CovarianceReport, QMatrix]:
    """Covariances and full eigendecomposition; the expensive part of :func:`train`."""
    mode = Mode(mode)
    if mode is Mode.CPCA:
        # labels are ignored in plain 2DCPCA
        g = covariance_total(t)
        rep = CovarianceReport(g, (), np.zeros(0), RelaxationVector.uniform(len(t.classes)), heig(g))
    else:
        rep = covariance_report(t, mode)
    return rep, mean_image(t)


def model_from_fit(rep: CovarianceReport, mean: QMatrix, r: int, mode: Mode | str,
                   classes: tuple[str, ...] = ()) -> EigenfaceModel:
    v, d = top_r(rep.eigen, r)
    return EigenfaceModel(mean, v, d, rep.weights, Mode(mode), classes, rep.eigen.eigenvalues.copy())


def train(t: TrainingSet, r: int, mode: Mode | str = Mode.SR) -> EigenfaceModel:
    rep, mean = fit(t, mode)
    return model_from_fit(rep, mean, r, mode, t.classes)


def total_scatter(v: QMatrix, g: QMatrix, tol: float = 1e-10) -> float:
    """Generalized total scatter ``trace(V^* G V)`` for a frame with orthonormal columns."""
    if v.rows != g.rows or g.rows != g.cols:
        raise ValueError(f"shape mismatch: V is {v.shape}, G is {g.shape}")
    if fro_norm(v.H @ v - QMatrix.identity(v.cols)) > tol:
        raise ValueError("V must have orthonormal columns")
    m = (v.H @ g @ v).planes
    j = np.trace(m[0])
    residue = np.abs(np.trace(m[1:], axis1=1, axis2=2)).max()
    if residue > 1e-12 * max(fro_norm(g), 1.0):
        raise ArithmeticError(f"trace has an imaginary part of {residue:.3e}")
    return float(j)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

FORMAT = "qface-model/1"
_EPOCH = (1980, 1, 1, 0, 0, 0)


def _put(zf: zipfile.ZipFile, name: str, data: bytes) -> None:
    info = zipfile.ZipInfo(name, date_time=_EPOCH)
    info.compress_type = zipfile.ZIP_STORED
    info.external_attr = 0o644 << 16
    zf.writestr(info, data)


def _raw(planes: np.ndarray) -> bytes:
    return np.ascontiguousarray(planes, dtype="<f8").tobytes()


def _unraw(buf: bytes, shape) -> np.ndarray:
    return np.frombuffer(buf, dtype="<f8").reshape(shape).astype(np.float64)


def save_model(model, path: str | os.PathLike, gallery=None) -> None:
    """Write a model archive: ``header.json`` plus raw little-endian float64 planes.

    ``model`` is an :class:`EigenfaceModel` or a grayscale
    :class:`qface.baseline.RealEigenfaceModel` (stored in the real plane).
    ``gallery`` is an optional matching gallery stored with the model.  The
    archive goes to a temporary file first and is then renamed into place.
    """
    if isinstance(model, EigenfaceModel):
        mean, v = model.mean.planes, model.V.planes
        mode, w, d, classes = model.mode.value, model.W.weights, model.D, model.classes
    else:
        mean, v = _embed_real(model.mean), _embed_real(model.V)
        mode, w, d, classes = "2dpca", np.zeros(0), model.eigenvalues, ()
    m, n = mean.shape[1:]
    header = {
        "format": FORMAT,
        "mode": mode,
        "height": m,
        "width": n,
        "r": v.shape[2],
        "classes": list(classes),
        "W": [float(x) for x in w],
        "D": [float(x) for x in d],
        "spectrum": [float(x) for x in model.spectrum],
    }
    if gallery is not None:
        feats = gallery.features if gallery.features.ndim == 4 else _embed_real(gallery.features)
        header["gallery"] = {"labels": list(gallery.labels), "sources": list(getattr(gallery, "sources", ()))}
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w") as zf:
        _put(zf, "header.json", json.dumps(header, indent=1).encode())
        _put(zf, "mean.f64", _raw(mean))
        _put(zf, "V.f64", _raw(v))
        if gallery is not None:
            _put(zf, "gallery.f64", _raw(feats))
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(buf.getvalue())
    os.replace(tmp, path)


def _embed_real(a: np.ndarray) -> np.ndarray:
    out = np.zeros((4,) + a.shape)
    out[0] = a
    return out


def load_model(path: str | os.PathLike):
    """Read an archive written by :func:`save_model`; returns ``(model, gallery_or_None)``."""
    from .baseline import RealEigenfaceModel, RealGallery
    from .recognize import Gallery

    try:
        zf = zipfile.ZipFile(path)
    except (OSError, zipfile.BadZipFile) as exc:
        raise DataError(f"cannot open model {path}: {exc}") from None
    with zf:
        try:
            header = json.loads(zf.read("header.json"))
            if header.get("format") != FORMAT:
                raise DataError(f"{path}: not a {FORMAT} archive")
            m, n, r = header["height"], header["width"], header["r"]
            mean = _unraw(zf.read("mean.f64"), (4, m, n))
            v = _unraw(zf.read("V.f64"), (4, n, r))
            g = header.get("gallery")
            feats = _unraw(zf.read("gallery.f64"), (4, len(g["labels"]), m, r)) if g else None
        except (KeyError, ValueError) as exc:
            raise DataError(f"{path}: corrupt model archive ({exc})") from None
    spectrum = np.array(header["spectrum"], dtype=np.float64)
    d = np.array(header["D"], dtype=np.float64)
    if header["mode"] == "2dpca":
        model = RealEigenfaceModel(mean[0], v[0], d, spectrum)
        gallery = RealGallery(feats[0], tuple(g["labels"])) if g else None
        return model, gallery
    model = EigenfaceModel(
        QMatrix(mean), QMatrix(v), d,
        RelaxationVector(np.array(header["W"], dtype=np.float64)),
        Mode(header["mode"]), tuple(header["classes"]), spectrum,
    )
    gallery = Gallery(feats, tuple(g["labels"]), tuple(g["sources"])) if g else None
    return model, gallery

"""Quaternion two-dimensional color PCA (2DCPCA and its sample-relaxed variant)."""

from .baseline import build_gallery_2dpca, classify_2dpca, evaluate_2dpca, train_2dpca
from .dataset import ColorImage, LabeledSample, SyntheticSpec, TrainingSet, load_manifest, synth_dataset, to_grayscale
from .errors import DataError, NumericalError, RankDeficientError
from .model import EigenfaceModel, Mode, RelaxationVector, fit, load_model, model_from_fit, save_model, train
from .qeig import HermitianEigen, heig, top_r
from .quaternion import QMatrix, Quaternion, qmul, to_adjoint
from .recognize import Gallery, build_gallery, classify, evaluate, project
from .reconstruct import orthonormal_complement, reconstruct, reconstruction_ratio, reconstruction_report
from .toy import toy_case

__version__ = "0.1.0"

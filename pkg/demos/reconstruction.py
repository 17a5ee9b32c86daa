"""
Reconstructing images from a few eigenfaces
===========================================

Each training image F is projected to P = (F - mean) V and rebuilt as
P V* + mean.  The reconstruction ratio 1 - |R - F| / |F - mean| grows with
the number of eigenfaces r and reaches 1 when V is square.
"""

import sys
import tempfile
from pathlib import Path

import numpy as np

from qface import ColorImage, Mode, SyntheticSpec, fit, model_from_fit, reconstruct, reconstruction_report, synth_dataset
from qface.dataset import export_rgb
from qface.recognize import project

spec = SyntheticSpec(classes=4, per=5, width=10, height=12, noise=20.0, test=0, gap=20.0)
train_set, _ = synth_dataset(spec, seed=3)

# one decomposition serves every r
rep, mean = fit(train_set, Mode.SR)
for r in range(1, 11):
    model = model_from_fit(rep, mean, r, Mode.SR)
    ratios = reconstruction_report(train_set, model).ratios
    print(f"r={r:2d}  mean ratio {np.mean(ratios):.4f}  worst {np.min(ratios):.4f}")

# write the first image and its rank-3 reconstruction as PPM files
out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
model = model_from_fit(rep, mean, 3, Mode.SR)
f = train_set.matrix(0)
rec = reconstruct(project(f, model), model)
ColorImage(f).write(out / "original.ppm")
ColorImage.from_rgb(export_rgb(rec)).write(out / "rank3.ppm")
print("images written to", out)

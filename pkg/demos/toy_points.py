"""
Two point clouds and one projection direction
=============================================

Each point is a 1 x 2 matrix, so the eigenface is a single direction in the
plane.  2DCPCA picks the direction of largest training variance.
SR-2DCPCA weights each class by how spread out it is, which can favour the
direction along which the whole data set (training and unseen points)
varies most.
"""

from qface import toy_case

for seed in range(5):
    c = toy_case(seed)
    print(f"seed {seed}: weights {c.weights.round(3)}")
    for mode in ("2dcpca", "sr-2dcpca"):
        d = c.direction[mode]
        print(f"  {mode:9s} direction ({d[0]:+.3f}, {d[1]:+.3f})  "
              f"training variance {c.train_var[mode]:.3f}  whole-set variance {c.whole_var[mode]:.3f}")

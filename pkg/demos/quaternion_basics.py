"""
Quaternion matrices and their eigenvalues
=========================================

A color pixel (R, G, B) is stored as the pure quaternion R i + G j + B k.
Products are not commutative, and Hermitian quaternion matrices have real
eigenvalues and orthonormal quaternion eigenvectors.
"""

import numpy as np

from qface import QMatrix, Quaternion, heig, qmul, to_adjoint

i, j, k = Quaternion(0, 1), Quaternion(0, 0, 1), Quaternion(0, 0, 0, 1)
print("ij =", qmul(i, j), "  ji =", qmul(j, i))

# a small Hermitian matrix: real diagonal, conjugate pairs off the diagonal
g = QMatrix.from_quaternions([[2, i], [-i, 2]])
print("Hermitian:", g.is_hermitian())

# the complex adjoint repeats every quaternion eigenvalue twice
print("adjoint spectrum:", np.round(np.linalg.eigvalsh(to_adjoint(g)), 12))
e = heig(g)
print("quaternion spectrum:", e.eigenvalues)

# the eigenvector matrix is unitary
v = e.eigenvectors
print("|V*V - I| =", np.abs((v.H @ v - QMatrix.identity(2)).planes).max())

# larger random case
rng = np.random.default_rng(1)
x = QMatrix.random(6, 6, rng)
h = x @ x.H
e = heig(h)
print("random PSD spectrum:", np.round(e.eigenvalues, 4))

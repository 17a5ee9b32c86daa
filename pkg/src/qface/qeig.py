"""Eigendecomposition of Hermitian quaternion matrices.

The solver runs a dense complex Hermitian eigensolver on the 2n x 2n complex
adjoint.  Every quaternion eigenvalue shows up there twice; the two adjoint
eigenvectors of a pair map to quaternion vectors that differ by a right
quaternion factor, so one of them is kept per quaternion eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankDeficientError
from .quaternion import QMatrix, fro_norm, to_adjoint

__all__ = ["HermitianEigen", "heig", "top_r", "PAIR_TOL", "RANK_TOL"]

PAIR_TOL = 1e-9
HERMITIAN_TOL = 1e-10
RANK_TOL = 1e-12


@dataclass(frozen=True)
class HermitianEigen:
    eigenvalues: np.ndarray  # descending
    eigenvectors: QMatrix  # n x n, orthonormal columns

    def __len__(self) -> int:
        return self.eigenvalues.size


def _vectors_from_adjoint(u: np.ndarray) -> np.ndarray:
    """Columns of adjoint eigenvectors -> quaternion planes (4, n, k)."""
    n = u.shape[0] // 2
    a, b = u[:n], -u[n:].conj()
    return np.stack([a.real, a.imag, b.real, b.imag])


def _qdot(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Quaternion inner product ``u* v`` of two plane vectors (4, n) -> (4,)."""
    a, b = u[0] + 1j * u[1], u[2] + 1j * u[3]
    c, d = v[0] + 1j * v[1], v[2] + 1j * v[3]
    # u* = a^H - b^T j, so u* v = (a^H c + b^T conj(d)) + (a^H d - b^T conj(c)) j
    p = a.conj() @ c + b @ d.conj()
    q = a.conj() @ d - b @ c.conj()
    return np.array([p.real, p.imag, q.real, q.imag])


def _right_mul(v: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Plane vector (4, n) times quaternion scalar (4,) on the right."""
    w, x, y, z = v
    sw, sx, sy, sz = s
    return np.stack([
        w * sw - x * sx - y * sy - z * sz,
        w * sx + x * sw + y * sz - z * sy,
        w * sy - x * sz + y * sw + z * sx,
        w * sz + x * sy - y * sx + z * sw,
    ])


def _orthonormalize(cands: np.ndarray, k: int) -> list[np.ndarray]:
    """Pick ``k`` quaternion-orthonormal vectors from candidate columns.

    Modified Gram-Schmidt over the quaternions with column pivoting: at each
    step the candidate with the largest residual is accepted.
    """
    work = [cands[:, :, t].copy() for t in range(cands.shape[2])]
    chosen: list[np.ndarray] = []
    for _ in range(k):
        norms = [float(np.sqrt(np.sum(c * c))) for c in work]
        best = int(np.argmax(norms))
        if norms[best] < 1e-8:
            raise ArithmeticError("degenerate eigenvector cluster could not be orthonormalized")
        q = work.pop(best) / norms[best]
        chosen.append(q)
        work = [c - _right_mul(q, _qdot(q, c)) for c in work]
    return chosen


def _fix_gauge(v: np.ndarray) -> np.ndarray:
    mod2 = np.sum(v * v, axis=0)
    p = int(np.argmax(mod2))
    s = v[:, p] * np.array([1.0, -1.0, -1.0, -1.0]) / np.sqrt(mod2[p])
    out = _right_mul(v, s)
    out[1:, p] = 0.0
    return out


def heig(g: QMatrix) -> HermitianEigen:
    """Full eigendecomposition of a Hermitian quaternion matrix.

    ``g`` is symmetrized as ``(G + G*)/2`` before solving.  Eigenvalues are
    returned in descending order; within a cluster of (numerically) equal
    eigenvalues any orthonormal basis of the invariant subspace may come out.
    """
    if g.rows != g.cols:
        raise ValueError(f"heig needs a square matrix, got {g.shape}")
    n = g.rows
    scale = fro_norm(g)
    if fro_norm(g - g.H) > HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    if n == 0:
        return HermitianEigen(np.zeros(0), QMatrix.zeros(0, 0))

    g = (g + g.H) * 0.5
    chi = to_adjoint(g)
    vals, vecs = np.linalg.eigh(chi)
    order = np.argsort(-vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]

    tol = PAIR_TOL * max(scale, np.finfo(float).tiny)
    gaps = vals[0::2] - vals[1::2]
    if np.any(gaps > tol):
        raise ArithmeticError(f"adjoint spectrum is not paired (max gap {gaps.max():.3e})")

    # clusters of adjoint eigenvalues closer than tol; each has even size
    qvecs = _vectors_from_adjoint(vecs)
    basis: list[np.ndarray] = []
    start = 0
    while start < 2 * n:
        stop = start + 2
        while stop < 2 * n and vals[stop - 1] - vals[stop] <= tol:
            stop += 2
        k = (stop - start) // 2
        if k == 1:
            v = qvecs[:, :, start]
            basis.append(v / np.sqrt(np.sum(v * v)))
        else:
            # eigenspaces of distinct clusters are already orthogonal
            basis.extend(_orthonormalize(qvecs[:, :, start:stop], k))
        start = stop

    planes = np.stack([_fix_gauge(v) for v in basis], axis=-1)
    return HermitianEigen(vals[0::2].copy(), QMatrix(planes))


def top_r(e: HermitianEigen, r: int) -> tuple[QMatrix, np.ndarray]:
    """Leading ``r`` eigenvectors and eigenvalues.

    Raises :class:`RankDeficientError` if ``lambda_r`` is not clearly positive.
    """
    n = len(e)
    if not 1 <= r <= n:
        raise ValueError(f"r must lie in [1, {n}], got {r}")
    lam = e.eigenvalues[:r]
    if lam[0] <= 0 or lam[-1] <= RANK_TOL * lam[0]:
        raise RankDeficientError(
            f"rank deficient: lambda_{r} = {lam[-1]:.3e} is not positive relative to lambda_1 = {lam[0]:.3e}; reduce r"
        )
    return QMatrix(e.eigenvectors.planes[:, :, :r]), lam.copy()

"""Quaternion scalars and dense quaternion matrices.

A quaternion matrix ``Q = Q0 + Q1 i + Q2 j + Q3 k`` is stored as four real
planes stacked along the first axis, so ``planes.shape == (4, m, n)``.
Internally most arithmetic goes through the complex pair form
``Q = A + B j`` with ``A = Q0 + Q1 i`` and ``B = Q2 + Q3 i``, which turns one
quaternion matrix product into four complex ones.

The plane-level helpers (``hmatmul``, ``hconj_t``, ...) accept any number of
batch axes between the component axis and the two matrix axes, i.e. arrays
shaped ``(4, ..., m, n)``.  The model code uses them to work on stacks of
images without a Python loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Quaternion",
    "QMatrix",
    "qmul",
    "matmul",
    "conj_transpose",
    "fro_norm",
    "spectral_norm",
    "to_adjoint",
    "from_adjoint",
    "from_adjoint_vector",
    "hmatmul",
    "hconj_t",
]


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __add__(self, other: Quaternion) -> Quaternion:
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: Quaternion) -> Quaternion:
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> Quaternion:
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return qmul(self, other)
        return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)

    def __rmul__(self, other):
        # real scalars commute with every quaternion
        return self.__mul__(other)

    def conj(self) -> Quaternion:
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)

    def is_pure(self) -> bool:
        return self.w == 0.0

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.w, self.x, self.y, self.z)


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product ``a * b``."""
    return Quaternion(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


# ---------------------------------------------------------------------------
# plane-level kernels, shape (4, ..., m, n)
# ---------------------------------------------------------------------------

def to_pair(planes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split quaternion planes into the complex pair ``(A, B)`` with ``Q = A + B j``."""
    return planes[0] + 1j * planes[1], planes[2] + 1j * planes[3]


def from_pair(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.stack([a.real, a.imag, b.real, b.imag])


def hmatmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Quaternion matrix product on plane arrays, broadcasting batch axes.

    ``(A + Bj)(C + Dj) = (AC - B conj(D)) + (AD + B conj(C)) j``
    """
    a, b = to_pair(p)
    c, d = to_pair(q)
    return from_pair(a @ c - b @ d.conj(), a @ d + b @ c.conj())


def hconj_t(p: np.ndarray) -> np.ndarray:
    """Conjugate transpose on plane arrays."""
    t = np.swapaxes(p, -1, -2)
    return np.concatenate([t[:1], -t[1:]])


def sq_abs(p: np.ndarray) -> np.ndarray:
    """Entrywise squared modulus ``|q|^2`` of plane arrays."""
    return np.einsum("c...,c...->...", p, p)


# ---------------------------------------------------------------------------
# QMatrix
# ---------------------------------------------------------------------------

class QMatrix:
    """Dense quaternion matrix, immutable after construction."""

    __slots__ = ("_planes",)
    __array_ufunc__ = None  # keep numpy from hijacking the binary operators

    def __init__(self, planes):
        arr = np.array(planes, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[0] != 4:
            raise ValueError(f"expected planes of shape (4, m, n), got {arr.shape}")
        arr.flags.writeable = False
        self._planes = arr

    # constructors ---------------------------------------------------------

    @classmethod
    def from_components(cls, w=None, x=None, y=None, z=None) -> QMatrix:
        given = [np.asarray(c, dtype=np.float64) for c in (w, x, y, z) if c is not None]
        if not given:
            raise ValueError("at least one component is required")
        shape = np.atleast_2d(given[0]).shape
        comps = [np.zeros(shape) if c is None else np.atleast_2d(np.asarray(c, dtype=np.float64)) for c in (w, x, y, z)]
        return cls(np.stack(comps))

    @classmethod
    def from_real(cls, a) -> QMatrix:
        return cls.from_components(w=a)

    @classmethod
    def from_pair(cls, a, b) -> QMatrix:
        return cls(from_pair(np.atleast_2d(a), np.atleast_2d(b)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> QMatrix:
        return cls(np.zeros((4, rows, cols)))

    @classmethod
    def identity(cls, n: int) -> QMatrix:
        p = np.zeros((4, n, n))
        p[0] = np.eye(n)
        return cls(p)

    @classmethod
    def from_quaternions(cls, rows) -> QMatrix:
        """Build from a nested list of :class:`Quaternion` (or real numbers)."""
        def parts(q):
            return q.as_tuple() if isinstance(q, Quaternion) else (float(q), 0.0, 0.0, 0.0)

        arr = np.array([[parts(q) for q in row] for row in rows], dtype=np.float64)
        return cls(np.moveaxis(arr, -1, 0))

    @classmethod
    def random(cls, rows: int, cols: int, rng: np.random.Generator) -> QMatrix:
        return cls(rng.standard_normal((4, rows, cols)))

    # accessors ------------------------------------------------------------

    @property
    def planes(self) -> np.ndarray:
        return self._planes

    @property
    def shape(self) -> tuple[int, int]:
        return self._planes.shape[1], self._planes.shape[2]

    @property
    def rows(self) -> int:
        return self._planes.shape[1]

    @property
    def cols(self) -> int:
        return self._planes.shape[2]

    @property
    def w(self) -> np.ndarray:
        return self._planes[0]

    @property
    def x(self) -> np.ndarray:
        return self._planes[1]

    @property
    def y(self) -> np.ndarray:
        return self._planes[2]

    @property
    def z(self) -> np.ndarray:
        return self._planes[3]

    def pair(self) -> tuple[np.ndarray, np.ndarray]:
        return to_pair(self._planes)

    def __getitem__(self, idx):
        if isinstance(idx, tuple) and len(idx) == 2 and all(isinstance(i, (int, np.integer)) for i in idx):
            return Quaternion(*(float(v) for v in self._planes[(slice(None),) + idx]))
        sub = self._planes[(slice(None),) + (idx if isinstance(idx, tuple) else (idx,))]
        if sub.ndim == 2:
            # a single row was selected; keep it as a 1 x n matrix
            sub = sub[:, None, :]
        return QMatrix(sub)

    def column(self, t: int) -> QMatrix:
        return QMatrix(self._planes[:, :, t : t + 1])

    def __repr__(self) -> str:
        return f"QMatrix(shape={self.shape})"

    # arithmetic -----------------------------------------------------------

    def __add__(self, other: QMatrix) -> QMatrix:
        return QMatrix(self._planes + _planes_of(other))

    def __sub__(self, other: QMatrix) -> QMatrix:
        return QMatrix(self._planes - _planes_of(other))

    def __neg__(self) -> QMatrix:
        return QMatrix(-self._planes)

    def __mul__(self, s: float) -> QMatrix:
        if isinstance(s, (QMatrix, Quaternion)):
            return NotImplemented
        return QMatrix(self._planes * float(s))

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> QMatrix:
        return QMatrix(self._planes / float(s))

    def __matmul__(self, other: QMatrix) -> QMatrix:
        return matmul(self, other)

    @property
    def H(self) -> QMatrix:
        return conj_transpose(self)

    def equals(self, other: QMatrix) -> bool:
        return self.shape == other.shape and np.array_equal(self._planes, other._planes)

    def allclose(self, other: QMatrix, rtol: float = 1e-12, atol: float = 1e-14) -> bool:
        return self.shape == other.shape and np.allclose(self._planes, other._planes, rtol=rtol, atol=atol)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        if self.rows != self.cols:
            return False
        scale = max(fro_norm(self), 1.0)
        return fro_norm(self - self.H) <= tol * scale

    def is_pure(self) -> bool:
        return not np.any(self._planes[0])


def _planes_of(m) -> np.ndarray:
    if not isinstance(m, QMatrix):
        raise TypeError(f"expected QMatrix, got {type(m).__name__}")
    return m.planes


def matmul(a: QMatrix, b: QMatrix) -> QMatrix:
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return QMatrix(hmatmul(a.planes, b.planes))


def conj_transpose(a: QMatrix) -> QMatrix:
    return QMatrix(hconj_t(a.planes))


def fro_norm(a: QMatrix) -> float:
    return float(np.sqrt(np.sum(a.planes**2)))


def spectral_norm(a: QMatrix) -> float:
    """Largest singular value, read off the complex adjoint."""
    if 0 in a.shape:
        return 0.0
    return float(np.linalg.norm(to_adjoint(a), 2))


def to_adjoint(q: QMatrix) -> np.ndarray:
    """Complex adjoint ``[[A, B], [-conj(B), conj(A)]]`` of ``Q = A + B j`` (2m x 2n)."""
    a, b = q.pair()
    return np.block([[a, b], [-b.conj(), a.conj()]])


def from_adjoint(chi: np.ndarray) -> QMatrix:
    """Inverse of :func:`to_adjoint`; reads the top block row only."""
    chi = np.asarray(chi)
    if chi.ndim != 2 or chi.shape[0] % 2 or chi.shape[1] % 2:
        raise ValueError(f"adjoint must be 2m x 2n, got shape {chi.shape}")
    m, n = chi.shape[0] // 2, chi.shape[1] // 2
    return QMatrix.from_pair(chi[:m, :n], chi[:m, n:])


def from_adjoint_vector(v: np.ndarray) -> QMatrix:
    """Map an eigenvector ``[x; y]`` of ``chi(Q)`` to a quaternion eigenvector of ``Q``.

    If ``chi(Q) [x; y] = lam [x; y]`` with ``lam`` real, then ``u = x - conj(y) j``
    satisfies ``Q u = u lam``.  The map preserves the 2-norm.
    """
    v = np.asarray(v).reshape(-1)
    if v.size % 2:
        raise ValueError(f"adjoint vector must have even length, got {v.size}")
    n = v.size // 2
    return QMatrix.from_pair(v[:n, None], -v[n:, None].conj())

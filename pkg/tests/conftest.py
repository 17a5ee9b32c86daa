import numpy as np
import pytest

from qface.dataset import TrainingSet
from qface.model import covariance_report, mean_image
from qface.quaternion import QMatrix, Quaternion


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_hermitian(n, rng, psd=False):
    x = QMatrix.random(n, n, rng)
    if psd:
        return x @ x.H
    return (x + x.H) * 0.5


def gram_schmidt(a: QMatrix) -> QMatrix:
    """Plain quaternion Gram-Schmidt on the columns, written with scalar loops.

    Kept independent of the library's own orthonormalization code.
    """
    n, k = a.shape
    cols = [[a[s, t] for s in range(n)] for t in range(k)]
    out = []
    for c in cols:
        for q in out:
            # coefficient q* c, applied on the right
            coef = Quaternion()
            for s in range(n):
                coef = coef + q[s].conj() * c[s]
            c = [c[s] - q[s] * coef for s in range(n)]
        norm = np.sqrt(sum(v.norm() ** 2 for v in c))
        out.append([v * (1.0 / norm) for v in c])
    return QMatrix.from_quaternions([[out[t][s] for t in range(k)] for s in range(n)])


def random_unitary(n, rng):
    return gram_schmidt(QMatrix.random(n, n, rng))


def projector(v: QMatrix) -> QMatrix:
    return v @ v.H


def random_labeled_set(rng, sizes, m=3, n=4):
    labels = [f"k{a}" for a, size in enumerate(sizes) for _ in range(size)]
    return TrainingSet.from_matrices([QMatrix.random(m, n, rng) for _ in labels], labels)


def variance_split(rng):
    sizes = [int(x) for x in rng.integers(1, 4, int(rng.integers(2, 5)))]
    t = random_labeled_set(rng, sizes, m=int(rng.integers(1, 4)), n=int(rng.integers(1, 6)))
    rep = covariance_report(t, "sr-2dcpca")
    w = rep.weights
    b = int(rng.integers(len(sizes)))
    psi = mean_image(t)
    # A from the other classes, X stacks the class-b deviations side by side
    n = t.image_shape[1]
    a_mat = QMatrix.zeros(n, n)
    cols = []
    for s in range(t.size):
        dev = t.matrix(s) - psi
        cls = t.class_index[s]
        if cls == b:
            cols.append(dev.H)
        else:
            a_mat = a_mat + (dev.H @ dev) * (w[cls] / (t.size * t.class_sizes[cls]))
    x = QMatrix(np.concatenate([c.planes for c in cols], axis=2))
    return t, w, b, a_mat, x


_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the assertion itself stays in the test."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)

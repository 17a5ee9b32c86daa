import numpy as np
import pytest

from qface.errors import RankDeficientError
from qface.qeig import heig, top_r
from qface.quaternion import QMatrix, Quaternion, fro_norm, spectral_norm, to_adjoint

from conftest import projector, random_hermitian, random_unitary


def adjoint_oracle(g):
    vals = np.sort(np.linalg.eigvalsh(to_adjoint(g)))[::-1]
    return vals[0::2]


def test_real_diagonal():
    e = heig(QMatrix.from_real(np.diag([1.0, 3.0])))
    assert np.allclose(e.eigenvalues, [3.0, 1.0])
    v = e.eigenvectors
    assert np.allclose(v.w, [[0, 1], [1, 0]], atol=1e-15)
    assert not np.any(v.planes[1:])


def test_two_by_two_with_imaginary_offdiagonal():
    g = QMatrix.from_quaternions([[2, Quaternion(0, 1)], [Quaternion(0, -1), 2]])
    # adjoint oracle gives (3, 3, 1, 1)
    assert np.allclose(np.sort(np.linalg.eigvalsh(to_adjoint(g)))[::-1], [3, 3, 1, 1])
    assert np.allclose(heig(g).eigenvalues, [3.0, 1.0], atol=1e-14)


@pytest.mark.parametrize("n", [2, 4, 7])
def test_constructed_spectrum_recovered(rng, n):
    u = random_unitary(n, rng)
    d = np.sort(rng.uniform(-5, 5, n))[::-1]
    g = u @ QMatrix.from_real(np.diag(d)) @ u.H
    e = heig(g)
    assert np.allclose(e.eigenvalues, d, rtol=0, atol=1e-10 * max(1.0, np.abs(d).max()))


def test_eigenpairs_and_unitarity(rng):
    for n in range(1, 9):
        g = random_hermitian(n, rng)
        e = heig(g)
        v = e.eigenvectors
        assert np.all(np.diff(e.eigenvalues) <= 0)
        assert np.allclose(e.eigenvalues, adjoint_oracle(g), rtol=1e-10, atol=1e-12)
        assert fro_norm(v.H @ v - QMatrix.identity(n)) <= 1e-10
        for s in range(n):
            vs = v.column(s)
            assert fro_norm(g @ vs - vs * e.eigenvalues[s]) <= 1e-8 * fro_norm(g)


def test_gauge_largest_entry_real_positive(rng):
    e = heig(random_hermitian(5, rng))
    v = e.eigenvectors.planes
    for s in range(5):
        mod = np.sum(v[:, :, s] ** 2, axis=0)
        p = int(np.argmax(mod))
        assert v[0, p, s] > 0
        assert np.all(v[1:, p, s] == 0)


def test_degenerate_cluster_subspace(rng):
    u = random_unitary(5, rng)
    d = np.array([4.0, 4.0, 4.0, 1.0, 0.5])
    g = u @ QMatrix.from_real(np.diag(d)) @ u.H
    e = heig(g)
    assert np.allclose(e.eigenvalues, d, atol=1e-10)
    v = e.eigenvectors
    assert fro_norm(v.H @ v - QMatrix.identity(5)) <= 1e-10
    # compare invariant subspaces, not individual vectors
    top = QMatrix(v.planes[:, :, :3])
    ref = QMatrix(u.planes[:, :, :3])
    assert fro_norm(projector(top) - projector(ref)) <= 1e-8


def test_psd_spectrum_nonnegative(rng):
    g = random_hermitian(6, rng, psd=True)
    assert heig(g).eigenvalues.min() >= -1e-10 * fro_norm(g)


def test_zero_matrix():
    e = heig(QMatrix.zeros(3, 3))
    assert np.all(e.eigenvalues == 0)
    assert fro_norm(e.eigenvectors.H @ e.eigenvectors - QMatrix.identity(3)) <= 1e-12


def test_rejects_bad_input(rng):
    with pytest.raises(ValueError, match="square"):
        heig(QMatrix.random(2, 3, rng))
    with pytest.raises(ValueError, match="Hermitian"):
        heig(QMatrix.random(3, 3, rng))


def test_top_r():
    e = heig(QMatrix.from_real(np.diag([3.0, 5.0, 4.0])))
    v, d = top_r(e, 2)
    assert np.array_equal(d, [5.0, 4.0])
    assert v.shape == (3, 2)
    v1, d1 = top_r(e, 1)
    assert np.allclose(v1.w[:, 0], [0, 1, 0])
    v3, d3 = top_r(e, 3)
    assert fro_norm(v3.H @ v3 - QMatrix.identity(3)) <= 1e-14
    with pytest.raises(ValueError):
        top_r(e, 0)
    with pytest.raises(ValueError):
        top_r(e, 4)


def test_top_r_rank_deficient():
    e = heig(QMatrix.from_real(np.diag([2.0, 0.0])))
    top_r(e, 1)
    with pytest.raises(RankDeficientError, match="reduce r"):
        top_r(e, 2)


def test_weyl_bounds(rng):
    for _ in range(50):
        n = int(rng.integers(1, 7))
        a, da = random_hermitian(n, rng), random_hermitian(n, rng)
        la, ld, lb = heig(a).eigenvalues, heig(da).eigenvalues, heig(a + da).eigenvalues
        tol = 1e-10 * (fro_norm(a) + fro_norm(da))
        assert np.all(la + ld[-1] <= lb + tol)
        assert np.all(lb <= la + ld[0] + tol)


def test_rank_one_update_bound(rng):
    for _ in range(50):
        n, m = int(rng.integers(1, 7)), int(rng.integers(1, 4))
        a = random_hermitian(n, rng)
        x = QMatrix.random(n, m, rng)
        rho = float(rng.uniform(0, 2))
        b = a + (x @ x.H) * rho
        diff = np.abs(heig(b).eigenvalues - heig(a).eigenvalues)
        assert np.all(diff <= rho * spectral_norm(x) ** 2 + 1e-10 * max(1.0, fro_norm(b)))

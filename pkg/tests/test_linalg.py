import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hkpotentials.lie import (
    AlgebraKind,
    BilinearForm,
    JordanType,
    random_orbit_element,
)
from hkpotentials.linalg import (
    DEFAULT_TOL,
    Tolerances,
    adjoint,
    dagger_adjoint,
    hermitian_spectrum,
    jacobi_eigh,
    matrix_rank,
    rank1_symmetric_factor,
)


def crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def test_adjoint_examples():
    assert np.array_equal(adjoint([[1j]]), [[-1j]])
    assert np.array_equal(adjoint(np.eye(3)), np.eye(3))
    assert np.array_equal(adjoint([[0, 1], [0, 0]]), [[0, 0], [1, 0]])


def test_adjoint_involution_and_isometry():
    rng = np.random.default_rng(0)
    m = crandn(rng, 4, 6)
    assert np.array_equal(adjoint(adjoint(m)), m)
    assert np.linalg.norm(adjoint(m)) == np.linalg.norm(m)


def test_tolerances_must_be_positive():
    with pytest.raises(ValueError):
        Tolerances(eig_group=0.0)
    with pytest.raises(ValueError):
        Tolerances(check_tol=-1.0)
    assert DEFAULT_TOL.rank_cut == 1e-10


class TestDaggerAdjoint:
    def test_identity_forms_give_transpose(self):
        m = np.array([[0, 1], [0, 0]], dtype=complex)
        out = dagger_adjoint(m, np.eye(2), np.eye(2))
        assert np.array_equal(out, m.T)

    def test_column_vector_becomes_row(self):
        x = np.array([[1 + 2j], [3j], [-1]])
        out = dagger_adjoint(x, np.eye(1), np.eye(3))
        assert np.array_equal(out, x.T)  # no conjugation

    def test_symplectic_source(self):
        rng = np.random.default_rng(1)
        src = BilinearForm.symplectic(4)
        dst = BilinearForm.identity(3)
        m = crandn(rng, 3, 4)
        md = dagger_adjoint(m, src, dst)
        for _ in range(5):
            v, w = crandn(rng, 4), crandn(rng, 3)
            lhs = (m @ v) @ dst.matrix @ w
            rhs = v @ src.matrix @ (md @ w)
            assert abs(lhs - rhs) <= 1e-12 * max(1, abs(lhs))

    def test_product_rule(self):
        rng = np.random.default_rng(2)
        f1, f2, f3 = BilinearForm.symplectic(2), BilinearForm.identity(3), BilinearForm.symplectic(4)
        m = crandn(rng, 3, 2)
        n = crandn(rng, 4, 3)
        lhs = dagger_adjoint(n @ m, f1, f3)
        rhs = dagger_adjoint(m, f1, f2) @ dagger_adjoint(n, f2, f3)
        assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(lhs)

    def test_errors(self):
        with pytest.raises(ValueError):
            dagger_adjoint(np.ones((2, 3)), np.eye(2), np.eye(2))
        with pytest.raises(ValueError):
            dagger_adjoint(np.ones((2, 2)), np.zeros((2, 2)), np.eye(2))


class TestJacobi:
    @pytest.mark.parametrize("n", [1, 2, 5, 12, 24])
    def test_matches_lapack(self, n):
        rng = np.random.default_rng(n)
        a = crandn(rng, n, n)
        h = a + a.conj().T
        w, v = jacobi_eigh(h)
        ref = np.linalg.eigvalsh(h)[::-1]
        assert np.max(np.abs(w - ref)) <= 1e-12 * np.linalg.norm(h)
        assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - h) <= 1e-12 * np.linalg.norm(h)
        assert np.linalg.norm(v.conj().T @ v - np.eye(n)) <= 1e-12 * n

    def test_degenerate_spectrum(self):
        rng = np.random.default_rng(3)
        u = np.linalg.qr(crandn(rng, 6, 6))[0]
        h = u @ np.diag([5, 5, 5, 1, 0, 0]) @ u.conj().T
        w, _ = jacobi_eigh(h)
        assert np.allclose(w, [5, 5, 5, 1, 0, 0], atol=1e-13)


class TestHermitianSpectrum:
    def test_diagonal(self):
        spec = hermitian_spectrum(np.diag([9.0, 16.0, 0.0, 0.0]))
        assert spec.groups == ((16.0, 1), (9.0, 1), (0.0, 2))

    def test_zero(self):
        assert hermitian_spectrum(np.zeros((4, 4))).groups == ((0.0, 4),)

    def test_so5_minimal_has_double_eigenvalue(self):
        x = random_orbit_element(JordanType((2, 2, 1)), AlgebraKind("so", 5), seed=11)
        m = np.asarray(x.matrix)
        spec = hermitian_spectrum(m.conj().T @ m)
        assert spec.multiplicities() == (2,)

    def test_trace_identity(self):
        rng = np.random.default_rng(4)
        for n in (3, 7, 10):
            a = crandn(rng, n, n)
            h = a @ a.conj().T
            spec = hermitian_spectrum(h)
            total = sum(mu * k for mu, k in spec.groups)
            assert abs(total - np.trace(h).real) <= 1e-10 * n * np.linalg.norm(h)
            assert spec.dim == n

    def test_negative_values_flagged_not_clamped(self):
        spec = hermitian_spectrum(np.diag([4.0, -1.0]))
        assert spec.negative
        assert spec.groups[-1][0] == -1.0

    def test_tiny_negative_clamped(self):
        spec = hermitian_spectrum(np.diag([4.0, -1e-12]))
        assert not spec.negative
        assert spec.groups == ((4.0, 1), (0.0, 1))

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            hermitian_spectrum(np.array([[0, 1], [0, 0]]))
        with pytest.raises(ValueError):
            hermitian_spectrum(np.ones((2, 3)))

    def test_numpy_backend_agrees(self):
        rng = np.random.default_rng(5)
        a = crandn(rng, 6, 6)
        h = a @ a.conj().T
        s1 = hermitian_spectrum(h)
        s2 = hermitian_spectrum(h, method="numpy")
        assert np.allclose([g[0] for g in s1.groups], [g[0] for g in s2.groups], rtol=1e-12)


class TestRank:
    def test_examples(self):
        assert matrix_rank(np.eye(3)) == 3
        assert matrix_rank(np.zeros((3, 3))) == 0
        j3 = np.diag([1.0, 1.0], 1)
        assert matrix_rank(j3) == 2

    def test_scale_suppresses_noise(self):
        noise = 1e-17 * np.ones((3, 3))
        assert matrix_rank(noise) == 1
        assert matrix_rank(noise, scale=1.0) == 0


class TestRankOneFactor:
    def test_zero(self):
        assert np.array_equal(rank1_symmetric_factor(np.zeros((3, 3))), np.zeros(3))

    def test_canonical_sign(self):
        x = np.array([1, 2j, 0])
        out = rank1_symmetric_factor(np.outer(x, x))
        assert np.allclose(out, [1, 2j, 0], atol=1e-15)
        out = rank1_symmetric_factor(np.outer(-x, -x))
        assert np.allclose(out, [1, 2j, 0], atol=1e-15)

    def test_imaginary_leading_entry(self):
        x = np.array([0.5, -3j])
        out = rank1_symmetric_factor(np.outer(x, x))
        assert np.allclose(out, [-0.5, 3j], atol=1e-15)

    def test_rejects_rank_two(self):
        with pytest.raises(ValueError):
            rank1_symmetric_factor(np.diag([1.0, 1.0]))

    def test_rejects_non_symmetric(self):
        with pytest.raises(ValueError):
            rank1_symmetric_factor(np.array([[0, 1], [0, 0]]))

    def test_round_trip_many(self):
        rng = np.random.default_rng(6)
        worst = 0.0
        for _ in range(1000):
            n = int(rng.integers(1, 8))
            x = crandn(rng, n)
            m = np.outer(x, x)
            y = rank1_symmetric_factor(m)
            worst = max(worst, np.linalg.norm(np.outer(y, y) - m) / np.linalg.norm(m))
            assert min(np.linalg.norm(y - x), np.linalg.norm(y + x)) <= 1e-12 * np.linalg.norm(x)
        assert worst <= 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=9), st.integers(min_value=0, max_value=2**32 - 1))
def test_spectrum_of_gram_matrix_is_nonnegative(n, seed):
    rng = np.random.default_rng(seed)
    a = crandn(rng, n, max(1, n - 2))
    spec = hermitian_spectrum(a @ a.conj().T)
    assert not spec.negative
    assert all(mu >= 0 for mu, _ in spec.groups)
    assert spec.dim == n

import numpy as np
import pytest

from hkpotentials.lie import AlgebraKind, JordanType, OrbitElement, random_orbit_element
from hkpotentials.linalg import Tolerances
from hkpotentials.potentials import potential_length2
from hkpotentials.quiver import (
    Diagram,
    SolverError,
    apply_gauge,
    diagram_for,
    length2_factorize,
    make_point,
    moment_map,
    pack,
    psi,
    radial_norm,
    random_gauge,
    random_point,
    residual_jacobian,
    residual_vector,
    solve_moment,
    unpack,
    zero_point,
)


def sl(n):
    return AlgebraKind("sl", n)


def block_a(a1, a2):
    x = np.zeros((4, 4), dtype=complex)
    x[0, 2], x[1, 3] = a1, a2
    return OrbitElement(x, sl(4))


class TestDiagram:
    def test_image_flag(self):
        d = diagram_for(JordanType((3, 2, 2)), AlgebraKind("so", 7))
        assert d.dims == (1, 4, 7)
        assert d.forms[0].symmetry == 1 and d.forms[1].symmetry == -1 and d.forms[2].symmetry == 1

    def test_sp_parity(self):
        d = diagram_for(JordanType((2, 2, 1, 1)), AlgebraKind("sp", 6))
        assert d.dims == (2, 6)
        assert d.forms[0].symmetry == 1 and d.forms[1].symmetry == -1

    def test_odd_dimension_with_skew_form_rejected(self):
        with pytest.raises(ValueError):
            Diagram((3, 6), AlgebraKind("so", 6))

    def test_param_count(self):
        assert Diagram((1, 2, 3), sl(3)).n_real_params() == 2 * 2 * (2 + 6)
        assert Diagram((2, 6), AlgebraKind("so", 6)).n_real_params() == 2 * 12


class TestMomentMap:
    def test_zero_point(self):
        d = Diagram((1, 2, 3), sl(3))
        p = zero_point(d)
        assert moment_map(d, p).total == 0.0
        assert radial_norm(p) == 0.0
        assert np.array_equal(psi(p), np.zeros((3, 3)))

    def test_real_parts_hermitian(self):
        for d in [Diagram((1, 2, 3), sl(3)), Diagram((1, 4, 7), AlgebraKind("so", 7))]:
            mm = moment_map(d, random_point(d, seed=3))
            for r in mm.real_parts:
                assert np.max(np.abs(r - r.conj().T)) <= 1e-14 * max(1, np.abs(r).max())

    def test_shape_mismatch(self):
        d = Diagram((2, 4), sl(4))
        with pytest.raises(ValueError):
            make_point(d, [np.zeros((4, 3))], [np.zeros((3, 4))])
        with pytest.raises(ValueError):
            make_point(d, [np.zeros((4, 2))], None)

    def test_constrained_betas_are_derived(self):
        d = Diagram((1, 4, 7), AlgebraKind("so", 7))
        p = random_point(d, seed=1)
        for j, (a, b) in enumerate(zip(p.alphas, p.betas)):
            assert np.array_equal(b, d.derive_beta(j, a))
        with pytest.raises(ValueError):
            make_point(d, p.alphas, p.betas)


class TestRadialNorm:
    def test_block_example(self):
        d = Diagram((2, 4), sl(4))
        half = np.diag(np.sqrt([3.0, 4.0]))
        alpha = np.vstack([half, np.zeros((2, 2))])
        beta = np.hstack([np.zeros((2, 2)), half])
        p = make_point(d, [alpha], [beta])
        assert abs(radial_norm(p) - 14.0) <= 1e-12
        assert np.allclose(psi(p), block_a(3, 4).matrix)

    def test_quadratic_homogeneity(self):
        d = Diagram((1, 2, 3), sl(3))
        p = random_point(d, seed=2)
        assert abs(radial_norm(p.scaled(-2.5)) - 6.25 * radial_norm(p)) <= 1e-12 * radial_norm(p)


class TestGauge:
    @pytest.mark.parametrize(
        "d",
        [
            Diagram((2, 4), sl(4)),
            Diagram((1, 2, 3), sl(3)),
            Diagram((1, 4, 7), AlgebraKind("so", 7)),
            Diagram((2, 4, 6), AlgebraKind("sp", 6)),
        ],
        ids=str,
    )
    def test_invariance(self, d):
        p = random_point(d, seed=5)
        q = apply_gauge(d, p, random_gauge(d, seed=6))
        assert abs(radial_norm(q) - radial_norm(p)) <= 1e-12 * radial_norm(p)
        assert np.linalg.norm(psi(q) - psi(p)) <= 1e-12 * np.linalg.norm(psi(p))
        m0, m1 = moment_map(d, p).total, moment_map(d, q).total
        assert abs(m1 - m0) <= 1e-10 * m0

    def test_identity_gauge(self):
        d = Diagram((1, 2, 3), sl(3))
        p = random_point(d, seed=7)
        q = apply_gauge(d, p, [np.eye(1), np.eye(2)])
        assert all(np.array_equal(a, b) for a, b in zip(p.alphas, q.alphas))

    def test_zero_stays_zero(self):
        d, p = length2_factorize(block_a(3, 4))
        q = apply_gauge(d, p, random_gauge(d, seed=8))
        assert moment_map(d, q).total <= 1e-24 * 14**2

    def test_non_unitary_rejected(self):
        d = Diagram((2, 4), sl(4))
        with pytest.raises(ValueError):
            apply_gauge(d, random_point(d, seed=0), [2 * np.eye(2)])

    def test_form_violation_rejected(self):
        d = Diagram((2, 6), AlgebraKind("so", 6))
        u = np.diag([1.0, 1j])  # unitary, not symplectic
        with pytest.raises(ValueError):
            apply_gauge(d, random_point(d, seed=0), [u])


class TestLength2:
    def test_block_example(self):
        d, p = length2_factorize(block_a(3, 4))
        assert abs(radial_norm(p) - 14.0) <= 1e-12
        assert moment_map(d, p).total <= 1e-20 * 14**2

    def test_j2(self):
        x = OrbitElement(np.array([[0, 1], [0, 0]]), sl(2))
        d, p = length2_factorize(x)
        assert np.allclose(np.abs(p.alphas[0]), [[1], [0]])
        assert abs(radial_norm(p) - 2.0) <= 1e-14

    def test_zero(self):
        d, p = length2_factorize(OrbitElement(np.zeros((3, 3)), sl(3)))
        assert radial_norm(p) == 0.0

    def test_rejects_length3(self):
        x = OrbitElement(np.diag([1.0, 1.0], 1), sl(3))
        with pytest.raises(ValueError):
            length2_factorize(x)

    def test_random_all_families(self):
        rng = np.random.default_rng(0)
        cases = [("sl", 6, (2, 2, 1, 1)), ("sl", 5, (2, 2, 1)), ("so", 8, (2, 2, 2, 2)),
                 ("so", 7, (2, 2, 1, 1, 1)), ("sp", 8, (2, 2, 2, 1, 1)), ("sp", 4, (2, 2))]
        for i in range(100):
            family, n, parts = cases[i % len(cases)]
            x = random_orbit_element(JordanType(parts), AlgebraKind(family, n), seed=rng)
            m = np.asarray(x.matrix)
            d, p = length2_factorize(x)
            a, b = p.alphas[0], p.betas[0]
            scale = np.linalg.norm(m)
            assert np.linalg.norm(b @ a) <= 1e-10 * scale
            assert np.linalg.norm(b @ b.conj().T - a.conj().T @ a) <= 1e-10 * scale
            assert np.linalg.norm(a @ b - m) <= 1e-10 * scale
            assert abs(radial_norm(p) - potential_length2(x)) <= 1e-9 * radial_norm(p)


class TestResidual:
    def test_pack_round_trip(self):
        d = Diagram((1, 2, 3), sl(3))
        p = random_point(d, seed=4)
        q = unpack(d, pack(d, p))
        assert all(np.array_equal(a, b) for a, b in zip(p.alphas + p.betas, q.alphas + q.betas))

    def test_norm_identity(self):
        d = Diagram((1, 4, 7), AlgebraKind("so", 7))
        p = random_point(d, seed=4)
        x = random_orbit_element(JordanType((3, 2, 2)), AlgebraKind("so", 7), seed=1)
        r = residual_vector(d, pack(d, p), x)
        expect = moment_map(d, p).total + np.linalg.norm(psi(p) - x.matrix) ** 2
        assert abs(r @ r - expect) <= 1e-12 * expect

    @pytest.mark.parametrize(
        "d",
        [Diagram((1, 2, 3), sl(3)), Diagram((2, 3, 5), sl(5)), Diagram((1, 4, 7), AlgebraKind("so", 7)),
         Diagram((2, 4, 6), AlgebraKind("sp", 6))],
        ids=str,
    )
    def test_jacobian_central_differences(self, d):
        theta = pack(d, random_point(d, seed=9))
        target = np.zeros((d.n, d.n))
        jac = residual_jacobian(d, theta)
        h = 1e-6
        fd = np.column_stack(
            [
                (residual_vector(d, theta + h * e, target) - residual_vector(d, theta - h * e, target)) / (2 * h)
                for e in np.eye(theta.size)
            ]
        )
        assert np.max(np.abs(jac - fd)) <= 1e-5 * np.max(np.abs(jac))


class TestSolver:
    def test_block_example(self):
        x = block_a(3, 4)
        p, diag = solve_moment(diagram_for(x), x)
        assert diag.converged and diag.residual <= 1e-10 * 5
        assert abs(radial_norm(p) - 14.0) <= 1e-6 * 14

    @pytest.mark.parametrize("abc,expect", [((1, 1, 1), 6.0), ((1, 0, 1), 4 * np.sqrt(2))])
    def test_sl3_regular(self, abc, expect):
        a, b, c = abc
        x = OrbitElement(np.array([[0, a, b], [0, 0, c], [0, 0, 0]]), sl(3))
        d = diagram_for(x)
        assert d.dims == (1, 2, 3)
        p, diag = solve_moment(d, x)
        assert diag.residual <= 1e-10 * max(1, np.linalg.norm(x.matrix))
        assert abs(radial_norm(p) - expect) <= 1e-5 * expect

    def test_zero_target(self):
        x = OrbitElement(np.zeros((4, 4)), sl(4))
        p, diag = solve_moment(Diagram((1, 4), sl(4)), x)
        assert diag.trivial and radial_norm(p) == 0.0

    def test_independent_seeds_agree(self):
        x = random_orbit_element(JordanType((3, 2, 2)), AlgebraKind("so", 7), seed=2)
        d = diagram_for(x)
        r = [radial_norm(solve_moment(d, x, init_seed=s)[0]) for s in (0, 1, 2)]
        assert max(r) - min(r) <= 1e-5 * max(r)

    def test_boundary_flag(self):
        x = block_a(3, 0)
        p, diag = solve_moment(Diagram((2, 4), sl(4)), x)
        assert diag.boundary
        assert abs(radial_norm(p) - 6.0) <= 1e-6 * 6

    def test_failure_is_reported(self):
        x = random_orbit_element(JordanType((3,)), sl(3), seed=0)
        with pytest.raises(SolverError) as info:
            solve_moment(diagram_for(x), x, tol=Tolerances(solve_tol=1e-30), max_restarts=1, max_iter=5)
        assert info.value.point is not None
        assert not info.value.diagnostics.converged

    def test_target_too_long(self):
        x = OrbitElement(np.diag([1.0, 1.0], 1), sl(3))
        with pytest.raises(ValueError):
            solve_moment(Diagram((2, 3), sl(3)), x)

    def test_deterministic(self):
        x = random_orbit_element(JordanType((2, 2, 1, 1)), AlgebraKind("sp", 6), seed=3)
        d = diagram_for(x)
        p1, _ = solve_moment(d, x, init_seed=11)
        p2, _ = solve_moment(d, x, init_seed=11)
        assert all(np.array_equal(a, b) for a, b in zip(p1.alphas, p2.alphas))

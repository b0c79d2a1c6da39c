"""Acceptance checks, one marked group per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary prints
one pass/fail line per criterion.
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from hkpotentials.lie import (
    AlgebraKind,
    CanonicalFiberParams,
    JordanType,
    OrbitElement,
    canonical_fiber,
    random_orbit_element,
    to_standard_form,
)
from hkpotentials.linalg import hermitian_spectrum
from hkpotentials.potentials import (
    border_lift,
    cubic_coefficients,
    cubic_roots,
    invariants,
    potential_32k,
    potential_322_closed,
    potential_324_cubic,
    potential_coh2,
    potential_length2,
    potential_minimal,
    potential_sl3_regular,
)
from hkpotentials.quiver import Diagram, diagram_for, length2_factorize, radial_norm, solve_moment
from hkpotentials.suites import run_suite

criterion = pytest.mark.criterion


def rel(a, b):
    ref = max(abs(a), abs(b))
    return abs(a - b) / ref if ref else 0.0


def block_x():
    x = np.zeros((4, 4), dtype=complex)
    x[0, 2], x[1, 3] = 3, 4
    return OrbitElement(x, AlgebraKind("sl", 4))


@criterion(1, "block A = diag(3,4) in sl(4): rho = 14 by length2, coh2 and the oracle")
def test_block_example_exact():
    start = time.perf_counter()
    x = block_x()
    assert abs(potential_length2(x) - 14) <= 1e-12
    assert abs(potential_coh2(x) - 14) <= 1e-12
    point, diag = solve_moment(diagram_for(x), x, init_seed=0)
    assert diag.converged
    assert rel(radial_norm(point), 14) <= 1e-5
    assert time.perf_counter() - start < 5


def _square_zero_sample(rng):
    family = ("sl", "so", "sp")[int(rng.integers(3))]
    if family == "sl":
        n = int(rng.integers(2, 9))
        k = int(rng.integers(1, n // 2 + 1))
    elif family == "so":
        n = int(rng.integers(4, 11))
        k = 2 * int(rng.integers(1, n // 4 + 1))
    else:
        n = 2 * int(rng.integers(1, 5))
        k = int(rng.integers(1, n // 2 + 1))
    parts = (2,) * k + (1,) * (n - 2 * k)
    return random_orbit_element(JordanType(parts), AlgebraKind(family, n), seed=rng)


@criterion(2, "square-zero potential equals the radial function of the explicit factorisation")
def test_length2_vs_factorisation():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    families = set()
    for _ in range(50):
        x = _square_zero_sample(rng)
        families.add(x.family.value)
        d, point = length2_factorize(x)
        assert isinstance(d, Diagram)
        # r^2 = 2 Tr(Lambda) on the factorisation, which is rho itself
        assert rel(potential_length2(x), radial_norm(point)) <= 1e-9
    assert families == {"sl", "so", "sp"}
    assert time.perf_counter() - start < 10


@criterion(3, "nilpotent X in so(n <= 12): every non-zero eigenvalue of X*X has even multiplicity")
def test_even_multiplicity_suite():
    start = time.perf_counter()
    res = run_suite("even-multiplicity", 200, seed=7)
    assert res.ok, res.summary()
    assert time.perf_counter() - start < 10


_MINIMAL = [
    ("sl", lambda n: (2,) + (1,) * (n - 2), range(2, 9), 1),
    ("sp", lambda n: (2,) + (1,) * (n - 2), range(2, 11, 2), 1),
    ("so", lambda n: (2, 2) + (1,) * (n - 4), range(4, 11), 2),
]


@criterion(4, "minimal orbits: minimal formula matches length2 and multiplicity equals kappa")
@pytest.mark.parametrize("family,parts,sizes,kappa", _MINIMAL, ids=[m[0] for m in _MINIMAL])
def test_minimal_orbits(family, parts, sizes, kappa):
    rng = np.random.default_rng(4)
    sizes = list(sizes)
    for _ in range(30):
        n = sizes[int(rng.integers(len(sizes)))]
        x = random_orbit_element(JordanType(parts(n)), AlgebraKind(family, n), seed=rng)
        assert x.algebra.kappa == kappa
        assert rel(potential_minimal(x), potential_length2(x)) <= 1e-9
        m = np.asarray(x.matrix)
        assert hermitian_spectrum(m.conj().T @ m).multiplicities() == (kappa,)


@criterion(5, "(3,1^(n-3)) in so(n): border lift potential matches the cohomogeneity-two formula")
def test_31_lift_vs_coh2():
    rng = np.random.default_rng(5)
    for _ in range(30):
        n = int(rng.integers(5, 10))
        x = random_orbit_element(JordanType((3,) + (1,) * (n - 3)), AlgebraKind("so", n), seed=rng)
        assert rel(potential_32k(x), potential_coh2(x)) <= 1e-9


@criterion(6, "(3,2,2) fibres in so(7) and so(9): closed form matches the lift, invariant identity holds")
@pytest.mark.parametrize("padding", [0, 2], ids=["so7", "so9"])
def test_322_fibres(padding):
    rng = np.random.default_rng(6 + padding)
    for _ in range(30):
        p = CanonicalFiberParams.random("322", rng)
        x = to_standard_form(canonical_fiber(p, padding=padding))
        assert x.n == 7 + padding
        assert rel(potential_322_closed(x), potential_32k(x)) <= 1e-9
        inv = invariants(x)
        lhs = inv.c1**2 - inv.c2 - 2 * inv.c21
        assert rel(lhs, 8 * abs(p.a) ** 2 * abs(p.v) ** 2) <= 1e-9


@criterion(7, "(3,2^4) fibres in so(11): cubic formula matches the lift, roots match doubled eigenvalues")
def test_324_cubic():
    rng = np.random.default_rng(7)
    for _ in range(30):
        p = CanonicalFiberParams.random("324", rng)
        x = to_standard_form(canonical_fiber(p))
        assert x.n == 11
        assert rel(potential_324_cubic(p), potential_32k(x)) <= 1e-8
        xp = border_lift(x).x_prime
        ev = np.sort(np.linalg.eigvalsh(xp @ xp.conj().T))[::-1]
        top = ev[:6]
        assert np.max(np.abs(top[0::2] - top[1::2])) <= 1e-8 * top[0]
        roots = np.sort(cubic_roots(cubic_coefficients(p)))[::-1]
        assert np.max(np.abs(roots - top[0::2])) <= 1e-8 * top[0]


@criterion(8, "regular orbit of sl(3): exact values and the oracle on the length-three diagram")
def test_sl3_regular():
    start = time.perf_counter()
    assert potential_sl3_regular(1, 1, 1) == 6
    assert rel(potential_sl3_regular(1, 0, 1), 4 * np.sqrt(2)) <= 1e-15
    d = Diagram((1, 2, 3), AlgebraKind("sl", 3))
    for (a, b, c), rho in [((1, 1, 1), 6.0), ((1, 0, 1), 4 * np.sqrt(2))]:
        target = OrbitElement(np.array([[0, a, b], [0, 0, c], [0, 0, 0]], dtype=complex), d.algebra)
        point, diag = solve_moment(d, target, init_seed=0)
        assert diag.residual <= 1e-10
        assert rel(radial_norm(point), rho) <= 1e-5
    assert time.perf_counter() - start < 60


_SUITES = [
    ("homogeneity", 100),
    ("conjugation-invariance", 100),
    ("gauge-invariance", 100),
    ("jacobian", 20),
    ("lift-sign", 50),
]


@criterion(9, "property suites: homogeneity, conjugation, gauge, Jacobian, lift sign")
@pytest.mark.parametrize("name,count", _SUITES, ids=[s[0] for s in _SUITES])
def test_property_suite(name, count):
    res = run_suite(name, count, seed=9)
    assert res.ok, res.summary()


def _cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "hkpotentials", *argv], capture_output=True, check=False)
    return proc.returncode, proc.stdout


@criterion(10, "identical seeded CLI runs give byte-identical JSON")
@pytest.mark.parametrize(
    "argv",
    [
        ("potential", "--algebra", "so", "--jordan", "3,2,2", "--generic", "--random", "--oracle", "--seed", "3", "--json"),
        ("potential", "--algebra", "sp", "--jordan", "2,2,1,1", "--random", "--oracle", "--json"),
        ("generate", "--algebra", "so", "--jordan", "3,2,2,2,2", "--random", "--seed", "12"),
        ("verify", "--suite", "homogeneity", "--count", "10", "--seed", "5", "--json"),
    ],
    ids=["potential-so", "potential-sp", "generate", "verify"],
)
def test_cli_determinism(argv):
    code1, out1 = _cli(*argv)
    code2, out2 = _cli(*argv)
    assert code1 == 0 and out1
    assert code2 == code1 and out2 == out1

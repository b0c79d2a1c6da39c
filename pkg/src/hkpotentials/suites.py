"""Seeded property suites over random orbit elements.

Each suite draws ``count`` samples; sample ``i`` of a run with base seed
``s`` uses the generator ``default_rng([s, i])``, so a failure can be
replayed from the pair printed in the report.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lie import (
    AlgebraKind,
    CanonicalFiberParams,
    Family,
    JordanType,
    PartitionError,
    canonical_fiber,
    random_compact_conjugate,
    random_orbit_element,
    to_standard_form,
)
from .linalg import DEFAULT_TOL, Tolerances, hermitian_spectrum
from .potentials import border_lift, compute_all, potential_length2
from .quiver import (
    Diagram,
    SolverError,
    apply_gauge,
    diagram_for,
    moment_map,
    pack,
    psi,
    radial_norm,
    random_gauge,
    random_point,
    residual_jacobian,
    residual_vector,
    solve_moment,
)

__all__ = ["SuiteResult", "SUITES", "DEFAULT_COUNTS", "run_suite", "random_so_partition", "sample_case"]


@dataclass
class SuiteResult:
    name: str
    count: int
    tolerance: float
    passed: int = 0
    worst: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.passed == self.count

    def record(self, sample: tuple, deviation: float, note: str = ""):
        deviation = float(deviation)
        self.worst = max(self.worst, deviation) if np.isfinite(deviation) else float("inf")
        if deviation <= self.tolerance:
            self.passed += 1
        else:
            self.failures.append({"seed": list(sample), "deviation": deviation, "note": note})

    def summary(self) -> str:
        status = "pass" if self.ok else "FAIL"
        line = f"{self.name}: {status} {self.passed}/{self.count}, worst {self.worst:.3e} (tol {self.tolerance:.0e})"
        for f in self.failures[:5]:
            line += f"\n  failing sample seed={tuple(f['seed'])} deviation={f['deviation']:.3e} {f['note']}"
        return line


def _rel(a: float, b: float) -> float:
    ref = max(abs(a), abs(b))
    return abs(a - b) / ref if ref > 0 else 0.0


def random_so_partition(n: int, rng) -> JordanType:
    """A random non-zero nilpotent Jordan type of so(n)."""
    while True:
        parts, left = [], n
        while left:
            p = int(rng.integers(1, left + 1))
            parts.append(p)
            left -= p
        jt = JordanType(tuple(parts))
        try:
            jt.check(AlgebraKind(Family.SO, n))
        except PartitionError:
            continue
        if jt.largest > 1:
            return jt


# Orbits covered by at least one closed form, as (family, n, partition).
CASES = [
    ("sl", 4, (2, 2)),
    ("sl", 5, (2, 1, 1, 1)),
    ("sl", 6, (2, 2, 2)),
    ("sl", 3, (3,)),
    ("sl", 3, (2, 1)),
    ("so", 7, (2, 2, 1, 1, 1)),
    ("so", 8, (2, 2, 2, 2)),
    ("so", 6, (3, 1, 1, 1)),
    ("so", 9, (3, 1, 1, 1, 1, 1, 1)),
    ("so", 7, (3, 2, 2)),
    ("so", 9, (3, 2, 2, 1, 1)),
    ("so", 10, (2, 2, 2, 2, 1, 1)),
    ("sp", 6, (2, 1, 1, 1, 1)),
    ("sp", 6, (2, 2, 1, 1)),
    ("sp", 8, (2, 2, 2, 2)),
]


def sample_case(rng):
    """Random generic element of a randomly chosen orbit from :data:`CASES`."""
    family, n, parts = CASES[int(rng.integers(len(CASES)))]
    return random_orbit_element(JordanType(parts), AlgebraKind(family, n), seed=rng)


def _square_zero_case(rng):
    family = ("sl", "so", "sp")[int(rng.integers(3))]
    if family == "sl":
        n = int(rng.integers(2, 9))
        k = int(rng.integers(1, n // 2 + 1))
        parts = (2,) * k + (1,) * (n - 2 * k)
    elif family == "so":
        n = int(rng.integers(4, 11))
        k = 2 * int(rng.integers(1, n // 4 + 1))
        parts = (2,) * k + (1,) * (n - 2 * k)
    else:
        n = 2 * int(rng.integers(1, 5))
        k = int(rng.integers(1, n // 2 + 1))
        parts = (2,) * k + (1,) * (n - 2 * k)
    return random_orbit_element(JordanType(parts), AlgebraKind(family, n), seed=rng)


def _closed_values(x, tol):
    report = compute_all(x, tol)
    return {k: v.rho for k, v in report.methods.items() if v.ok}


def suite_even_multiplicity(res: SuiteResult, rng_for, tol: Tolerances):
    for i in range(res.count):
        rng = rng_for(i)
        n = int(rng.integers(3, 13))
        jt = random_so_partition(n, rng)
        x = random_orbit_element(jt, AlgebraKind(Family.SO, n), seed=rng)
        m = np.asarray(x.matrix)
        mult = hermitian_spectrum(m.conj().T @ m, tol).multiplicities()
        odd = [k for k in mult if k % 2]
        res.record(rng_for.key(i), float(len(odd)), f"so({n}) {jt} multiplicities {mult}")


def suite_homogeneity(res: SuiteResult, rng_for, tol: Tolerances):
    for i in range(res.count):
        rng = rng_for(i)
        x = sample_case(rng)
        s = float(np.exp(rng.uniform(-2, 2)))
        lam = np.exp(2j * np.pi * rng.random())
        base = _closed_values(x, tol)
        scaled = _closed_values(x.with_matrix(s * lam * np.asarray(x.matrix)), tol)
        dev = max((_rel(scaled[k], s * base[k]) for k in base if k in scaled), default=np.inf)
        if set(base) != set(scaled) or not base:
            dev = np.inf
        res.record(rng_for.key(i), dev, f"{x.algebra} methods {sorted(base)}")


def suite_conjugation(res: SuiteResult, rng_for, tol: Tolerances):
    for i in range(res.count):
        rng = rng_for(i)
        x = sample_case(rng)
        y = random_compact_conjugate(x, rng)
        base = _closed_values(x, tol)
        conj = _closed_values(y, tol)
        dev = max((_rel(conj[k], base[k]) for k in base if k in conj), default=np.inf)
        if set(base) != set(conj) or not base:
            dev = np.inf
        res.record(rng_for.key(i), dev, f"{x.algebra} methods {sorted(base)}")


_GAUGE_DIAGRAMS = [
    ("sl", (2, 4)),
    ("sl", (1, 2, 3)),
    ("sl", (2, 3, 5)),
    ("so", (2, 6)),
    ("so", (1, 2, 5)),
    ("so", (1, 4, 7)),
    ("sp", (2, 4)),
    ("sp", (2, 4, 6)),
]


def _random_diagram(rng) -> Diagram:
    family, dims = _GAUGE_DIAGRAMS[int(rng.integers(len(_GAUGE_DIAGRAMS)))]
    return Diagram(dims, AlgebraKind(family, dims[-1]))


def suite_gauge(res: SuiteResult, rng_for, tol: Tolerances):
    for i in range(res.count):
        rng = rng_for(i)
        d = _random_diagram(rng)
        p = random_point(d, rng)
        q = apply_gauge(d, p, random_gauge(d, rng))
        r0, r1 = radial_norm(p), radial_norm(q)
        s0, s1 = psi(p), psi(q)
        m0, m1 = moment_map(d, p).total, moment_map(d, q).total
        dev = max(
            abs(r1 - r0) / r0,
            np.linalg.norm(s1 - s0) / np.linalg.norm(s0),
            abs(m1 - m0) / max(m0, 1e-300),
        )
        res.record(rng_for.key(i), dev, str(d))


def suite_oracle_length2(res: SuiteResult, rng_for, tol: Tolerances):
    for i in range(res.count):
        rng = rng_for(i)
        x = _square_zero_case(rng)
        d = diagram_for(x, tol=tol)
        try:
            point, _ = solve_moment(d, x, int(rng.integers(2 ** 31)), tol)
        except SolverError as exc:
            res.record(rng_for.key(i), np.inf, f"{x.algebra}: {exc}")
            continue
        res.record(rng_for.key(i), _rel(radial_norm(point), potential_length2(x, tol)), f"{x.algebra}")


def suite_lift_sign(res: SuiteResult, rng_for, tol: Tolerances):
    for i in range(res.count):
        rng = rng_for(i)
        kind = int(rng.integers(3))
        if kind == 0:
            n = int(rng.integers(5, 10))
            x = random_orbit_element(JordanType((3,) + (1,) * (n - 3)), AlgebraKind(Family.SO, n), seed=rng)
        else:
            variant = "322" if kind == 1 else "324"
            x = to_standard_form(canonical_fiber(CanonicalFiberParams.random(variant, rng)))
        lift = border_lift(x, tol)
        flip = lift.flipped()
        a, b = lift.x_prime, flip.x_prime
        ea = np.linalg.eigvalsh(a @ a.conj().T)
        eb = np.linalg.eigvalsh(b @ b.conj().T)
        res.record(rng_for.key(i), np.max(np.abs(ea - eb)) / max(ea.max(), 1e-300), f"{x.algebra}")


def suite_jacobian(res: SuiteResult, rng_for, tol: Tolerances):
    for i in range(res.count):
        rng = rng_for(i)
        d = _random_diagram(rng)
        theta = pack(d, random_point(d, rng))
        target = np.zeros((d.n, d.n), dtype=complex)
        jac = residual_jacobian(d, theta)
        h = 1e-6 * max(1.0, np.max(np.abs(theta)))
        fd = np.empty_like(jac)
        for j in range(theta.size):
            e = np.zeros_like(theta)
            e[j] = h
            fd[:, j] = (residual_vector(d, theta + e, target) - residual_vector(d, theta - e, target)) / (2 * h)
        res.record(rng_for.key(i), np.max(np.abs(jac - fd)) / np.max(np.abs(jac)), str(d))


SUITES = {
    "even-multiplicity": (suite_even_multiplicity, 0.0),
    "homogeneity": (suite_homogeneity, 1e-10),
    "conjugation-invariance": (suite_conjugation, 1e-9),
    "gauge-invariance": (suite_gauge, 1e-12),
    "oracle-length2": (suite_oracle_length2, 1e-5),
    "lift-sign": (suite_lift_sign, 1e-12),
    "jacobian": (suite_jacobian, 1e-5),
}

DEFAULT_COUNTS = {
    "even-multiplicity": 200,
    "homogeneity": 100,
    "conjugation-invariance": 100,
    "gauge-invariance": 100,
    "oracle-length2": 20,
    "lift-sign": 50,
    "jacobian": 20,
}


class _Streams:
    def __init__(self, seed: int):
        self.seed = int(seed)

    def key(self, i: int) -> tuple:
        return (self.seed, int(i))

    def __call__(self, i: int):
        return np.random.default_rng([self.seed, int(i)])


def run_suite(name: str, count: int | None = None, seed: int = 0, tol: Tolerances = DEFAULT_TOL) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    fn, tolerance = SUITES[name]
    count = DEFAULT_COUNTS[name] if count is None else int(count)
    res = SuiteResult(name, count, tolerance)
    fn(res, _Streams(seed), tol)
    return res

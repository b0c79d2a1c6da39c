"""Closed-form hyperKähler potentials of nilpotent orbits and their cross-checks.

All formulas take an :class:`~hkpotentials.lie.OrbitElement`; so(n)
elements must be in the identity (skew-symmetric) convention, except that
:func:`compute_all` converts anti-diagonal input itself and says so.

The potential ``rho`` is the restriction of the flat ``r^2``; it is
homogeneous of degree one in ``X``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .lie import (
    AlgebraKind,
    CanonicalFiberParams,
    Classification,
    Family,
    FiberVariant,
    FormKind,
    JordanType,
    OrbitElement,
    classify,
    jordan_type_of,
    require_valid,
    to_standard_form,
)
from .linalg import (
    DEFAULT_TOL,
    HermitianSpectrum,
    Tolerances,
    hermitian_spectrum,
    rank1_symmetric_factor,
)
from .quiver import SolverError, diagram_for, radial_norm, solve_moment

__all__ = [
    "Invariants",
    "LiftResult",
    "CubicCoeffs",
    "MethodResult",
    "OracleResult",
    "PotentialReport",
    "invariants",
    "spectral_potential",
    "potential_length2",
    "potential_minimal",
    "potential_coh2",
    "border_lift",
    "potential_32k",
    "potential_322_closed",
    "cubic_coefficients",
    "cubic_roots",
    "potential_324_cubic",
    "potential_sl3_regular",
    "sl3_entries",
    "compute_all",
]


@dataclass(frozen=True)
class Invariants:
    """``c1 = Tr X X^*``, ``c2 = Tr Y Y^*`` with ``Y = [X, X^*]``, ``c21 = |X^2|^2``."""

    c1: float
    c2: float
    c21: float
    kappa: int


@dataclass(frozen=True, eq=False)
class LiftResult:
    x: np.ndarray
    x_prime: np.ndarray

    def flipped(self) -> "LiftResult":
        """The lift built from ``-x``, equally valid."""
        n = self.x.size
        xp = self.x_prime.copy()
        xp[:n, n] *= -1
        xp[n, :n] *= -1
        return LiftResult(-self.x, xp)


@dataclass(frozen=True)
class CubicCoeffs:
    """Coefficients of ``z^3 - p z^2 + q z - r``."""

    p: float
    q: float
    r: float


def _trace_real(t: complex, what: str) -> float:
    if abs(t.imag) > 1e-12 * max(1.0, abs(t)):
        raise ArithmeticError(f"{what} has imaginary part {t.imag:.3e}")
    return float(t.real)


def invariants(x: OrbitElement) -> Invariants:
    m = np.asarray(x.matrix)
    ms = m.conj().T
    y = m @ ms - ms @ m
    x2 = m @ m
    return Invariants(
        c1=_trace_real(np.trace(m @ ms), "Tr XX*"),
        c2=_trace_real(np.trace(y @ y.conj().T), "Tr YY*"),
        c21=_trace_real(np.trace(x2 @ x2.conj().T), "Tr X^2 X*^2"),
        kappa=x.algebra.kappa,
    )


def _require_standard(x: OrbitElement, what: str):
    if x.family is Family.SO and x.form.kind is not FormKind.IDENTITY:
        raise ValueError(f"{what} needs so(n) in the identity convention; use to_standard_form first")


def _type_of(x: OrbitElement, tol: Tolerances) -> JordanType:
    return jordan_type_of(x.matrix, tol)


def spectral_potential(spec: HermitianSpectrum) -> float:
    """``2 sum k_i sqrt(mu_i)`` over the non-zero groups."""
    if spec.negative:
        raise ArithmeticError("spectrum of X*X has a genuinely negative eigenvalue")
    return float(2.0 * sum(k * np.sqrt(mu) for mu, k in spec.nonzero_groups()))


def potential_length2(x: OrbitElement, tol: Tolerances = DEFAULT_TOL) -> float:
    """Potential of a square-zero element, ``2 sum k_i sqrt(mu_i)`` on ``spec(X^*X)``."""
    m = np.asarray(x.matrix)
    norm = np.linalg.norm(m)
    if norm == 0.0:
        return 0.0
    if np.linalg.norm(m @ m) > tol.check_tol * norm ** 2:
        raise ValueError("potential_length2 needs X^2 = 0")
    return spectral_potential(hermitian_spectrum(m.conj().T @ m, tol))


def _check_type(x: OrbitElement, cls_flag: str, tol: Tolerances) -> bool:
    """Return False for X = 0, raise if the Jordan type is not the right one."""
    if np.linalg.norm(x.matrix) == 0.0:
        return False
    jt = _type_of(x, tol)
    cls = classify(jt, x.algebra)
    if not getattr(cls, cls_flag):
        raise ValueError(f"Jordan type {jt} is not {cls_flag.removeprefix('is_')} in {x.algebra}")
    return True


def _clamped_sqrt(value: float, scale: float, tol: Tolerances, what: str) -> float:
    if value < 0:
        if value < -tol.check_tol * max(scale, np.finfo(float).tiny):
            raise ArithmeticError(f"radicand {what} = {value:.6e} is negative")
        value = 0.0
    return float(np.sqrt(value))


def potential_minimal(x: OrbitElement, tol: Tolerances = DEFAULT_TOL) -> float:
    """Minimal orbit: ``rho^2 = 4 kappa Tr X^* X``.

    Also checks that the single non-zero eigenvalue of ``X^*X`` has
    multiplicity ``kappa``.
    """
    _require_standard(x, "potential_minimal")
    if not _check_type(x, "is_minimal", tol):
        return 0.0
    m = np.asarray(x.matrix)
    mult = hermitian_spectrum(m.conj().T @ m, tol).multiplicities()
    if mult != (x.algebra.kappa,):
        raise ArithmeticError(f"minimal orbit spectrum multiplicities {mult}, expected ({x.algebra.kappa},)")
    inv = invariants(x)
    return float(np.sqrt(4.0 * inv.kappa * inv.c1))


def potential_coh2(x: OrbitElement, tol: Tolerances = DEFAULT_TOL) -> float:
    """Cohomogeneity two: ``rho^2 = 4 kappa c1 + 4 kappa sqrt(2 c1^2 - kappa c2)``."""
    _require_standard(x, "potential_coh2")
    if not _check_type(x, "is_coh2", tol):
        return 0.0
    inv = invariants(x)
    kap = inv.kappa
    root = _clamped_sqrt(2.0 * inv.c1 ** 2 - kap * inv.c2, inv.c1 ** 2, tol, "2 c1^2 - kappa c2")
    return float(np.sqrt(4.0 * kap * inv.c1 + 4.0 * kap * root))


def border_lift(x: OrbitElement, tol: Tolerances = DEFAULT_TOL) -> LiftResult:
    """``X' = [[X, x], [-x^T, 0]]`` in so(n+1) with ``X^2 = x x^T``.

    ``x`` is isotropic and killed by ``X``, so ``X'^2 = 0``.
    """
    if x.family is not Family.SO:
        raise ValueError("the border lift is defined for so(n)")
    _require_standard(x, "border_lift")
    m = np.asarray(x.matrix)
    n = x.n
    norm = np.linalg.norm(m)
    if np.linalg.norm(m + m.T) > tol.check_tol * max(norm, 1e-300):
        raise ValueError("X is not skew-symmetric")
    if norm == 0.0:
        return LiftResult(np.zeros(n, complex), np.zeros((n + 1, n + 1), complex))
    u = m / norm
    if np.linalg.norm(u @ u @ u) > tol.check_tol:
        raise ValueError("border lift needs X^3 = 0")
    x2 = m @ m
    if np.linalg.norm(x2) <= tol.check_tol * norm ** 2:
        x2 = np.zeros_like(x2)
    try:
        vec = rank1_symmetric_factor(x2, tol)
    except ValueError as exc:
        raise ValueError(f"border lift needs rank X^2 <= 1: {exc}") from exc
    xp = np.zeros((n + 1, n + 1), dtype=complex)
    xp[:n, :n] = m
    xp[:n, n] = vec
    xp[n, :n] = -vec
    return LiftResult(vec, xp)


def _lift_spectrum(lift: LiftResult, tol: Tolerances) -> HermitianSpectrum:
    xp = lift.x_prime
    scale = max(1.0, float(np.linalg.norm(xp)) ** 2)
    if np.linalg.norm(xp @ xp) > tol.check_tol * scale:
        raise ArithmeticError("lifted matrix does not square to zero")
    spec = hermitian_spectrum(xp @ xp.conj().T, tol)
    odd = [k for k in spec.multiplicities() if k % 2]
    if odd:
        raise ArithmeticError(f"lifted spectrum has odd multiplicities {spec.multiplicities()}")
    return spec


def potential_32k(x: OrbitElement, tol: Tolerances = DEFAULT_TOL) -> float:
    """Potential of a ``(3, 2^2k, 1^...)`` element through the border lift."""
    return spectral_potential(_lift_spectrum(border_lift(x, tol), tol))


def potential_322_closed(x: OrbitElement, tol: Tolerances = DEFAULT_TOL) -> float:
    """``rho^2 = 8 c1 + 16 sqrt(c21) + 16 sqrt(c1^2 - c2 - 2 c21)`` on ``(3,2^2,1^...)``.

    Exact on the whole orbit in so(7).  For n > 7 it is exact on the
    padded canonical fibre but not on generic orbit elements, where the
    border lift disagrees with it by up to about one percent; the
    dispatcher therefore only uses it in so(7).
    """
    if x.family is not Family.SO:
        raise ValueError("potential_322_closed is defined for so(n)")
    _require_standard(x, "potential_322_closed")
    if np.linalg.norm(x.matrix) == 0.0:
        return 0.0
    jt = _type_of(x, tol)
    if jt.largest != 3 or jt.multiplicity(3) != 1 or jt.multiplicity(2) != 2:
        raise ValueError(f"Jordan type {jt} is not (3,2^2,1^...)")
    inv = invariants(x)
    root = _clamped_sqrt(inv.c1 ** 2 - inv.c2 - 2.0 * inv.c21, inv.c1 ** 2, tol, "c1^2 - c2 - 2 c21")
    return float(np.sqrt(8.0 * inv.c1 + 16.0 * np.sqrt(inv.c21) + 16.0 * root))


def cubic_coefficients(params: CanonicalFiberParams) -> CubicCoeffs:
    """``p, q, r`` for the ``(3,2^4)`` fibre.

    ``p = 2|a|^2 + |b|^2 + |v|^2 + |w|^2``,
    ``q = |zeta|^2 + |b|^2 |w|^2 + 2|a|^2 (|v|^2 + |w|^2)``,
    ``r = 2 |a|^2 |zeta|^2``.
    """
    if params.variant is not FiberVariant.F324:
        raise ValueError("the cubic applies to the (3,2^4) fibre")
    a2 = abs(params.a) ** 2
    b2 = abs(params.b) ** 2
    v2 = float(sum(abs(t) ** 2 for t in params.v))
    w2 = float(sum(abs(t) ** 2 for t in params.w))
    z2 = abs(params.zeta) ** 2
    return CubicCoeffs(
        p=2.0 * a2 + b2 + v2 + w2,
        q=z2 + b2 * w2 + 2.0 * a2 * (v2 + w2),
        r=2.0 * a2 * z2,
    )


def cubic_roots(c: CubicCoeffs, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Real roots ``l1 >= l2 >= l3 >= 0`` of ``z^3 - p z^2 + q z - r``."""
    scale = max(abs(c.p), np.finfo(float).tiny)
    if c.r == 0.0:
        disc = c.p ** 2 - 4.0 * c.q
        if disc < -tol.check_tol * scale ** 2:
            raise ArithmeticError(f"cubic has complex roots (discriminant {disc:.3e})")
        s = np.sqrt(max(disc, 0.0))
        roots = np.array([0.5 * (c.p + s), 0.5 * (c.p - s), 0.0], dtype=complex)
    else:
        comp = np.array([[c.p, -c.q, c.r], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        roots = np.linalg.eigvals(comp)
    if np.max(np.abs(roots.imag)) > 1e-8 * scale:
        raise ArithmeticError(f"cubic has complex roots {roots}")
    real = np.sort(roots.real)[::-1]
    if real[-1] < -tol.check_tol * scale:
        raise ArithmeticError(f"cubic has a negative root {real[-1]:.3e}")
    return np.maximum(real, 0.0)


def potential_324_cubic(params: CanonicalFiberParams, tol: Tolerances = DEFAULT_TOL) -> float:
    """``rho = 4 (sqrt(l1) + sqrt(l2) + sqrt(l3))``; each root is a double eigenvalue of ``X'X'^*``."""
    roots = cubic_roots(cubic_coefficients(params), tol)
    return float(4.0 * np.sum(np.sqrt(roots)))


def potential_sl3_regular(a, b, c) -> float:
    """``rho = 2 sqrt((|a|^(2/3) + |c|^(2/3))^3 + |b|^2)`` for ``[[0,a,b],[0,0,c],[0,0,0]]``."""
    a, b, c = abs(complex(a)), abs(complex(b)), abs(complex(c))
    return float(2.0 * np.sqrt((np.cbrt(a * a) + np.cbrt(c * c)) ** 3 + b * b))


def sl3_entries(x: OrbitElement, tol: Tolerances = DEFAULT_TOL) -> tuple[complex, complex, complex]:
    """Entries ``(a, b, c)`` of a unitarily equivalent strictly upper-triangular form.

    The basis is adapted to the flag ``ker X`` in ``im X`` and read off from
    singular vectors.  A Schur decomposition would do in exact arithmetic,
    but rounding moves the triple zero eigenvalue by about ``eps^(1/3)``.
    """
    if x.family is not Family.SL or x.n != 3:
        raise ValueError("sl3_entries needs an element of sl(3)")
    m = np.asarray(x.matrix)
    u, s, vh = np.linalg.svd(m)
    if s[0] == 0.0:
        return 0j, 0j, 0j
    if s[1] <= tol.rank_cut * s[0]:
        # X = s0 u0 v0^*, with v0 orthogonal to u0 since X^2 = 0
        basis = np.column_stack([u[:, 0], u[:, 2], vh[0].conj()])
        basis[:, 1] = np.cross(basis[:, 0].conj(), basis[:, 2].conj())
    else:
        k = vh[2].conj()
        e2 = u[:, 0] - k * np.vdot(k, u[:, 0])
        alt = u[:, 1] - k * np.vdot(k, u[:, 1])
        e2 = e2 if np.linalg.norm(e2) >= np.linalg.norm(alt) else alt
        e2 = e2 / np.linalg.norm(e2)
        basis = np.column_stack([k, e2, u[:, 2]])
    t = basis.conj().T @ m @ basis
    return complex(t[0, 1]), complex(t[0, 2]), complex(t[1, 2])


# --- dispatcher -----------------------------------------------------------


@dataclass(frozen=True)
class MethodResult:
    rho: float | None
    status: str
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class OracleResult:
    r2: float
    rho: float
    residual: float
    seed: int
    iterations: int
    restarts: int
    converged: bool
    boundary: bool


@dataclass(frozen=True, eq=False)
class PotentialReport:
    element: OrbitElement
    jordan_type: JordanType
    classification: Classification
    methods: dict
    max_pairwise_deviation: float
    invariants: Invariants
    spectrum: HermitianSpectrum
    lift_spectrum: HermitianSpectrum | None = None
    oracle: OracleResult | None = None
    flags: tuple[str, ...] = field(default=())

    @property
    def rho(self) -> float | None:
        """Consensus value: the first successful closed form, else the oracle."""
        for name in _PREFERENCE:
            res = self.methods.get(name)
            if res is not None and res.ok:
                return res.rho
        return None

    @property
    def all_ok(self) -> bool:
        return all(m.ok for m in self.methods.values())


_PREFERENCE = ("length2", "minimal", "coh2", "32k-lift", "322-closed", "324-cubic", "sl3-regular", "oracle")


def _max_deviation(values) -> float:
    worst = 0.0
    for u, v in itertools.combinations(values, 2):
        ref = max(abs(u), abs(v))
        if ref > 0:
            worst = max(worst, abs(u - v) / ref)
    return worst


def compute_all(
    x: OrbitElement,
    tol: Tolerances = DEFAULT_TOL,
    oracle: bool = False,
    seed: int = 0,
    jordan: JordanType | None = None,
    fiber: CanonicalFiberParams | None = None,
    max_restarts: int = 8,
) -> PotentialReport:
    """Every applicable potential formula, optionally the numerical oracle.

    Method failures and disagreements are recorded in the report, never
    raised; only invalid input raises.  ``jordan`` is a claimed type,
    compared against the measured one; ``fiber`` enables the cubic route
    when ``X`` was built from ``(3,2^4)`` fibre parameters.
    """
    require_valid(x, tol)
    flags = []
    if x.family is Family.SO and x.form.kind is FormKind.ANTIDIAGONAL:
        x = to_standard_form(x, tol)
        flags.append("converted")
    elif x.family is Family.SO and x.form.kind is not FormKind.IDENTITY:
        raise ValueError("so(n) input must use the identity or anti-diagonal convention")
    jt = _type_of(x, tol)
    if jordan is not None and JordanType(jordan.parts) != jt:
        flags.append("jordan-mismatch")
    cls = classify(jt, x.algebra)
    m = np.asarray(x.matrix)
    trivial = np.linalg.norm(m) == 0.0
    if trivial:
        flags.append("trivial")
    spec = hermitian_spectrum(m.conj().T @ m, tol)
    if spec.negative:
        flags.append("negativity")
    inv = invariants(x)

    closed = {
        "length2": lambda: potential_length2(x, tol),
        "minimal": lambda: potential_minimal(x, tol),
        "coh2": lambda: potential_coh2(x, tol),
        "32k-lift": lambda: potential_32k(x, tol),
        "322-closed": lambda: potential_322_closed(x, tol),
        "sl3-regular": lambda: potential_sl3_regular(*sl3_entries(x)),
    }
    names = [k for k in closed if k in cls.methods]
    if fiber is not None and fiber.variant is FiberVariant.F324:
        closed["324-cubic"] = lambda: potential_324_cubic(fiber, tol)
        names.append("324-cubic")

    methods = {}
    for name in names:
        try:
            methods[name] = MethodResult(closed[name](), "ok")
        except (ValueError, ArithmeticError) as exc:
            methods[name] = MethodResult(None, "failed", str(exc))

    lift_spec = None
    if "32k-lift" in cls.methods:
        try:
            lift_spec = _lift_spectrum(border_lift(x, tol), tol)
        except (ValueError, ArithmeticError):
            lift_spec = None

    orc = None
    if oracle:
        d = diagram_for(jt, x.algebra)
        try:
            point, diag = solve_moment(d, x, seed, tol, max_restarts=max_restarts)
            r2 = radial_norm(point)
            methods["oracle"] = MethodResult(r2, "ok")
        except SolverError as exc:
            diag = exc.diagnostics
            r2 = radial_norm(exc.point) if exc.point is not None else float("nan")
            methods["oracle"] = MethodResult(None, "failed", str(exc))
            flags.append("oracle-failed")
        orc = OracleResult(r2, r2, diag.residual, int(seed), diag.iterations, diag.restarts, diag.converged, diag.boundary)
        if diag.boundary and "boundary" not in flags:
            flags.append("boundary")

    values = [r.rho for r in methods.values() if r.ok]
    return PotentialReport(
        element=x,
        jordan_type=jt,
        classification=cls,
        methods=methods,
        max_pairwise_deviation=_max_deviation(values),
        invariants=inv,
        spectrum=spec,
        lift_spectrum=lift_spec,
        oracle=orc,
        flags=tuple(flags),
    )

"""Flat quaternionic space of a flag diagram and its hyperKähler moment map.

A diagram of length ``k`` is the chain ``0 <-> V_1 <-> ... <-> V_k = C^n``
with arrows ``alpha_j : V_{j+1} -> V_{j+2}`` and ``beta_j`` going back
(``j = 0 .. k-2``, zero-based).  The gauge group acts on ``V_1 .. V_{k-1}``;
``V_k`` is not gauged.  The node at ``V_{j+1}`` has moment map components::

    mu_C = alpha_{j-1} beta_{j-1} - beta_j alpha_j
    mu_R = alpha_{j-1} alpha_{j-1}^* - beta_{j-1}^* beta_{j-1}
           + beta_j beta_j^* - alpha_j^* alpha_j

(terms with ``j - 1 < 0`` absent), and ``psi = alpha_{k-2} beta_{k-2}``.

For so and sp every node carries a bilinear form and ``beta_j`` is the
form adjoint of ``alpha_j``, so only the alphas are free.  The potential
of the orbit through ``X`` is the squared norm ``r^2`` of any point with
``mu = 0`` and ``psi = X``; :func:`solve_moment` finds one numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.stats

from .lie import (
    AlgebraKind,
    BilinearForm,
    Family,
    FormKind,
    JordanType,
    OrbitElement,
    haar_compact_symplectic,
    haar_special_orthogonal,
    jordan_type_of,
    native_form,
)
from .linalg import DEFAULT_TOL, Tolerances, as_matrix, dagger_adjoint, jacobi_eigh

__all__ = [
    "Diagram",
    "DiagramPoint",
    "MomentResidual",
    "SolveDiagnostics",
    "SolverError",
    "diagram_for",
    "make_point",
    "zero_point",
    "moment_map",
    "radial_norm",
    "psi",
    "apply_gauge",
    "random_gauge",
    "random_point",
    "length2_factorize",
    "pack",
    "unpack",
    "residual_vector",
    "residual_jacobian",
    "solve_moment",
]


def _h(a):
    """Conjugate transpose over the last two axes (works on batches)."""
    return np.conj(np.swapaxes(a, -1, -2))


@dataclass(frozen=True, eq=False)
class Diagram:
    """Flag dimensions ``(dim V_1, ..., dim V_k)`` and, for so/sp, node forms.

    Node ``V_i`` carries a symmetric form when ``k - i + delta`` is even
    and a skew one otherwise; the last node carries the algebra's own form.
    """

    dims: tuple[int, ...]
    algebra: AlgebraKind
    forms: tuple[BilinearForm, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"diagram dimensions must be positive, got {dims}")
        if dims[-1] != self.algebra.n:
            raise ValueError(f"last flag space has dimension {dims[-1]}, algebra is {self.algebra}")
        object.__setattr__(self, "dims", dims)
        if self.algebra.family is Family.SL:
            object.__setattr__(self, "forms", None)
            return
        k = len(dims)
        delta = self.algebra.delta
        forms = []
        for i, d in enumerate(dims, start=1):
            if (k - i + delta) % 2:
                if d % 2:
                    raise ValueError(f"dim V_{i} = {d} must be even (skew form) in {self.algebra}")
                forms.append(BilinearForm.symplectic(d))
            else:
                forms.append(BilinearForm.identity(d))
        object.__setattr__(self, "forms", tuple(forms))

    @property
    def length(self) -> int:
        return len(self.dims)

    @property
    def n(self) -> int:
        return self.dims[-1]

    @property
    def family(self) -> Family:
        return self.algebra.family

    @property
    def constrained(self) -> bool:
        """True when betas are tied to alphas (so and sp)."""
        return self.forms is not None

    @property
    def n_arrows(self) -> int:
        return self.length - 1

    def alpha_shape(self, j: int) -> tuple[int, int]:
        return (self.dims[j + 1], self.dims[j])

    def n_real_params(self) -> int:
        per = sum(a * b for a, b in (self.alpha_shape(j) for j in range(self.n_arrows)))
        return 2 * per * (1 if self.constrained else 2)

    def derive_beta(self, j: int, alpha):
        """``beta_j = alpha_j^dagger``; accepts a stack of alphas."""
        src = self.forms[j]
        dst = self.forms[j + 1]
        return src.inverse() @ np.swapaxes(alpha, -1, -2) @ dst.matrix

    def __str__(self):
        return " <-> ".join(["0"] + [str(d) for d in self.dims])


@dataclass(frozen=True, eq=False)
class DiagramPoint:
    """Arrow maps of a diagram; build with :func:`make_point`."""

    alphas: tuple[np.ndarray, ...]
    betas: tuple[np.ndarray, ...]

    def scaled(self, t: float) -> "DiagramPoint":
        return DiagramPoint(tuple(t * a for a in self.alphas), tuple(t * b for b in self.betas))


@dataclass(frozen=True, eq=False)
class MomentResidual:
    complex_parts: tuple[np.ndarray, ...]
    real_parts: tuple[np.ndarray, ...]

    @property
    def total(self) -> float:
        return float(
            sum(np.vdot(c, c).real for c in self.complex_parts)
            + sum(np.vdot(r, r).real for r in self.real_parts)
        )


@dataclass(frozen=True)
class SolveDiagnostics:
    converged: bool
    residual: float
    target: float
    iterations: int
    restarts: int
    seed: int
    boundary: bool = False
    trivial: bool = False
    history: tuple[float, ...] = field(default=(), repr=False)


class SolverError(RuntimeError):
    """Moment-map solve that did not reach the residual target."""

    def __init__(self, message: str, point: DiagramPoint | None, diagnostics: SolveDiagnostics):
        super().__init__(message)
        self.point = point
        self.diagnostics = diagnostics


def diagram_for(target, algebra: AlgebraKind | None = None, tol: Tolerances = DEFAULT_TOL) -> Diagram:
    """Image-flag diagram ``dim V_i = rank X^(k-i)`` of an element or Jordan type."""
    if isinstance(target, OrbitElement):
        algebra = target.algebra
        jt = jordan_type_of(target.matrix, tol)
    else:
        jt = target if isinstance(target, JordanType) else JordanType(tuple(target))
        if algebra is None:
            raise ValueError("an algebra is needed to build a diagram from a Jordan type")
        jt.check(algebra)
    ranks = jt.rank_sequence()
    k = jt.largest
    return Diagram(tuple(ranks[k - i] for i in range(1, k + 1)), algebra)


def make_point(d: Diagram, alphas, betas=None) -> DiagramPoint:
    """Validate shapes; for so/sp the betas are derived from the alphas."""
    alphas = [as_matrix(a).copy() for a in alphas]
    if len(alphas) != d.n_arrows:
        raise ValueError(f"diagram {d} needs {d.n_arrows} alphas, got {len(alphas)}")
    for j, a in enumerate(alphas):
        if a.shape != d.alpha_shape(j):
            raise ValueError(f"alpha_{j} has shape {a.shape}, expected {d.alpha_shape(j)}")
    if d.constrained:
        if betas is not None:
            raise ValueError("betas are determined by the alphas for so and sp")
        betas = [d.derive_beta(j, a) for j, a in enumerate(alphas)]
    else:
        if betas is None:
            raise ValueError("sl diagrams need explicit betas")
        betas = [as_matrix(b).copy() for b in betas]
        if len(betas) != d.n_arrows:
            raise ValueError(f"diagram {d} needs {d.n_arrows} betas, got {len(betas)}")
        for j, b in enumerate(betas):
            if b.shape != d.alpha_shape(j)[::-1]:
                raise ValueError(f"beta_{j} has shape {b.shape}, expected {d.alpha_shape(j)[::-1]}")
    for a in alphas + betas:
        a.flags.writeable = False
    return DiagramPoint(tuple(alphas), tuple(betas))


def zero_point(d: Diagram) -> DiagramPoint:
    alphas = [np.zeros(d.alpha_shape(j), dtype=complex) for j in range(d.n_arrows)]
    betas = None if d.constrained else [a.T.copy() for a in alphas]
    return make_point(d, alphas, betas)


def _check_point(d: Diagram, p: DiagramPoint):
    if len(p.alphas) != d.n_arrows or len(p.betas) != d.n_arrows:
        raise ValueError(f"point does not match diagram {d}")
    for j in range(d.n_arrows):
        if p.alphas[j].shape != d.alpha_shape(j) or p.betas[j].shape != d.alpha_shape(j)[::-1]:
            raise ValueError(f"arrow {j} has the wrong shape for diagram {d}")


def _moment_parts(alphas, betas):
    """Per-node (mu_C, mu_R); arrays may carry a leading batch axis."""
    out = []
    for j in range(len(alphas)):
        a, b = alphas[j], betas[j]
        mc = -(b @ a)
        mr = b @ _h(b) - _h(a) @ a
        if j > 0:
            ap, bp = alphas[j - 1], betas[j - 1]
            mc = mc + ap @ bp
            mr = mr + ap @ _h(ap) - _h(bp) @ bp
        out.append((mc, mr))
    return out


def _moment_differential(alphas, betas, da, db):
    """Directional derivative of :func:`_moment_parts` along ``(da, db)``."""
    out = []
    for j in range(len(alphas)):
        a, b, ha, hb = alphas[j], betas[j], da[j], db[j]
        mc = -(hb @ a + b @ ha)
        mr = hb @ _h(b) + b @ _h(hb) - _h(ha) @ a - _h(a) @ ha
        if j > 0:
            ap, bp, hap, hbp = alphas[j - 1], betas[j - 1], da[j - 1], db[j - 1]
            mc = mc + hap @ bp + ap @ hbp
            mr = mr + hap @ _h(ap) + ap @ _h(hap) - _h(hbp) @ bp - _h(bp) @ hbp
        out.append((mc, mr))
    return out


def moment_map(d: Diagram, p: DiagramPoint) -> MomentResidual:
    """Complex and real moment map at every gauged node."""
    _check_point(d, p)
    parts = _moment_parts(p.alphas, p.betas)
    return MomentResidual(tuple(c for c, _ in parts), tuple(r for _, r in parts))


def radial_norm(p: DiagramPoint) -> float:
    """``r^2 = sum Tr(alpha^* alpha + beta beta^*)``."""
    return float(sum(np.vdot(a, a).real for a in p.alphas) + sum(np.vdot(b, b).real for b in p.betas))


def psi(p: DiagramPoint) -> np.ndarray:
    """The equivariant map to the Lie algebra, ``alpha_last beta_last``."""
    if not p.alphas:
        raise ValueError("a diagram of length 1 has no arrows")
    return p.alphas[-1] @ p.betas[-1]


def _check_gauge(d: Diagram, gauge, tol: float = 1e-10):
    gauge = [as_matrix(g) for g in gauge]
    if len(gauge) != d.length - 1:
        raise ValueError(f"diagram {d} has {d.length - 1} gauged nodes, got {len(gauge)} matrices")
    for i, g in enumerate(gauge):
        dim = d.dims[i]
        if g.shape != (dim, dim):
            raise ValueError(f"gauge at V_{i + 1} has shape {g.shape}, expected {(dim, dim)}")
        if np.linalg.norm(g.conj().T @ g - np.eye(dim)) > tol * dim:
            raise ValueError(f"gauge at V_{i + 1} is not unitary")
        if d.constrained:
            form = d.forms[i]
            if np.linalg.norm(dagger_adjoint(g, form, form) @ g - np.eye(dim)) > tol * dim:
                raise ValueError(f"gauge at V_{i + 1} does not preserve the node form")
    return gauge


def apply_gauge(d: Diagram, p: DiagramPoint, gauge) -> DiagramPoint:
    """``alpha_j -> g_{j+1} alpha_j g_j^{-1}``, ``beta_j -> g_j beta_j g_{j+1}^{-1}``."""
    _check_point(d, p)
    gauge = _check_gauge(d, gauge) + [np.eye(d.n)]
    alphas = [gauge[j + 1] @ p.alphas[j] @ gauge[j].conj().T for j in range(d.n_arrows)]
    if d.constrained:
        return make_point(d, alphas)
    betas = [gauge[j] @ p.betas[j] @ gauge[j + 1].conj().T for j in range(d.n_arrows)]
    return make_point(d, alphas, betas)


def random_gauge(d: Diagram, seed=None) -> list[np.ndarray]:
    """Haar-random element of the compact gauge group of ``d``."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(d.length - 1):
        dim = d.dims[i]
        if not d.constrained:
            g = np.eye(1, dtype=complex) * np.exp(2j * np.pi * rng.random()) if dim == 1 else (
                scipy.stats.unitary_group.rvs(dim, random_state=rng)
            )
        elif d.forms[i].kind is FormKind.SYMPLECTIC:
            g = haar_compact_symplectic(dim, rng)
        else:
            g = haar_special_orthogonal(dim, rng).astype(complex)
            if dim > 1 and rng.random() < 0.5:
                g[:, 0] *= -1  # the full orthogonal group
        out.append(np.asarray(g, dtype=complex))
    return out


def random_point(d: Diagram, seed=None, scale: float = 1.0) -> DiagramPoint:
    rng = np.random.default_rng(seed)

    def cg(shape):
        return scale * (rng.normal(size=shape) + 1j * rng.normal(size=shape)) / np.sqrt(2)

    alphas = [cg(d.alpha_shape(j)) for j in range(d.n_arrows)]
    betas = None if d.constrained else [cg(d.alpha_shape(j)[::-1]) for j in range(d.n_arrows)]
    return make_point(d, alphas, betas)


def length2_factorize(x: OrbitElement, tol: Tolerances = DEFAULT_TOL) -> tuple[Diagram, DiagramPoint]:
    """Explicit solution ``(alpha, beta)`` of the length-two equations.

    With ``e_i`` orthonormal eigenvectors of ``X^* X`` for the eigenvalues
    ``mu_i > 0`` and ``f_i = mu_i^(-1/2) X e_i``, set
    ``alpha = F diag(mu^(1/4))`` and ``beta = diag(mu^(1/4)) E^*``.  Then
    ``alpha beta = X``, ``beta alpha = 0`` and ``beta beta^* = alpha^* alpha``.

    The point lives on the unconstrained diagram ``C^r <-> C^n`` for every
    family; ``r^2`` of the point is the potential at ``X``.
    """
    mat = x.matrix
    n = x.n
    norm = np.linalg.norm(mat)
    sl_alg = AlgebraKind(Family.SL, n)
    if norm == 0.0:
        d = Diagram((1, n), sl_alg)
        return d, zero_point(d)
    if np.linalg.norm(mat @ mat) > tol.check_tol * norm ** 2:
        raise ValueError("length2_factorize needs X^2 = 0")
    w, v = jacobi_eigh(mat.conj().T @ mat)
    keep = w > tol.rank_cut * w[0]
    mu = w[keep]
    e = v[:, keep]
    f = (mat @ e) / np.sqrt(mu)
    q = mu ** 0.25
    alpha = f * q
    beta = q[:, None] * e.conj().T
    d = Diagram((len(mu), n), sl_alg)
    p = make_point(d, [alpha], [beta])
    bad = max(
        np.linalg.norm(beta @ alpha),
        np.linalg.norm(beta @ beta.conj().T - alpha.conj().T @ alpha),
        np.linalg.norm(alpha @ beta - mat),
    )
    if bad > tol.check_tol * norm:
        raise ValueError(f"length-two factorisation residual {bad:.3e} too large")
    return d, p


# --- real parametrisation -------------------------------------------------


def pack(d: Diagram, p: DiagramPoint) -> np.ndarray:
    """Real parameter vector of a point (alphas, then betas for sl)."""
    _check_point(d, p)
    mats = list(p.alphas) + ([] if d.constrained else list(p.betas))
    flat = np.concatenate([m.ravel() for m in mats]) if mats else np.zeros(0, complex)
    return np.concatenate([flat.real, flat.imag])


def _split(d: Diagram, theta: np.ndarray):
    """Real vector (or stack of vectors, last axis) -> alpha and beta arrays."""
    theta = np.asarray(theta, dtype=float)
    half = theta.shape[-1] // 2
    z = theta[..., :half] + 1j * theta[..., half:]
    lead = theta.shape[:-1]
    shapes = [d.alpha_shape(j) for j in range(d.n_arrows)]
    if not d.constrained:
        shapes += [s[::-1] for s in shapes]
    mats, off = [], 0
    for r, c in shapes:
        mats.append(z[..., off:off + r * c].reshape(lead + (r, c)))
        off += r * c
    if off != half:
        raise ValueError(f"parameter vector has length {theta.shape[-1]}, diagram needs {2 * off}")
    alphas = mats[:d.n_arrows]
    if d.constrained:
        betas = [d.derive_beta(j, a) for j, a in enumerate(alphas)]
    else:
        betas = mats[d.n_arrows:]
    return alphas, betas


def unpack(d: Diagram, theta) -> DiagramPoint:
    alphas, betas = _split(d, theta)
    return make_point(d, alphas, None if d.constrained else betas)


def _flatten(parts, extra, lead=()):
    blocks = []
    for mc, mr in parts:
        blocks += [mc, mr]
    blocks.append(extra)
    flat = np.concatenate([b.reshape(lead + (-1,)) for b in blocks], axis=-1)
    return np.concatenate([flat.real, flat.imag], axis=-1)


def residual_vector(d: Diagram, theta, target) -> np.ndarray:
    """``[mu_C, mu_R per node; psi - X]`` split into real and imaginary parts."""
    alphas, betas = _split(d, theta)
    x = as_matrix(target.matrix if isinstance(target, OrbitElement) else target)
    return _flatten(_moment_parts(alphas, betas), alphas[-1] @ betas[-1] - x)


def residual_jacobian(d: Diagram, theta, target=None) -> np.ndarray:
    """Analytic Jacobian of :func:`residual_vector` (independent of the target)."""
    theta = np.asarray(theta, dtype=float)
    m = theta.size
    alphas, betas = _split(d, theta)
    da, db = _split(d, np.eye(m))
    parts = _moment_differential(alphas, betas, da, db)
    dpsi = da[-1] @ betas[-1] + alphas[-1] @ db[-1]
    return _flatten(parts, dpsi, lead=(m,)).T


# --- Levenberg-Marquardt oracle -------------------------------------------


def _form_for(d: Diagram) -> BilinearForm:
    return native_form(d.algebra)


def _lm(d, x, theta, target, max_iter, lam0=1e-3):
    r = residual_vector(d, theta, x)
    cost = float(r @ r)
    lam = lam0
    history = [np.sqrt(cost)]
    it = 0
    for it in range(1, max_iter + 1):
        if np.sqrt(cost) <= target:
            return theta, np.sqrt(cost), it - 1, history
        jac = residual_jacobian(d, theta)
        m = theta.size
        while True:
            a = np.vstack([jac, np.sqrt(lam) * np.eye(m)])
            rhs = np.concatenate([-r, np.zeros(m)])
            step = np.linalg.lstsq(a, rhs, rcond=None)[0]
            trial = theta + step
            r_new = residual_vector(d, trial, x)
            cost_new = float(r_new @ r_new)
            if cost_new < cost:
                theta, r, cost = trial, r_new, cost_new
                lam = max(lam / 10.0, 1e-15)
                break
            lam *= 10.0
            if lam > 1e12:
                history.append(np.sqrt(cost))
                return theta, np.sqrt(cost), it, history
        history.append(np.sqrt(cost))
    return theta, np.sqrt(cost), it, history


def _initial_theta(d: Diagram, rng, radius2: float) -> np.ndarray:
    p = random_point(d, rng)
    return pack(d, p) * np.sqrt(radius2 / radial_norm(p))


def solve_moment(
    d: Diagram,
    x_target: OrbitElement,
    init_seed: int = 0,
    tol: Tolerances = DEFAULT_TOL,
    max_restarts: int = 8,
    max_iter: int = 500,
) -> tuple[DiagramPoint, SolveDiagnostics]:
    """Find a point with ``mu = 0`` and ``psi = X`` by Levenberg-Marquardt.

    The target is scaled to unit norm (the equations are homogeneous: the
    point for ``sX`` is ``sqrt(s)`` times the point for ``X``).  Each attempt
    starts from a seeded complex Gaussian point with ``r^2 = 2k``; seeds of
    the restarts are spawned from ``init_seed``.  Success means a combined
    residual ``sqrt(|mu|^2 + |psi - X|^2) <= solve_tol * max(1, |X|)``;
    otherwise :class:`SolverError` carries the best point found.
    """
    if x_target.n != d.n or x_target.family is not d.family:
        raise ValueError(f"target in {x_target.algebra} does not match diagram over {d.algebra}")
    if d.constrained and x_target.form != _form_for(d):
        raise ValueError(f"target must use the {_form_for(d).kind.value} convention")
    x = np.asarray(x_target.matrix)
    s = float(np.linalg.norm(x))
    goal = tol.solve_tol * max(1.0, s)
    if s == 0.0:
        diag = SolveDiagnostics(True, 0.0, goal, 0, 0, int(init_seed), boundary=d.length > 1, trivial=True)
        return zero_point(d), diag

    ranks = jordan_type_of(x, tol).rank_sequence()
    k = d.length
    if len(ranks) - 1 > k:
        raise ValueError(f"X^{k} != 0: the target does not fit the length-{k} diagram {d}")
    ranks = ranks + (0,) * (k + 1 - len(ranks))
    boundary = any(ranks[k - i] < d.dims[i - 1] for i in range(1, k + 1))

    xn = x / s
    seeds = np.random.SeedSequence(int(init_seed)).spawn(max_restarts + 1)
    best = None
    total_iter = 0
    for attempt, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        theta0 = _initial_theta(d, rng, 2.0 * k)
        theta, res, its, hist = _lm(d, xn, theta0, 0.25 * tol.solve_tol, max_iter)
        total_iter += its
        point = unpack(d, theta).scaled(np.sqrt(s))
        true_res = _combined_residual(d, point, x)
        if best is None or true_res < best[1]:
            best = (point, true_res, attempt, hist)
        if true_res <= goal:
            diag = SolveDiagnostics(
                True, true_res, goal, total_iter, attempt, int(init_seed), boundary, False, tuple(hist)
            )
            return point, diag
    point, res, attempt, hist = best
    diag = SolveDiagnostics(False, res, goal, total_iter, max_restarts, int(init_seed), boundary, False, tuple(hist))
    raise SolverError(
        f"moment-map solve did not converge: best residual {res:.3e} > {goal:.3e} after {max_restarts} restarts",
        point,
        diag,
    )


def _combined_residual(d: Diagram, p: DiagramPoint, x: np.ndarray) -> float:
    return float(np.sqrt(moment_map(d, p).total + np.linalg.norm(psi(p) - x) ** 2))

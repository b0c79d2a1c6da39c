"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The Hermitian
eigensolver is a cyclic complex Jacobi iteration, which is deterministic and
accurate to roughly machine precision relative to the matrix norm.  Small
eigenvalues of ``X^* X`` for nilpotent ``X`` are the interesting quantities
here, so absolute accuracy with respect to the norm is what matters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "HermitianSpectrum",
    "as_matrix",
    "adjoint",
    "dagger_adjoint",
    "jacobi_eigh",
    "hermitian_spectrum",
    "rank1_symmetric_factor",
    "matrix_rank",
    "frob",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances, all relative unless stated otherwise.

    ``eig_group`` merges eigenvalues into one group, ``rank_cut`` decides
    numerical rank, ``solve_tol`` is the moment-map solver's residual target,
    ``check_tol`` is used for consistency checks between methods, and
    ``membership`` bounds the Lie-algebra membership residuals.
    """

    eig_group: float = 1e-8
    rank_cut: float = 1e-10
    solve_tol: float = 1e-10
    check_tol: float = 1e-6
    membership: float = 1e-12

    def __post_init__(self):
        for name in ("eig_group", "rank_cut", "solve_tol", "check_tol", "membership"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"tolerance {name} must be positive, got {value!r}")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigenvalues of a positive semi-definite Hermitian matrix, grouped.

    ``groups`` lists ``(eigenvalue, multiplicity)`` in strictly decreasing
    order of eigenvalue.  ``negative`` is set when some eigenvalue was below
    ``-grouping_tol * scale`` and therefore left unclamped.
    """

    groups: tuple[tuple[float, int], ...]
    grouping_tol: float
    scale: float = 1.0
    negative: bool = False
    values: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return sum(k for _, k in self.groups)

    def is_zero(self, value: float) -> bool:
        return abs(value) <= self.grouping_tol * self.scale

    def nonzero_groups(self) -> tuple[tuple[float, int], ...]:
        return tuple((mu, k) for mu, k in self.groups if not self.is_zero(mu))

    def multiplicities(self) -> tuple[int, ...]:
        return tuple(k for _, k in self.nonzero_groups())

    def as_list(self) -> list[list]:
        return [[float(mu), int(k)] for mu, k in self.groups]


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite 2-d complex array (a copy is not forced)."""
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def frob(m) -> float:
    return float(np.linalg.norm(m))


def adjoint(m) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(m).conj().T


def dagger_adjoint(m, form_src, form_dst) -> np.ndarray:
    """Adjoint of ``m: V_src -> V_dst`` with respect to bilinear forms.

    Returns ``m_dag: V_dst -> V_src`` with
    ``omega_dst(m v, w) == omega_src(v, m_dag w)``, i.e.
    ``m_dag = Omega_src^{-1} m^T Omega_dst``.  The forms may be anything
    with ``.matrix`` and ``.inverse()`` (see :class:`hkpotentials.lie.BilinearForm`)
    or raw square arrays.
    """
    m = as_matrix(m)
    src = _form_matrix(form_src)
    dst = _form_matrix(form_dst)
    if src.shape != (m.shape[1], m.shape[1]) or dst.shape != (m.shape[0], m.shape[0]):
        raise ValueError(
            f"form dimensions {src.shape[0]}, {dst.shape[0]} do not match map of shape {m.shape}"
        )
    src_inv = _form_inverse(form_src, src)
    return src_inv @ m.T @ dst


def _form_matrix(form) -> np.ndarray:
    if hasattr(form, "matrix"):
        return np.asarray(form.matrix, dtype=complex)
    return as_matrix(form)


def _form_inverse(form, mat: np.ndarray) -> np.ndarray:
    if hasattr(form, "inverse"):
        return form.inverse()
    try:
        inv = np.linalg.inv(mat)
    except np.linalg.LinAlgError as exc:
        raise ValueError("bilinear form is singular") from exc
    if not np.all(np.isfinite(inv)) or np.linalg.cond(mat) > 1e12:
        raise ValueError("bilinear form is singular")
    return inv


def jacobi_eigh(h, max_sweeps: int = 100, rel_tol: float = 1e-14):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with eigenvalues ``w`` in decreasing order and
    orthonormal eigenvectors in the columns of ``v``.  Iteration stops once
    the off-diagonal Frobenius norm is at most ``rel_tol`` times the initial
    Frobenius norm.
    """
    a = as_matrix(h).copy()
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    norm0 = np.linalg.norm(a)
    if n == 0 or norm0 == 0.0:
        return np.zeros(n), v
    target = rel_tol * norm0

    def off_norm():
        return np.linalg.norm(a - np.diag(np.diag(a)))

    for _ in range(max_sweeps):
        if off_norm() <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                h_pq = a[p, q]
                g = abs(h_pq)
                if g <= 1e-300 or g <= 1e-3 * target / n:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                phase = h_pq / g
                zeta = (aqq - app) / (2.0 * g)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]] acting on (p, q)
                u = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ u
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def hermitian_spectrum(m, tol: Tolerances = DEFAULT_TOL, method: str = "jacobi") -> HermitianSpectrum:
    """Grouped spectrum of a positive semi-definite Hermitian matrix.

    Two consecutive eigenvalues share a group when their gap is at most
    ``tol.eig_group * max(1, lambda_max)``; the group value is the mean of
    its members.  Eigenvalues in ``[-tol.eig_group * scale, 0)`` are clamped
    to zero, more negative ones are kept and flag ``negative``.

    ``method="numpy"`` uses LAPACK instead of the Jacobi iteration.
    """
    a = as_matrix(m)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"hermitian_spectrum needs a square matrix, got {a.shape}")
    norm = np.linalg.norm(a)
    asym = np.linalg.norm(a - a.conj().T)
    if asym > tol.check_tol * max(norm, np.finfo(float).tiny):
        raise ValueError(f"matrix is not Hermitian (asymmetry {asym:.3e}, norm {norm:.3e})")
    a = 0.5 * (a + a.conj().T)
    if method == "jacobi":
        w, _ = jacobi_eigh(a)
    elif method == "numpy":
        w = np.linalg.eigvalsh(a)[::-1]
    else:
        raise ValueError(f"unknown eigensolver {method!r}")

    scale = max(1.0, float(w[0])) if n else 1.0
    cut = tol.eig_group * scale
    negative = bool(n and w[-1] < -cut)
    w = np.where((w < 0) & (w >= -cut), 0.0, w)

    groups: list[list[float]] = []
    for value in w:
        if groups and groups[-1][-1] - value <= cut:
            groups[-1].append(value)
        else:
            groups.append([value])
    grouped = tuple((float(np.mean(g)), len(g)) for g in groups)
    return HermitianSpectrum(grouped, tol.eig_group, scale, negative, values=w)


def matrix_rank(m, tol: Tolerances = DEFAULT_TOL, scale: float | None = None) -> int:
    """Number of singular values above ``tol.rank_cut`` times the largest.

    When ``scale`` is given the cut is taken relative to
    ``max(sigma_max, scale)``; this is what makes ranks of powers of a
    nilpotent matrix meaningful (``X^3`` of a 3-step nilpotent is pure
    rounding noise, whose own largest singular value is no reference).
    """
    a = as_matrix(m)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    ref = max(float(s[0]), float(scale) if scale is not None else 0.0)
    if ref == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_cut * ref))


def rank1_symmetric_factor(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Vector ``x`` with ``m == x x^T`` for a complex-symmetric rank <= 1 ``m``.

    ``x`` is unique up to sign.  The sign is fixed so that the first entry of
    (numerically) largest modulus has positive real part, or, when that real
    part vanishes, positive imaginary part.
    """
    a = as_matrix(m)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("rank1_symmetric_factor needs a square matrix")
    norm = np.linalg.norm(a)
    if norm == 0.0:
        return np.zeros(n, dtype=complex)
    if np.linalg.norm(a - a.T) > tol.check_tol * norm:
        raise ValueError("matrix is not complex-symmetric")
    s = np.linalg.svd(a, compute_uv=False)
    if n > 1 and s[1] > tol.rank_cut * s[0]:
        raise ValueError(f"matrix has rank > 1 (singular values {s[0]:.3e}, {s[1]:.3e})")
    a = 0.5 * (a + a.T)
    j = int(np.argmax(np.abs(np.diag(a))))
    x = a[:, j] / np.sqrt(a[j, j])

    mod = np.abs(x)
    lead = int(np.flatnonzero(mod >= (1.0 - 1e-9) * mod.max())[0])
    z = x[lead]
    if abs(z.real) > 1e-12 * abs(z):
        flip = z.real < 0
    else:
        flip = z.imag < 0
    if flip:
        x = -x
    resid = np.linalg.norm(np.outer(x, x) - a)
    if resid > tol.check_tol * max(1.0, norm):
        raise ValueError(f"rank-one factorisation residual {resid:.3e} too large")
    return x

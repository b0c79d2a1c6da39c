"""Classical Lie algebras sl(n), so(n), sp(n) and their nilpotent elements.

Conventions
-----------
Every element carries the bilinear form in which its membership holds:

* ``sl(n)``: no form (stored as the identity).
* ``so(n)``: either the identity form (skew-symmetric matrices) or the
  anti-diagonal form ``S`` with ``S[i, j] = delta(i, n-1-j)``, in which
  nilpotent elements can be written with Jordan blocks.
* ``sp(n)``: ``J = [[0, 1_m], [-1_m, 0]]`` with ``n = 2m``.

The potential formulas need the identity form for ``so(n)``; conversion
from the anti-diagonal form is explicit (:func:`to_standard_form`), never
implicit.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.stats

from .linalg import DEFAULT_TOL, Tolerances, as_matrix, matrix_rank

__all__ = [
    "Family",
    "AlgebraKind",
    "FormKind",
    "BilinearForm",
    "JordanType",
    "PartitionError",
    "MembershipError",
    "OrbitElement",
    "ValidationReport",
    "validate",
    "require_valid",
    "native_form",
    "jordan_type_of",
    "jordan_representative",
    "build_Q",
    "to_standard_form",
    "FiberVariant",
    "CanonicalFiberParams",
    "canonical_fiber",
    "haar_special_unitary",
    "haar_special_orthogonal",
    "haar_compact_symplectic",
    "random_compact_conjugate",
    "random_orbit_element",
    "Classification",
    "classify",
]


class PartitionError(ValueError):
    """A Jordan type that does not occur in the requested algebra."""


class MembershipError(ValueError):
    """A matrix that is not a (nilpotent) element of the claimed algebra."""


class Family(str, enum.Enum):
    SL = "sl"
    SO = "so"
    SP = "sp"


@dataclass(frozen=True)
class AlgebraKind:
    family: Family
    n: int

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.n < 1:
            raise ValueError(f"matrix dimension must be positive, got {self.n}")
        if self.family is Family.SP and self.n % 2:
            raise ValueError(f"sp needs an even matrix dimension, got {self.n}")

    @property
    def kappa(self) -> int:
        """Multiplicity of the non-zero eigenvalue of X*X on the minimal orbit."""
        return 2 if self.family is Family.SO else 1

    @property
    def delta(self) -> int | None:
        return {Family.SO: 0, Family.SP: 1}.get(self.family)

    def __str__(self):
        return f"{self.family.value}({self.n})"


class FormKind(str, enum.Enum):
    IDENTITY = "identity"
    ANTIDIAGONAL = "antidiagonal"
    SYMPLECTIC = "symplectic"
    EXPLICIT = "explicit"


def _standard_symplectic(n: int) -> np.ndarray:
    m = n // 2
    j = np.zeros((n, n))
    j[:m, m:] = np.eye(m)
    j[m:, :m] = -np.eye(m)
    return j


@dataclass(frozen=True, eq=False)
class BilinearForm:
    """A non-degenerate bilinear form, symmetric (+1) or skew (-1)."""

    dim: int
    kind: FormKind
    explicit: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", FormKind(self.kind))
        if self.kind is FormKind.SYMPLECTIC and self.dim % 2:
            raise ValueError("a symplectic form needs even dimension")
        if self.kind is FormKind.EXPLICIT:
            mat = as_matrix(self.explicit).copy()
            if mat.shape != (self.dim, self.dim):
                raise ValueError("explicit form has the wrong shape")
            if abs(np.linalg.det(mat)) < 1e-12 * max(1.0, np.linalg.norm(mat)) ** self.dim:
                raise ValueError("bilinear form is singular")
            if not (np.allclose(mat, mat.T) or np.allclose(mat, -mat.T)):
                raise ValueError("form must be symmetric or skew-symmetric")
            mat.flags.writeable = False
            object.__setattr__(self, "explicit", mat)

    @classmethod
    def identity(cls, n: int) -> "BilinearForm":
        return cls(n, FormKind.IDENTITY)

    @classmethod
    def antidiagonal(cls, n: int) -> "BilinearForm":
        return cls(n, FormKind.ANTIDIAGONAL)

    @classmethod
    def symplectic(cls, n: int) -> "BilinearForm":
        return cls(n, FormKind.SYMPLECTIC)

    @classmethod
    def from_matrix(cls, mat) -> "BilinearForm":
        mat = as_matrix(mat)
        return cls(mat.shape[0], FormKind.EXPLICIT, mat)

    @property
    def matrix(self) -> np.ndarray:
        if self.kind is FormKind.IDENTITY:
            return np.eye(self.dim)
        if self.kind is FormKind.ANTIDIAGONAL:
            return np.fliplr(np.eye(self.dim))
        if self.kind is FormKind.SYMPLECTIC:
            return _standard_symplectic(self.dim)
        return self.explicit

    def inverse(self) -> np.ndarray:
        if self.kind is FormKind.SYMPLECTIC:
            return -_standard_symplectic(self.dim)
        if self.kind is FormKind.EXPLICIT:
            return np.linalg.inv(self.explicit)
        return self.matrix

    @property
    def symmetry(self) -> int:
        if self.kind is FormKind.SYMPLECTIC:
            return -1
        if self.kind is FormKind.EXPLICIT:
            return 1 if np.allclose(self.explicit, self.explicit.T) else -1
        return 1

    @property
    def is_unitary(self) -> bool:
        mat = self.matrix
        return bool(np.allclose(mat.conj().T @ mat, np.eye(self.dim), atol=1e-12))

    def __eq__(self, other):
        if not isinstance(other, BilinearForm):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.dim, self.kind))


def native_form(alg: AlgebraKind) -> BilinearForm:
    """Form in which the potential formulas are evaluated."""
    if alg.family is Family.SP:
        return BilinearForm.symplectic(alg.n)
    return BilinearForm.identity(alg.n)


@dataclass(frozen=True)
class JordanType:
    """Partition of ``n`` listing Jordan block sizes, largest first."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(sorted((int(p) for p in self.parts), reverse=True))
        if not parts or parts[-1] < 1:
            raise PartitionError(f"invalid partition {self.parts!r}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str) -> "JordanType":
        """Parse ``"3,2,2"`` or ``"3,2^2,1^4"``."""
        parts: list[int] = []
        for token in text.replace(" ", "").split(","):
            if not token:
                continue
            base, _, mult = token.partition("^")
            try:
                parts.extend([int(base)] * (int(mult) if mult else 1))
            except ValueError as exc:
                raise PartitionError(f"cannot parse partition {text!r}") from exc
        return cls(tuple(parts))

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def largest(self) -> int:
        return self.parts[0]

    def multiplicity(self, part: int) -> int:
        return self.parts.count(part)

    def nontrivial(self) -> tuple[int, ...]:
        return tuple(p for p in self.parts if p > 1)

    def rank_sequence(self) -> tuple[int, ...]:
        """``rank(X^j)`` for ``j = 0 .. largest``."""
        return tuple(sum(max(p - j, 0) for p in self.parts) for j in range(self.largest + 1))

    def check(self, alg: AlgebraKind) -> "JordanType":
        if self.n != alg.n:
            raise PartitionError(f"partition {self} has size {self.n}, algebra is {alg}")
        counts = Counter(self.parts)
        if alg.family is Family.SO:
            bad = [p for p, k in counts.items() if p % 2 == 0 and k % 2]
            if bad:
                raise PartitionError(f"{self} is not a Jordan type in {alg}: even parts {bad} need even multiplicity")
        elif alg.family is Family.SP:
            bad = [p for p, k in counts.items() if p % 2 == 1 and k % 2]
            if bad:
                raise PartitionError(f"{self} is not a Jordan type in {alg}: odd parts {bad} need even multiplicity")
        return self

    def __str__(self):
        out = []
        for p in sorted(set(self.parts), reverse=True):
            k = self.parts.count(p)
            out.append(f"{p}^{k}" if k > 1 else str(p))
        return "(" + ",".join(out) + ")"


@dataclass(frozen=True, eq=False)
class OrbitElement:
    """A matrix together with its algebra and the form defining membership."""

    matrix: np.ndarray
    algebra: AlgebraKind
    form: BilinearForm | None = None

    def __post_init__(self):
        mat = as_matrix(self.matrix).copy()
        n = self.algebra.n
        if mat.shape != (n, n):
            raise ValueError(f"matrix shape {mat.shape} does not match {self.algebra}")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)
        form = self.form if self.form is not None else native_form(self.algebra)
        if form.dim != n:
            raise ValueError("form dimension does not match the matrix")
        object.__setattr__(self, "form", form)

    @property
    def n(self) -> int:
        return self.algebra.n

    @property
    def family(self) -> Family:
        return self.algebra.family

    def with_matrix(self, mat) -> "OrbitElement":
        return OrbitElement(mat, self.algebra, self.form)


@dataclass(frozen=True)
class ValidationReport:
    trace_residual: float
    form_residual: float
    nilpotency_residual: float
    trace_ok: bool
    form_ok: bool
    nilpotent_ok: bool

    @property
    def passed(self) -> bool:
        return self.trace_ok and self.form_ok and self.nilpotent_ok

    def describe(self) -> str:
        parts = []
        if not self.trace_ok:
            parts.append(f"trace residual {self.trace_residual:.3e}")
        if not self.form_ok:
            parts.append(f"form residual {self.form_residual:.3e}")
        if not self.nilpotent_ok:
            parts.append(f"nilpotency residual {self.nilpotency_residual:.3e}")
        return "; ".join(parts) or "ok"


def validate(elem: OrbitElement, tol: Tolerances = DEFAULT_TOL, nilpotent: bool = True) -> ValidationReport:
    """Membership and nilpotency residuals of ``elem``, relative to its norm."""
    x = elem.matrix
    norm = np.linalg.norm(x)
    ref = norm if norm > 0 else 1.0
    trace_res = abs(np.trace(x)) / ref
    if elem.family is Family.SL:
        form_res = 0.0
        form_ok = True
    else:
        omega = elem.form.matrix
        form_res = np.linalg.norm(x.T @ omega + omega @ x) / ref
        wanted = 1 if elem.family is Family.SO else -1
        form_ok = elem.form.symmetry == wanted and form_res <= tol.membership * max(1, elem.n)
    if nilpotent and norm > 0:
        power = np.linalg.matrix_power(x / norm, elem.n)
        nil_res = float(np.linalg.norm(power))
    else:
        nil_res = 0.0
    return ValidationReport(
        trace_residual=float(trace_res),
        form_residual=float(form_res),
        nilpotency_residual=nil_res,
        trace_ok=trace_res <= tol.membership * max(1, elem.n),
        form_ok=bool(form_ok),
        nilpotent_ok=nil_res <= tol.check_tol,
    )


def require_valid(elem: OrbitElement, tol: Tolerances = DEFAULT_TOL) -> OrbitElement:
    report = validate(elem, tol)
    if not report.passed:
        raise MembershipError(f"not a nilpotent element of {elem.algebra}: {report.describe()}")
    return elem


def jordan_type_of(x, tol: Tolerances = DEFAULT_TOL) -> JordanType:
    """Jordan type of a nilpotent matrix read off from ``rank(X^j)``."""
    x = as_matrix(x)
    n = x.shape[0]
    norm = np.linalg.norm(x, 2) if x.size else 0.0
    if norm == 0.0:
        return JordanType((1,) * n)
    y = x / norm
    ranks = [n]
    power = np.eye(n, dtype=complex)
    while ranks[-1] > 0:
        if len(ranks) > n:
            raise MembershipError("matrix is not nilpotent")
        power = power @ y
        ranks.append(matrix_rank(power, tol, scale=1.0))
    # ranks[j-1] - ranks[j] is the number of blocks of size >= j
    at_least = [ranks[j - 1] - ranks[j] for j in range(1, len(ranks))] + [0]
    parts: list[int] = []
    for j in range(1, len(at_least)):
        parts.extend([j] * (at_least[j - 1] - at_least[j]))
    if sum(parts) != n or any(c < 0 for c in at_least):
        raise MembershipError(f"inconsistent rank sequence {ranks}")
    return JordanType(tuple(parts))


def _shift(d: int, signs=None) -> np.ndarray:
    j = np.zeros((d, d), dtype=complex)
    for t in range(d - 1):
        j[t, t + 1] = 1.0 if signs is None else signs[t]
    return j


def _alternating(d: int) -> np.ndarray:
    return _shift(d, [(-1) ** t for t in range(d - 1)])


def _so_blocks(jt: JordanType):
    """Split a valid so-partition into mirrored pairs and unpaired blocks."""
    pairs, singles = [], []
    for p, k in sorted(Counter(jt.parts).items(), reverse=True):
        pairs.extend([p] * (k // 2))
        if k % 2:
            singles.append(p)
    return pairs, singles


def _scale_iter(scales, count):
    if scales is None:
        return [1.0] * count
    scales = [complex(s) for s in scales]
    if len(scales) != count:
        raise ValueError(f"expected {count} block parameters, got {len(scales)}")
    return scales


def jordan_representative(jt: JordanType, alg: AlgebraKind, form: str | None = None, scales=None) -> OrbitElement:
    """A nilpotent element of type ``jt`` built from Jordan blocks.

    ``form`` selects the convention: ``"identity"`` (sl, so),
    ``"antidiagonal"`` (so; the default there) or ``"symplectic"`` (sp).
    In the anti-diagonal convention equal blocks are placed in mirrored
    pairs ``(J_d, -J_d)`` and at most one unpaired odd block sits in the
    middle with alternating signs, which is the layout ``(J_2, J_3, -J_2)``
    for ``(3,2,2)``.  Partitions with more than one unpaired block have no
    such layout; ask for ``form="identity"`` then.

    ``scales`` multiplies each independent non-trivial block (a mirrored
    pair counts once), in the order the blocks appear.
    """
    jt = JordanType(jt.parts) if isinstance(jt, JordanType) else JordanType(tuple(jt))
    jt.check(alg)
    n = alg.n
    if alg.family is Family.SL:
        if form not in (None, "identity"):
            raise ValueError("sl(n) elements use the identity convention")
        blocks = jt.nontrivial()
        sc = _scale_iter(scales, len(blocks))
        x = np.zeros((n, n), dtype=complex)
        off = 0
        for d, c in zip(blocks, sc):
            x[off:off + d, off:off + d] = c * _shift(d)
            off += d
        return OrbitElement(x, alg)

    if alg.family is Family.SP:
        if form not in (None, "symplectic"):
            raise ValueError("sp(n) elements use the standard symplectic convention")
        return _sp_representative(jt, alg, scales)

    form = form or "antidiagonal"
    if form == "antidiagonal":
        return _so_antidiagonal(jt, alg, scales)
    if form == "identity":
        return _so_identity(jt, alg, scales)
    raise ValueError(f"unknown so(n) convention {form!r}")


def _so_antidiagonal(jt, alg, scales):
    n = alg.n
    pairs, singles = _so_blocks(jt)
    if len(singles) > 1:
        raise PartitionError(
            f"{jt} has unpaired blocks {singles}; no Jordan layout in the anti-diagonal form, use form='identity'"
        )
    nontriv = [d for d in pairs if d > 1] + [d for d in singles if d > 1]
    sc = iter(_scale_iter(scales, len(nontriv)))
    x = np.zeros((n, n), dtype=complex)
    off = 0
    for d in pairs:
        c = next(sc) if d > 1 else 1.0
        r0 = n - off - d
        x[off:off + d, off:off + d] = c * _shift(d)
        x[r0:r0 + d, r0:r0 + d] = -c * _shift(d)
        off += d
    if singles and singles[0] > 1:
        d = singles[0]
        c = next(sc)
        x[off:off + d, off:off + d] = c * _alternating(d)
    return OrbitElement(x, alg, BilinearForm.antidiagonal(n))


def _so_identity(jt, alg, scales):
    n = alg.n
    pairs, singles = _so_blocks(jt)
    blocks = []
    for d in pairs:
        if d > 1:
            blocks.append(("pair", d))
    for d in singles:
        if d > 1:
            blocks.append(("single", d))
    sc = _scale_iter(scales, len(blocks))
    x = np.zeros((n, n), dtype=complex)
    off = 0
    for (kind, d), c in zip(blocks, sc):
        if kind == "pair":
            y = np.zeros((2 * d, 2 * d), dtype=complex)
            y[:d, :d] = _shift(d)
            y[d:, d:] = -_shift(d)
            size = 2 * d
        else:
            y = _alternating(d)
            size = d
        q = build_Q(size)
        x[off:off + size, off:off + size] = c * (q.conj().T @ y @ q)
        off += size
    return OrbitElement(x, alg, BilinearForm.identity(n))


def _sp_representative(jt, alg, scales):
    m = alg.n // 2
    counts = Counter(jt.parts)
    blocks = []  # (local matrix of size 2h, h)
    for p, k in sorted(counts.items(), reverse=True):
        npairs, single = (k // 2, k % 2)
        for _ in range(npairs):
            blocks.append(("pair", p))
        if single:
            blocks.append(("even", p))
    nontriv = [b for b in blocks if b[1] > 1]
    sc = iter(_scale_iter(scales, len(nontriv)))
    x = np.zeros((alg.n, alg.n), dtype=complex)
    off = 0
    for kind, d in blocks:
        if kind == "pair":
            h = d
            local = np.zeros((2 * h, 2 * h), dtype=complex)
            local[:h, :h] = _shift(h)
            local[h:, h:] = -_shift(h).T
        else:
            h = d // 2
            local = np.zeros((2 * h, 2 * h), dtype=complex)
            local[:h, :h] = _shift(h)
            local[h - 1, 2 * h - 1] = 1.0
            local[h:, h:] = -_shift(h).T
        if d > 1:
            local = next(sc) * local
        idx = np.r_[off:off + h, m + off:m + off + h]
        x[np.ix_(idx, idx)] = local
        off += h
    return OrbitElement(x, alg, BilinearForm.symplectic(alg.n))


def build_Q(n: int) -> np.ndarray:
    """Unitary ``Q`` with ``Q^T S Q = 1`` for the anti-diagonal form ``S``.

    For ``n = 2m + 1``::

        Q = 1/sqrt(2) [[1_m, 0,       -i R_m],
                       [0,   sqrt(2),  0    ],
                       [R_m, 0,        i 1_m]]

    with ``R_m`` the ``m x m`` anti-identity; for even ``n`` the middle row
    and column are dropped.  Then ``Q^* Y Q`` is skew-symmetric whenever
    ``Y`` is skew about the anti-diagonal.
    """
    if n < 1:
        raise ValueError("n must be positive")
    m = n // 2
    eye = np.eye(m)
    flip = np.fliplr(eye)
    q = np.zeros((n, n), dtype=complex)
    q[:m, :m] = eye
    q[:m, n - m:] = -1j * flip
    q[n - m:, :m] = flip
    q[n - m:, n - m:] = 1j * eye
    if n % 2:
        q[m, m] = np.sqrt(2.0)
    return q / np.sqrt(2.0)


def to_standard_form(elem: OrbitElement, tol: Tolerances = DEFAULT_TOL) -> OrbitElement:
    """Convert an anti-diagonal-form so(n) element to a skew-symmetric one."""
    if elem.family is not Family.SO:
        raise ValueError("to_standard_form applies to so(n) elements")
    if elem.form.kind is FormKind.IDENTITY:
        return elem
    if elem.form.kind is not FormKind.ANTIDIAGONAL:
        raise ValueError(f"expected the anti-diagonal convention, got {elem.form.kind.value}")
    require_valid(elem, tol)
    q = build_Q(elem.n)
    x = q.conj().T @ elem.matrix @ q
    x = 0.5 * (x - x.T)
    return OrbitElement(x, elem.algebra, BilinearForm.identity(elem.n))


class FiberVariant(str, enum.Enum):
    F322 = "322"
    F324 = "324"


@dataclass(frozen=True)
class CanonicalFiberParams:
    """Entries of the canonical fibre elements of the (3,2^2) and (3,2^4) orbits.

    For the ``(3,2^2)`` fibre ``v`` is a scalar and ``w`` is absent.  For
    ``(3,2^4)`` both are 3-vectors and ``zeta = v . w`` (no conjugation).
    """

    a: complex
    b: complex
    v: complex | tuple
    w: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        if np.ndim(self.v) == 0:
            object.__setattr__(self, "v", complex(self.v))
        else:
            object.__setattr__(self, "v", tuple(complex(t) for t in self.v))
            if len(self.v) != 3:
                raise ValueError("v must be a scalar or a 3-vector")
        if self.w is not None:
            w = tuple(complex(t) for t in self.w)
            if len(w) != 3:
                raise ValueError("w must be a 3-vector")
            object.__setattr__(self, "w", w)

    @property
    def variant(self) -> FiberVariant:
        return FiberVariant.F324 if self.w is not None else FiberVariant.F322

    @property
    def zeta(self) -> complex | None:
        if self.w is None:
            return None
        return sum(vi * wi for vi, wi in zip(self.v, self.w))

    @classmethod
    def random(cls, variant: FiberVariant, seed=None) -> "CanonicalFiberParams":
        rng = _rng(seed)

        def cg(k=None):
            return rng.normal(size=k) + 1j * rng.normal(size=k)

        if FiberVariant(variant) is FiberVariant.F322:
            return cls(cg(), cg(), cg())
        return cls(cg(), cg(), tuple(cg(3)), tuple(cg(3)))


def _fiber_322(p: CanonicalFiberParams) -> np.ndarray:
    if p.w is not None or np.ndim(p.v) != 0:
        raise ValueError("the (3,2^2) fibre takes scalar v and no w")
    a, b, v = p.a, p.b, p.v
    y = np.zeros((7, 7), dtype=complex)
    y[0, 3], y[0, 4] = a, b
    y[1, 4] = v
    y[2, 5], y[2, 6] = -v, -b
    y[3, 6] = -a
    return y


def _fiber_324(p: CanonicalFiberParams) -> np.ndarray:
    if p.w is None or np.ndim(p.v) == 0:
        raise ValueError("the (3,2^4) fibre takes 3-vectors v and w")
    a, b = p.a, p.b
    v1, v2, v3 = p.v
    w1, w2, w3 = p.w
    y = np.zeros((11, 11), dtype=complex)
    y[0, 5], y[0, 6] = a, b
    y[1, 6], y[1, 7], y[1, 8] = v1, -w2, w3
    y[2, 6], y[2, 7], y[2, 9] = v2, w1, -w3
    y[3, 6], y[3, 8], y[3, 9] = v3, -w1, w2
    y[4, 7], y[4, 8], y[4, 9], y[4, 10] = -v3, -v2, -v1, -b
    y[5, 10] = -a
    return y


def canonical_fiber(params: CanonicalFiberParams, variant=None, padding: int = 0) -> OrbitElement:
    """Canonical fibre element in the anti-diagonal convention.

    ``padding`` (even) inserts zero rows and columns symmetrically around
    the middle index, embedding the element in ``so(7 + padding)`` or
    ``so(11 + padding)``.
    """
    variant = FiberVariant(variant) if variant is not None else params.variant
    if variant is not params.variant:
        raise ValueError(f"parameters are for the {params.variant.value} fibre, not {variant.value}")
    if padding < 0 or padding % 2:
        raise ValueError("padding must be a non-negative even number to keep the anti-diagonal form")
    y = _fiber_322(params) if variant is FiberVariant.F322 else _fiber_324(params)
    base = y.shape[0]
    n = base + padding
    h = padding // 2
    c = base // 2
    idx = np.array([i if i < c else (i + h if i == c else i + 2 * h) for i in range(base)])
    x = np.zeros((n, n), dtype=complex)
    x[np.ix_(idx, idx)] = y
    return OrbitElement(x, AlgebraKind(Family.SO, n), BilinearForm.antidiagonal(n))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_special_unitary(n: int, seed=None) -> np.ndarray:
    if n == 1:
        return np.eye(1, dtype=complex)
    u = scipy.stats.unitary_group.rvs(n, random_state=_rng(seed))
    return u / np.linalg.det(u) ** (1.0 / n)


def haar_special_orthogonal(n: int, seed=None) -> np.ndarray:
    if n == 1:
        return np.eye(1)
    return scipy.stats.special_ortho_group.rvs(n, random_state=_rng(seed))


def haar_compact_symplectic(n: int, seed=None) -> np.ndarray:
    """Haar-random element of ``U(n) & Sp(n, C)`` for the form ``J``.

    Quaternionic Gram-Schmidt on complex Gaussian vectors: each new column
    ``u`` comes with its partner ``-J conj(u)``, which is orthogonal to it
    because ``J`` is skew.
    """
    if n % 2:
        raise ValueError("compact symplectic group needs even n")
    rng = _rng(seed)
    m = n // 2
    jmat = _standard_symplectic(n)
    u = np.zeros((n, n), dtype=complex)
    for i in range(m):
        vec = rng.normal(size=n) + 1j * rng.normal(size=n)
        for _ in range(2):
            done = np.concatenate([u[:, :i], u[:, m:m + i]], axis=1)
            vec = vec - done @ (done.conj().T @ vec)
        vec /= np.linalg.norm(vec)
        u[:, i] = vec
        u[:, m + i] = -jmat @ vec.conj()
    return u


def _compact_element(alg: AlgebraKind, form: BilinearForm, seed) -> np.ndarray:
    if alg.family is Family.SL:
        return haar_special_unitary(alg.n, seed)
    if alg.family is Family.SO:
        if form.kind is not FormKind.IDENTITY:
            raise ValueError("random conjugation of so(n) needs the identity convention")
        return haar_special_orthogonal(alg.n, seed).astype(complex)
    if form.kind is not FormKind.SYMPLECTIC:
        raise ValueError("random conjugation of sp(n) needs the standard symplectic convention")
    return haar_compact_symplectic(alg.n, seed)


def _project(x: np.ndarray, alg: AlgebraKind, form: BilinearForm) -> np.ndarray:
    """Remove rounding drift out of the Lie algebra."""
    if alg.family is Family.SL:
        return x - np.trace(x) / alg.n * np.eye(alg.n)
    omega = form.matrix
    return 0.5 * (x - form.inverse() @ x.T @ omega)


def random_compact_conjugate(elem: OrbitElement, seed=None) -> OrbitElement:
    """``g X g^{-1}`` for ``g`` Haar-random in SU(n), SO(n) or compact Sp(n)."""
    g = _compact_element(elem.algebra, elem.form, seed)
    x = g @ elem.matrix @ g.conj().T
    return elem.with_matrix(_project(x, elem.algebra, elem.form))


def _random_algebra_element(alg: AlgebraKind, form: BilinearForm, rng) -> np.ndarray:
    n = alg.n
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2 * n)
    return _project(z, alg, form)


def random_orbit_element(jt, alg: AlgebraKind, seed=None, spread: float = 0.6) -> OrbitElement:
    """A generic element of the complex orbit of type ``jt``.

    The Jordan representative is conjugated by ``exp(Z)`` for a random
    ``Z`` in the complex Lie algebra (scaled by ``spread``) and then by a
    Haar-random compact group element, so ``X*X`` has a generic spectrum.
    Returned in the identity (sl, so) or symplectic (sp) convention.
    """
    rng = _rng(seed)
    form = native_form(alg)
    jt = jt if isinstance(jt, JordanType) else JordanType(tuple(jt))
    rep = jordan_representative(jt, alg, form=form.kind.value)
    z = spread * _random_algebra_element(alg, form, rng)
    g = scipy.linalg.expm(z)
    g_inv = scipy.linalg.expm(-z)
    x = _project(g @ rep.matrix @ g_inv, alg, form)
    return random_compact_conjugate(OrbitElement(x, alg, form), rng)


@dataclass(frozen=True)
class Classification:
    jordan_type: JordanType
    algebra: AlgebraKind
    is_trivial: bool
    is_minimal: bool
    is_coh2: bool
    diagram_length: int
    methods: frozenset

    @property
    def method_list(self) -> list[str]:
        return sorted(self.methods)


_MINIMAL = {
    Family.SL: lambda n: (2,) + (1,) * (n - 2),
    Family.SO: lambda n: (2, 2) + (1,) * (n - 4),
    Family.SP: lambda n: (2,) + (1,) * (n - 2),
}


def _coh2_types(alg: AlgebraKind) -> list[tuple[int, ...]]:
    n = alg.n
    if alg.family is Family.SO:
        return [(3,) + (1,) * (n - 3), (2,) * 4 + (1,) * (n - 8)]
    return [(2, 2) + (1,) * (n - 4)]


def classify(jt, alg: AlgebraKind) -> Classification:
    """Place a Jordan type in the low-cohomogeneity table and list methods."""
    jt = jt if isinstance(jt, JordanType) else JordanType(tuple(jt))
    jt.check(alg)
    parts = jt.parts
    trivial = jt.largest == 1
    minimal = _fits(alg, _MINIMAL[alg.family](alg.n)) and parts == _MINIMAL[alg.family](alg.n)
    coh2 = any(_fits(alg, t) and parts == t for t in _coh2_types(alg))
    methods = {"oracle"}
    if jt.largest <= 2:
        methods.add("length2")
        if minimal:
            methods.add("minimal")
        if coh2:
            methods.add("coh2")
    if alg.family is Family.SO and jt.largest == 3 and jt.multiplicity(3) == 1:
        twos = jt.multiplicity(2)
        methods.add("32k-lift")
        if twos == 0:
            methods.add("coh2")
        elif twos == 2 and alg.n == 7:
            # the closed form needs the fibre slice once n > 7
            methods.add("322-closed")
    if alg.family is Family.SL and alg.n == 3:
        methods.add("sl3-regular")
    return Classification(
        jordan_type=jt,
        algebra=alg,
        is_trivial=trivial,
        is_minimal=minimal,
        is_coh2=coh2,
        diagram_length=jt.largest,
        methods=frozenset(methods),
    )


def _fits(alg: AlgebraKind, parts: tuple[int, ...]) -> bool:
    return sum(parts) == alg.n and min(parts) >= 1

"""HyperKähler potentials of nilpotent orbits in sl(n), so(n) and sp(n).

Closed-form potentials (spectral, invariant-theoretic, border lift, fibre
cubic) are cross-checked against a numerical hyperKähler quotient: a
Levenberg-Marquardt solve of the quiver moment-map equations.
"""

from .lie import (
    AlgebraKind,
    BilinearForm,
    CanonicalFiberParams,
    Family,
    FiberVariant,
    JordanType,
    MembershipError,
    OrbitElement,
    PartitionError,
    build_Q,
    canonical_fiber,
    classify,
    jordan_representative,
    jordan_type_of,
    random_compact_conjugate,
    random_orbit_element,
    to_standard_form,
    validate,
)
from .linalg import DEFAULT_TOL, HermitianSpectrum, Tolerances, hermitian_spectrum
from .potentials import (
    border_lift,
    compute_all,
    cubic_coefficients,
    invariants,
    potential_32k,
    potential_322_closed,
    potential_324_cubic,
    potential_coh2,
    potential_length2,
    potential_minimal,
    potential_sl3_regular,
)
from .quiver import Diagram, DiagramPoint, SolverError, diagram_for, length2_factorize, radial_norm, solve_moment

__version__ = "0.1.0"

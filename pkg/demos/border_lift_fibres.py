"""Length-three orbits of so(n) through the border lift.

An element with X^3 = 0 and rank X^2 = 1 extends to a square-zero element
X' of so(n+1).  Its spectral potential gives the potential of X, which we
compare with the closed forms on the canonical fibres.
"""

# %%
import numpy as np

from hkpotentials import AlgebraKind, CanonicalFiberParams, JordanType, random_orbit_element
from hkpotentials.lie import canonical_fiber, to_standard_form
from hkpotentials.linalg import hermitian_spectrum
from hkpotentials.potentials import (
    border_lift,
    cubic_coefficients,
    cubic_roots,
    potential_32k,
    potential_322_closed,
    potential_324_cubic,
    potential_coh2,
)

# %% (3, 1^4) in so(7): lift versus the cohomogeneity-two formula.
x = random_orbit_element(JordanType((3, 1, 1, 1, 1)), AlgebraKind("so", 7), seed=0)
lift = border_lift(x)
print("isotropic vector x, x.x =", abs(lift.x @ lift.x))
print("spec(X'X'*):", hermitian_spectrum(lift.x_prime @ lift.x_prime.conj().T).as_list())
print(f"lift {potential_32k(x):.12f}  coh2 {potential_coh2(x):.12f}")

# %% (3, 2, 2) fibre in so(7).
p = CanonicalFiberParams(a=0.8 + 0.3j, b=-0.4j, v=1.2)
y = to_standard_form(canonical_fiber(p))
print(f"322 fibre: lift {potential_32k(y):.12f}  closed {potential_322_closed(y):.12f}")

# %% Away from the fibre in so(9) the closed form no longer applies.
z = random_orbit_element(JordanType((3, 2, 2, 1, 1)), AlgebraKind("so", 9), seed=1)
print(f"generic so(9): lift {potential_32k(z):.10f}  closed {potential_322_closed(z):.10f}")

# %% (3, 2^4) fibre in so(11): roots of the cubic are the doubled eigenvalues.
q = CanonicalFiberParams.random("324", seed=5)
w = to_standard_form(canonical_fiber(q))
xp = border_lift(w).x_prime
ev = np.sort(np.linalg.eigvalsh(xp @ xp.conj().T))[::-1][:6]
print("top eigenvalues of X'X'*:", np.round(ev, 10))
print("cubic roots:             ", np.round(cubic_roots(cubic_coefficients(q)), 10))
print(f"lift {potential_32k(w):.12f}  cubic {potential_324_cubic(q):.12f}")

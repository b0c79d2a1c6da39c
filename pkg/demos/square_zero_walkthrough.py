"""Square-zero orbits: spectral potential against the quotient picture.

For X with X^2 = 0 the potential is read off the spectrum of X*X.  Here we
compare that value with the radial function of an explicit point of the
two-node diagram, and with the least-squares oracle.
"""

# %%
import numpy as np

from hkpotentials import AlgebraKind, JordanType, OrbitElement, random_orbit_element
from hkpotentials.linalg import hermitian_spectrum
from hkpotentials.potentials import potential_coh2, potential_length2
from hkpotentials.quiver import diagram_for, length2_factorize, moment_map, radial_norm, solve_moment

# %% A hand-built element of sl(4): two blocks with scales 3 and 4.
x = np.zeros((4, 4), dtype=complex)
x[0, 2], x[1, 3] = 3, 4
elem = OrbitElement(x, AlgebraKind("sl", 4))
spec = hermitian_spectrum(x.conj().T @ x)
print("spec(X*X) groups:", spec.as_list())
print("length2 potential:", potential_length2(elem))
print("coh2 potential:   ", potential_coh2(elem))

# %% The same value as r^2 of an explicit factorisation X = alpha beta.
d, point = length2_factorize(elem)
print("diagram:", d)
print("r^2 of the factorisation:", radial_norm(point))
print("moment map residual:", moment_map(d, point).total)

# %% And from the numerical oracle, starting from a random point.
point, diag = solve_moment(diagram_for(elem), elem, init_seed=1)
print(f"oracle r^2 = {radial_norm(point):.12f} after {diag.iterations} iterations")

# %% A generic element of sp(8) with Jordan type (2^3, 1^2).
rng = np.random.default_rng(0)
y = random_orbit_element(JordanType((2, 2, 2, 1, 1)), AlgebraKind("sp", 8), seed=rng)
d, point = length2_factorize(y)
print(f"sp(8): length2 {potential_length2(y):.12f}, factorisation {radial_norm(point):.12f}")

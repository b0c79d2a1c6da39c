"""The regular orbit of sl(3) and the three-node diagram.

The closed form depends only on |a|, |b| and |c| of the strictly upper
triangular representative.  The oracle solves the full moment-map
equations on the flag diagram 1 <-> 2 <-> 3.
"""

# %%
import numpy as np

from hkpotentials import AlgebraKind, OrbitElement
from hkpotentials.potentials import potential_sl3_regular
from hkpotentials.quiver import Diagram, radial_norm, solve_moment

d = Diagram((1, 2, 3), AlgebraKind("sl", 3))


def oracle(a, b, c, seed=0):
    target = OrbitElement(np.array([[0, a, b], [0, 0, c], [0, 0, 0]], dtype=complex), d.algebra)
    point, diag = solve_moment(d, target, init_seed=seed)
    return radial_norm(point), diag


# %% The two reference values.
for abc in [(1, 1, 1), (1, 0, 1)]:
    r2, diag = oracle(*abc)
    print(f"{abc}: closed form {potential_sl3_regular(*abc):.12f}, oracle {r2:.12f}, residual {diag.residual:.1e}")

# %% Phases of the entries do not matter.
rng = np.random.default_rng(3)
for _ in range(5):
    a, b, c = rng.normal(size=3) * np.exp(2j * np.pi * rng.random(3))
    r2, _ = oracle(a, b, c, seed=int(rng.integers(1000)))
    print(f"|a|,|b|,|c| = {abs(a):.3f},{abs(b):.3f},{abs(c):.3f}: "
          f"closed {potential_sl3_regular(a, b, c):.10f}, oracle {r2:.10f}")

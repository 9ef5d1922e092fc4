"""
A tour of the group catalog
===========================

Every computation in wrapkit starts from a GroupSpec: the root data,
lattices and volumes of one of six compact groups, all expressed in a
single metric convention (each root covector has unit length).
"""

import numpy as np

from wrapkit import character, make_group, weyl_dimension

# the six catalog entries, from the flat circle to SU(3)
names = ["torus1", "torus2", "su2", "so3", "su2xsu2", "su3"]

print(f"{'group':9} {'rank':>4} {'dim':>4} {'|W|':>4} {'||rho||^2':>10} "
      f"{'vol(G)':>14}")
for name in names:
    g = make_group(name)
    print(f"{g.name:9} {g.rank:>4} {g.dim:>4} {g.weyl_order:>4} "
          f"{g.rho_norm_sq:>10.4f} {g.volume:>14.6f}")

# ---------------------------------------------------------------------------
# Irreducible representations are labelled by dominant weights.  The Weyl
# dimension formula gives their dimensions exactly (as integers).
# ---------------------------------------------------------------------------

su3 = make_group("su3")
print("\nsu3 dimensions by highest weight (p, q):")
for coords in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (2, 2)]:
    print(f"  {coords}: d = {weyl_dimension(su3, coords)}")

# ---------------------------------------------------------------------------
# Characters restrict to the maximal torus.  At the identity the character
# equals the dimension; elsewhere it oscillates and |chi| <= d.
# ---------------------------------------------------------------------------

H = np.array([0.5, 0.8])
for coords in [(1, 0), (1, 1)]:
    at_zero = complex(np.asarray(character(su3, coords, np.zeros(2))).item())
    at_H = complex(np.asarray(character(su3, coords, H)).item())
    print(f"chi_{coords}(0) = {at_zero.real:.1f},  "
          f"chi_{coords}(H) = {at_H:.6f}")

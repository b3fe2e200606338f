"""Tunneling through a rectangular barrier: two numbers decide everything.

T depends only on Etilde = E/V0 and lambda = m a^2 V0/hbar^2.  The closed
three-branch formula and a piecewise-constant transfer matrix agree to
round-off, including exactly at Etilde = 1 and on the sin^2 resonances.
"""

import math

from scaleqm import (LENGTH, MASS, Quantity, DepthBased, default_registry,
                     nondimensionalize, rect_barrier, transmission_closed,
                     transmission_numeric)
from scaleqm.dimensions import ENERGY

HBAR = default_registry().hbar.magnitude
M_E = Quantity(9.1093837015e-31, MASS)

lam = 5.0
a = Quantity(1e-10, LENGTH)
v0 = Quantity(lam * HBAR ** 2 / (M_E.magnitude * a.magnitude ** 2), ENERGY)
problem = nondimensionalize(rect_barrier(v0, a), M_E, DepthBased())

print(f"lambda = {lam}; energies in units of the barrier height V0")
print(f"{'E/V0':>6} {'T closed':>14} {'T transfer':>14} {'diff':>9} {'T+R-1':>9}")
for e in (0.2, 0.5, 0.8, 0.99, 1.0, 1.01, 1.5, 2.0, 4.0):
    closed = transmission_closed(e, lam)
    numeric = transmission_numeric(problem, e)
    print(f"{e:6.2f} {closed.T:14.10f} {numeric.T:14.10f} "
          f"{abs(closed.T - numeric.T):9.1e} {numeric.T + numeric.R - 1:9.1e}")

print()
print("resonances: T = 1 whenever 2 lambda (E/V0 - 1) = (k pi)^2")
for k in (1, 2, 3):
    e_res = 1.0 + (k * math.pi) ** 2 / (2 * lam)
    print(f"  k={k}: E/V0 = {e_res:8.4f} -> T = "
          f"{transmission_numeric(problem, e_res).T:.12f}")

print()
print("the threshold branch: T(1) = 2/(2 + lambda)")
for lam_i in (0.5, 2.0, 8.0):
    print(f"  lambda={lam_i:4.1f}: closed = {transmission_closed(1.0, lam_i).T:.10f}"
          f" = 2/(2+lambda) = {2 / (2 + lam_i):.10f}")

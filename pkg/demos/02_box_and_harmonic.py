"""The particle in a box and the harmonic oscillator, once and for all.

Both problems are parameter-free after scaling: every box is the unit box and
every oscillator is x^2/2.  Solving the dimensionless eigenproblem once gives
the spectrum of each of the infinitely many SI parameterizations through
E = eps_E * Etilde.
"""

import math

import numpy as np

from scaleqm import (LENGTH, MASS, Quantity, bound_states, box,
                     default_registry, harmonic, nondimensionalize)
from scaleqm.catalog import FORCE_CONSTANT

hbar = default_registry().hbar.magnitude

print("== box: Etilde_n = n^2 pi^2 / 2 ==")
problem = nondimensionalize(box(Quantity(1e-9, LENGTH)), Quantity(9.109e-31, MASS))
for st in bound_states(problem, count=5, compute_residual=False):
    n = st.index + 1
    exact = n * n * math.pi ** 2 / 2
    print(f"n={n}: Etilde = {st.energy:.10f}   exact = {exact:.10f}   "
          f"E_SI = {problem.to_physical(st.energy).magnitude:.4e} J")

print()
print("== harmonic: one dimensionless solve, many oscillators ==")
m0 = Quantity(1.6726e-27, MASS)
k0 = Quantity(480.0, FORCE_CONSTANT)
problem = nondimensionalize(harmonic(k0), m0)
levels = [st.energy for st in bound_states(problem, count=4, compute_residual=False)]
print(f"dimensionless levels: {np.round(levels, 10)}")

rng = np.random.default_rng(1)
for _ in range(4):
    m = Quantity(float(rng.uniform(1e-27, 1e-25)), MASS)
    k = Quantity(float(rng.uniform(1.0, 900.0)), FORCE_CONSTANT)
    p = nondimensionalize(harmonic(k), m)
    omega = math.sqrt(k.magnitude / m.magnitude)
    e0 = p.to_physical(levels[0]).magnitude
    print(f"m={m.magnitude:.3e} kg, k={k.magnitude:7.2f} N/m: "
          f"E_0 = {e0:.6e} J = hbar*omega/2 = {hbar * omega / 2:.6e} J")

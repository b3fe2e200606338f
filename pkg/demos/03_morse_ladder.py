"""Morse oscillator: the whole spectrum depends on one number.

After scaling with L = 1/a the well is lambda*(1 - exp(-x))^2 with
lambda = m D/(hbar a)^2, the ladder is exactly quadratic in (n + 1/2), and it
stops at n < sqrt(2 lambda) - 1/2.  The Numerov solver reproduces all of that
without being told any of it.
"""

import math

from scaleqm import (ENERGY, MASS, Dimension, Family, Quantity, bound_states,
                     default_registry, exact_reference, morse,
                     morse_state_count, nondimensionalize)

HBAR = default_registry().hbar.magnitude
M = Quantity(1.6726e-27, MASS)
D = Quantity(7.2e-19, ENERGY)


def problem_for(lam):
    a = Quantity(math.sqrt(M.magnitude * D.magnitude / (HBAR ** 2 * lam)),
                 Dimension(length=-1))
    return nondimensionalize(morse(D, a), M)


for lam in (4.0, 8.0, 12.5):
    p = problem_for(lam)
    expected = morse_state_count(lam)
    states = bound_states(p, count=expected + 2, compute_residual=False)
    print(f"lambda = {lam}: closed form allows n < sqrt(2 lambda) - 1/2 = "
          f"{math.sqrt(2 * lam) - 0.5:.3f}  ->  {expected} states; "
          f"solver found {len(states)}")
    for st in states:
        exact = exact_reference(Family.MORSE, p.couplings, st.index)
        print(f"  n={st.index}: Etilde = {st.energy:.9f}   "
              f"exact = {exact:.9f}   diff = {st.energy - exact:+.1e}")
    print()

print("physical spectrum for lambda = 8 (E = (D/lambda) * Etilde):")
p = problem_for(8.0)
for st in bound_states(p, count=4, compute_residual=False):
    print(f"  n={st.index}: {p.to_physical(st.energy).magnitude:.6e} J")

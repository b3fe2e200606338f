"""Deriving units from constants instead of declaring hbar = m = 1.

The exponent solver finds the unique combination of inputs with a requested
dimension, in exact rational arithmetic.  Two classics: the oscillator length
(hbar^2/(m k))^(1/4) and the Bohr radius, whose 4*pi*eps0 prefactor comes in
through the kappa = e^2/(4 pi eps0) registry constant.
"""

import math

from scaleqm import (LENGTH, MASS, Dimension, Quantity, default_registry,
                     energy_unit, solve_scale, time_unit)

reg = default_registry()
hbar, m_e, kappa = reg.hbar, reg.m_e, reg.kappa

print("== harmonic oscillator length ==")
m = Quantity(1.6726e-27, MASS)            # about a proton
k = Quantity(480.0, Dimension(mass=1, time=-2))  # N/m force constant
sol = solve_scale([hbar, m, k], LENGTH)
print(f"exponents of (hbar, m, k): {sol.exponents}")
print(f"L = (hbar^2/(m k))^(1/4) = {sol.quantity.magnitude:.6e} m")

eps = energy_unit(m, sol.quantity)
omega = time_unit(m, sol.quantity)
print(f"energy unit  hbar^2/(m L^2) = {eps.magnitude:.6e} J")
print(f"frequency    omega          = {omega.magnitude:.6e} rad/s")
print(f"sqrt(k/m) for comparison    = {math.sqrt(k.magnitude / m.magnitude):.6e} rad/s")

print()
print("== atomic units ==")
sol = solve_scale([hbar, m_e, kappa], LENGTH)
a0 = sol.quantity
print(f"exponents of (hbar, m_e, kappa): {sol.exponents}")
print(f"a0      = {a0.magnitude:.10e} m")
hartree = energy_unit(m_e, a0)
print(f"Hartree = {hartree.magnitude:.10e} J")
print(f"kappa/a0 (same thing)      = {(kappa / a0).magnitude:.10e} J")

print()
print("== an ambiguous system ==")
a = Quantity(1e-10, LENGTH)
v0 = Quantity(8e-19, Dimension(mass=1, length=2, time=-2))
sol = solve_scale([a, hbar, m, v0], LENGTH)
print(f"two independent length scales -> ambiguous = {sol.ambiguous}")
print("the caller has to pick a scaling rule explicitly in that case")

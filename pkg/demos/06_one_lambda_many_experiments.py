"""One dimensionless calculation covers infinitely many experiments.

Three stories: SI Morse wells that share lambda share a spectrum; the two
textbook scalings of V0*f(x/a) disagree about everything except the physics;
and the hydrogen reduced mass enters only as a multiplicative m-tilde.
"""

import math

from scaleqm import (ENERGY, LENGTH, MASS, Dimension, Quantity, both_rules,
                     bound_states, default_registry, equivalence_witness,
                     hydrogen_effective_mass, morse, nondimensionalize,
                     radial_hydrogen, render_report, scaled_form)

REG = default_registry()
HBAR = REG.hbar.magnitude

print("== same lambda, different laboratories ==")
lam = 8.0
d = Quantity(7.2e-19, ENERGY)
configs = []
for t in (1.0, 0.25, 9.0):
    m = Quantity(1.6726e-27 * t, MASS)
    a = Quantity(math.sqrt(m.magnitude * d.magnitude / (HBAR ** 2 * lam)),
                 Dimension(length=-1))
    configs.append((morse(d, a), m))
verdict = equivalence_witness(configs[0][0], configs[1][0], configs[0][1], configs[1][1])
print(f"couplings agree across configs: {verdict.equivalent}")
for spec, m in configs:
    p = nondimensionalize(spec, m)
    e0 = bound_states(p, count=1, compute_residual=False)[0].energy
    print(f"  m = {m.magnitude:.3e} kg: Etilde_0 = {e0:.10f}, "
          f"E_0 = {p.to_physical(e0).magnitude:.6e} J, "
          f"eps_E = {p.energy_unit.magnitude:.3e} J")
print("identical dimensionless ladders; the SI spectra differ only through eps_E")

print()
print("== two scalings, one answer ==")
a = Quantity(2e-10, LENGTH)
m = Quantity(1.6726e-27, MASS)
v0 = Quantity(40.0 * HBAR ** 2 / (m.magnitude * a.magnitude ** 2), ENERGY)
spec = scaled_form("-exp(-x^2)", v0, a)
pair = both_rules(spec, m)
for name, p in pair.items():
    states = bound_states(p, count=2, compute_residual=False)
    mapped = [p.to_physical(st.energy).magnitude for st in states]
    print(f"rule {name}: Etilde = {[round(st.energy, 6) for st in states]}, "
          f"E_SI = {[f'{e:.8e}' for e in mapped]}")

print()
print("== hydrogen: clamped nucleus vs the real proton ==")
for label, mtilde in (("clamped (m -> inf)", 1.0),
                      ("proton", hydrogen_effective_mass(REG.m_p))):
    states = radial_hydrogen(mtilde, l=0, count=2)
    print(f"{label}: m-tilde = {mtilde:.7f}, "
          f"Etilde = {[round(st.energy, 9) for st in states]} "
          f"(exact -m/(2 n^2))")

print()
print("== the scaled-problem report ==")
print(render_report(nondimensionalize(configs[0][0], configs[0][1])))

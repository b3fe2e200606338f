"""Quartic anharmonic oscillator: exact series coefficients two ways.

The oscillator-basis route and the hypervirial moment recursion share no code
and no representation, yet produce identical exact rationals.  Small coupling:
the partial sums track the Numerov eigenvalue like lambda^(J+1).  Large
coupling: E grows as lambda^(1/3) with a universal prefactor.
"""

from scaleqm import (emit_series_report, hypervirial_series,
                     pure_quartic_reference, rs_series, solve_quartic_level,
                     strong_coupling_probe, weak_coupling_eval)

print("== ground-state series E(lam) = sum_j E_j lam^j (exact rationals) ==")
rs = rs_series(0, 6, {4: 1})
hv = hypervirial_series(0, 6)
print(f"{'j':>2} {'basis route':>22} {'hypervirial':>22} equal")
for j in range(7):
    a, b = rs.coefficient(j), hv.coefficient(j)
    print(f"{j:2d} {str(a):>22} {str(b):>22} {a == b}")

print()
print("machine-readable report:")
print(emit_series_report(rs_series(0, 3, {4: 1})))

print("== weak coupling: partial sums vs the solver ==")
for lam in (1e-3, 1e-2, 1e-1):
    solver = solve_quartic_level(lam, 0)
    sums = weak_coupling_eval(rs, lam)
    print(f"lam={lam:7.1g}: solver = {solver:.10f}")
    for j in (1, 2, 4, 6):
        print(f"    S_{j} = {sums[j]:.10f}   error = {sums[j] - solver:+.2e}")

print()
print("== lam = 10: the asymptotic series lets go (expected) ==")
solver = solve_quartic_level(10.0, 0)
sums = weak_coupling_eval(rs, 10.0)
print(f"solver = {solver:.6f}; S_2 = {sums[2]:.1f}; S_6 = {sums[6]:.4g}")

print()
print("== strong coupling: E(lam)/lam^(1/3) -> pure-quartic ground energy ==")
probe = strong_coupling_probe([1e2, 1e3, 1e4])
for lam, ratio in zip(probe.samples, probe.ratios):
    print(f"lam={lam:8.0f}: E/lam^(1/3) = {ratio:.8f}")
print(f"fitted limit      = {probe.e0_estimate:.8f}")
print(f"matrix reference  = {pure_quartic_reference(0):.8f}")

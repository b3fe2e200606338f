import math
from fractions import Fraction

import numpy as np
import pytest

from scaleqm import catalog as cat, expr as ex, nondim as nd
from scaleqm.dimensions import (ENERGY, LENGTH, MASS, Dimension, Quantity,
                                default_registry)

REG = default_registry()
HBAR = REG.hbar.magnitude
INV_LENGTH = Dimension(length=-1)

M = Quantity(1.6726e-27, MASS)


def _rand_quantity(rng, lo, hi, dim):
    return Quantity(float(np.exp(rng.uniform(np.log(lo), np.log(hi)))), dim)


def test_box_scaling():
    p = nd.nondimensionalize(cat.box(Quantity(1e-9, LENGTH)), M)
    assert p.couplings == {}
    assert (p.domain.lo, p.domain.hi) == (0.0, 1.0)
    assert p.potential(0.5) == 0.0
    assert p.length_unit.magnitude == 1e-9
    assert p.bc is cat.BoundaryCondition.DIRICHLET


def test_harmonic_scaling():
    k = Quantity(480.0, cat.FORCE_CONSTANT)
    p = nd.nondimensionalize(cat.harmonic(k), M)
    expected_L = (HBAR ** 2 / (M.magnitude * k.magnitude)) ** 0.25
    assert p.length_unit.magnitude == pytest.approx(expected_L, rel=1e-14)
    omega = math.sqrt(k.magnitude / M.magnitude)
    assert p.energy_unit.magnitude == pytest.approx(HBAR * omega, rel=1e-13)
    assert p.time_unit.magnitude == pytest.approx(omega, rel=1e-13)
    assert p.couplings == {} and p.even_parity


def test_scaled_form_rule_a():
    rng = np.random.default_rng(11)
    for _ in range(5):
        v0 = _rand_quantity(rng, 1e-20, 1e-18, ENERGY)
        a = _rand_quantity(rng, 5e-11, 5e-10, LENGTH)
        m = _rand_quantity(rng, 1e-30, 1e-26, MASS)
        spec = cat.scaled_form("-exp(-x^2)", v0, a)
        p = nd.nondimensionalize(spec, m, nd.GivenLength("a"))
        lam = m.magnitude * a.magnitude ** 2 * v0.magnitude / HBAR ** 2
        assert p.couplings["lambda"] == pytest.approx(lam, rel=1e-13)
        assert p.length_unit.magnitude == a.magnitude
        assert p.energy_unit.magnitude == pytest.approx(
            HBAR ** 2 / (m.magnitude * a.magnitude ** 2), rel=1e-13)
        # ftilde = lambda * f(x)
        xs = rng.uniform(-2, 2, 20)
        np.testing.assert_allclose(p.potential(xs), lam * -np.exp(-xs ** 2), rtol=1e-12)


def test_scaled_form_rule_b():
    v0 = Quantity(3.2e-19, ENERGY)
    a = Quantity(2e-10, LENGTH)
    spec = cat.scaled_form("-exp(-x^2)", v0, a)
    p = nd.nondimensionalize(spec, M, nd.DepthBased())
    assert p.energy_unit.magnitude == pytest.approx(v0.magnitude, rel=1e-13)
    assert p.length_unit.magnitude == pytest.approx(
        HBAR / math.sqrt(M.magnitude * v0.magnitude), rel=1e-13)
    lam = p.couplings["lambda"]
    xs = np.linspace(-3, 3, 11)
    np.testing.assert_allclose(p.potential(xs), -np.exp(-(xs / math.sqrt(lam)) ** 2),
                               rtol=1e-12)


def test_morse_scaling():
    d = Quantity(7.2e-19, ENERGY)
    a = Quantity(1.9e10, INV_LENGTH)
    p = nd.nondimensionalize(cat.morse(d, a), M)
    lam = M.magnitude * d.magnitude / (HBAR ** 2 * a.magnitude ** 2)
    assert p.couplings["lambda"] == pytest.approx(lam, rel=1e-13)
    assert p.length_unit.magnitude == pytest.approx(1.0 / a.magnitude, rel=1e-14)
    # eps_E = D/lambda, the prefactor of the closed-form spectrum
    assert p.energy_unit.magnitude == pytest.approx(d.magnitude / lam, rel=1e-12)
    assert ex.print_expr(p.ftilde) == "lambda*(1 - exp(-x))^2"


def test_ahmed_single_coupling():
    v0 = Quantity(8.01e-19, ENERGY)
    a = Quantity(1e-10, LENGTH)
    p = nd.nondimensionalize(cat.ahmed_bic(v0, a), Quantity(9.109e-31, MASS))
    assert set(p.couplings) == {"lambda"}
    lam = p.couplings["lambda"]
    xs = np.linspace(-1.5, 1.5, 9)
    np.testing.assert_allclose(p.potential(xs), lam * (1 - np.exp(2 * np.abs(xs))),
                               rtol=1e-12)
    assert p.even_parity


def test_trunc_inv_square_scaling():
    alpha = Quantity(3e-41, cat.INV_SQUARE_STRENGTH)
    eps = Quantity(2e-10, LENGTH)
    p = nd.nondimensionalize(cat.trunc_inv_square(alpha, eps), M)
    rho0 = math.sqrt(2 * M.magnitude * alpha.magnitude / HBAR ** 2)
    assert p.couplings["rho0"] == pytest.approx(rho0, rel=1e-13)
    assert p.energy_unit.magnitude == pytest.approx(
        alpha.magnitude / eps.magnitude ** 2, rel=1e-13)
    # inner plateau is exactly -1 in these units; tail is -rho0^2/(2 x^2)
    assert p.potential(rho0 / math.sqrt(2) / 2) == pytest.approx(-1.0, rel=1e-14)
    x_out = rho0
    assert p.potential(x_out) == pytest.approx(-0.5, rel=1e-13)


def test_quartic_couplings_both_rules():
    k2 = Quantity(480.0, cat.FORCE_CONSTANT)
    k4 = Quantity(5e22, cat.QUARTIC_CONSTANT)
    spec = cat.poly_anharmonic(k2, k4)
    lam = HBAR * k4.magnitude / math.sqrt(M.magnitude * k2.magnitude ** 3)
    omega = math.sqrt(k2.magnitude / M.magnitude)
    ph = nd.nondimensionalize(spec, M, nd.HarmonicBalance())
    pq = nd.nondimensionalize(spec, M, nd.QuarticBased())
    assert ph.couplings["lambda"] == pytest.approx(lam, rel=1e-12)
    assert pq.couplings["lambda"] == pytest.approx(lam, rel=1e-12)
    assert ph.energy_unit.magnitude == pytest.approx(HBAR * omega, rel=1e-12)
    assert pq.energy_unit.magnitude == pytest.approx(HBAR * omega * lam ** (1 / 3),
                                                     rel=1e-12)


def test_custom_with_explicit_length():
    spec, mass = cat.build_spec(cat.parse_config("""family = custom
potential = c2*x^2
param.c2 = 0.5 dim=M1 T-2
mass = 1e-30
"""))
    L = Quantity(1e-10, LENGTH)
    p = nd.nondimensionalize(spec, mass, nd.Explicit(L))
    scale = mass.magnitude * L.magnitude ** 2 / HBAR ** 2
    assert p.potential(2.0) == pytest.approx(scale * 0.5 * (2e-10) ** 2, rel=1e-12)
    assert p.couplings == {}


def test_rule_family_mismatch():
    with pytest.raises(nd.NondimError):
        nd.nondimensionalize(cat.box(Quantity(1e-9, LENGTH)), M, nd.DepthBased())
    with pytest.raises(nd.NondimError):
        nd.nondimensionalize(cat.harmonic(Quantity(480.0, cat.FORCE_CONSTANT)), M,
                             nd.GivenLength("a"))
    with pytest.raises(nd.NondimError):
        nd.nondimensionalize(cat.morse(Quantity(7e-19, ENERGY),
                                       Quantity(1.9e10, INV_LENGTH)), M,
                             nd.QuarticBased())


def test_scaling_soundness_random_point_identity():
    # (m L^2 / hbar^2) V(L x) == ftilde(x) for every family, random parameters
    rng = np.random.default_rng(99)
    cases = []
    for _ in range(3):
        m = _rand_quantity(rng, 1e-30, 1e-26, MASS)
        cases.extend([
            (cat.harmonic(_rand_quantity(rng, 1.0, 1e3, cat.FORCE_CONSTANT)), m, None),
            (cat.morse(_rand_quantity(rng, 1e-20, 1e-18, ENERGY),
                       _rand_quantity(rng, 1e9, 1e11, INV_LENGTH)), m, None),
            (cat.scaled_form("-exp(-x^2)", _rand_quantity(rng, 1e-20, 1e-18, ENERGY),
                             _rand_quantity(rng, 5e-11, 5e-10, LENGTH)), m,
             nd.DepthBased()),
            (cat.trunc_inv_square(_rand_quantity(rng, 1e-42, 1e-40, cat.INV_SQUARE_STRENGTH),
                                  _rand_quantity(rng, 5e-11, 5e-10, LENGTH)), m, None),
            (cat.poly_anharmonic(_rand_quantity(rng, 1.0, 1e3, cat.FORCE_CONSTANT),
                                 _rand_quantity(rng, 1e20, 1e24, cat.QUARTIC_CONSTANT)),
             m, nd.QuarticBased()),
        ])
    for spec, m, rule in cases:
        p = nd.nondimensionalize(spec, m, rule)
        lo = 1e-3 if spec.domain.is_half_line else -4.0
        xs = rng.uniform(lo, 4.0, 100)
        L = p.length_unit.magnitude
        scale = m.magnitude * L ** 2 / HBAR ** 2
        direct = scale * np.asarray(spec.evaluate(xs * L), dtype=float)
        collapsed = np.asarray(p.potential(xs), dtype=float)
        ref = np.maximum(np.abs(direct), 1.0)
        assert np.max(np.abs(direct - collapsed) / ref) <= 1e-10


def test_every_scaled_problem_lints_dimensionless():
    specs_rules = [
        (cat.box(Quantity(1e-9, LENGTH)), None),
        (cat.harmonic(Quantity(480.0, cat.FORCE_CONSTANT)), None),
        (cat.morse(Quantity(7e-19, ENERGY), Quantity(1.9e10, INV_LENGTH)), None),
        (cat.scaled_form("-exp(-x^2)", Quantity(3e-19, ENERGY),
                         Quantity(2e-10, LENGTH)), nd.DepthBased()),
        (cat.rect_barrier(Quantity(3e-19, ENERGY), Quantity(2e-10, LENGTH)), None),
        (cat.ahmed_bic(Quantity(3e-19, ENERGY), Quantity(2e-10, LENGTH)), None),
        (cat.trunc_inv_square(Quantity(3e-41, cat.INV_SQUARE_STRENGTH),
                              Quantity(2e-10, LENGTH)), None),
        (cat.poly_anharmonic(Quantity(480.0, cat.FORCE_CONSTANT),
                             Quantity(5e22, cat.QUARTIC_CONSTANT)), None),
    ]
    for spec, rule in specs_rules:
        p = nd.nondimensionalize(spec, M, rule)
        assert p.lint() == []


def test_energy_map_is_linear_increasing():
    p = nd.nondimensionalize(cat.harmonic(Quantity(480.0, cat.FORCE_CONSTANT)), M)
    e1 = p.to_physical(1.0).magnitude
    e2 = p.to_physical(2.0).magnitude
    assert e2 == pytest.approx(2 * e1, rel=1e-15) and e1 > 0
    assert p.to_physical(0.0).magnitude == 0.0
    assert p.to_physical(1.0).dim == ENERGY


def test_hydrogen_effective_mass():
    m_p = REG.m_p
    mt = nd.hydrogen_effective_mass(m_p)
    ratio = m_p.magnitude / REG.m_e.magnitude
    assert mt == pytest.approx(ratio / (1 + ratio), rel=1e-12)
    assert mt == pytest.approx(0.9994557, abs=5e-8)
    assert nd.hydrogen_effective_mass(Quantity(math.inf, MASS)) == 1.0
    assert nd.hydrogen_effective_mass(REG.m_e) == pytest.approx(0.5, rel=1e-15)
    with pytest.raises(ValueError):
        nd.hydrogen_effective_mass(Quantity(-1.0, MASS))
    with pytest.raises(ValueError):
        nd.hydrogen_effective_mass(Quantity(1.0, LENGTH))


def test_atomic_units_descriptor():
    e = REG.e
    electron = (REG.m_e, Quantity(-e.magnitude, e.dim))
    desc = nd.atomic_units([electron])
    assert desc.m_tilde == (1.0,) and desc.q_tilde == (-1.0,)
    hydrogen = nd.atomic_units([electron, (REG.m_p, e)])
    assert hydrogen.coulomb_coefficients[(0, 1)] == pytest.approx(-1.0, rel=1e-15)
    assert hydrogen.length_unit.magnitude == pytest.approx(5.29177210903e-11, rel=1e-8)
    assert hydrogen.energy_unit.magnitude == pytest.approx(4.3597447e-18, rel=1e-6)
    with pytest.raises(ValueError):
        nd.atomic_units([])


def test_z_scaled_atom():
    atom = nd.z_scaled_atom(2, 2)
    a0 = nd.bohr_radius().magnitude
    assert atom.length_unit.magnitude == pytest.approx(a0 / 2, rel=1e-14)
    assert atom.ee_coefficient == Fraction(1, 2)  # exact rational
    assert atom.nucleus_coefficients == (Fraction(-1), Fraction(-1))
    assert atom.energy_prefactor.magnitude == pytest.approx(
        4 * nd.atomic_units([(REG.m_e, REG.e)]).energy_unit.magnitude, rel=1e-12)

    single = nd.z_scaled_atom(1, 7)
    assert single.ee_coefficient is None  # no electron pair

    big_z = nd.z_scaled_atom(3, 10 ** 9)
    assert float(big_z.ee_coefficient) == pytest.approx(0.0, abs=1e-8)

    template = atom.series_template()
    assert "hbar^2*Z^2/(m_e*a0^2)" in template
    assert "Z^(-2)" in template and "N-dependent" in template

    with pytest.raises(ValueError):
        nd.z_scaled_atom(0, 1)
    with pytest.raises(ValueError):
        nd.z_scaled_atom(1, 0)


def test_equivalence_witness():
    v0 = Quantity(3.2e-19, ENERGY)
    a = Quantity(2e-10, LENGTH)
    spec = cat.scaled_form("-exp(-x^2)", v0, a)
    same = nd.equivalence_witness(spec, spec, M, M)
    assert same.equivalent and same.max_rel_diff <= 1e-15

    partner = cat.scaled_form("-exp(-x^2)", 2.0 * v0, a * (1 / math.sqrt(2.0)))
    v = nd.equivalence_witness(spec, partner, M, M)
    assert v.equivalent

    doubled = cat.scaled_form("-exp(-x^2)", 2.0 * v0, a)
    v = nd.equivalence_witness(spec, doubled, M, M)
    assert not v.equivalent

    with pytest.raises(nd.NondimError, match="family"):
        nd.equivalence_witness(spec, cat.box(Quantity(1e-9, LENGTH)), M, M)


def test_quartic_equivalence_class():
    # triples with equal hbar k4 / sqrt(m k2^3) are the same problem
    k2 = Quantity(480.0, cat.FORCE_CONSTANT)
    k4 = Quantity(5e22, cat.QUARTIC_CONSTANT)
    spec1 = cat.poly_anharmonic(k2, k4)
    t = 3.7
    spec2 = cat.poly_anharmonic(Quantity(k2.magnitude * t, k2.dim),
                                Quantity(k4.magnitude * t ** 1.5, k4.dim))
    v = nd.equivalence_witness(spec1, spec2, M, M)
    assert v.equivalent


def test_both_rules_pair():
    spec = cat.morse(Quantity(7.2e-19, ENERGY), Quantity(1.9e10, INV_LENGTH))
    pair = nd.both_rules(spec, M)
    assert set(pair) == {"A", "B"}
    assert pair["A"].couplings["lambda"] == pytest.approx(
        pair["B"].couplings["lambda"], rel=1e-14)
    assert pair["A"].energy_unit.magnitude != pair["B"].energy_unit.magnitude
    with pytest.raises(nd.NondimError):
        nd.both_rules(cat.box(Quantity(1e-9, LENGTH)), M)


def test_report_contains_machine_section():
    p = nd.nondimensionalize(cat.morse(Quantity(7e-19, ENERGY),
                                       Quantity(1.9e10, INV_LENGTH)), M)
    report = nd.render_report(p)
    assert "[machine]" in report
    assert "coupling.lambda = " in report
    assert "ftilde = lambda*(1 - exp(-x))^2" in report
    # the machine section parses as a config-style block
    machine = report.split("[machine]\n", 1)[1]
    values = dict(line.split(" = ", 1) for line in machine.strip().splitlines())
    assert float(values["L_SI"]) == p.length_unit.magnitude
    assert float(values["eps_E_SI"]) == p.energy_unit.magnitude

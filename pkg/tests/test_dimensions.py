import math
from fractions import Fraction

import numpy as np
import pytest

from scaleqm.dimensions import (ENERGY, LENGTH, MASS,
                                ConstantRegistry, Dimension, DimensionError,
                                Quantity, combine, default_registry,
                                energy_unit, parse_constant_line, solve_scale,
                                time_unit)

REG = default_registry()
HBAR = REG.hbar
M_E = REG.m_e
KAPPA = REG.kappa

FORCE_CONSTANT = Dimension(mass=1, time=-2)


def test_dimension_product_and_power_laws():
    rng = np.random.default_rng(7)
    for _ in range(50):
        a = Dimension(*[Fraction(int(v), int(d)) for v, d in
                        zip(rng.integers(-6, 7, 4), rng.integers(1, 5, 4))])
        b = Dimension(*[Fraction(int(v)) for v in rng.integers(-4, 5, 4)])
        p = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
        assert (a * b).exponents == tuple(x + y for x, y in zip(a.exponents, b.exponents))
        assert (a ** p).exponents == tuple(x * p for x in a.exponents)
        assert (a / b).exponents == tuple(x - y for x, y in zip(a.exponents, b.exponents))


def test_dimension_rejects_floats():
    with pytest.raises(TypeError):
        Dimension(mass=0.5)


def test_quantity_addition_requires_equal_dimension():
    with pytest.raises(DimensionError):
        Quantity(1.0, MASS) + Quantity(1.0, LENGTH)
    q = Quantity(1.0, MASS) + Quantity(2.0, MASS)
    assert q.magnitude == 3.0


def test_quantity_fractional_power_of_negative_raises():
    with pytest.raises(DimensionError):
        Quantity(-2.0, LENGTH) ** Fraction(1, 2)
    # integer powers of negatives stay fine
    assert (Quantity(-2.0, LENGTH) ** 2).magnitude == 4.0


def test_combine_power_law():
    q = combine([HBAR], [2])
    assert q.dim == Dimension(mass=2, length=4, time=-2)
    assert q.magnitude == pytest.approx(HBAR.magnitude ** 2, rel=1e-15)


def test_combine_harmonic_length_exponents():
    m = Quantity(1.5e-27, MASS)
    k = Quantity(312.0, FORCE_CONSTANT)
    q = combine([HBAR, m, k], [Fraction(1, 2), Fraction(-1, 4), Fraction(-1, 4)])
    assert q.dim == LENGTH


def test_combine_identity():
    L = Quantity(2.5e-10, LENGTH)
    q = combine([L], [1])
    assert q.dim == LENGTH and q.magnitude == L.magnitude


def test_combine_length_mismatch():
    with pytest.raises(ValueError):
        combine([HBAR], [1, 2])
    with pytest.raises(ValueError):
        combine([], [])


def test_solve_scale_harmonic_length():
    m = Quantity(1.5e-27, MASS)
    k = Quantity(312.0, FORCE_CONSTANT)
    sol = solve_scale([HBAR, m, k], LENGTH)
    assert sol.exponents == (Fraction(1, 2), Fraction(-1, 4), Fraction(-1, 4))
    assert not sol.ambiguous
    expected = (HBAR.magnitude ** 2 / (m.magnitude * k.magnitude)) ** 0.25
    assert sol.quantity.magnitude == pytest.approx(expected, rel=1e-14)


def test_solve_scale_bohr_radius():
    sol = solve_scale([HBAR, M_E, KAPPA], LENGTH)
    assert sol.exponents == (Fraction(2), Fraction(-1), Fraction(-1))
    # CODATA a0
    assert sol.quantity.magnitude == pytest.approx(5.29177210903e-11, rel=1e-8)


def test_solve_scale_depth_length():
    m = Quantity(9.1e-31, MASS)
    v0 = Quantity(8.0e-19, ENERGY)
    sol = solve_scale([HBAR, m, v0], LENGTH)
    assert sol.exponents == (Fraction(1), Fraction(-1, 2), Fraction(-1, 2))


def test_solve_scale_identity():
    L = Quantity(1e-9, LENGTH)
    sol = solve_scale([L], LENGTH)
    assert sol.exponents == (Fraction(1),)


def test_solve_scale_ambiguous_two_length_scales():
    a = Quantity(1e-10, LENGTH)
    m = Quantity(9.1e-31, MASS)
    v0 = Quantity(8.0e-19, ENERGY)
    sol = solve_scale([a, HBAR, m, v0], LENGTH)
    assert sol.ambiguous
    assert sol.quantity.dim == LENGTH


def test_solve_scale_missing_dimension_named():
    m = Quantity(1.0, MASS)
    k = Quantity(1.0, FORCE_CONSTANT)
    with pytest.raises(DimensionError, match="length"):
        solve_scale([m, k], LENGTH)


def test_solve_scale_roundtrip_property():
    rng = np.random.default_rng(13)
    pool = [REG[name] for name in ("hbar", "m_e", "e", "eps0", "c", "kappa")]
    for _ in range(80):
        take = rng.choice(len(pool), size=int(rng.integers(1, 5)), replace=False)
        params = [pool[i] for i in take]
        # build an achievable target from a random exact combination
        exps = [Fraction(int(v), int(d)) for v, d in
                zip(rng.integers(-3, 4, len(params)), rng.integers(1, 4, len(params)))]
        target = combine(params, exps).dim
        sol = solve_scale(params, target)
        assert combine(params, sol.exponents).dim == target  # exact rational check


def test_energy_unit_atomic():
    a0 = solve_scale([HBAR, M_E, KAPPA], LENGTH).quantity
    hartree = energy_unit(M_E, a0)
    assert hartree.dim == ENERGY
    coulombic = KAPPA / a0
    assert abs(hartree.magnitude - coulombic.magnitude) <= 1e-10 * coulombic.magnitude


def test_energy_unit_harmonic_is_hbar_omega():
    m = Quantity(1.5e-27, MASS)
    k = Quantity(312.0, FORCE_CONSTANT)
    L = solve_scale([HBAR, m, k], LENGTH).quantity
    omega = math.sqrt(k.magnitude / m.magnitude)
    assert energy_unit(m, L).magnitude == pytest.approx(HBAR.magnitude * omega, rel=1e-13)


def test_energy_unit_unit_inputs():
    q = energy_unit(Quantity(1.0, MASS), Quantity(1.0, LENGTH))
    assert q.magnitude == pytest.approx(HBAR.magnitude ** 2, rel=1e-15)


def test_energy_unit_dimension_checks():
    with pytest.raises(DimensionError):
        energy_unit(Quantity(1.0, LENGTH), Quantity(1.0, LENGTH))
    with pytest.raises(DimensionError):
        energy_unit(Quantity(1.0, MASS), Quantity(1.0, MASS))
    with pytest.raises(DimensionError):
        energy_unit(Quantity(-1.0, MASS), Quantity(1.0, LENGTH))


def test_time_unit_identity_with_energy_unit():
    m = Quantity(3.3e-26, MASS)
    L = Quantity(4.7e-10, LENGTH)
    eps = energy_unit(m, L)
    omega = time_unit(m, L)
    assert abs(HBAR.magnitude * omega.magnitude - eps.magnitude) <= 1e-12 * eps.magnitude
    assert omega.dim == Dimension(time=-1)


def test_time_unit_harmonic_frequency():
    m = Quantity(1.5e-27, MASS)
    k = Quantity(312.0, FORCE_CONSTANT)
    L = solve_scale([HBAR, m, k], LENGTH).quantity
    assert time_unit(m, L).magnitude == pytest.approx(
        math.sqrt(k.magnitude / m.magnitude), rel=1e-13)


def test_time_unit_quarter_on_doubled_length():
    m = Quantity(1.5e-27, MASS)
    L = Quantity(1e-10, LENGTH)
    w1 = time_unit(m, L).magnitude
    w2 = time_unit(m, 2.0 * L).magnitude
    assert w2 == pytest.approx(w1 / 4.0, rel=1e-14)


def test_registry_kappa_consistency():
    e = REG.e.magnitude
    eps0 = REG.eps0.magnitude
    expected = e * e / (4.0 * math.pi * eps0)
    assert abs(KAPPA.magnitude - expected) <= 1e-10 * expected


def test_registry_rejects_inconsistent_kappa():
    with pytest.raises(ValueError, match="inconsistent"):
        REG.override(kappa=Quantity(KAPPA.magnitude * 1.001, KAPPA.dim))


def test_registry_override_with_toy_values():
    toy = REG.override(hbar=Quantity(1.0, HBAR.dim))
    assert toy.hbar.magnitude == 1.0
    assert REG.hbar.magnitude != 1.0  # original untouched


def test_registry_unknown_name():
    with pytest.raises(KeyError):
        REG["planck_length"]


def test_constants_line_parsing():
    name, value, dim = parse_constant_line("hbar 1.05e-34 dim=M1 L2 T-1 Q0")
    assert name == "hbar" and value == 1.05e-34
    assert dim == Dimension(mass=1, length=2, time=-1)
    _, _, dim = parse_constant_line("mystery 2.0 dim=M1/2 L-3/4 T0 Q2")
    assert dim == Dimension(Fraction(1, 2), Fraction(-3, 4), 0, 2)
    with pytest.raises(ValueError):
        parse_constant_line("nodim 1.0")


def test_registry_load_from_file(tmp_path):
    path = tmp_path / "constants.txt"
    path.write_text("# toy\nfoo 2.5 dim=M1 L0 T0 Q0\n")
    reg = ConstantRegistry.load(str(path))
    assert reg.foo.magnitude == 2.5 and reg.foo.dim == MASS
    assert "foo" in reg and "hbar" not in reg

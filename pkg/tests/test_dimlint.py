import pytest

from scaleqm import dimlint, expr as ex
from scaleqm import catalog as cat
from scaleqm.dimensions import (DIMENSIONLESS, ENERGY, LENGTH, MASS, Dimension,
                                Quantity, default_registry)

REG = default_registry()
INV_LENGTH = Dimension(length=-1)


def test_morse_lints_clean():
    ast = ex.parse("D*(1 - exp(-a*x))^2")
    assert dimlint.lint(ast, {"D": ENERGY, "a": INV_LENGTH}) == []


def test_exp_of_length_flagged():
    diags = dimlint.lint(ex.parse("exp(x)"), {})
    assert len(diags) == 1
    assert "exp" in diags[0].message and diags[0].subexpr == "x"


def test_sum_of_unequal_dimensions_flagged():
    diags = dimlint.lint(ex.parse("a + V0"), {"a": LENGTH, "V0": ENERGY})
    assert len(diags) == 1 and "'+'" in diags[0].message


def test_zero_literal_is_dimension_neutral():
    assert dimlint.lint(ex.parse("a + 0"), {"a": LENGTH}) == []
    assert dimlint.lint(ex.parse("a + 1"), {"a": LENGTH})  # one is not neutral
    pw = ex.parse("piecewise([-inf, 0] -> 0, [0, a] -> V0, [a, inf] -> 0)")
    assert dimlint.lint(pw, {"a": LENGTH, "V0": ENERGY}) == []


def test_piecewise_branch_mismatch_flagged():
    pw = ex.parse("piecewise([-inf, 0] -> a, [0, inf] -> V0)")
    diags = dimlint.lint(pw, {"a": LENGTH, "V0": ENERGY})
    assert any("branches" in d.message for d in diags)


def test_piecewise_guard_endpoint_dimension():
    pw = ex.parse("piecewise([0, V0] -> 1, [V0, inf] -> 2)")
    diags = dimlint.lint(pw, {"V0": ENERGY})
    assert any("guard endpoint" in d.message for d in diags)
    ok = ex.parse("piecewise([0, a] -> 1, [a, inf] -> 2)")
    assert dimlint.lint(ok, {"a": LENGTH}) == []


def test_unknown_symbol_raises_not_diagnoses():
    with pytest.raises(dimlint.UnknownSymbolError):
        dimlint.lint(ex.parse("mystery*x"), {})


def test_declaration_two_m_over_hbar_squared():
    lhs = ex.parse("2*m/hbar^2")
    diags = dimlint.lint_assumption(lhs, 1.0, {"m": MASS, "hbar": REG.hbar.dim})
    assert len(diags) == 1
    assert "bare number" in diags[0].message


def test_dimensionless_declaration_is_clean():
    lhs = ex.parse("m*a^2*V0/hbar^2")
    dims = {"m": MASS, "a": LENGTH, "V0": ENERGY, "hbar": REG.hbar.dim}
    assert dimlint.lint_assumption(lhs, 8.0, dims) == []


def test_every_catalog_family_lints_clean():
    specs = [
        cat.box(Quantity(1e-9, LENGTH)),
        cat.harmonic(Quantity(480.0, cat.FORCE_CONSTANT)),
        cat.scaled_form("-exp(-x^2)", Quantity(3e-19, ENERGY), Quantity(2e-10, LENGTH)),
        cat.rect_barrier(Quantity(3e-19, ENERGY), Quantity(2e-10, LENGTH)),
        cat.morse(Quantity(7e-19, ENERGY), Quantity(1.9e10, INV_LENGTH)),
        cat.ahmed_bic(Quantity(3e-19, ENERGY), Quantity(2e-10, LENGTH)),
        cat.trunc_inv_square(Quantity(3e-41, cat.INV_SQUARE_STRENGTH),
                             Quantity(2e-10, LENGTH)),
        cat.poly_anharmonic(Quantity(480.0, cat.FORCE_CONSTANT),
                            Quantity(5e22, cat.QUARTIC_CONSTANT)),
    ]
    for spec in specs:
        assert dimlint.lint(spec.expr, spec.param_dims()) == []


def test_infer_dimension():
    dims = {"D": ENERGY, "a": INV_LENGTH}
    assert dimlint.infer_dimension(ex.parse("D*(1 - exp(-a*x))^2"), dims) == ENERGY
    assert dimlint.infer_dimension(ex.parse("a*x"), dims) == DIMENSIONLESS
    assert dimlint.infer_dimension(ex.parse("x + D"), dims) is None
    assert dimlint.infer_dimension(ex.parse("0"), dims) == DIMENSIONLESS

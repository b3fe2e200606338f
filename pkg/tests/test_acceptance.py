"""Acceptance gate: every numbered criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS/FAIL line per
criterion with its runtime against the budget.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from scaleqm import catalog as cat
from scaleqm import cli
from scaleqm import dimlint
from scaleqm import nondim as nd
from scaleqm import perturbation as pt
from scaleqm import scattering as sc
from scaleqm import solver1d as s1
from scaleqm.dimensions import (ENERGY, LENGTH, MASS, Dimension, Quantity,
                                default_registry, energy_unit, solve_scale)

REG = default_registry()
HBAR = REG.hbar.magnitude
INV_LENGTH = Dimension(length=-1)
M = Quantity(1.6726e-27, MASS)


class _Gate:
    def __init__(self, number: int, description: str, budget_s: float):
        self.number = number
        self.description = description
        self.budget = budget_s

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        status = "PASS" if exc_type is None and elapsed < self.budget else "FAIL"
        print(f"ACCEPTANCE {self.number:2d} {status}  "
              f"({elapsed:6.2f}s / {self.budget:g}s)  {self.description}")
        if exc_type is None:
            assert elapsed < self.budget, (
                f"criterion {self.number} exceeded its {self.budget}s budget")
        return False


def _morse_problem(lam: float) -> nd.ScaledProblem:
    d = Quantity(7.2e-19, ENERGY)
    a_mag = math.sqrt(M.magnitude * d.magnitude / (HBAR ** 2 * lam))
    return nd.nondimensionalize(cat.morse(d, Quantity(a_mag, INV_LENGTH)), M)


def test_criterion_01_box_spectrum():
    with _Gate(1, "box spectrum n^2 pi^2/2, n=1..5, 1e-7", 5.0):
        p = nd.nondimensionalize(cat.box(Quantity(1e-9, LENGTH)), M)
        states = s1.bound_states(p, count=5, compute_residual=False)
        assert states.complete
        for st in states:
            n = st.index + 1
            assert abs(st.energy - n * n * math.pi ** 2 / 2) <= 1e-7


def test_criterion_02_harmonic_spectrum_and_map():
    with _Gate(2, "harmonic n+1/2 (1e-7) and E = hbar w (n+1/2) (1e-8 rel)", 5.0):
        rng = np.random.default_rng(2)
        etilde_lists = []
        pairs = []
        for i in range(20):
            m = Quantity(float(np.exp(rng.uniform(np.log(1e-30), np.log(1e-25)))), MASS)
            k = Quantity(float(np.exp(rng.uniform(np.log(1e-2), np.log(1e4)))),
                         cat.FORCE_CONSTANT)
            pairs.append((m, k, nd.nondimensionalize(cat.harmonic(k), m)))
        # the dimensionless problem is parameter-free: solve it for three of the
        # random pairs to confirm, then map every pair back to SI
        for m, k, problem in pairs[:3]:
            states = s1.bound_states(problem, count=5, compute_residual=False)
            etilde_lists.append([st.energy for st in states])
            for st in states:
                assert abs(st.energy - (st.index + 0.5)) <= 1e-7
        for a, b in zip(etilde_lists, etilde_lists[1:]):
            assert np.max(np.abs(np.array(a) - np.array(b))) <= 1e-10
        reference = etilde_lists[0]
        for m, k, problem in pairs:
            omega = math.sqrt(k.magnitude / m.magnitude)
            for idx, etilde in enumerate(reference):
                e_si = problem.to_physical(etilde).magnitude
                expected = HBAR * omega * (idx + 0.5)
                assert abs(e_si - expected) <= 1e-8 * expected


def test_criterion_03_morse_spectra_and_cutoff():
    with _Gate(3, "Morse lam in {4, 8, 12.5}: closed form 1e-6, hard cutoff", 30.0):
        for lam in (4.0, 8.0, 12.5):
            p = _morse_problem(lam)
            lam_actual = p.couplings["lambda"]
            n_states = s1.morse_state_count(lam_actual)
            assert n_states == s1.morse_state_count(lam)
            states = s1.bound_states(p, count=n_states + 2, compute_residual=False)
            assert len(states) == n_states  # nothing beyond the cutoff
            assert not states.complete
            for st in states:
                ref = s1.exact_reference(cat.Family.MORSE, p.couplings, st.index)
                assert abs(st.energy - ref) <= 1e-6


def test_criterion_04_barrier_transmission():
    with _Gate(4, "50-point transfer matrix vs closed form 1e-8; T+R 1e-10", 10.0):
        lambdas = (0.5, 2.0, 5.0, 8.0, 20.0)
        energies = (0.2, 0.5, 0.8, 0.95, 1.0, 1.05, 1.3, 2.0, 3.5, 6.0)
        a = Quantity(1e-10, LENGTH)
        m_e = REG.m_e
        checked = 0
        for lam in lambdas:
            v0 = Quantity(lam * HBAR ** 2 / (m_e.magnitude * a.magnitude ** 2), ENERGY)
            problem = nd.nondimensionalize(cat.rect_barrier(v0, a), m_e, nd.DepthBased())
            for e_tilde in energies:
                numeric = sc.transmission_numeric(problem, e_tilde)
                closed = sc.transmission_closed(e_tilde, lam)
                assert abs(numeric.T - closed.T) <= 1e-8
                assert abs(numeric.T + numeric.R - 1.0) <= 1e-10
                checked += 1
        assert checked == 50
        for lam in lambdas:
            mid = sc.transmission_closed(1.0, lam).T
            assert abs(sc.transmission_closed(1.0 - 1e-9, lam).T - mid) <= 1e-6
            assert abs(sc.transmission_closed(1.0 + 1e-9, lam).T - mid) <= 1e-6


def _scaling_pair(rng, family):
    """Random SI config plus a distinct SI config sharing couplings and units."""
    log_u = lambda lo, hi: float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
    t = float(rng.uniform(0.2, 5.0))
    if family is cat.Family.HARMONIC:
        m = Quantity(log_u(1e-29, 1e-26), MASS)
        k = Quantity(log_u(1e-1, 1e3), cat.FORCE_CONSTANT)
        spec1 = cat.harmonic(k)
        spec2 = cat.harmonic(Quantity(k.magnitude * t, k.dim))
        return spec1, m, spec2, Quantity(m.magnitude * t, MASS), 2
    if family is cat.Family.MORSE:
        # lam = m D/(hbar a)^2 with a an inverse length: m -> t m needs a -> a sqrt(t)
        m = Quantity(log_u(1e-28, 1e-26), MASS)
        lam = rng.uniform(3.0, 12.0)
        d = Quantity(log_u(1e-20, 1e-18), ENERGY)
        a = Quantity(math.sqrt(m.magnitude * d.magnitude / (HBAR ** 2 * lam)), INV_LENGTH)
        spec1 = cat.morse(d, a)
        spec2 = cat.morse(d, Quantity(a.magnitude * math.sqrt(t), INV_LENGTH))
        return spec1, m, spec2, Quantity(m.magnitude * t, MASS), 2
    if family is cat.Family.SCALED_FORM:
        m = Quantity(log_u(1e-29, 1e-26), MASS)
        lam = rng.uniform(8.0, 50.0)
        a = Quantity(log_u(5e-11, 5e-10), LENGTH)
        v0 = Quantity(lam * HBAR ** 2 / (m.magnitude * a.magnitude ** 2), ENERGY)
        spec1 = cat.scaled_form("-exp(-x^2)", v0, a)
        spec2 = cat.scaled_form("-exp(-x^2)", v0,
                                Quantity(a.magnitude / math.sqrt(t), LENGTH))
        return spec1, m, spec2, Quantity(m.magnitude * t, MASS), 1
    if family is cat.Family.TRUNC_INV_SQUARE:
        m = Quantity(log_u(1e-28, 1e-26), MASS)
        rho0 = rng.uniform(2.0, 3.5)
        alpha = Quantity(rho0 ** 2 * HBAR ** 2 / (2 * m.magnitude),
                         cat.INV_SQUARE_STRENGTH)
        eps = Quantity(log_u(1e-10, 5e-10), LENGTH)
        spec1 = cat.trunc_inv_square(alpha, eps)
        spec2 = cat.trunc_inv_square(Quantity(alpha.magnitude * t, alpha.dim),
                                     Quantity(eps.magnitude * math.sqrt(t), LENGTH))
        return spec1, m, spec2, Quantity(m.magnitude / t, MASS), 1
    raise AssertionError(family)


def test_criterion_05_scaling_invariance():
    with _Gate(5, "20 random SI pairs x 4 families: same couplings, same E", 60.0):
        rng = np.random.default_rng(55)
        families = (cat.Family.HARMONIC, cat.Family.MORSE,
                    cat.Family.SCALED_FORM, cat.Family.TRUNC_INV_SQUARE)
        for family in families:
            for _ in range(20):
                spec1, m1, spec2, m2, count = _scaling_pair(rng, family)
                verdict = nd.equivalence_witness(spec1, spec2, m1, m2)
                assert verdict.equivalent, (family, verdict.max_rel_diff)
                p1 = nd.nondimensionalize(spec1, m1)
                p2 = nd.nondimensionalize(spec2, m2)
                s_1 = s1.bound_states(p1, count=count, h=2.5e-3, compute_residual=False)
                s_2 = s1.bound_states(p2, count=count, h=2.5e-3, compute_residual=False)
                assert len(s_1) == len(s_2) == count
                for a, b in zip(s_1, s_2):
                    assert abs(a.energy - b.energy) <= 1e-10
                    ea = p1.to_physical(a.energy).magnitude
                    eb = p2.to_physical(b.energy).magnitude
                    assert abs(ea - eb) <= 1e-8 * max(abs(ea), abs(eb))


def test_criterion_06_rule_a_b_consistency():
    with _Gate(6, "rule A and rule B give the same physical energies (1e-8)", 10.0):
        a = Quantity(2e-10, LENGTH)
        v0 = Quantity(40.0 * HBAR ** 2 / (M.magnitude * a.magnitude ** 2), ENERGY)
        spec = cat.scaled_form("-exp(-x^2)", v0, a)
        pa = nd.nondimensionalize(spec, M, nd.GivenLength("a"))
        pb = nd.nondimensionalize(spec, M, nd.DepthBased())
        sa = s1.bound_states(pa, count=3, compute_residual=False)
        sb = s1.bound_states(pb, count=3, compute_residual=False)
        assert len(sa) == len(sb) == 3
        for x, y in zip(sa, sb):
            ea = pa.to_physical(x.energy).magnitude
            eb = pb.to_physical(y.energy).magnitude
            assert abs(ea - eb) <= 1e-8 * max(abs(ea), abs(eb))


def test_criterion_07_atomic_units():
    with _Gate(7, "a0 exponents exact; Hartree = kappa/a0 to 1e-10", 5.0):
        sol = solve_scale([REG.hbar, REG.m_e, REG.kappa], LENGTH)
        assert sol.exponents == (Fraction(2), Fraction(-1), Fraction(-1))
        a0 = sol.quantity
        hartree = energy_unit(REG.m_e, a0)
        coulombic = (REG.kappa / a0).magnitude
        assert abs(hartree.magnitude - coulombic) <= 1e-10 * coulombic


def test_criterion_08_hydrogen_radial():
    with _Gate(8, "radial hydrogen E_n = -m/(2n^2), m in {1, 0.9994557} (1e-7)", 20.0):
        for mtilde in (1.0, 0.9994557):
            states = s1.radial_hydrogen(mtilde, l=0, count=3)
            assert len(states) == 3
            for st in states:
                n = st.index + 1
                assert abs(st.energy - (-mtilde / (2 * n * n))) <= 1e-7


def test_criterion_09_perturbation_exactness():
    with _Gate(9, "rs == hypervirial rationals through order 8, n = 0,1,2", 30.0):
        for n in (0, 1, 2):
            rs = pt.rs_series(n, 8, {4: 1})
            hv = pt.hypervirial_series(n, 8)
            assert rs.coefficients == hv.coefficients
            assert rs.coefficient(0) == Fraction(2 * n + 1, 2)
        assert pt.rs_series(0, 1, {4: 1}).coefficient(1) == Fraction(3, 4)


def test_criterion_10_strong_coupling():
    with _Gate(10, "E(1e4)/1e4^(1/3) vs matrix quartic (1e-3); two scalings", 60.0):
        lam = 1e4
        ratio = pt.solve_quartic_level(lam, 0) / lam ** (1.0 / 3.0)
        reference = pt.pure_quartic_reference(0)
        assert abs(ratio - reference) <= 1e-3 * reference

        k2 = Quantity(480.0, cat.FORCE_CONSTANT)
        k4 = Quantity(math.sqrt(M.magnitude * k2.magnitude ** 3) / HBAR,
                      cat.QUARTIC_CONSTANT)
        spec = cat.poly_anharmonic(k2, k4)
        ph = nd.nondimensionalize(spec, M, nd.HarmonicBalance())
        pq = nd.nondimensionalize(spec, M, nd.QuarticBased())
        assert ph.couplings["lambda"] == pytest.approx(1.0, rel=1e-12)
        eh = ph.to_physical(s1.bound_states(ph, count=1, compute_residual=False)[0].energy)
        eq = pq.to_physical(s1.bound_states(pq, count=1, compute_residual=False)[0].energy)
        assert abs(eh.magnitude - eq.magnitude) <= 1e-8 * abs(eh.magnitude)


def test_criterion_11_lint():
    with _Gate(11, "bad Ahmed declaration flagged; catalog lints clean", 5.0):
        cfg = cat.parse_config("""family = ahmed_bic
assume.1 = 2*m/hbar^2 == 1
param.V0 = 50
param.a = 1
""")
        diags = cat.lint_config(cfg, REG)
        assert any("bare number" in d.message and "2*m/hbar^2" in d.subexpr
                   for d in diags)
        assert any(d.subexpr == "V0" for d in diags)

        clean_specs = [
            cat.box(Quantity(1e-9, LENGTH)),
            cat.harmonic(Quantity(480.0, cat.FORCE_CONSTANT)),
            cat.scaled_form("-exp(-x^2)", Quantity(3e-19, ENERGY),
                            Quantity(2e-10, LENGTH)),
            cat.rect_barrier(Quantity(3e-19, ENERGY), Quantity(2e-10, LENGTH)),
            cat.morse(Quantity(7e-19, ENERGY), Quantity(1.9e10, INV_LENGTH)),
            cat.ahmed_bic(Quantity(3e-19, ENERGY), Quantity(2e-10, LENGTH)),
            cat.trunc_inv_square(Quantity(3e-41, cat.INV_SQUARE_STRENGTH),
                                 Quantity(2e-10, LENGTH)),
            cat.poly_anharmonic(Quantity(480.0, cat.FORCE_CONSTANT),
                                Quantity(5e22, cat.QUARTIC_CONSTANT)),
        ]
        for spec in clean_specs:
            assert dimlint.lint(spec.expr, spec.param_dims()) == []


def test_criterion_12_sweep_determinism(tmp_path):
    with _Gate(12, "sweep CSV byte-identical across 1 vs 8 threads", 30.0):
        a_mag = math.sqrt(M.magnitude * 7.2e-19 / (HBAR ** 2 * 8.0))
        cfg = tmp_path / "morse.cfg"
        cfg.write_text(f"""family = morse
param.D = 7.2e-19 dim=M1 L2 T-2
param.a = {a_mag!r} dim=L-1
mass = {M.magnitude!r}
""")
        args = ["sweep", str(cfg), "--from", "4", "--to", "12.5", "--steps", "3",
                "--count", "2", "--no-residual"]
        one = tmp_path / "t1.csv"
        eight = tmp_path / "t8.csv"
        assert cli.main(args + ["--threads", "1", "--out", str(one)]) == 0
        assert cli.main(args + ["--threads", "8", "--out", str(eight)]) == 0
        assert one.read_bytes() == eight.read_bytes()
        assert len(one.read_text().strip().splitlines()) == 7

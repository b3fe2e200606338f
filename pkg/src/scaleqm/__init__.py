"""scaleqm: units-aware nondimensionalization for 1D quantum problems.

Derive length/energy/time units and dimensionless couplings from a
dimensional Hamiltonian, solve the resulting dimensionless eigenvalue and
scattering problems, and expand polynomial perturbations in exact rationals.
"""

from .dimensions import (ANGULAR_FREQUENCY, CHARGE, DIMENSIONLESS, ENERGY,
                         LENGTH, MASS, TIME, ConstantRegistry, Dimension,
                         DimensionError, Quantity, ScaleSolution, combine,
                         default_registry, energy_unit, solve_scale, time_unit)
from .expr import (EvalError, ParseError, SmoothnessError, TaylorCoeffs,
                   evaluate, parse, print_expr, substitute, taylor)
from .dimlint import Diagnostic, UnknownSymbolError, infer_dimension, lint, lint_assumption
from .catalog import (BoundaryCondition, Domain, Family, PotentialSpec, RawConfig,
                      ahmed_bic, box, build_spec, custom, harmonic, lint_config,
                      load_config, morse, parse_config, poly_anharmonic,
                      rect_barrier, scaled_form, trunc_inv_square, write_config)
from .nondim import (AtomicDescriptor, CoulombBased, DepthBased, EquivalenceVerdict,
                     Explicit, GivenLength, HarmonicBalance, NondimError,
                     QuarticBased, ScaledProblem, ScalingRule, ZScaledAtom,
                     atomic_units, bohr_radius, both_rules, couplings_of, equivalence_witness,
                     hydrogen_effective_mass, nondimensionalize, render_report,
                     z_scaled_atom)
from .solver1d import (BoundState, GridSpec, SolverError, Spectrum, auto_grid,
                       bound_states, exact_reference, morse_state_count,
                       radial_hydrogen, to_physical)
from .scattering import (ScatteringError, TransmissionResult, transmission_closed,
                         transmission_numeric)
from .perturbation import (OrderError, RationalSeries, StrongCouplingProbe,
                           atomic_series_template, emit_series_report,
                           hypervirial_series, pure_quartic_reference,
                           quartic_problem, rs_series, solve_quartic_level,
                           strong_coupling_probe, weak_coupling_eval)

__version__ = "0.1.0"

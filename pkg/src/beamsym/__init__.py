"""Lie point symmetries, equivalence transformations and iso-spectral
families of Euler-Bernoulli beams (f u_xx)_xx + m u_tt = 0."""

__version__ = "0.1.0"

from .beam import BeamProfile, GFunction, load_beam_spec, dump_beam_spec, read_beam_file, pde_residual
from .equivalence import (CanonicalEquation, EulerMode, LinearBeamMode, PointTransform, UniformMode,
                          build_transform, pullback_solution, push_point, pushforward_generator)
from .expr import ParseError, parse_expr, unparse
from .gottlieb import (GottliebParams, exponent_roots, g_from_solutions, make_gottlieb, schwarzian,
                       solve_normal_ode)
from .jet import DomainError, Jet
from .reduction import reduce_stage1, reduce_stage2, reduce_stage3
from .spectral import assemble, isospectral_check, solve_spectrum, uniform_frequencies
from .symmetry import (SymmetryClass, SymmetryGenerator, SymmetryLabel, classify, generator_at,
                       h_functions, lie_bracket, residual_class1, residual_class2, residual_class3)

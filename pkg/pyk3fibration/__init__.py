"""
pyk3fibration: exact checks for elliptic K3 surfaces with non-symplectic automorphisms

Analyzes Weierstrass models y^2 = x^3 + a(t) x + b(t) over Q(t), classifies
their singular fibers, verifies monomial automorphisms against Euler number
and trace identities, computes discriminant groups of lattices and
Mordell-Weil heights, and re-derives the fiber enumerations behind the
classification of orders acting trivially on the Néron-Severi lattice.
All arithmetic is exact.
"""

import importlib.metadata

try:
    __version__ = importlib.metadata.version("pyk3fibration")
except importlib.metadata.PackageNotFoundError:
    # Package is not installed, fallback to a default version
    __version__ = "0.0.0.dev"

from .autom import (
    MonomialAutomorphism,
    WeightedAutomorphism,
    WeightedHypersurface,
    check_weierstrass_invariance,
    check_weighted_invariance,
    chi_fixed_trace,
    euler_orbit_identity,
    omega_multiplier,
    orbit_structure,
    orders,
    solve_automorphisms,
)
from .catalog import entries, get_entry, normal_form_relations, verify_all, verify_entry
from .classify import (
    candidate_ns_lattices,
    enumerate_stable_pairs,
    orbit_count_solutions,
    trivial_action_rank_check,
)
from .cyclotomic import (
    cyclotomic_poly,
    fixed_discriminant_dimension,
    mobius,
    phi_euler,
    ramanujan_sum,
    trace_power,
)
from .exact_arith import QPoly, gcd, parse_poly, reverse_at_infinity, squarefree_decomposition
from .fibration import (
    EulerSumError,
    FiberConfiguration,
    Place,
    RationalEllipticSurfaceError,
    WeierstrassModel,
    analyze,
    base_transform,
    discriminant,
    minimalize,
    reconstruct_monomial_model,
    scale_relating,
    trivial_lattice,
    twist_equivalent,
)
from .kodaira import FiberType, classify_valuations, euler_number
from .lattice import IntLattice, direct_sum, discriminant_group, named_lattice, signature
from .mw import HeightContext, SectionData, height, mw_determinant, shioda_tate
from .utils import get_settings

__all__ = [
    "QPoly",
    "parse_poly",
    "gcd",
    "squarefree_decomposition",
    "reverse_at_infinity",
    "IntLattice",
    "named_lattice",
    "direct_sum",
    "signature",
    "discriminant_group",
    "cyclotomic_poly",
    "phi_euler",
    "mobius",
    "ramanujan_sum",
    "trace_power",
    "fixed_discriminant_dimension",
    "FiberType",
    "classify_valuations",
    "euler_number",
    "WeierstrassModel",
    "Place",
    "FiberConfiguration",
    "RationalEllipticSurfaceError",
    "EulerSumError",
    "discriminant",
    "minimalize",
    "analyze",
    "trivial_lattice",
    "twist_equivalent",
    "base_transform",
    "scale_relating",
    "reconstruct_monomial_model",
    "MonomialAutomorphism",
    "WeightedHypersurface",
    "WeightedAutomorphism",
    "check_weierstrass_invariance",
    "check_weighted_invariance",
    "omega_multiplier",
    "orders",
    "orbit_structure",
    "euler_orbit_identity",
    "chi_fixed_trace",
    "solve_automorphisms",
    "HeightContext",
    "SectionData",
    "height",
    "shioda_tate",
    "mw_determinant",
    "enumerate_stable_pairs",
    "orbit_count_solutions",
    "candidate_ns_lattices",
    "trivial_action_rank_check",
    "entries",
    "get_entry",
    "verify_entry",
    "verify_all",
    "normal_form_relations",
    "get_settings",
]

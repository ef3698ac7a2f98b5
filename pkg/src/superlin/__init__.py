"""Exact symbolic tools for super-linearizing polynomial ODE systems."""
from .automorphism import (
    AffineGen,
    ElementaryGen,
    StablyTameWitness,
    TameAutomorphism,
    compose,
    make_affine,
    make_elementary,
    make_stably_tame,
    pushforward,
)
from .linearizer import (
    Budget,
    Diverging,
    Lift,
    Stabilized,
    check_lift_symbolic,
    divergence_profile,
    scalar_closure,
    vector_closure_sequence,
)
from .numerics import integrate, verify_lift_numeric
from .parsing import ParseError, parse_automorphism, parse_expr, parse_system, render_system
from .poly import PolyMap, Polynomial, VectorField, jacobian, lie_derivative_field, lie_derivative_scalar
from .transport import (
    ProjectionWitness,
    appendix_a_identity,
    conjugate_lift,
    elementary_transport,
    extend_lift,
    project_lift,
    stably_tame_transport,
    tame_transport,
    translate_lift,
)
from .wdg import build_graph, check_prop1_item2, check_wdg, enumerate_simple_cycles, wdg_stabilize

__version__ = "0.1.0"

"""Knot diagrams and invariants of core curves, the extension criterion for linear torus maps and
the path component verdict for 2-convex tori."""

from .gauss import (Crossing, GaussCode, parse_gauss_code, gauss_code, gauss_code_along, add_kink,
                    add_bigon, simplify)
from .invariants import (KnotInvariants, KNOT_TABLE, knot_determinant, alexander_coefficients,
                         alexander_polynomial, count_fox_colorings, code_invariants, identify)
from .torus import TorusMatrix, TorusExtension, degree_p2, torus_matrix_extends, model_extension
from .verdict import (KnotVerdict, ComponentVerdict, EQUAL, DISTINCT, UNKNOWN, SAME, core_curve,
                      mesh_core_curve, knot_invariants, same_knot_class, path_component_verdict)

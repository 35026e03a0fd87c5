"Contains unit tests for knot diagrams, knot invariants, torus maps and knot verdicts"
import unittest
from itertools import product

import numpy as np
import sympy

from marblekit.error import InputError
from marblekit.geometry.curves import figure_eight_curve, mirror_curve, segment_curve, torus_knot_curve
from marblekit.geometry.profiles import sphere_profile
from marblekit.geometry.tubes import TubeSurface, round_torus
from marblekit.knots.gauss import add_bigon, add_kink, gauss_code, parse_gauss_code, simplify
from marblekit.knots.invariants import (T, KnotInvariants, alexander_coefficients,
                                        alexander_polynomial, code_invariants, count_fox_colorings,
                                        identify, knot_determinant)
from marblekit.knots.torus import (TorusMatrix, degree_p2, model_extension,
                                   torus_matrix_extends)
from marblekit.knots.verdict import (DISTINCT, EQUAL, SAME, UNKNOWN, knot_invariants,
                                     path_component_verdict, same_knot_class)

from .example_scenes import (FIGURE_EIGHT_CODE, GRANNY_CODE, MIRROR_TREFOIL_CODE,
                              SQUARE_CODE, TREFOIL_CODE)


class GaussCodeTests(unittest.TestCase):
    "Unit tests for reading and changing Gauss codes"

    def test_parse(self):
        "The trefoil has three right handed crossings"
        code = parse_gauss_code(TREFOIL_CODE)
        self.assertEqual(code.crossing_count, 3)
        self.assertEqual(code.writhe, 3)
        self.assertTrue(code.is_realizable())
        self.assertEqual(str(code), TREFOIL_CODE)

    def test_bad_token(self):
        with self.assertRaises(InputError):
            parse_gauss_code("O1+ X2+")

    def test_single_passage(self):
        "Every crossing is passed twice"
        with self.assertRaises(InputError):
            parse_gauss_code("O1+ U2+ O2+")

    def test_two_over_passages(self):
        with self.assertRaises(InputError):
            parse_gauss_code("O1+ O1+")

    def test_inconsistent_signs(self):
        with self.assertRaises(InputError):
            parse_gauss_code("O1+ U1-")

    def test_simplify(self):
        "Curls and bigons are removed again"
        code = parse_gauss_code(TREFOIL_CODE)
        self.assertEqual(simplify(add_kink(code, 2, -1)), code)
        self.assertEqual(simplify(add_bigon(code, 0, 3)), code)

    def test_bigon_needs_two_strands(self):
        with self.assertRaises(InputError):
            add_bigon(parse_gauss_code(TREFOIL_CODE), 2, 2)


class InvariantTests(unittest.TestCase):
    "Unit tests for the determinant, the Alexander polynomial and Fox colorings"

    def test_trefoil(self):
        "The trefoil has determinant 3 and Alexander polynomial t - 1 + 1/t"
        code = parse_gauss_code(TREFOIL_CODE)
        self.assertEqual(knot_determinant(code), 3)
        self.assertEqual(alexander_coefficients(code), (1, -1, 1))
        self.assertEqual(sympy.simplify(alexander_polynomial(code) - (T - 1 + 1 / T)), 0)
        self.assertEqual(identify(code_invariants(code)), ["3_1"])

    def test_mirror_trefoil(self):
        "Mirror images are not told apart"
        code = parse_gauss_code(MIRROR_TREFOIL_CODE)
        self.assertEqual(code_invariants(code), KnotInvariants(3, (1, -1, 1)))

    def test_figure_eight_determinant(self):
        self.assertEqual(knot_determinant(parse_gauss_code(FIGURE_EIGHT_CODE)), 5)

    def test_fox_colorings(self):
        "Nontrivial colorings exist for the primes dividing the determinant"
        trefoil = parse_gauss_code(TREFOIL_CODE)
        self.assertEqual(count_fox_colorings(trefoil, 3), 9)
        self.assertEqual(count_fox_colorings(trefoil, 5), 5)
        self.assertEqual(count_fox_colorings(parse_gauss_code(FIGURE_EIGHT_CODE), 5), 25)

    def test_unknot(self):
        "The empty diagram is the unknot"
        code = parse_gauss_code("")
        self.assertEqual(code_invariants(code), KnotInvariants(1, (1,)))
        self.assertEqual(count_fox_colorings(code, 7), 7)
        self.assertEqual(identify(code_invariants(code)), ["0_1"])

    def test_granny_and_square(self):
        "Granny and square knot share their invariants and are not in the prime table"
        granny = code_invariants(parse_gauss_code(GRANNY_CODE))
        square = code_invariants(parse_gauss_code(SQUARE_CODE))
        self.assertEqual(granny, KnotInvariants(9, (1, -2, 3, -2, 1)))
        self.assertEqual(granny, square)
        self.assertEqual(identify(granny), [])

    def test_reidemeister_moves(self):
        "Curls and bigons leave the invariants unchanged"
        code = parse_gauss_code(TREFOIL_CODE)
        expected = code_invariants(code)
        self.assertEqual(code_invariants(add_kink(code, 1, 1, False)), expected)
        self.assertEqual(code_invariants(add_bigon(code, 0, 3)), expected)

    def test_not_realizable(self):
        "Codes violating the evenness condition are virtual"
        with self.assertRaises(InputError):
            knot_determinant(parse_gauss_code("O1+ O2+ U1+ U2+"))


class ProjectionTests(unittest.TestCase):
    "Unit tests for the knot classes of space curves"

    def setUp(self):
        self.trefoil = torus_knot_curve(2, 3)

    def test_trefoil_curve(self):
        self.assertEqual(identify(knot_invariants(self.trefoil)), ["3_1"])

    def test_figure_eight_curve(self):
        self.assertEqual(identify(knot_invariants(figure_eight_curve())), ["4_1"])

    def test_seeds_agree(self):
        "The invariants do not depend on the projection"
        expected = knot_invariants(self.trefoil)
        for seed, direction in ((1, (1.0, 0.0, 0.0)), (2, (0.3, 0.4, 0.8))):
            self.assertEqual(knot_invariants(self.trefoil, direction, seed), expected)

    def test_open_curve(self):
        with self.assertRaises(InputError):
            gauss_code(segment_curve((0, 0, 0), (1, 0, 0)))

    def test_distinct_knots(self):
        verdict = same_knot_class(self.trefoil, figure_eight_curve())
        self.assertEqual(verdict.verdict, DISTINCT)
        self.assertIn("differing", verdict.evidence)

    def test_equal_knots(self):
        "A trefoil equals its mirror image as far as the invariants see"
        self.assertEqual(same_knot_class(self.trefoil, mirror_curve(self.trefoil)).verdict, EQUAL)

    def test_knot_outside_the_table(self):
        "Knots without a table entry are undecided even against themselves"
        curve = torus_knot_curve(2, 9, count=512)
        self.assertEqual(same_knot_class(curve, curve).verdict, UNKNOWN)


class TorusMapTests(unittest.TestCase):
    "Unit tests for linear maps of the torus"

    def test_degree(self):
        "The meridian degree is the lower left entry"
        self.assertEqual(degree_p2(TorusMatrix(1, 0, 0, 1)), 0)
        self.assertEqual(degree_p2(TorusMatrix(1, 0, 3, 1)), 3)
        self.assertEqual(degree_p2(TorusMatrix(2, 1, -1, 0)), -1)

    def test_extends(self):
        "A map extends over the solid torus exactly if c vanishes"
        self.assertEqual(torus_matrix_extends(TorusMatrix(1, 5, 0, -1)).model, (1, 5, -1))
        self.assertFalse(torus_matrix_extends(TorusMatrix(0, 1, 1, 0)).extends)

    def test_sweep(self):
        "Every invertible matrix with small entries extends exactly if its meridian degree vanishes"
        entries = range(-3, 4)
        checked = 0
        for a, b, c, d in product(entries, repeat=4):
            matrix = TorusMatrix(a, b, c, d)
            if abs(matrix.determinant) != 1:
                continue
            self.assertEqual(torus_matrix_extends(matrix).extends, degree_p2(matrix) == 0)
            checked += 1
        self.assertGreater(checked, 100)

    def test_not_invertible(self):
        with self.assertRaises(InputError):
            degree_p2(TorusMatrix(2, 0, 0, 1))

    def test_model_extension(self):
        "The model map restricts to the torus map on the boundary"
        matrix = TorusMatrix(1, 2, 0, 1)
        extended = model_extension(torus_matrix_extends(matrix))
        x, y = np.array([0.1, 0.7]), np.array([0.25, 0.5])
        first, second = extended(np.ones(2), x, y)
        expected = matrix.torus_map(x, y)
        np.testing.assert_allclose(first, expected[0])
        np.testing.assert_allclose(second, expected[1])
        center, _ = extended(np.zeros(2), x, y)
        np.testing.assert_allclose(center, [0.0, 0.0])

    def test_model_of_a_map_that_does_not_extend(self):
        with self.assertRaises(InputError):
            model_extension(torus_matrix_extends(TorusMatrix(0, 1, 1, 0)))


class ComponentVerdictTests(unittest.TestCase):
    "Unit tests for the path component verdict of two tori"

    def test_unknotted_tori(self):
        "Two round tori are isotopic"
        verdict = path_component_verdict(round_torus(2.0, 0.5), round_torus(3.0, 0.5))
        self.assertEqual(verdict.verdict, SAME)
        self.assertEqual(verdict.knot.verdict, EQUAL)

    def test_higher_dimension(self):
        "From n = 3 on all tori are isotopic"
        verdict = path_component_verdict(round_torus(2.0, 0.5), round_torus(3.0, 0.5), n=3)
        self.assertEqual(verdict.verdict, SAME)
        self.assertIsNone(verdict.knot)

    def test_knotted_torus(self):
        "A knotted torus is not isotopic to a round one"
        knotted = TubeSurface(torus_knot_curve(2, 3), 0.1)
        verdict = path_component_verdict(knotted, round_torus(2.0, 0.5))
        self.assertEqual(verdict.verdict, DISTINCT)

    def test_sphere_is_no_torus(self):
        "Tori have Euler characteristic 0"
        with self.assertRaises(InputError):
            path_component_verdict(sphere_profile(1.0), round_torus(2.0, 0.5))

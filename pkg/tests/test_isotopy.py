"Contains unit tests for discrete isotopies, their certification and their building blocks"
import unittest

import numpy as np

from marblekit.cli.pipeline import isotopy_frame_tol, string_radius
from marblekit.configuration import DEFAULT_CONFIG, Tolerances
from marblekit.error import InputError, ReroutingError
from marblekit.flow.classify import CappedTube, TubularLoop, classify_component
from marblekit.flow.run import run_flow_with_surgery
from marblekit.geometry.curves import arc_curve, curve_from_points, segment_curve, torus_knot_curve
from marblekit.geometry.profiles import sphere_profile
from marblekit.geometry.tubes import round_torus
from marblekit.geometry.vectors import normalize
from marblekit.glue.caps import capped_cylinder_profile, capped_tube
from marblekit.glue.complex import Marble
from marblekit.glue.gluing import glue_marbles
from marblekit.glue.junction import dumbbell_profile
from marblekit.glue.marbles import classify_marble_graph
from marblekit.isotopy.assembly import assemble_backwards, build_piece_isotopies, reroute_around_ball
from marblekit.isotopy.certify import certify_isotopy
from marblekit.isotopy.circuits import circuit_to_thin_torus, thin_torus_isotopy
from marblekit.isotopy.path import (MONOTONE, TRIVIAL, UNCLAIMED, Claim, Frame, IsotopyPath,
                                    constant_path, frame_spacing, sample_family, smoothstep)
from marblekit.isotopy.pieces import convex_to_marble, loop_to_marble_circuit, tube_to_marble_tree
from marblekit.knots.verdict import knot_invariants

from .example_scenes import DUMBBELL

#: Frame tolerance of the tube and loop isotopies, well below their lengths
TREE_FRAME_TOL = 0.25


class PathTests(unittest.TestCase):
    "Unit tests for the isotopy container"

    def setUp(self):
        self.sphere = sphere_profile(1.0)

    def test_empty_path(self):
        "Paths have at least one frame"
        with self.assertRaises(InputError):
            IsotopyPath([])

    def test_unknown_claim(self):
        with self.assertRaises(InputError):
            IsotopyPath([Frame(0.0, (self.sphere,))], Claim("sideways"))

    def test_concatenate(self):
        "Joined paths share their middle frame and the weaker claim"
        first = constant_path(self.sphere, frames=3)
        second = IsotopyPath([Frame(0.0, (self.sphere,)), Frame(1.0, (self.sphere,))])
        joined = first.concatenate(second)
        self.assertEqual(len(joined), 4)
        self.assertEqual(joined.claim.kind, MONOTONE)
        self.assertEqual(joined.frames[0].t, 0.0)
        self.assertEqual(joined.frames[-1].t, 1.0)
        self.assertEqual([segment.start for segment in joined.segments], [0, 2])

    def test_trivial_claims_join(self):
        joined = constant_path(self.sphere).concatenate(constant_path(self.sphere))
        self.assertEqual(joined.claim.kind, TRIVIAL)

    def test_unclaimed_wins(self):
        unclaimed = IsotopyPath([Frame(0.0, (self.sphere,))], Claim(UNCLAIMED))
        self.assertEqual(constant_path(self.sphere).concatenate(unclaimed).claim.kind, UNCLAIMED)

    def test_reversed_drops_monotonicity(self):
        "Running a monotone path backwards claims nothing"
        path = IsotopyPath([Frame(0.0, (self.sphere,)), Frame(1.0, (sphere_profile(0.5),))])
        backwards = path.reversed()
        self.assertEqual(backwards.claim.kind, UNCLAIMED)
        self.assertIs(backwards.first[0], path.last[0])
        self.assertEqual(constant_path(self.sphere).reversed().claim.kind, TRIVIAL)

    def test_records(self):
        "The claim comes first, then segments and frames"
        records = constant_path(self.sphere, frames=3).to_records(["a.off", "b.off", "c.off"])
        self.assertEqual(records[0]["type"], "claim")
        self.assertEqual(records[1]["type"], "segment")
        self.assertEqual([record["file"] for record in records[2:]], ["a.off", "b.off", "c.off"])

    def test_smoothstep(self):
        self.assertEqual(smoothstep(-1.0), 0.0)
        self.assertEqual(smoothstep(0.5), 0.5)
        self.assertEqual(smoothstep(2.0), 1.0)

    def test_refinement(self):
        "Frames farther apart than frame_tol are bisected"
        frames = sample_family(lambda t: sphere_profile(1.0 + t), 2, frame_tol=0.1)
        self.assertGreater(len(frames), 2)
        times = [frame.t for frame in frames]
        self.assertEqual(times, sorted(times))

    def test_frame_spacing(self):
        "Frames are sampled ten times finer than frame_tol, and never coarser than the features allow"
        self.assertAlmostEqual(frame_spacing([self.sphere], 0.005), 0.05, delta=1e-12)
        self.assertAlmostEqual(frame_spacing([self.sphere], 1.0), self.sphere.feature_scale() / 8,
                               delta=1e-12)

    def test_no_refinement(self):
        self.assertEqual(len(sample_family(lambda t: sphere_profile(1.0 + t), 5)), 5)


class CertificationTests(unittest.TestCase):
    "Unit tests for certifying isotopies"

    def test_constant_path(self):
        "A path that does not move is certified"
        report = certify_isotopy(constant_path(sphere_profile(1.0), frames=3),
                                 Tolerances(frame_tol=0.05))
        self.assertTrue(report.passed)
        self.assertEqual({detail.name for detail in report.details},
                         {"frame[0]", "frame[1]", "frame[2]", "step[1]", "step[2]"})

    def test_growing_sphere_is_not_monotone(self):
        "A growing sphere leaves its predecessor"
        path = IsotopyPath([Frame(0.0, (sphere_profile(1.0),)), Frame(1.0, (sphere_profile(1.02),))])
        report = certify_isotopy(path, Tolerances(frame_tol=0.1))
        self.assertIn("step[1]", [detail.name for detail in report.failed_details()])

    def test_bad_frame(self):
        "A frame that is not two-convex fails certification at that frame"
        path = IsotopyPath([Frame(0.0, (round_torus(2.0, 0.5),)), Frame(0.5, (round_torus(2.5, 1.3),)),
                            Frame(1.0, (round_torus(2.0, 0.5),))], Claim(UNCLAIMED))
        report = certify_isotopy(path, Tolerances(frame_tol=5.0))
        self.assertFalse(report.passed)
        failed = [detail.name for detail in report.failed_details()]
        self.assertIn("frame[1]", failed)
        self.assertNotIn("frame[0]", failed)


class PieceTests(unittest.TestCase):
    "Unit tests for the isotopies of discarded components"

    def test_convex_to_marble(self):
        "A ball shrinks monotonically onto a concentric marble"
        path = convex_to_marble(sphere_profile(1.0), 0.5, frames=8)
        self.assertEqual(path.claim.kind, MONOTONE)
        self.assertEqual(len(path.result), 1)
        self.assertAlmostEqual(path.result[0].radius, 0.5)
        np.testing.assert_allclose(path.result[0].center, [0.0, 0.0, 0.0], atol=1e-6)
        self.assertTrue(certify_isotopy(path, Tolerances(frame_tol=0.2)).passed)

    def test_marble_too_large(self):
        "The marble has to lie inside the component"
        with self.assertRaises(InputError):
            convex_to_marble(sphere_profile(1.0), 2.0, frames=4)

    def test_marble_off_axis(self):
        with self.assertRaises(InputError):
            convex_to_marble(sphere_profile(1.0), 0.2, center=(0.0, 0.5, 0.0), frames=4)

    def test_short_tube(self):
        "A capped tube shorter than the neck spacing becomes a single marble"
        surface = capped_cylinder_profile(0.05, 2.0)
        classification = classify_component(surface)
        self.assertIsInstance(classification, CappedTube)
        path = tube_to_marble_tree(surface, classification, frames=4)
        self.assertIn("no-neck-points", path.flags)
        self.assertEqual(len(path.result[0].marbles), 1)


class AssemblyTests(unittest.TestCase):
    "Unit tests for rerouting strings around exceptional balls"

    def test_detour(self):
        "A string through the ball is moved onto the enlarged sphere"
        curve = segment_curve((-3.0, 0.3, 0.0), (3.0, 0.3, 0.0))
        rerouted = reroute_around_ball(curve, (0.0, 0.0, 0.0), 1.0)
        distances = np.linalg.norm(rerouted.samples, axis=1)
        self.assertGreater(float(distances.min()), 1.1)
        np.testing.assert_allclose(rerouted.samples[0], [-3.0, 0.3, 0.0], atol=1e-6)

    def test_string_outside(self):
        "Strings that miss the ball stay as they are"
        curve = segment_curve((-3.0, 2.0, 0.0), (3.0, 2.0, 0.0))
        self.assertIs(reroute_around_ball(curve, (0.0, 0.0, 0.0), 1.0), curve)

    def test_end_inside(self):
        "A string ending in the ball cannot be rerouted"
        curve = segment_curve((0.0, 0.0, 0.0), (3.0, 0.0, 0.0))
        with self.assertRaises(ReroutingError):
            reroute_around_ball(curve, (0.0, 0.0, 0.0), 1.0)


class CircuitTests(unittest.TestCase):
    "Unit tests for circuits and thin tori"

    def test_tree_is_no_circuit(self):
        "Marble trees have no thin torus"
        marbles = [Marble(np.zeros(3), 1.0), Marble(np.array([12.0, 0.0, 0.0]), 1.0)]
        tree = glue_marbles(marbles, [segment_curve((1.0, 0.0, 0.0), (11.0, 0.0, 0.0))], 0.05)
        with self.assertRaises(InputError):
            circuit_to_thin_torus(tree, 0.01)

    def test_thin_torus_homotopy(self):
        "Two coaxial tori are joined by a straight line homotopy"
        first, second = round_torus(2.0, 0.5), round_torus(2.2, 0.4)
        path = thin_torus_isotopy(first, second, frames=4)
        self.assertIs(path.first[0], first)
        self.assertIs(path.last[0], second)
        self.assertEqual(path.claim.kind, UNCLAIMED)
        self.assertIs(path.core, second.skeleton)

    def test_open_tube_is_no_torus(self):
        tube = capped_tube(segment_curve((0.0, 0.0, 0.0), (2.0, 0.0, 0.0)), 0.02, b=0.3)
        with self.assertRaises(InputError):
            thin_torus_isotopy(tube, round_torus(2.0, 0.5), frames=4)


def triangle_circuit(spread: float = 10.0, radius: float = 1.0, string_radius: float = 0.05):
    "Three marbles at the corners of a triangle, joined by straight strings"
    angles = 2 * np.pi * np.arange(3) / 3
    centers = spread * np.column_stack([np.cos(angles), np.sin(angles), np.zeros(3)])
    marbles = [Marble(center, radius) for center in centers]
    curves = []
    for index in range(3):
        start, end = centers[index], centers[(index + 1) % 3]
        direction = normalize(end - start)
        curves.append(segment_curve(start + radius * direction, end - radius * direction))
    return glue_marbles(marbles, curves, string_radius)


def trefoil_circuit(count: int = 6, radius: float = 0.3, string_radius: float = 0.05):
    "Marbles strung along a trefoil, with strings following the knot between them"
    knot = torus_knot_curve(2, 3, 4.0, 1.5, count=512)
    length = knot.total_length
    stops = (np.arange(count) + 0.5) * length / count
    centers = [knot.point_at(stop) for stop in stops]
    curves = []
    for index in range(count):
        first, last = centers[index], centers[(index + 1) % count]
        points = knot.point_at(np.linspace(stops[index], stops[index] + length / count, 256))
        outside = ((np.linalg.norm(points - first, axis=1) > 1.05 * radius)
                   & (np.linalg.norm(points - last, axis=1) > 1.05 * radius))
        inner = points[outside]
        start = first + radius * normalize(inner[0] - first)
        end = last + radius * normalize(inner[-1] - last)
        curves.append(curve_from_points(np.vstack([start, inner, end]), False))
    return glue_marbles([Marble(center, radius) for center in centers], curves, string_radius,
                        tol=1e-4)


class TreeTests(unittest.TestCase):
    "Capped tubes long enough to have neck points become certified marble trees"

    def check_tree(self, tube):
        classification = classify_component(tube)
        self.assertIsInstance(classification, CappedTube)
        self.assertEqual(len(classification.neck_points), 1)
        path = tube_to_marble_tree(tube, classification, frames=8, frame_tol=TREE_FRAME_TOL)
        tree = path.result[0]
        self.assertEqual(len(tree.marbles), 2)
        self.assertEqual(classify_marble_graph(tree).kind, "tree")
        self.assertEqual(path.claim.kind, MONOTONE)
        report = certify_isotopy(path, Tolerances(frame_tol=TREE_FRAME_TOL), workers=4)
        self.assertTrue(report.passed, [detail.name for detail in report.failed_details()][:3])

    def test_straight_tube(self):
        self.check_tree(capped_tube(segment_curve((0.0, 0.0, 0.0), (12.0, 0.0, 0.0)), 0.1,
                                    side="both", b=2.0))

    def test_bent_tube(self):
        "A quarter circle of radius 8"
        self.check_tree(capped_tube(arc_curve(8.0, np.pi / 2), 0.1, side="both", b=2.0))


class LoopTests(unittest.TestCase):
    "Thin tori with neck points become certified marble circuits"

    def test_loop_to_circuit(self):
        torus = round_torus(20.0, 0.1)
        classification = classify_component(torus)
        self.assertIsInstance(classification, TubularLoop)
        self.assertGreaterEqual(len(classification.neck_points), 2)
        path = loop_to_marble_circuit(torus, classification, frames=8, frame_tol=TREE_FRAME_TOL)
        circuit = path.result[0]
        self.assertEqual(len(circuit.marbles), len(classification.neck_points))
        self.assertEqual(classify_marble_graph(circuit).kind, "circuit")
        self.assertEqual(circuit.euler_characteristic(), 0)
        report = certify_isotopy(path, Tolerances(frame_tol=TREE_FRAME_TOL), workers=4)
        self.assertTrue(report.passed, [detail.name for detail in report.failed_details()][:3])

    def test_triangle_to_thin_torus(self):
        "Three marbles in a triangle become an unknotted thin torus"
        circuit = triangle_circuit()
        self.assertEqual(classify_marble_graph(circuit).kind, "circuit")
        self.assertEqual(circuit.euler_characteristic(), 0)
        path = circuit_to_thin_torus(circuit, 0.05, frames=8)
        torus = path.last[0]
        self.assertTrue(torus.closed)
        self.assertEqual(torus.euler_characteristic(), 0)
        self.assertEqual(knot_invariants(path.core).determinant, 1)

    def test_trefoil_to_thin_torus(self):
        "Marbles strung along a trefoil become a knotted thin torus"
        path = circuit_to_thin_torus(trefoil_circuit(), 0.05, frames=4)
        invariants = knot_invariants(path.core)
        self.assertEqual(invariants.determinant, 3)
        self.assertEqual(tuple(invariants.alexander), (1, -1, 1))


class DumbbellTests(unittest.TestCase):
    "The dumbbell from its flow with surgery back to a certified marble tree"

    @classmethod
    def setUpClass(cls):
        cls.log = run_flow_with_surgery(dumbbell_profile(**DUMBBELL))
        cls.frame_tol = isotopy_frame_tol(cls.log, DEFAULT_CONFIG)
        r_s = string_radius(cls.log, DEFAULT_CONFIG)
        pieces = build_piece_isotopies(cls.log, frames=8, workers=4, frame_tol=cls.frame_tol)
        cls.path = assemble_backwards(cls.log, pieces, r_s, frames=8, frame_tol=cls.frame_tol)

    def test_events(self):
        "One certified surgery at the waist, then both bulbs are discarded"
        self.assertEqual(len(self.log.surgeries), 1)
        self.assertTrue(self.log.surgeries[0].certified)
        self.assertEqual(len(self.log.discards), 2)

    def test_marble_tree(self):
        "Two marbles joined by one string"
        self.assertEqual(len(self.path.result), 1)
        tree = self.path.result[0]
        self.assertEqual(len(tree.marbles), 2)
        self.assertEqual(len(tree.strings), 1)
        self.assertEqual(classify_marble_graph(tree).kind, "tree")

    def test_certified(self):
        self.assertEqual(self.path.claim.kind, MONOTONE)
        report = certify_isotopy(self.path, Tolerances(frame_tol=self.frame_tol), workers=4)
        self.assertTrue(report.passed, [detail.name for detail in report.failed_details()][:3])

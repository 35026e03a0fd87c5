"Contains unit tests for standard caps, junctions and marble graphs"
import unittest

import numpy as np
from scipy.sparse.csgraph import connected_components

from marblekit.configuration import ControlParams, Tolerances
from marblekit.error import ConfigurationError, EmbeddingError, InputError, ParameterError
from marblekit.geometry.curves import circle_curve, curve_from_points, segment_curve
from marblekit.geometry.meshing import mesh_from
from marblekit.geometry.vectors import normalize, rotation_about
from marblekit.glue.caps import capped_cylinder_profile, capped_tube, standard_cap, u_st
from marblekit.glue.complex import Marble
from marblekit.glue.gluing import as_marble, gap_radius, glue, tubular_neighborhood
from marblekit.glue.graph import Edge, MarbleGraph
from marblekit.glue.junction import dumbbell_profile, fillet_meridian, string_radius_family
from marblekit.glue.marbles import build_marble_graph, classify_marble_graph
from marblekit.verify.convexity import check_two_convex


class CapTests(unittest.TestCase):
    "Unit tests for the standard cap"

    def test_cap_profile_ends(self):
        "The cap profile starts at radius 1 and closes at xi = 1"
        self.assertAlmostEqual(float(u_st(0.0)), 1.0, delta=1e-12)
        self.assertAlmostEqual(float(u_st(1.0)), 0.0, delta=1e-12)
        self.assertAlmostEqual(float(u_st(-3.0)), 1.0, delta=1e-12)

    def test_cap_profile_decreases(self):
        "The cap profile does not increase"
        values = u_st(np.linspace(0.0, 1.0, 200))
        self.assertTrue(np.all(np.diff(values) <= 1e-12))

    def test_cap_profile_domain(self):
        "The cap profile ends at xi = 1"
        with self.assertRaises(ParameterError):
            u_st(1.5)

    def test_standard_cap(self):
        "The standard cap passes the control it reports"
        cap = standard_cap()
        self.assertTrue(cap.report.passed)
        self.assertAlmostEqual(float(cap.u[0]), 1.0, delta=1e-12)
        self.assertAlmostEqual(float(cap.u[-1]), 0.0, delta=1e-12)
        self.assertLessEqual(cap.verified.alpha, cap.params.alpha)

    def test_capped_cylinder(self):
        "A capped cylinder is a two-convex sphere with the radius in its middle"
        surface = capped_cylinder_profile(0.5, 4.0)
        self.assertTrue(np.all(np.diff(surface.meridian[:, 0]) > 0))
        self.assertEqual(surface.euler_characteristic(), 2)
        self.assertAlmostEqual(surface.radius_at(0.0), 0.5, delta=1e-6)
        self.assertTrue(check_two_convex(surface).passed)

    def test_capped_tube_radius_bound(self):
        "Capped tubes need r < b/10"
        curve = segment_curve((0, 0, 0), (2, 0, 0))
        with self.assertRaises(ParameterError):
            capped_tube(curve, 0.05, b=0.3)

    def test_capped_tube_closed_curve(self):
        "Closed curves cannot be capped"
        with self.assertRaises(ParameterError):
            capped_tube(circle_curve(1.0), 0.01, b=0.3)

    def test_capped_tube(self):
        "The capped tube closes at both ends of the curve on the capped side"
        curve = segment_curve((0, 0, 0), (2, 0, 0))
        tube = capped_tube(curve, 0.02, "right", b=0.3)
        self.assertAlmostEqual(float(tube.radius_at(0.5)), 0.02, delta=1e-9)
        self.assertAlmostEqual(float(tube.radius_at(curve.total_length)), 0.0, delta=1e-9)


class JunctionTests(unittest.TestCase):
    "Unit tests for the rotationally symmetric junctions"

    def test_gap_radius(self):
        "The gap radius is the larger of 10 r and 2 (r (n/c_H)^2)^(1/3)"
        params = ControlParams(n=2, c_H=0.5)
        self.assertAlmostEqual(gap_radius(0.001, params), 2 * (0.001 * 16) ** (1 / 3), delta=1e-12)
        self.assertAlmostEqual(gap_radius(10.0, params), 100.0, delta=1e-12)

    def test_gap_radius_increases(self):
        "Thinner strings need smaller gaps"
        radii = [gap_radius(r) for r in (1e-4, 1e-3, 1e-2, 1e-1)]
        self.assertEqual(radii, sorted(radii))

    def test_tubular_neighborhood(self):
        "Tubes around closed curves are tori below the injectivity radius"
        self.assertEqual(tubular_neighborhood(circle_curve(1.0), 0.2).euler_characteristic(), 0)
        with self.assertRaises(EmbeddingError):
            tubular_neighborhood(circle_curve(1.0), 1.5)

    def test_fillet_ends_on_string(self):
        "The fillet starts on the ball and ends on the string cylinder"
        meridian = fillet_meridian(1.0, 0.1)
        z, rho = meridian[0]
        self.assertAlmostEqual(float(np.hypot(z, rho)), 1.0, delta=1e-6)
        self.assertAlmostEqual(float(meridian[-1, 1]), 0.1, delta=1e-12)
        self.assertTrue(np.all(meridian[:, 1] >= 0.1 - 1e-9))

    def test_fillet_radius_order(self):
        "The string has to be thinner than the ball"
        with self.assertRaises(ParameterError):
            fillet_meridian(1.0, 1.5)
        with self.assertRaises(ParameterError):
            fillet_meridian(1.0, 0.1, sigma=1.5)

    def test_dumbbell(self):
        "A dumbbell is a sphere with its waist in the middle"
        surface = dumbbell_profile(1.0, 0.1)
        self.assertEqual(surface.euler_characteristic(), 2)
        self.assertAlmostEqual(surface.radius_at(0.0), 0.1, delta=1e-3)
        self.assertTrue(check_two_convex(surface).passed)

    def test_string_radius_family(self):
        "A thinning family ends at the target radius and its fillets start further out on the ball"
        family = string_radius_family((0, 0, 0), (0, 0, 2), 1.0, 0.2, 0.05, count=4)
        self.assertEqual([round(junction.radius, 6) for junction in family], [0.2, 0.125992, 0.07937, 0.05])
        np.testing.assert_allclose(family[0].axis, [0.0, 0.0, 1.0])
        footprints = [float(junction.meridian[0, 1]) for junction in family]
        self.assertEqual(footprints, sorted(footprints, reverse=True))


class GraphTests(unittest.TestCase):
    "Unit tests for marble multigraphs"

    def test_tree(self):
        "A path has no cycle and two leaves"
        graph = MarbleGraph(3, [Edge(0, 1, 1.0), Edge(1, 2, 1.0)])
        self.assertEqual(graph.cycle_rank(), 0)
        self.assertIsNone(graph.shortest_cycle())
        self.assertEqual(graph.leaves(), [0, 2])
        self.assertEqual(graph.degree(1), 2)

    def test_circuit(self):
        "A triangle with a pendant edge has one cycle through three edges"
        graph = MarbleGraph(4, [Edge(0, 1, 1.0), Edge(1, 2, 1.0), Edge(2, 0, 1.0), Edge(2, 3, 1.0)])
        self.assertEqual(graph.cycle_rank(), 1)
        cycle = graph.shortest_cycle()
        self.assertEqual(sorted(edge for _, edge in cycle), [0, 1, 2])
        self.assertEqual(graph.leaves(), [3])

    def test_double_edge(self):
        "Two strings between the same marbles form a cycle"
        graph = MarbleGraph(2, [Edge(0, 1, 1.0), Edge(1, 0, 2.0)])
        self.assertEqual(graph.cycle_rank(), 1)
        self.assertEqual(len(graph.shortest_cycle()), 2)

    def test_components(self):
        "Isolated marbles are components of their own"
        graph = MarbleGraph(3, [Edge(0, 1, 1.0)])
        self.assertEqual(graph.components(), [[0, 1], [2]])
        self.assertEqual(graph.cycle_rank(), 0)


class MarbleGraphTests(unittest.TestCase):
    "Unit tests for building marble graphs"

    def setUp(self):
        self.centers = [(0.0, 0.0, 0.0), (12.0, 0.0, 0.0)]
        self.string = segment_curve((1.0, 0.0, 0.0), (11.0, 0.0, 0.0))

    def test_two_marbles(self):
        "Two marbles joined by one string form a tree, a sphere"
        graph = build_marble_graph(self.centers, [self.string], 1.0, 0.05)
        self.assertEqual(graph.kind.kind, "tree")
        self.assertEqual(classify_marble_graph(graph).components, 1)
        self.assertEqual(graph.euler_characteristic(), 2)
        self.assertTrue(graph.embedding_report(Tolerances()).passed)

    def test_loose_end(self):
        "Strings have to end on marbles"
        loose = segment_curve((1.0, 0.0, 0.0), (9.0, 0.0, 0.0))
        with self.assertRaises(ConfigurationError):
            build_marble_graph(self.centers, [loose], 1.0, 0.05)

    def test_bent_string(self):
        "Strings leave marbles radially"
        points = [(1.0, 0.0, 0.0), (1.5, 0.3, 0.0), (2.0, 0.6, 0.0), (6.0, 1.0, 0.0),
                  (10.0, 0.6, 0.0), (10.5, 0.3, 0.0), (11.0, 0.0, 0.0)]
        bent = curve_from_points(points, closed=False)
        with self.assertRaises(ConfigurationError):
            build_marble_graph(self.centers, [bent], 1.0, 0.05)

    def test_thick_string(self):
        "Strings have to be thinner than the admissible radius"
        with self.assertRaises(ParameterError):
            build_marble_graph(self.centers, [self.string], 1.0, 0.9)

    def test_isolated_marbles(self):
        "Marbles without strings are a general graph of several spheres"
        graph = build_marble_graph(self.centers, [], 1.0, 0.05)
        kind = classify_marble_graph(graph)
        self.assertEqual(kind.kind, "general")
        self.assertEqual(kind.components, 2)
        self.assertEqual(graph.euler_characteristic(), 4)


def grid_graph(edges, spacing: float = 12.0, r_m: float = 1.0, r_s: float = 0.05):
    "Marbles on a 2 x 3 grid joined by straight strings along the chosen grid edges"
    centers = [np.array([spacing * column, spacing * row, 0.0]) for row in range(2) for column in range(3)]
    strings = []
    for first, second in edges:
        direction = (centers[second] - centers[first]) / spacing
        strings.append(segment_curve(centers[first] + r_m * direction, centers[second] - r_m * direction))
    return build_marble_graph(centers, strings, r_m, r_s)


#: Neighboring marbles of the grid
GRID_EDGES = [(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)]


class GluingTests(unittest.TestCase):
    "Properties of glued strings"

    def setUp(self):
        self.centers = [(0.0, 0.0, 0.0), (12.0, 0.0, 0.0)]
        self.string = segment_curve((1.0, 0.0, 0.0), (11.0, 0.0, 0.0))
        self.graph = build_marble_graph(self.centers, [self.string], 1.0, 0.05)

    def test_exact_outside_junctions(self):
        "Away from the delta(r)-balls the complex is the marbles and the plain r-tube"
        delta = gap_radius(0.05)
        points = self.graph.sample(spacing=0.02).points
        contacts = np.array([[1.0, 0.0, 0.0], [11.0, 0.0, 0.0]])
        far = np.linalg.norm(points[:, None] - contacts[None], axis=2).min(axis=1) > delta
        points = points[far]
        on_marbles = np.min([np.abs(np.linalg.norm(points - center, axis=1) - 1.0)
                             for center in np.array(self.centers)], axis=0)
        on_tube = np.where((points[:, 0] > 1.0) & (points[:, 0] < 11.0),
                           np.abs(np.linalg.norm(points[:, 1:], axis=1) - 0.05), np.inf)
        self.assertGreater(len(points), 0)
        self.assertLess(float(np.minimum(on_marbles, on_tube).max()), 1e-6)

    def test_local(self):
        "A string does not depend on the other strings at its marbles"
        longer = build_marble_graph(self.centers + [(24.0, 0.0, 0.0)],
                                    [self.string, segment_curve((13.0, 0.0, 0.0), (23.0, 0.0, 0.0))],
                                    1.0, 0.05)
        np.testing.assert_allclose(longer.strings[0].tube.radial, self.graph.strings[0].tube.radial)
        np.testing.assert_allclose(longer.strings[0].skeleton.samples, self.graph.strings[0].skeleton.samples)

    def test_rigid_motion(self):
        "Gluing moved marbles and strings gives the moved complex"
        rotation = rotation_about(normalize(np.array([0.3, -1.1, 2.0])), 1.2)
        translation = np.array([1.5, -2.0, 0.7])
        moved_string = curve_from_points(self.string.samples @ rotation.T + translation, closed=False,
                                         h_s=self.string.h_s)
        moved = build_marble_graph([rotation @ np.array(center) + translation for center in self.centers],
                                   [moved_string], 1.0, 0.05)
        expected = self.graph.transformed(rotation, translation)
        for marble, other in zip(moved.marbles, expected.marbles):
            np.testing.assert_allclose(marble.center, other.center, atol=1e-9)
        np.testing.assert_allclose(moved.strings[0].tube.radial, expected.strings[0].tube.radial, atol=1e-6)
        np.testing.assert_allclose(moved.strings[0].skeleton.samples, expected.strings[0].skeleton.samples,
                                   atol=1e-6)

    def test_euler_characteristic(self):
        "The mesh of a random marble graph has 2 (components - cycle rank) as Euler characteristic"
        generator = np.random.default_rng(7)
        for _ in range(4):
            chosen = [edge for edge in GRID_EDGES if generator.random() < 0.6]
            graph = grid_graph(chosen)
            adjacency = np.zeros((6, 6))
            for first, second in chosen:
                adjacency[first, second] = 1
            components, _ = connected_components(adjacency, directed=False)
            cycle_rank = len(chosen) - 6 + components
            self.assertEqual(graph.euler_characteristic(), 2 * (components - cycle_rank))
            mesh = mesh_from(graph, 0.25, check=False)
            self.assertEqual(mesh.euler_characteristic(), 2 * (components - cycle_rank), chosen)

    def test_round_balls_only(self):
        "Junctions are attached to round balls; other domains are rejected"
        with self.assertRaises(InputError):
            glue([capped_cylinder_profile(0.5, 4.0)], [], 0.05, check=False)
        with self.assertRaises(InputError):
            as_marble(dumbbell_profile(1.0, 0.1))
        marble = Marble(np.array([2.0, 0.0, 0.0]), 1.0)
        self.assertIs(as_marble(marble), marble)

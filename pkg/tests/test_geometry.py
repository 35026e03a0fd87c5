"Contains unit tests for curves, surfaces of revolution, tubes and meshes"
import os
import unittest
from math import pi
from tempfile import TemporaryDirectory

import numpy as np

from marblekit.error import EmbeddingError, InputError, SingularityError
from marblekit.geometry.curves import circle_curve, curve_from_points, segment_curve
from marblekit.geometry.io import export_mesh, import_mesh, load_curve, save_curve
from marblekit.geometry.mesh import estimate_curvatures_mesh
from marblekit.geometry.meshing import mesh_from
from marblekit.geometry.profiles import (ProfileSurface, cylinder_profile, ellipsoid_profile,
                                         principal_curvatures_profile, sphere_profile)
from marblekit.geometry.tubes import principal_curvatures_tube, round_torus


class CurveTests(unittest.TestCase):
    "Unit tests for skeleton curves"

    def test_circle_length_and_curvature(self):
        "A circle of radius 2 has length 4 pi and curvature 1/2"
        curve = circle_curve(2.0, count=128)
        self.assertTrue(curve.closed)
        self.assertAlmostEqual(curve.total_length, 4 * pi, delta=0.01)
        kappa = curve.curvatures()
        self.assertAlmostEqual(float(kappa.min()), 0.5, delta=0.01)
        self.assertAlmostEqual(float(kappa.max()), 0.5, delta=0.01)

    def test_circle_injectivity_radius(self):
        "The normal injectivity radius of a round circle is its radius"
        curve = circle_curve(1.0, count=128)
        self.assertAlmostEqual(curve.normal_injectivity_radius(), 1.0, delta=0.02)

    def test_frames_are_orthonormal(self):
        "The rotation minimizing frames are orthonormal and orthogonal to the tangent"
        curve = circle_curve(1.0, count=64)
        frames = curve.frames
        for tangent, (u1, u2) in zip(curve.tangents, frames):
            self.assertAlmostEqual(float(np.dot(u1, u2)), 0.0, delta=1e-6)
            self.assertAlmostEqual(float(np.dot(u1, tangent)), 0.0, delta=1e-6)
            self.assertAlmostEqual(float(np.linalg.norm(u2)), 1.0, delta=1e-6)

    def test_frames_at(self):
        "Frames at many arclengths agree with the sample frames and with single lookups"
        curve = curve_from_points([(0.0, 0.0, 0.0), (1.0, 0.5, 0.2), (2.0, 0.0, 0.6), (3.0, -0.5, 0.2),
                                   (4.0, 0.0, 0.0)], closed=False)
        np.testing.assert_allclose(curve.frames_at(curve.arclength), curve.frames, atol=1e-6)
        s = np.linspace(0.0, curve.total_length, 37)
        frames = curve.frames_at(s)
        self.assertEqual(frames.shape, (37, 2, 3))
        np.testing.assert_allclose(frames[11], curve.frame_at(s[11]), atol=1e-12)
        tangents = curve.tangent_at(s)
        np.testing.assert_allclose(np.sum(frames[:, 0] * tangents, axis=1), 0.0, atol=1e-9)
        np.testing.assert_allclose(np.linalg.norm(frames, axis=2), 1.0, atol=1e-9)

    def test_too_few_points(self):
        "Curves need at least four points"
        with self.assertRaises(InputError):
            curve_from_points([[0, 0, 0], [1, 0, 0], [2, 0, 0]], closed=False)

    def test_crossing_polyline(self):
        "A closed polyline through the diagonals of a square is not embedded"
        with self.assertRaises(EmbeddingError):
            curve_from_points([[0, 0], [1, 1], [1, 0], [0, 1]], closed=True)

    def test_segment_and_sub_curve(self):
        "An open straight curve has zero curvature and sub curves of the requested length"
        curve = segment_curve((0, 0, 0), (4, 0, 0))
        self.assertFalse(curve.closed)
        self.assertAlmostEqual(curve.total_length, 4.0, delta=1e-6)
        self.assertLess(float(curve.curvatures().max()), 1e-6)
        piece = curve.sub_curve(1.0, 3.0)
        self.assertAlmostEqual(piece.total_length, 2.0, delta=1e-6)
        np.testing.assert_allclose(piece.point_at(0.0), [1.0, 0.0, 0.0], atol=1e-6)

    def test_reversed_curve(self):
        "Reversing swaps the endpoints"
        curve = segment_curve((0, 0, 0), (1, 1, 0))
        reversed_curve = curve.reversed()
        np.testing.assert_allclose(reversed_curve.samples[0], curve.samples[-1])

    def test_curve_json(self):
        "Curves survive the JSON file format"
        curve = circle_curve(1.5, count=64)
        with TemporaryDirectory() as directory:
            path = os.path.join(directory, "curve.json")
            save_curve(curve, path)
            loaded = load_curve(path)
        self.assertTrue(loaded.closed)
        self.assertAlmostEqual(loaded.total_length, curve.total_length, delta=1e-3)


class ProfileTests(unittest.TestCase):
    "Unit tests for surfaces of revolution"

    def test_sphere_curvatures(self):
        "Both principal curvatures of a sphere of radius 2 are 1/2"
        sphere = sphere_profile(2.0)
        data = principal_curvatures_profile(sphere, 0.3)
        self.assertAlmostEqual(data.principal[0], 0.5, delta=1e-3)
        self.assertAlmostEqual(data.principal[1], 0.5, delta=1e-3)
        self.assertAlmostEqual(data.H, 1.0, delta=2e-3)
        self.assertAlmostEqual(data.two_convex_margin, 1.0, delta=2e-3)

    def test_ellipsoid_is_convex(self):
        "An ellipsoid of revolution has positive principal curvatures"
        ellipsoid = ellipsoid_profile(2.0, 1.0)
        rows = ellipsoid.curvature_rows()
        self.assertGreater(float(rows[:, 0].min()), 0.0)

    def test_cylinder_curvatures(self):
        "A cylinder of radius 1/2 has curvatures 0 and 2"
        cylinder = cylinder_profile(0.5, 3.0)
        data = principal_curvatures_profile(cylinder, 1.0)
        self.assertAlmostEqual(data.principal[0], 0.0, delta=1e-4)
        self.assertAlmostEqual(data.principal[1], 2.0, delta=1e-4)

    def test_half_disk_area(self):
        "The meridian of the unit sphere encloses half the unit disk with the axis"
        self.assertAlmostEqual(sphere_profile(1.0).volume_profile(), pi / 2, delta=1e-3)

    def test_euler_characteristic(self):
        "Capped profiles are spheres, periodic ones tori"
        self.assertEqual(sphere_profile(1.0).euler_characteristic(), 2)
        self.assertEqual(cylinder_profile(0.5, 3.0).euler_characteristic(), 0)

    def test_bad_end_caps(self):
        "Only three end cap kinds exist"
        meridian = sphere_profile(1.0).meridian
        with self.assertRaises(InputError):
            ProfileSurface(meridian, 2, "rounded")

    def test_short_meridian(self):
        "A meridian needs five points"
        with self.assertRaises(InputError):
            ProfileSurface([[0, 0], [1, 1], [2, 0]], 2, "capped")


class TubeTests(unittest.TestCase):
    "Unit tests for tubes around curves"

    def test_round_torus_outer_equator(self):
        "On the outer equator of the (2, 1/2) torus the curvatures are 2/5 and 2"
        torus = round_torus(2.0, 0.5)
        data = principal_curvatures_tube(torus, 0.0, 0.0)
        self.assertAlmostEqual(data.principal[0], 0.4, delta=1e-2)
        self.assertAlmostEqual(data.principal[1], 2.0, delta=1e-6)

    def test_round_torus_inner_equator(self):
        "On the inner equator the meridian curvature is -2/3 and the torus stays two-convex"
        torus = round_torus(2.0, 0.5)
        data = principal_curvatures_tube(torus, 0.0, pi)
        self.assertAlmostEqual(data.principal[0], -2 / 3, delta=1e-2)
        self.assertGreater(data.two_convex_margin, 0.0)

    def test_thick_torus(self):
        "The tube radius has to stay below the radius of the core circle"
        with self.assertRaises(SingularityError):
            round_torus(1.0, 1.5)

    def test_torus_euler_characteristic(self):
        "A closed tube is a torus"
        self.assertEqual(round_torus(2.0, 0.5).euler_characteristic(), 0)


class MeshTests(unittest.TestCase):
    "Unit tests for triangulation and mesh files"

    def test_sphere_mesh(self):
        "A triangulated sphere is watertight with Euler characteristic 2"
        mesh = mesh_from(sphere_profile(1.0), 0.2)
        self.assertTrue(mesh.is_watertight)
        self.assertEqual(mesh.euler_characteristic(), 2)

    def test_torus_mesh(self):
        "A triangulated torus is watertight with Euler characteristic 0"
        mesh = mesh_from(round_torus(2.0, 0.5), 0.2)
        self.assertTrue(mesh.is_watertight)
        self.assertEqual(mesh.euler_characteristic(), 0)

    def test_mesh_curvatures(self):
        "The quadric fit on a triangulated unit sphere gives curvatures close to 1"
        mesh = mesh_from(sphere_profile(1.0), 0.1)
        data = estimate_curvatures_mesh(mesh, len(mesh.vertices) // 2)
        self.assertAlmostEqual(data.principal[0], 1.0, delta=0.15)
        self.assertAlmostEqual(data.principal[1], 1.0, delta=0.15)

    def test_off_file(self):
        "A mesh written as OFF is read back with the same vertices and faces"
        mesh = mesh_from(sphere_profile(1.0), 0.25)
        with TemporaryDirectory() as directory:
            path = os.path.join(directory, "sphere.off")
            export_mesh(mesh, path, "off")
            loaded = import_mesh(path)
        self.assertEqual(len(loaded.vertices), len(mesh.vertices))
        self.assertEqual(len(loaded.faces), len(mesh.faces))
        self.assertEqual(loaded.euler_characteristic(), 2)

    def test_unknown_format(self):
        "Only OBJ and OFF are written"
        mesh = mesh_from(sphere_profile(1.0), 0.25)
        with TemporaryDirectory() as directory:
            with self.assertRaises(InputError):
                export_mesh(mesh, os.path.join(directory, "sphere.stl"), "stl")

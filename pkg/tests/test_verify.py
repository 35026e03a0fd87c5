"Contains unit tests for the certificate checks"
import unittest

import numpy as np

from marblekit.configuration import ControlParams, Tolerances
from marblekit.error import ConfigurationError, PreconditionError
from marblekit.geometry.curves import circle_curve, segment_curve
from marblekit.geometry.profiles import cosine_profile, sphere_profile
from marblekit.geometry.tubes import round_torus
from marblekit.glue.junction import dumbbell_profile
from marblekit.verify.certificate import make_report, merge_reports
from marblekit.verify.convexity import (check_alpha_noncollapsed, check_controlled_domain,
                                        check_two_convex)
from marblekit.verify.curves import check_controlled_curve
from marblekit.verify.placement import check_configuration, check_embedded

from .example_scenes import THIN_NECK_DUMBBELL


class ReportTests(unittest.TestCase):
    "Unit tests for building and merging reports"

    def test_strict_report(self):
        "Strict reports need a positive margin"
        self.assertTrue(make_report("x", 0.1).passed)
        self.assertFalse(make_report("x", 0.0).passed)

    def test_boundary_report(self):
        "Non-strict reports flag a vanishing margin and pass only if it is positive"
        report = make_report("x", -1e-9, strict=False)
        self.assertFalse(report.passed)
        self.assertIn("boundary", report.flags)
        report = make_report("x", 0.0, strict=False)
        self.assertFalse(report.passed)
        self.assertIn("boundary", report.flags)
        report = make_report("x", 1e-9, strict=False)
        self.assertTrue(report.passed)
        self.assertIn("boundary", report.flags)
        self.assertFalse(make_report("x", -0.1, strict=False).passed)
        self.assertEqual(make_report("x", -1e-9).flags, ())

    def test_merge_takes_the_worst(self):
        "A merged report carries the smallest margin and fails with any sub-report"
        merged = merge_reports("all", [make_report("a", 2.0, "first"), make_report("b", -1.0, "second")])
        self.assertFalse(merged.passed)
        self.assertEqual(merged.margin, -1.0)
        self.assertEqual(merged.witness, "second")
        self.assertEqual([report.name for report in merged.failed_details()], ["b"])

    def test_empty_merge(self):
        "Nothing to check passes"
        self.assertTrue(merge_reports("nothing", []).passed)

    def test_to_dict(self):
        "Reports serialize their sub-reports"
        merged = merge_reports("all", [make_report("a", 1.0)])
        data = merged.to_dict()
        self.assertEqual(data["name"], "all")
        self.assertTrue(data["passed"])
        self.assertEqual(data["details"][0]["name"], "a")


class ConvexityTests(unittest.TestCase):
    "Unit tests for two-convexity, noncollapsedness and control"

    def test_sphere_is_two_convex(self):
        "The unit sphere has two-convexity margin 2"
        report = check_two_convex(sphere_profile(1.0))
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.margin, 2.0, delta=0.01)

    def test_thin_torus_is_two_convex(self):
        "The (2, 1/2) torus has margin 2 - 2/3"
        report = check_two_convex(round_torus(2.0, 0.5))
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.margin, 4 / 3, delta=0.02)

    def test_torus_margin(self):
        "The (3, 1) torus has margin 1/2 at the inner equator"
        report = check_two_convex(round_torus(3.0, 1.0))
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.margin, 0.5, delta=0.01)

    def test_fat_torus_fails(self):
        "The inner equator of the (2.5, 1.3) torus is not two-convex"
        report = check_two_convex(round_torus(2.5, 1.3))
        self.assertFalse(report.passed)
        self.assertLess(report.margin, 0.0)
        self.assertIn("point", report.witness)

    def test_round_sphere_noncollapsed_boundary(self):
        "The round sphere is exactly n-noncollapsed, which is flagged as the equality case"
        report = check_alpha_noncollapsed(sphere_profile(1.0), 2.0)
        self.assertIn("boundary", report.flags)
        self.assertAlmostEqual(report.margin, 0.0, delta=1e-3)
        self.assertEqual(report.passed, report.margin > 0)

    def test_sphere_noncollapsed_with_slack(self):
        "Smaller constants leave a positive margin"
        report = check_alpha_noncollapsed(sphere_profile(1.0), 0.5)
        self.assertTrue(report.passed)
        self.assertGreater(report.margin, 0.5)

    def test_thin_neck_collapses(self):
        "A dumbbell with a thin neck is not 1-noncollapsed; the witness lies at the waist"
        report = check_alpha_noncollapsed(dumbbell_profile(**THIN_NECK_DUMBBELL), 1.0, spacing=0.01,
                                          angular=16)
        self.assertFalse(report.passed)
        self.assertLess(report.margin, 0.0)
        x, y, z = report.witness["point"]
        self.assertLess(abs(x), 1.5)
        self.assertLess(np.hypot(y, z), 0.5)

    def test_negative_mean_curvature(self):
        "Noncollapsedness is only defined for mean convex surfaces"
        with self.assertRaises(PreconditionError):
            check_alpha_noncollapsed(cosine_profile(3.0, 2.0), 0.5)

    def test_controlled_sphere(self):
        "The unit sphere is controlled with the default parameters"
        report = check_controlled_domain(sphere_profile(1.0), ControlParams())
        self.assertTrue(report.passed)
        self.assertEqual({detail.name for detail in report.details},
                         {"mean-curvature", "two-convex-ratio", "curvature-bound", "noncollapsed"})

    def test_uncontrolled_sphere(self):
        "A lower bound of the mean curvature above 2 fails on the unit sphere"
        report = check_controlled_domain(sphere_profile(1.0), ControlParams(c_H=3.0))
        self.assertFalse(report.passed)
        self.assertIn("mean-curvature", [detail.name for detail in report.failed_details()])


class CurveControlTests(unittest.TestCase):
    "Unit tests for b-controlled curves"

    def test_controlled_circle(self):
        "The unit circle is 0.3-controlled"
        self.assertTrue(check_controlled_curve(circle_curve(1.0), 0.3).passed)

    def test_bent_circle(self):
        "The unit circle bends too much for b = 2"
        report = check_controlled_curve(circle_curve(1.0), 2.0)
        self.assertFalse(report.passed)
        self.assertIn("curvature[0]", [detail.name for detail in report.failed_details()])

    def test_close_circles(self):
        "Two circles half a unit apart are not separated by 10 b"
        curves = [circle_curve(1.0), circle_curve(1.0, center=(0.0, 0.0, 0.5))]
        report = check_controlled_curve(curves, 0.3)
        self.assertIn("separation[0,1]", [detail.name for detail in report.failed_details()])


class PlacementTests(unittest.TestCase):
    "Unit tests for configurations and embeddedness"

    def test_curve_through_domain(self):
        "A string may not run through a domain"
        with self.assertRaises(ConfigurationError):
            check_configuration(sphere_profile(1.0), segment_curve((-2, 0, 0), (2, 0, 0)),
                                ControlParams(), Tolerances(), include_controls=False)

    def test_embedded_carriers(self):
        "Spheres, tori and circles are embedded"
        for geometry in (sphere_profile(1.0), round_torus(2.0, 0.5), circle_curve(1.0)):
            self.assertTrue(check_embedded(geometry).passed, repr(geometry))

"Contains unit tests for the flow with surgery"
import unittest
from unittest import mock

import numpy as np

from marblekit.configuration import SurgeryParams
from marblekit.error import ParameterError, PreconditionError, SurgeryError
from marblekit.flow.classify import (CappedTube, ConvexSphere, classify_component, neck_positions,
                                     remaining_lifetime, TubularLoop)
from marblekit.flow.evolution import curvature_summary
from marblekit.flow.necks import component_necks, radius_graph, runs_of
from marblekit.flow.run import run_flow_with_surgery
from marblekit.flow.state import (FlowComponent, FlowLog, NeckRegion, StepEvent, SurgeryEvent,
                                  initial_state)
from marblekit.flow.surgery import check_neck_separation, perform_surgery, separated_necks
from marblekit.geometry.curves import circle_curve, segment_curve
from marblekit.geometry.profiles import cylinder_profile, sphere_profile
from marblekit.geometry.tubes import round_torus
from marblekit.glue.caps import capped_cylinder_profile
from marblekit.glue.junction import dumbbell_profile
from marblekit.observer import SimpleObserver

from .example_scenes import LONG_NECK_DUMBBELL, SHARP_WAIST_DUMBBELL, THIN_NECK_DUMBBELL


def _neck(component: int, x: float, radius: float) -> NeckRegion:
    return NeckRegion(component, np.array([x, 0.0, 0.0]), radius, np.array([1.0, 0.0, 0.0]),
                      5 * radius, 0.0, x)


class FlowLogTests(unittest.TestCase):
    "Unit tests for the event log"

    def test_time_order(self):
        "Events are appended in time order"
        log = FlowLog(SurgeryParams())
        log.append(StepEvent(0.1, 0.1, 2.0, 1.0))
        with self.assertRaises(ValueError):
            log.append(StepEvent(0.05, 0.05, 2.0, 1.0))

    def test_exceptional_set(self):
        "Every surgery neck contributes a ball of radius 10 Gamma r"
        log = FlowLog(SurgeryParams(Gamma=4.0))
        log.append(SurgeryEvent(0.2, (_neck(0, 1.0, 0.05),), (0,), (1, 2), True))
        balls = log.exceptional_set()
        self.assertEqual(len(balls), 1)
        self.assertAlmostEqual(balls[0][1], 2.0, delta=1e-12)
        np.testing.assert_allclose(balls[0][0], [1.0, 0.0, 0.0])


class ClassificationTests(unittest.TestCase):
    "Unit tests for the classification of discarded components"

    def test_sphere(self):
        "A round sphere is convex with equal in- and outradius"
        shape = classify_component(sphere_profile(1.0))
        self.assertIsInstance(shape, ConvexSphere)
        self.assertAlmostEqual(shape.radius, 1.0, delta=0.01)
        self.assertAlmostEqual(shape.inradius, shape.outradius, delta=0.02)

    def test_lifetimes(self):
        "Spheres live R^2/(2n), tubes r^2/(2(n-1))"
        sphere = ConvexSphere(np.zeros(3), 1.0, 1.0, 1.0)
        self.assertAlmostEqual(remaining_lifetime(sphere, 2), 0.25, delta=1e-12)
        tube = CappedTube(segment_curve((0, 0, 0), (1, 0, 0)), 0.1, ())
        self.assertAlmostEqual(remaining_lifetime(tube, 2), 0.005, delta=1e-12)

    def test_no_neck_points_on_short_curves(self):
        "Neck points keep half the spacing from the ends of open curves"
        curve = segment_curve((0, 0, 0), (1, 0, 0))
        self.assertEqual(len(neck_positions(curve, 5.0)), 0)

    def test_neck_points_on_a_circle(self):
        "Neck points on a closed curve are spread at least the spacing apart"
        curve = circle_curve(10.0, count=256)
        positions = neck_positions(curve, 10.0)
        self.assertGreaterEqual(len(positions), 4)
        points = np.atleast_2d(curve.point_at(positions))
        for index, point in enumerate(points):
            for other in points[index + 1:]:
                self.assertGreaterEqual(float(np.linalg.norm(point - other)), 10.0 - 1e-9)


class NeckTests(unittest.TestCase):
    "Unit tests for neck detection and surgery"

    def test_runs(self):
        "Runs of true entries wrap around on periodic masks"
        mask = np.array([True, False, True, True, False, True])
        self.assertEqual([run.tolist() for run in runs_of(mask, False)], [[0], [2, 3], [5]])
        self.assertEqual([run.tolist() for run in runs_of(mask, True)], [[5, 0], [2, 3]])

    def test_thin_cylinder_has_a_neck(self):
        "A thin periodic cylinder is a neck everywhere; one center is chosen"
        necks = component_necks(FlowComponent(0, cylinder_profile(0.02, 2.0)))
        self.assertEqual(len(necks), 1)
        self.assertAlmostEqual(necks[0].radius, 0.02, delta=1e-9)

    def test_fat_cylinder_has_no_neck(self):
        "Mean curvature below H_neck rules out necks"
        self.assertEqual(component_necks(FlowComponent(0, cylinder_profile(0.5, 20.0))), [])

    def test_surgery_splits(self):
        "Cutting a capped cylinder in the middle leaves two capped pieces"
        state = initial_state(capped_cylinder_profile(0.05, 2.0))
        after = perform_surgery(state, [_neck(0, 0.0, 0.05)])
        self.assertEqual([component.id for component in after.components], [1, 2])
        self.assertEqual({component.parent for component in after.components}, {0})
        self.assertEqual(after.next_id, 3)
        for component in after.components:
            self.assertEqual(component.surface.euler_characteristic(), 2)
        left, right = (component.surface.meridian[:, 0] for component in after.components)
        self.assertAlmostEqual(float(right.min() - left.max()), 4 * 0.05, delta=0.01)

    def test_no_necks(self):
        "Surgery without necks keeps the state"
        state = initial_state(sphere_profile(1.0))
        self.assertIs(perform_surgery(state, []), state)

    def test_neck_separation(self):
        "Necks closer than 10 Gamma (r1 + r2) are rejected"
        with self.assertRaises(ParameterError):
            check_neck_separation([_neck(0, 0.0, 0.05), _neck(0, 1.0, 0.05)])
        check_neck_separation([_neck(0, 0.0, 0.05), _neck(0, 5.0, 0.05)])

    def test_separation_across_events(self):
        "A neck meeting the ball of an earlier surgery is rejected, a far one is not"
        log = FlowLog(SurgeryParams(Gamma=4.0))
        log.append(SurgeryEvent(0.2, (_neck(0, 1.0, 0.05),), (0,), (1, 2), True))
        recorded = log.exceptional_set()
        with self.assertRaises(ParameterError) as context:
            check_neck_separation([_neck(1, 2.0, 0.05)], SurgeryParams(), recorded)
        self.assertEqual(context.exception.witness, [[2.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
        check_neck_separation([_neck(1, 10.0, 0.05)], SurgeryParams(), recorded)
        state = initial_state(capped_cylinder_profile(0.05, 2.0))
        with self.assertRaises(ParameterError):
            perform_surgery(state, [_neck(0, 0.0, 0.05)], recorded=recorded)

    def test_separated_necks(self):
        "Necks meeting recorded balls or earlier chosen necks are left out"
        recorded = [(np.array([1.0, 0.0, 0.0]), 2.0)]
        necks = [_neck(0, 2.0, 0.05), _neck(0, 10.0, 0.05), _neck(0, 10.5, 0.05)]
        chosen = separated_necks(necks, SurgeryParams(Gamma=4.0), recorded)
        self.assertEqual([neck.position for neck in chosen], [10.0])


class DumbbellSurgeryTests(unittest.TestCase):
    "Unit tests for surgery on dumbbells"

    @classmethod
    def setUpClass(cls):
        cls.state = initial_state(dumbbell_profile(**LONG_NECK_DUMBBELL))
        cls.necks = component_necks(cls.state.components[0])
        cls.after = perform_surgery(cls.state, cls.necks)

    def test_one_centered_neck(self):
        "The straight neck is found once, at its middle"
        self.assertEqual(len(self.necks), 1)
        self.assertAlmostEqual(self.necks[0].position, 0.0, delta=0.01)
        self.assertAlmostEqual(self.necks[0].radius, 0.05, delta=1e-3)
        self.assertLessEqual(self.necks[0].quality, SurgeryParams().delta)

    def test_caps_at_separation(self):
        "The cap tips lie Gamma r/2 away from the neck center"
        left, right = (component.surface.meridian[:, 0] for component in self.after.components)
        position, half = self.necks[0].position, SurgeryParams().Gamma * 0.05 / 2
        self.assertAlmostEqual(float(left.max()), position - half, delta=0.01)
        self.assertAlmostEqual(float(right.min()), position + half, delta=0.01)

    def test_pieces_are_two_convex(self):
        for component in self.after.components:
            self.assertGreater(curvature_summary(component.surface).margin, 0.0)
            self.assertEqual(component.surface.euler_characteristic(), 2)

    def test_containment(self):
        "The pieces stay inside the neck they were cut from"
        for component in self.after.components:
            meridian = component.surface.meridian
            in_neck = np.abs(meridian[:, 0]) <= 0.5
            self.assertTrue(np.any(in_neck))
            self.assertLessEqual(float(meridian[in_neck, 1].max()), 0.05 + 1e-4)

    def test_mirror_symmetry(self):
        "Cutting the symmetric dumbbell leaves mirror images"
        left, right = (component.surface.meridian for component in self.after.components)
        self.assertAlmostEqual(float(left[:, 0].min()), -float(right[:, 0].max()), delta=0.01)
        self.assertAlmostEqual(float(left[:, 0].max()), -float(right[:, 0].min()), delta=0.01)
        self.assertAlmostEqual(float(left[:, 1].max()), float(right[:, 1].max()), delta=1e-3)

    def test_rejected_surgery(self):
        "A surgery whose pieces miss the margin raises with the necks as witness"
        with self.assertRaises(SurgeryError) as context:
            perform_surgery(self.state, self.necks, tol=1e6)
        self.assertEqual(context.exception.witness, [self.necks[0].center.tolist()])
        self.assertEqual(len(context.exception.dump["margins"]), 2)

    def test_sharp_waist_is_no_neck(self):
        "A waist above H_neck that is far from a cylinder is no surgery neck"
        component = initial_state(dumbbell_profile(**SHARP_WAIST_DUMBBELL)).components[0]
        self.assertGreaterEqual(float(radius_graph(component.surface).mean.max()), SurgeryParams().H_neck)
        self.assertEqual(component_necks(component), [])


class RunTests(unittest.TestCase):
    "Unit tests for complete runs"

    def test_thick_sphere_is_discarded(self):
        "A sphere with H >= H_thick is discarded at once and dies after R^2/4"
        log = run_flow_with_surgery(sphere_profile(0.24))
        self.assertEqual(len(log.steps), 0)
        self.assertEqual(len(log.discards), 1)
        self.assertAlmostEqual(log.extinction_time, 0.24 ** 2 / 4, delta=1e-3)

    def test_shrinking_sphere(self):
        "A sphere of radius R shrinks until it is thick and vanishes at R^2/4"
        observer = SimpleObserver()
        log = run_flow_with_surgery(sphere_profile(0.3, spacing=0.3 / 16), observer=observer)
        self.assertGreater(len(log.steps), 0)
        self.assertEqual(len(log.surgeries), 0)
        self.assertEqual(len(log.discards), 1)
        self.assertIsInstance(log.discards[0].classification, ConvexSphere)
        self.assertAlmostEqual(log.extinction_time, 0.3 ** 2 / 4, delta=2e-3)
        self.assertEqual(len(observer.discards), 1)
        self.assertEqual(len(observer.times), len(log.steps))

    def test_step_limit(self):
        "A run stopped early has no extinction time"
        log = run_flow_with_surgery(sphere_profile(1.0), max_steps=2)
        self.assertIsNone(log.extinction_time)
        self.assertEqual(len(log.steps), 2)

    def test_nothing_to_flow(self):
        "An empty domain cannot flow"
        with self.assertRaises(PreconditionError):
            run_flow_with_surgery([])

    def test_not_two_convex(self):
        "Only two-convex domains flow"
        with self.assertRaises(PreconditionError):
            run_flow_with_surgery(round_torus(2.5, 1.3))

    def test_unit_sphere_extinction(self):
        "The unit sphere vanishes at 1/4"
        log = run_flow_with_surgery(sphere_profile(1.0))
        self.assertEqual(len(log.surgeries), 0)
        self.assertAlmostEqual(log.extinction_time, 0.25, delta=0.0025)

    def test_scaling(self):
        "Doubling the sphere and halving the thresholds multiplies the extinction time by 4"
        small = run_flow_with_surgery(sphere_profile(0.5))
        large = run_flow_with_surgery(sphere_profile(1.0),
                                      SurgeryParams(H_thick=4.0, H_neck=8.0, H_trig=16.0))
        self.assertEqual(len(small.discards), len(large.discards))
        self.assertAlmostEqual(large.extinction_time / small.extinction_time, 4.0, delta=0.08)

    def test_rejected_surgery_keeps_flowing(self):
        "A rejected surgery leaves the state alone and the flow goes on"
        error = SurgeryError("margin", witness=[[0.0, 0.0, 0.0]])
        with mock.patch("marblekit.flow.run.perform_surgery", side_effect=error) as surgery:
            with self.assertLogs(level="WARNING") as logs:
                log = run_flow_with_surgery(dumbbell_profile(**THIN_NECK_DUMBBELL), max_steps=2)
        self.assertGreater(surgery.call_count, 0)
        self.assertTrue(any("Rejected surgery" in line for line in logs.output))
        self.assertEqual(len(log.surgeries), 0)
        self.assertEqual(len(log.steps), 2)

    def test_thin_torus_is_a_loop(self):
        "A thin torus is discarded whole as a tubular loop, without surgery"
        log = run_flow_with_surgery(round_torus(10.0, 0.5))
        self.assertEqual(len(log.surgeries), 0)
        self.assertEqual(len(log.discards), 1)
        self.assertIsInstance(log.discards[0].classification, TubularLoop)
        self.assertIsNotNone(log.extinction_time)

    def test_event_log_lines(self):
        "The event log has one JSON line per record"
        log = run_flow_with_surgery(sphere_profile(0.24))
        lines = log.to_jsonl().strip().split("\n")
        self.assertEqual(len(lines), len(log.to_records()))

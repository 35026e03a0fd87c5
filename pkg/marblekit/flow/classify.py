"""Classification of discarded components into the three canonical shapes.

A discarded component is either convex, or a tube around a curve: every point of the curve
away from its ends is the center of an epsilon-neck. Open curves end in convex caps of
bounded size (capped tubes), closed ones have no ends (tubular loops)."""
from logging import debug, warning
from typing import NamedTuple, Tuple

import numpy as np

from ..configuration import SurgeryParams, DEFAULT_SURGERY
from ..error import ClassificationError
from ..geometry.curves import SkeletonCurve, curve_from_points
from ..geometry.profiles import ProfileSurface
from .evolution import curvature_rows
from .necks import RadiusGraph, runs_of, radius_graph, window_quality


class ConvexSphere(NamedTuple):
    "A convex component"
    #: Centroid of the samples
    center: np.ndarray
    #: Smallest distance from the center to the surface
    inradius: float
    #: Largest distance from the center to the surface
    outradius: float
    #: Radius of the round sphere with the same median mean curvature
    radius: float


class CappedTube(NamedTuple):
    "A tube around an open curve, closed off by convex caps"
    axis: SkeletonCurve
    radius: float
    neck_points: Tuple[np.ndarray, ...]


class TubularLoop(NamedTuple):
    "A tube around a closed curve"
    core: SkeletonCurve
    radius: float
    neck_points: Tuple[np.ndarray, ...]
    #: ``few-neck-points`` if the spacing leaves fewer than two neck points on the core
    flags: Tuple[str, ...] = ()


def remaining_lifetime(classification, n: int) -> float:
    "Time a discarded shape needs to become extinct: R^2/(2n) for spheres, r^2/(2(n-1)) else"
    if isinstance(classification, ConvexSphere):
        return classification.radius ** 2 / (2 * n)
    return classification.radius ** 2 / (2 * (n - 1))


def neck_positions(curve: SkeletonCurve, spacing: float) -> np.ndarray:
    """Arclengths of a greedy farthest point selection of curve samples at mutual distance at
    least `spacing`. On open curves only samples at least spacing/2 away from both ends
    qualify, so short tubes have none."""
    samples = curve.samples
    candidates = np.arange(len(samples))
    if not curve.closed:
        s = curve.arclength
        candidates = candidates[(s >= spacing / 2) & (s <= curve.total_length - spacing / 2)]
    if not len(candidates):
        return np.zeros(0)
    chosen = [int(candidates[0])]
    distance = np.full(len(samples), -np.inf)
    distance[candidates] = np.linalg.norm(samples[candidates] - samples[chosen[0]], axis=1)
    while True:
        index = int(np.argmax(distance))
        if distance[index] < spacing:
            break
        chosen.append(index)
        distance = np.minimum(distance, np.linalg.norm(samples - samples[index], axis=1))
    return np.sort(curve.arclength[chosen])


def neck_points(curve: SkeletonCurve, spacing: float) -> Tuple[np.ndarray, ...]:
    "The points at :py:func:`neck_positions`"
    return tuple(np.asarray(curve.point_at(s), dtype=float) for s in neck_positions(curve, spacing))


def _axis_curve(surface, radius: float) -> SkeletonCurve:
    if isinstance(surface, ProfileSurface):
        start, end = surface.axis
        count = max(8, int(np.ceil(np.linalg.norm(end - start) / (radius / 2))) + 1)
        return curve_from_points(np.linspace(start, end, count), False)
    return surface.skeleton


def _convex(surface, rows: np.ndarray) -> ConvexSphere:
    samples = surface.sample(angular=16)
    center = samples.points.mean(axis=0)
    distance = np.linalg.norm(samples.points - center, axis=1)
    mean = float(np.median(rows.sum(axis=1)))
    return ConvexSphere(center, float(distance.min()), float(distance.max()), surface.n / mean)


def classify_component(component, params: SurgeryParams = DEFAULT_SURGERY):
    """Classifies a component as ConvexSphere, CappedTube or TubularLoop

    Args:
        component: a FlowComponent or a profile or tube surface
        params: epsilon is the neck precision, C bounds the cap size in units of the radius
    Raises:
        ClassificationError: none of the three shapes matches; the dump describes the
        component
    """
    surface = getattr(component, "surface", component)
    rows = curvature_rows(surface)
    if np.all(rows[:, 0] > 0):
        return _convex(surface, rows)
    dump = surface.to_dict() if hasattr(surface, "to_dict") else {"surface": repr(surface)}
    if isinstance(surface, ProfileSurface) and surface.end_caps != "capped":
        raise ClassificationError("Only closed surfaces can be classified", dump=dump)
    graph = radius_graph(surface)
    closed = graph.period is not None
    qualities = np.full(len(graph.coords), np.inf)
    for index in np.flatnonzero(graph.valid):
        qualities[index] = window_quality(graph, index, params.neck_window)
    runs = runs_of(qualities <= params.epsilon, closed)
    if len(runs) != 1:
        raise ClassificationError(f"Expected one run of epsilon-necks, found {len(runs)}",
                                  witness=len(runs), dump=dump)
    run = runs[0]
    radius = float(np.median(graph.radii[run]))
    if closed:
        if len(run) != len(graph.coords):
            worst = int(np.argmax(qualities))
            raise ClassificationError("A loop has points that are no epsilon-neck centers",
                                      witness=float(graph.coords[worst]), dump=dump)
        core = surface.skeleton
        points = neck_points(core, params.neck_spacing * radius)
        flags = ("few-neck-points",) if len(points) < 2 else ()
        if flags:
            warning(f"Loop of radius {radius} carries fewer than two neck points")
        debug(f"Classified loop of radius {radius} with {len(points)} neck points")
        return TubularLoop(core, radius, points, flags)
    _check_caps(graph, rows, run, radius, params, dump)
    axis = _axis_curve(surface, radius)
    points = neck_points(axis, params.neck_spacing * radius)
    debug(f"Classified capped tube of radius {radius} with {len(points)} neck points")
    return CappedTube(axis, radius, points)


def _check_caps(graph: RadiusGraph, rows: np.ndarray, run: np.ndarray, radius: float,
                params: SurgeryParams, dump: dict):
    """The parts beyond the neck centers have to be almost convex caps of length at most
    (C + 2 neck_window) r"""
    limit = (params.C + 2 * params.neck_window) * radius
    coords = graph.coords
    for end, beyond in ((coords[run[0]] - coords[0], np.arange(run[0])),
                        (coords[-1] - coords[run[-1]], np.arange(run[-1] + 1, len(coords)))):
        if end > limit:
            raise ClassificationError(f"Cap of length {end} exceeds {limit}", witness=float(end),
                                      dump=dump)
        if len(beyond) and len(rows) == len(coords) and rows[beyond, 0].min() < -params.epsilon / radius:
            raise ClassificationError("Cap is not convex", witness=int(beyond[np.argmin(rows[beyond, 0])]),
                                      dump=dump)

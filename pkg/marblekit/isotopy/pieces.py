"""Isotopies of single components: undoing a neck, and deforming discarded components into
marble graphs."""
from logging import debug, info, warning
from typing import List, Optional, Sequence

import numpy as np
from shapely.geometry import Point, Polygon

from ..configuration import SurgeryParams, DEFAULT_SURGERY
from ..error import ClassificationError, InputError
from ..flow.classify import CappedTube, ConvexSphere, TubularLoop, neck_positions
from ..flow.necks import radius_graph, window_quality
from ..flow.state import NeckRegion
from ..flow.surgery import CAP_REACH, capped_piece, cut_sides
from ..geometry.profiles import ProfileSurface, meridian_from_pieces, sphere_profile
from ..glue.complex import Marble
from ..glue.gluing import glue_marbles
from .path import FRAMES, MONOTONE, TRIVIAL, Claim, IsotopyPath, Segment, sample_family, smoothstep
from .radial import (Carrier, blend, carrier_of, join_pieces, marble_radial, marbles_and_strings,
                     radial_of, realize, tip_aligned)

#: Support function samples of convex profiles
SUPPORT_SAMPLES = 1024


def _surface(component):
    return getattr(component, "surface", component)


def neck_zone(neck_position: float, radius: float, gamma: float):
    half = (gamma / 2 + CAP_REACH + 1) * radius
    return neck_position - half, neck_position + half


def cut_radial(carrier: Carrier, source: np.ndarray, necks: Sequence[NeckRegion],
               params: SurgeryParams) -> List[np.ndarray]:
    domain = (source[0, 0], source[-1, 0])
    return [capped_piece(source[:, 0], source[:, 1], carrier.period, left, right)
            for left, right in cut_sides(necks, params.Gamma, domain, carrier.period)]


# --- necks ------------------------------------------------------------------------------------

def glued_neck(component, neck: NeckRegion, r_s: float, params: SurgeryParams = DEFAULT_SURGERY,
               sigma: float = 0.5):
    """The component after surgery on the neck, with the two caps joined again by a string of
    radius r_s along the axis between their tips"""
    surface = _surface(component)
    carrier = carrier_of(surface)
    source = radial_of(surface)
    pieces = cut_radial(carrier, source, [neck], params)
    return realize(carrier, join_pieces(pieces, r_s, sigma, carrier.period))


def neck_undo_isotopy(component, neck: NeckRegion, r_s: float,
                      params: SurgeryParams = DEFAULT_SURGERY, frames: int = FRAMES,
                      sigma: float = 0.5, frame_tol: Optional[float] = None) -> IsotopyPath:
    """Deforms a component with a neck into the post-surgery domain with a string along the
    axis joining the tips of the two standard caps

    The post-surgery caps are rebuilt from the neck exactly as the surgery builds them. Only
    the neck zone moves, so the path is trivial outside the ball of radius 6 Gamma r around the
    neck center; the last frame is :py:func:`glued_neck`.

    Raises:
        ParameterError: r_s does not fit into the cap tips or the string is too short for its
            junctions
    """
    surface = _surface(component)
    carrier = carrier_of(surface)
    source = radial_of(surface)
    target = join_pieces(cut_radial(carrier, source, [neck], params), r_s, sigma, carrier.period)
    zones = [neck_zone(neck.position, neck.radius, params.Gamma)]

    def family(t):
        if t <= 0:
            return surface
        return realize(carrier, blend(source, target, smoothstep(t), zones, carrier.period))

    sampled = sample_family(family, frames, frame_tol)
    ball = (np.asarray(neck.center, dtype=float), 6 * params.Gamma * neck.radius)
    debug(f"Neck undo at {neck.center} with {len(sampled)} frames")
    return IsotopyPath(sampled, Claim(TRIVIAL, (ball,)),
                       [Segment(0, len(sampled) - 1, "neck-undo")])


# --- convex components ------------------------------------------------------------------------

def _support(points: np.ndarray, angles: np.ndarray) -> np.ndarray:
    directions = np.column_stack([np.cos(angles), np.sin(angles)])
    return (points @ directions.T).max(axis=0)


def _boundary_from_support(support: np.ndarray, angles: np.ndarray) -> np.ndarray:
    "Upper half boundary of a convex body from its support function, ordered by increasing x"
    slope = np.gradient(support, angles)
    cos, sin = np.cos(angles), np.sin(angles)
    points = np.column_stack([support * cos - slope * sin, support * sin + slope * cos])
    points[0, 1] = points[-1, 1] = 0.0
    return points


def convex_to_marble(component, r_m: float, center=None, frames: int = FRAMES,
                     frame_tol: Optional[float] = None) -> IsotopyPath:
    """The monotone convex isotopy t B + (1 - t) K from a convex surface of revolution K to a
    marble B on its axis, by interpolation of support functions

    Args:
        component: a convex profile surface or a flow component carrying one
        r_m: marble radius
        center: world position of the marble center; defaults to the centroid of K
    Raises:
        InputError: K is no surface of revolution, or the marble does not lie inside K
    """
    surface = _surface(component)
    if not isinstance(surface, ProfileSurface) or surface.end_caps != "capped":
        raise InputError("Convex components are deformed as closed surfaces of revolution",
                         witness=repr(surface))
    meridian = np.array(surface.meridian)
    section = Polygon(np.vstack([meridian, meridian[::-1][1:-1] * [1.0, -1.0]]))
    if center is None:
        center_x = float(section.centroid.x)
    else:
        local = surface.to_local(np.atleast_2d(np.asarray(center, dtype=float)))[0]
        if abs(local[1]) > 1e-9 * max(1.0, r_m):
            raise InputError("The marble center has to lie on the axis", witness=list(center))
        center_x = float(local[0])
    if not section.contains(Point(center_x, 0.0).buffer(r_m, quad_segs=64)):
        raise InputError(f"A marble of radius {r_m} at {center_x} does not lie inside the domain",
                         witness=center_x)
    points = np.vstack([meridian, meridian * [1.0, -1.0]])
    angles = np.linspace(np.pi, 0.0, SUPPORT_SAMPLES)
    h_convex = _support(points, angles)
    h_marble = center_x * np.cos(angles) + r_m
    spacing = min(np.linalg.norm(np.diff(meridian, axis=0), axis=1).mean(), r_m / 32)
    marble = ProfileSurface(sphere_profile(r_m, surface.n, center_x, spacing).meridian, surface.n,
                            rotation=surface.rotation, translation=surface.translation)

    def family(t):
        if t <= 0:
            return surface
        if t >= 1:
            return marble
        eta = smoothstep(t)
        boundary = _boundary_from_support((1 - eta) * h_convex + eta * h_marble, angles)
        return surface.with_meridian(meridian_from_pieces([boundary], spacing), "capped")

    sampled = sample_family(family, frames, frame_tol)
    path = IsotopyPath(sampled, Claim(MONOTONE), [Segment(0, len(sampled) - 1, "convex-to-marble")])
    path.result = [Marble(surface.to_world(np.array([[center_x, 0.0]]))[0], float(r_m))]
    info(f"Convex component to marble of radius {r_m} in {len(sampled)} frames")
    return path


# --- tubes and loops --------------------------------------------------------------------------

def _neck_regions(carrier: Carrier, source: np.ndarray, axis_curve, radius: float,
                  params: SurgeryParams) -> List[NeckRegion]:
    """Necks at the neck point positions of a tube, verified to be epsilon-necks

    Raises:
        ClassificationError: a neck point is no epsilon-neck center
    """
    positions = neck_positions(axis_curve, params.neck_spacing * radius)
    if isinstance(carrier.surface, ProfileSurface):
        positions = positions + source[0, 0]
    graph = radius_graph(carrier.surface)
    necks = []
    for position in positions:
        index = int(np.argmin(np.abs(graph.coords - position)))
        quality = window_quality(graph, index, params.neck_window)
        if not quality <= params.epsilon:
            raise ClassificationError(f"Neck point at {position} is no epsilon-neck center",
                                      witness=float(position))
        necks.append(NeckRegion(-1, carrier.point(position)[0], float(graph.radii[index]),
                                np.zeros(3), params.neck_window * graph.radii[index], quality,
                                float(graph.coords[index])))
    return necks


def _piece_center(piece: np.ndarray) -> float:
    return float((piece[0, 0] + piece[-1, 0]) / 2)


def _to_marbles(component, classification, params: SurgeryParams, r_m: Optional[float],
                r_s: Optional[float], frames: int, sigma: float, frame_tol: Optional[float],
                closed: bool) -> IsotopyPath:
    surface = _surface(component)
    carrier = carrier_of(surface)
    if (carrier.period is not None) != closed:
        raise InputError("The axis of the component does not match its classification",
                         witness=repr(surface))
    source = radial_of(surface)
    radius = classification.radius
    r_m = r_m or radius / 2
    r_s = r_s or r_m / 4
    axis_curve = classification.core if closed else classification.axis
    necks = _neck_regions(carrier, source, axis_curve, radius, params)
    flags = ()
    if not necks and not closed:
        warning(f"No neck points on a capped tube of radius {radius}; it becomes a single marble")
        flags = ("no-neck-points",)
    pieces = cut_radial(carrier, source, necks, params) if necks else [source]
    cut = join_pieces(pieces, r_s, sigma, carrier.period)
    zones = [neck_zone(neck.position, neck.radius, params.Gamma) for neck in necks]
    balls = tuple((neck.center, 6 * params.Gamma * neck.radius) for neck in necks)
    centers = [_piece_center(piece) for piece in pieces]
    balls_targets = [marble_radial(center, r_m) for center in centers]

    def cutting(t):
        if t <= 0:
            return surface
        return realize(carrier, blend(source, cut, smoothstep(t), zones, carrier.period))

    def rounding(t):
        eta = smoothstep(t)
        moved = [tip_aligned(piece, target, eta) for piece, target in zip(pieces, balls_targets)]
        return realize(carrier, join_pieces(moved, r_s, sigma, carrier.period))

    first = sample_family(cutting, frames, frame_tol) if necks else []
    second = sample_family(rounding, frames, frame_tol)
    sampled = first[:-1] + second if first else second
    segments = []
    if first:
        segments.append(Segment(0, len(first) - 1, "neck-cuts", flags))
    segments.append(Segment(max(0, len(first) - 1), len(sampled) - 1, "pieces-to-marbles", flags))
    times = np.linspace(0.0, 1.0, len(sampled))
    path = IsotopyPath([frame._replace(t=float(t)) for frame, t in zip(sampled, times)],
                       Claim(MONOTONE, balls), segments)
    marbles, curves = marbles_and_strings(carrier, centers, r_m)
    path.result = [glue_marbles(marbles, curves, r_s, sigma, surface.n)]
    return path


def tube_to_marble_tree(component, classification: CappedTube,
                        params: SurgeryParams = DEFAULT_SURGERY, r_m: Optional[float] = None,
                        r_s: Optional[float] = None, frames: int = FRAMES, sigma: float = 0.5,
                        frame_tol: Optional[float] = None) -> IsotopyPath:
    """Deforms a capped epsilon-tube into a marble tree along its axis

    Surgery is performed at the neck points of the tube and undone by strings of radius r_s;
    then every capped piece moves onto a marble of radius r_m at its center. The path is
    monotone outside the balls of radius 6 Gamma r around the neck points. A tube shorter than
    the neck spacing has no neck points and becomes a single marble.

    Raises:
        ClassificationError: a neck point is no epsilon-neck center
    """
    path = _to_marbles(component, classification, params, r_m, r_s, frames, sigma, frame_tol, False)
    info(f"Capped tube to a marble tree of {len(path.result[0].marbles)} marbles")
    return path


def loop_to_marble_circuit(component, classification: TubularLoop,
                           params: SurgeryParams = DEFAULT_SURGERY, r_m: Optional[float] = None,
                           r_s: Optional[float] = None, frames: int = FRAMES, sigma: float = 0.5,
                           frame_tol: Optional[float] = None) -> IsotopyPath:
    """Deforms an epsilon-tubular loop into a marble circuit around its core

    Loops with fewer than two neck points are shrunk radially to the thin torus around their
    core instead; the path carries the flag ``few-neck-points`` and its `core` attribute.

    Raises:
        ClassificationError: a neck point is no epsilon-neck center
    """
    surface = _surface(component)
    if len(classification.neck_points) < 2:
        warning("Loop with fewer than two neck points is handled as a thin torus")
        carrier = carrier_of(surface)
        source = radial_of(surface)
        target = np.column_stack([source[:, 0], np.full(len(source), source[:, 1].min())])

        def shrinking(t):
            return realize(carrier, blend(source, target, smoothstep(t))) if t > 0 else surface

        sampled = sample_family(shrinking, frames, frame_tol)
        path = IsotopyPath(sampled, Claim(MONOTONE),
                           [Segment(0, len(sampled) - 1, "loop-to-thin-torus", ("few-neck-points",))])
        path.core = surface.skeleton
        return path
    path = _to_marbles(component, classification, params, r_m, r_s, frames, sigma, frame_tol, True)
    info(f"Loop to a marble circuit of {len(path.result[0].marbles)} marbles")
    return path


def piece_isotopy(component, classification, params: SurgeryParams = DEFAULT_SURGERY,
                  r_m: Optional[float] = None, r_s: Optional[float] = None,
                  frames: int = FRAMES, frame_tol: Optional[float] = None) -> IsotopyPath:
    """The isotopy from a discarded component to a marble graph, by its classification; with
    frame_tol, frames are inserted until consecutive ones are that close"""
    if isinstance(classification, ConvexSphere):
        return convex_to_marble(component, r_m or classification.inradius / 2, frames=frames,
                                frame_tol=frame_tol)
    if isinstance(classification, CappedTube):
        return tube_to_marble_tree(component, classification, params, r_m, r_s, frames,
                                   frame_tol=frame_tol)
    if isinstance(classification, TubularLoop):
        return loop_to_marble_circuit(component, classification, params, r_m, r_s, frames,
                                      frame_tol=frame_tol)
    raise InputError(f"No isotopy for {type(classification).__name__}")

"""Marble circuits and thin tori.

A marble circuit is reduced to a thin torus in three stages. Side trees are absorbed leaf by
leaf: the leaf marble shrinks onto its string, is swapped for a standard cap and the capped
string retracts into its neighbour. Then the two holes of every marble on the cycle are pushed
apart until they are antipodal, which turns the circuit into a tube around a closed skeleton
through the marble centers. Finally the radius of that tube is blended to a constant."""
from logging import debug, info
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..error import EmbeddingError, InputError
from ..geometry.curves import SkeletonCurve, curve_from_points
from ..geometry.tubes import TubeSurface
from ..geometry.vectors import any_perpendicular, normalize, rotation_about
from ..glue.complex import Marble, MarbleComplex
from ..glue.gluing import glue_marbles
from ..glue.junction import make_junction
from ..glue.marbles import classify_marble_graph
from .path import FRAMES, UNCLAIMED, Claim, Frame, IsotopyPath, Segment, sample_family, smoothstep

#: Radius a leaf marble shrinks to before it is swapped for a cap, in string radii
LEAF_RADIUS = 1.5
#: Length over which a moved hole bends its string back onto the old course, in marble radii
BEND_LENGTH = 4.0


class _Layout:
    "Marbles and the free parts of the strings, from marble surface to marble surface"

    def __init__(self, marbles: Sequence[Marble], curves: Sequence[np.ndarray], radius: float,
                 sigma: float, n: int, h_s: float):
        self.marbles = list(marbles)
        self.curves = [np.asarray(curve, dtype=float) for curve in curves]
        self.radius = radius
        self.sigma = sigma
        self.n = n
        self.h_s = h_s

    @classmethod
    def of(cls, complex_: MarbleComplex) -> "_Layout":
        curves = []
        for string in complex_.strings:
            samples = string.skeleton.samples
            keep = np.ones(len(samples), dtype=bool)
            for marble_index in string.ends:
                if marble_index is not None:
                    marble = complex_.marbles[marble_index]
                    keep &= np.linalg.norm(samples - marble.center, axis=1) > marble.radius * (1 + 1e-6)
            points = [samples[keep]]
            for end, marble_index in enumerate(string.ends):
                if marble_index is None:
                    continue
                marble = complex_.marbles[marble_index]
                contact = marble.center + marble.radius * string.junctions[end].axis
                points.insert(0 if end == 0 else len(points), contact[None, :])
            curves.append(np.vstack(points))
        radius = min(string.radius for string in complex_.strings)
        sigma = complex_.strings[0].junctions[0].sigma if complex_.strings[0].junctions[0] is not None \
            else 0.5
        h_s = min(string.skeleton.h_s for string in complex_.strings)
        return cls(complex_.marbles, curves, radius, sigma, complex_.n, h_s)

    def replaced(self, marbles=None, curves=None) -> "_Layout":
        return _Layout(self.marbles if marbles is None else marbles,
                       self.curves if curves is None else curves,
                       self.radius, self.sigma, self.n, self.h_s)

    def glued(self) -> MarbleComplex:
        curves = [curve_from_points(points, False, self.h_s) for points in self.curves]
        return glue_marbles(self.marbles, curves, self.radius, self.sigma, self.n)

    def ends(self, index: int, tol: float = 1e-6) -> Tuple[Optional[int], Optional[int]]:
        "Marbles touched by the two ends of a string"
        result = []
        for point in (self.curves[index][0], self.curves[index][-1]):
            touching = [number for number, marble in enumerate(self.marbles)
                        if abs(np.linalg.norm(point - marble.center) - marble.radius) <= tol]
            result.append(touching[0] if touching else None)
        return tuple(result)

    def degree(self, marble: int) -> int:
        return sum(self.ends(index).count(marble) for index in range(len(self.curves)))


def _oriented(layout: _Layout, index: int, marble: int) -> np.ndarray:
    "String points starting at the given marble"
    curve = layout.curves[index]
    return curve if layout.ends(index)[0] == marble else curve[::-1]


def _arclength(points: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(points, axis=0), axis=1))])


def _truncated(points: np.ndarray, length: float) -> np.ndarray:
    "The initial piece of a polyline of the given length"
    arc = _arclength(points)
    targets = np.linspace(0.0, length, max(8, int(np.count_nonzero(arc < length)) + 1))
    return np.column_stack([np.interp(targets, arc, points[:, axis]) for axis in range(3)])


# --- leaves -----------------------------------------------------------------------------------

def _absorb_leaf(layout: _Layout, leaf: Optional[int], frames: int, frame_tol) -> Tuple[List[Frame], _Layout]:
    """Frames absorbing the leaf marble, or the loose end, into the rest of the graph"""
    index = next(number for number in range(len(layout.curves)) if leaf in layout.ends(number))
    result: List[Frame] = []
    if leaf is not None:
        marble = layout.marbles[leaf]
        points = _oriented(layout, index, leaf)
        axis = normalize(points[0] - marble.center)
        contact = points[0]
        small = LEAF_RADIUS * layout.radius

        def shrinking(t):
            size = (1 - smoothstep(t)) * marble.radius + smoothstep(t) * small
            marbles = list(layout.marbles)
            marbles[leaf] = Marble(contact - size * axis, size)
            return layout.replaced(marbles=marbles).glued()

        result.extend(sample_family(shrinking, frames, frame_tol)[1:])
        marbles = [item for number, item in enumerate(layout.marbles) if number != leaf]
        layout = layout.replaced(marbles=marbles)
        result.append(Frame(0.0, (layout.glued(),)))
    other = next((end for end in layout.ends(index) if end is not None), None)
    if other is None:
        raise InputError("A string with two loose ends is no part of a circuit", witness=index)
    anchor = layout.marbles[other]
    points = _oriented(layout, index, other)
    length = _arclength(points)[-1]
    junction = make_junction(anchor.center, normalize(points[0] - anchor.center), anchor.radius,
                             layout.radius, layout.sigma)
    shortest = junction.end_height - anchor.radius + 2 * layout.radius
    if shortest < length:
        def retracting(t):
            curves = list(layout.curves)
            curves[index] = _truncated(points, (1 - smoothstep(t)) * length + smoothstep(t) * shortest)
            return layout.replaced(curves=curves).glued()

        result.extend(sample_family(retracting, frames, frame_tol)[1:])
    layout = layout.replaced(curves=[curve for number, curve in enumerate(layout.curves)
                                     if number != index])
    result.append(Frame(0.0, (layout.glued(),)))
    debug(f"Absorbed leaf {leaf} into marble {other}")
    return result, layout


def _leaves(layout: _Layout) -> List[Optional[int]]:
    loose = [None for index in range(len(layout.curves)) if None in layout.ends(index)]
    return [marble for marble in range(len(layout.marbles)) if layout.degree(marble) == 1] + loose


# --- antipodal holes --------------------------------------------------------------------------

def _hole_targets(layout: _Layout) -> dict:
    "For every marble with non-antipodal holes: (string, end) -> (old direction, new direction)"
    targets = {}
    for number, marble in enumerate(layout.marbles):
        holes = []
        for index in range(len(layout.curves)):
            for end, touched in enumerate(layout.ends(index)):
                if touched == number:
                    point = layout.curves[index][0 if end == 0 else -1]
                    holes.append(((index, end), normalize(point - marble.center)))
        if len(holes) != 2:
            raise InputError("Every marble of a reduced circuit meets two strings", witness=number)
        (first_key, first), (second_key, second) = holes
        if np.dot(first, second) <= -1 + 1e-9:
            continue
        apart = first - second
        target = normalize(apart) if np.linalg.norm(apart) > 1e-9 else any_perpendicular(first)
        targets[first_key] = (first, target)
        targets[second_key] = (second, -target)
    return targets


def _rotated_start(points: np.ndarray, center: np.ndarray, radius: float, old: np.ndarray,
                   new: np.ndarray, eta: float) -> np.ndarray:
    """Rotates the start of a string about the marble center so that it leaves through the
    moved hole; the rotation fades out along the string"""
    normal = np.cross(old, new)
    angle = float(np.arctan2(np.linalg.norm(normal), np.dot(old, new)))
    if angle < 1e-12:
        return points
    normal = normal / np.linalg.norm(normal)
    arc = _arclength(points)
    fade_end = min(BEND_LENGTH * radius, arc[-1] / 3)
    ramp = np.clip((arc - radius) / max(fade_end - radius, 1e-12), 0.0, 1.0)
    weight = 1 - ramp * ramp * (3 - 2 * ramp)
    moved = np.array(points)
    for row in np.flatnonzero(weight > 0):
        rotation = rotation_about(normal, eta * angle * weight[row])
        moved[row] = center + rotation @ (points[row] - center)
    return moved


def _rearranged(layout: _Layout, targets: dict, eta: float) -> _Layout:
    curves = list(layout.curves)
    for (index, end), (old, new) in targets.items():
        marble = layout.marbles[layout.ends(index)[end]]
        points = curves[index] if end == 0 else curves[index][::-1]
        points = _rotated_start(points, marble.center, marble.radius, old, new, eta)
        curves[index] = points if end == 0 else points[::-1]
    return layout.replaced(curves=curves)


# --- public -----------------------------------------------------------------------------------

def circuit_to_thin_torus(circuit: MarbleComplex, r_target: float, frames: int = FRAMES,
                          frame_tol: Optional[float] = None) -> IsotopyPath:
    """Deforms a marble circuit into the thin torus of radius r_target around a closed core

    Returns:
        The path; its `core` attribute is the core curve and its last frame the torus
    Raises:
        InputError: the complex is no circuit
    """
    kind = classify_marble_graph(circuit)
    if kind.kind != "circuit":
        raise InputError(f"Expected a marble circuit, got a {kind.kind} graph", witness=kind.cycle_rank)
    layout = _Layout.of(circuit)
    collected = [Frame(0.0, (circuit,))]
    segments = []
    leaves = _leaves(layout)
    while leaves:
        start = len(collected) - 1
        absorbed, layout = _absorb_leaf(layout, leaves[0], max(2, frames // 4), frame_tol)
        collected.extend(absorbed)
        segments.append(Segment(start, len(collected) - 1, "leaf-absorption"))
        leaves = _leaves(layout)
    targets = _hole_targets(layout)
    if targets:
        start = len(collected) - 1
        moved = sample_family(lambda t: _rearranged(layout, targets, smoothstep(t)).glued(), frames,
                              frame_tol)
        collected.extend(moved[1:])
        layout = _rearranged(layout, targets, 1.0)
        segments.append(Segment(start, len(collected) - 1, "antipodal-holes"))
    canal = layout.glued().as_tube()
    radial = np.array(canal.radial)
    target = np.column_stack([radial[:, 0], np.full(len(radial), r_target)])
    injectivity = canal.skeleton.normal_injectivity_radius()
    if r_target >= injectivity:
        raise EmbeddingError(f"Target radius {r_target} exceeds the normal injectivity radius "
                             f"{injectivity} of the core", witness=r_target)
    start = len(collected) - 1
    thinning = sample_family(
        lambda t: canal.with_radial(np.column_stack([radial[:, 0], (1 - smoothstep(t)) * radial[:, 1]
                                                     + smoothstep(t) * target[:, 1]])),
        frames, frame_tol)
    collected.extend(thinning)
    segments.append(Segment(start, len(collected) - 1, "thin-torus"))
    times = np.linspace(0.0, 1.0, len(collected))
    path = IsotopyPath([Frame(float(t), frame.domain) for t, frame in zip(times, collected)],
                       Claim(UNCLAIMED), segments)
    path.core = canal.skeleton
    info(f"Circuit of {len(circuit.marbles)} marbles to a thin torus of radius {r_target}")
    return path


def _aligned(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    "The cyclic shift and orientation of `second` closest to `first`"
    best, best_cost = second, np.inf
    for candidate in (second, second[::-1]):
        for shift in range(len(candidate)):
            rolled = np.roll(candidate, -shift, axis=0)
            cost = float(np.sum((rolled - first) ** 2))
            if cost < best_cost:
                best, best_cost = rolled, cost
    return best


def _tube_radius(torus: TubeSurface) -> float:
    radii = torus.radial[:, 1]
    if not torus.closed or np.ptp(radii) > 1e-6 * radii.max():
        raise InputError("Thin tori have constant radius around a closed core", witness=repr(torus))
    return float(radii.mean())


def thin_torus_isotopy(first: TubeSurface, second: TubeSurface, frames: int = FRAMES,
                       frame_tol: Optional[float] = None) -> IsotopyPath:
    """Joins two thin tori along the straight line homotopy of their cores

    The cores are sampled alike and aligned by cyclic shift and orientation; radius and core
    are interpolated linearly.

    Raises:
        InputError: a torus has no closed core or no constant radius
        EmbeddingError: the homotopy leaves the embedded tori; the witness is the parameter
    """
    radii = (_tube_radius(first), _tube_radius(second))
    count = max(len(first.skeleton), len(second.skeleton))

    def samples(curve: SkeletonCurve) -> np.ndarray:
        return np.atleast_2d(curve.point_at(np.linspace(0.0, curve.total_length, count, endpoint=False)))

    start = samples(first.skeleton)
    end = _aligned(start, samples(second.skeleton))

    def family(t):
        if t <= 0:
            return first
        if t >= 1:
            return second
        eta = smoothstep(t)
        radius = (1 - eta) * radii[0] + eta * radii[1]
        try:
            core = curve_from_points((1 - eta) * start + eta * end, True,
                                     min(first.skeleton.h_s, second.skeleton.h_s))
        except EmbeddingError as err:
            raise EmbeddingError(f"The core homotopy is not embedded at t={t}", witness=t) from err
        injectivity = core.normal_injectivity_radius()
        if radius >= injectivity:
            raise EmbeddingError(f"The torus of radius {radius} is not embedded at t={t}, the "
                                 f"normal injectivity radius is {injectivity}", witness=t)
        return TubeSurface(core, radius, first.n)

    sampled = sample_family(family, frames, frame_tol)
    path = IsotopyPath(sampled, Claim(UNCLAIMED), [Segment(0, len(sampled) - 1, "thin-torus-homotopy")])
    path.core = second.skeleton
    return path

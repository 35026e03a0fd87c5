"""Surgery: necks are cut out and both sides closed off by caps.

A neck of radius r centered at axial coordinate c is replaced by two caps whose tips lie at
c - Gamma r/2 and c + Gamma r/2, up to the sample spacing. A cap is the spherical cap tangent
to the radius function at a sample at most CAP_REACH r before its tip; it shares the
rotational curvature of the surface there and is umbilic, so it is two-convex. Where the
radius function is convex near the neck, the cap lies below it and the post-surgery domain lies
inside the pre-surgery one. Outside the balls of radius (Gamma/2 + CAP_REACH) r around the
neck centers nothing changes."""
from logging import info
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..configuration import SurgeryParams, DEFAULT_SURGERY
from ..error import InputError, ParameterError, SurgeryError
from ..geometry.profiles import ProfileSurface, meridian_from_pieces
from ..geometry.tubes import TubeSurface
from .evolution import RESOLVE, curvature_summary
from .state import FlowComponent, FlowState, NeckRegion

#: A cap leaves the radius function at most this many neck radii before its tip
CAP_REACH = 3.0
#: Samples of the arc of a cap
CAP_SAMPLES = 129

# (kind, tip, radius) with kind "cap" or "end"
Side = Tuple[str, float, float]
# (center, radius)
Ball = Tuple[np.ndarray, float]


def _cap_side(coords: np.ndarray, radii: np.ndarray, slopes: np.ndarray, tip: float,
              radius: float, direction: int) -> Tuple[np.ndarray, float]:
    """The cap as (coordinate, radius) pairs in increasing coordinate, and the coordinate where
    it leaves the radius function; `direction` is +1 for a cap closing off to the right and -1
    for one closing off to the left

    Of the admissible samples, the one whose tangent sphere ends closest to `tip` is taken. The
    sphere tangent at (x, u) with slope u' is centered on the axis at x + u u' and has radius
    u (1 + u'^2)^(1/2)."""
    offsets = direction * (tip - coords)
    candidates = np.flatnonzero((offsets > 0) & (offsets <= CAP_REACH * radius) & (radii > 0))
    if not len(candidates):
        raise ParameterError("No sample to attach a cap to", witness=float(tip))
    centers = coords[candidates] + slopes[candidates] * radii[candidates]
    spheres = radii[candidates] * np.sqrt(1 + slopes[candidates] ** 2)
    best = int(np.argmin(np.abs(centers + direction * spheres - tip)))
    base = candidates[best]
    center, sphere = centers[best], spheres[best]
    start = np.arctan2(radii[base], coords[base] - center)
    angles = np.linspace(start, 0.0 if direction > 0 else np.pi, CAP_SAMPLES)
    cap = np.column_stack([center + sphere * np.cos(angles), sphere * np.sin(angles)])
    cap[-1, 1] = 0.0
    return (cap if direction > 0 else cap[::-1]), float(coords[base])


def _tiled(coords: np.ndarray, radii: np.ndarray, period: Optional[float]) -> np.ndarray:
    "(coordinate, radius) pairs over four periods, strictly increasing in the coordinate"
    shifts = [0.0] if period is None else [-period, 0.0, period, 2 * period]
    tiled = np.vstack([np.column_stack([coords + shift, radii]) for shift in shifts])
    tiled = tiled[np.argsort(tiled[:, 0], kind="stable")]
    return tiled[np.concatenate([[True], np.diff(tiled[:, 0]) > 0])]


def capped_piece(coords: np.ndarray, radii: np.ndarray, period: Optional[float], left: Side,
                 right: Side) -> np.ndarray:
    """The (coordinate, radius) polyline of the piece between two sides

    Raises:
        ParameterError: the caps of the two sides would overlap
    """
    tiled = _tiled(coords, radii, period)
    x, u = tiled[:, 0], tiled[:, 1]
    slopes = np.gradient(u, x)
    pieces = []
    low = high = None
    if left[0] == "cap":
        cap, low = _cap_side(x, u, slopes, left[1], left[2], -1)
        pieces.append(cap)
    if right[0] == "cap":
        right_cap, high = _cap_side(x, u, slopes, right[1], right[2], 1)
    if low is not None and high is not None and high <= low:
        raise ParameterError("Caps of neighbouring necks would overlap", witness=[low, high])
    above = x >= left[1] if low is None else x > low
    below = x <= right[1] if high is None else x < high
    pieces.append(tiled[above & below])
    if high is not None:
        pieces.append(right_cap)
    return np.vstack(pieces)


def cut_sides(necks: Sequence[NeckRegion], gamma: float, domain: Tuple[float, float],
           period: Optional[float]) -> List[Tuple[Side, Side]]:
    "Left and right side of every piece between consecutive necks"
    necks = sorted(necks, key=lambda neck: neck.position)
    cuts = [(neck.position - gamma * neck.radius / 2, neck.position + gamma * neck.radius / 2,
             neck.radius) for neck in necks]
    if period is not None:
        pairs = []
        for index, (_, right_tip, radius) in enumerate(cuts):
            next_left, _, next_radius = cuts[(index + 1) % len(cuts)]
            while next_left <= right_tip:
                next_left += period
            pairs.append((("cap", right_tip, radius), ("cap", next_left, next_radius)))
        return pairs
    sides = [("end", domain[0], 0.0)]
    for left_tip, right_tip, radius in cuts:
        sides.append(("cap", left_tip, radius))
        sides.append(("cap", right_tip, radius))
    sides.append(("end", domain[1], 0.0))
    return list(zip(sides[0::2], sides[1::2]))


def _cut_profile(surface: ProfileSurface, necks: Sequence[NeckRegion],
                 params: SurgeryParams) -> List[ProfileSurface]:
    meridian = surface.meridian
    if surface.end_caps == "open":
        raise InputError("Surgery needs a closed surface", witness=repr(surface))
    if np.any(np.diff(meridian[:, 0]) <= 0):
        raise ParameterError("Surgery needs a meridian that is a graph over the axis")
    period = surface.period if surface.end_caps == "periodic" else None
    spacing = min(neck.radius for neck in necks) / RESOLVE
    result = []
    for left, right in cut_sides(necks, params.Gamma, (meridian[0, 0], meridian[-1, 0]), period):
        piece = capped_piece(meridian[:, 0], meridian[:, 1], period, left, right)
        piece = meridian_from_pieces([piece], spacing)
        result.append(ProfileSurface(piece, surface.n, "capped", rotation=surface.rotation,
                                     translation=surface.translation))
    return result


def _cut_tube(surface: TubeSurface, necks: Sequence[NeckRegion],
              params: SurgeryParams) -> List[TubeSurface]:
    if not surface.closed and not all(surface.capped):
        raise InputError("Surgery needs a closed surface", witness=repr(surface))
    radial = surface.radial
    skeleton = surface.skeleton
    period = skeleton.total_length if surface.closed else None
    result = []
    for left, right in cut_sides(necks, params.Gamma, (radial[0, 0], radial[-1, 0]), period):
        piece = capped_piece(radial[:, 0], radial[:, 1], period, left, right)
        start, end = piece[0, 0], piece[-1, 0]
        piece[0, 1] = piece[-1, 1] = 0.0
        curve = skeleton.sub_curve(start, end) if surface.closed else \
            skeleton.sub_curve(max(start, 0.0), min(end, skeleton.total_length))
        scale = curve.total_length / (end - start)
        result.append(TubeSurface(curve, np.column_stack([(piece[:, 0] - start) * scale, piece[:, 1]]),
                                  surface.n))
    return result


def cut_component(component: FlowComponent, necks: Sequence[NeckRegion],
                  params: SurgeryParams = DEFAULT_SURGERY) -> list:
    "The surfaces a component falls apart into when its necks are cut"
    if isinstance(component.surface, ProfileSurface):
        return _cut_profile(component.surface, necks, params)
    return _cut_tube(component.surface, necks, params)


def _meets(neck: NeckRegion, center: np.ndarray, radius: float, params: SurgeryParams) -> bool:
    return np.linalg.norm(neck.center - np.asarray(center)) <= 10 * params.Gamma * neck.radius + radius


def separated_necks(necks: Sequence[NeckRegion], params: SurgeryParams = DEFAULT_SURGERY,
                    recorded: Sequence[Ball] = ()) -> List[NeckRegion]:
    "Greedy subset of necks whose balls of radius 10 Gamma r miss each other and the recorded balls"
    chosen: List[NeckRegion] = []
    for neck in necks:
        if any(_meets(neck, center, radius, params) for center, radius in recorded):
            continue
        if any(_meets(neck, other.center, 10 * params.Gamma * other.radius, params) for other in chosen):
            continue
        chosen.append(neck)
    return chosen


def check_neck_separation(necks: Sequence[NeckRegion], params: SurgeryParams = DEFAULT_SURGERY,
                          recorded: Sequence[Ball] = ()):
    """Raises ParameterError unless the balls of radius 10 Gamma r around the necks are
    pairwise disjoint and disjoint from the recorded balls of earlier surgeries"""
    for index, neck in enumerate(necks):
        for other in necks[index + 1:]:
            if _meets(neck, other.center, 10 * params.Gamma * other.radius, params):
                raise ParameterError("Surgery necks are not separated",
                                     witness=[neck.center.tolist(), other.center.tolist()])
        for center, radius in recorded:
            if _meets(neck, center, radius, params):
                raise ParameterError("A surgery neck meets the ball of an earlier surgery",
                                     witness=[neck.center.tolist(), np.asarray(center).tolist()])


def perform_surgery(state: FlowState, necks: Sequence[NeckRegion],
                    params: SurgeryParams = DEFAULT_SURGERY, tol: float = 1e-9,
                    recorded: Sequence[Ball] = ()) -> FlowState:
    """Replaces every neck by a pair of opposing caps

    Cut components are replaced by their pieces, which get new ids and the cut component as
    parent.

    Args:
        recorded: exceptional balls of earlier surgeries, which the new ones must not meet
    Raises:
        ParameterError: necks are not separated or caps would overlap
        SurgeryError: a piece has a two-convexity margin of at most tol; the dump holds the
            necks and the margins of the pieces
    """
    if not necks:
        return state
    check_neck_separation(necks, params, recorded)
    components = []
    next_id = state.next_id
    for component in state.components:
        own = [neck for neck in necks if neck.component == component.id]
        if not own:
            components.append(component)
            continue
        pieces = cut_component(component, own, params)
        margins = [curvature_summary(surface).margin for surface in pieces]
        if min(margins) <= tol:
            worst = int(np.argmin(margins))
            raise SurgeryError(f"Surgery on component {component.id} leaves a piece with "
                               f"two-convexity margin {margins[worst]}",
                               witness=[neck.center.tolist() for neck in own],
                               dump={"time": state.time, "component": component.id,
                                     "necks": [{"center": neck.center.tolist(),
                                                "radius": neck.radius, "quality": neck.quality}
                                               for neck in own],
                                     "margins": [float(margin) for margin in margins],
                                     "piece": pieces[worst].to_dict()})
        for surface in pieces:
            components.append(FlowComponent(next_id, surface, component.id))
            next_id += 1
        info(f"Surgery on component {component.id} at t={state.time}: {len(own)} necks, "
             f"{len(pieces)} pieces")
    return FlowState(state.time, tuple(components), next_id)

"""Domains read as a radius function over an axis, and the moves the isotopies are built from.

Surfaces of revolution live over their straight axis, tubes over their skeleton. A radius
function is a polyline of (s, rho) pairs with strictly increasing s; it is capped when it
vanishes at both ends and periodic when it covers a closed axis. Pieces of one domain that lie
on a common axis can be joined by strings of constant radius, which run into osculating
spheres at the tips of the pieces through the rotationally symmetric junction."""
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..error import InputError, ParameterError
from ..geometry.curves import SkeletonCurve, curve_from_points
from ..geometry.profiles import ProfileSurface
from ..geometry.tubes import TubeSurface
from ..geometry.vectors import normalize
from ..glue.caps import cap_samples
from ..glue.complex import Marble
from ..glue.junction import fillet_meridian

#: Samples of a marble arc
ARC_SAMPLES = 129
#: Fixed point iterations that fit the osculating sphere at a tip
TIP_ITERATIONS = 3
#: Fraction of a junction over which its start is faded into the piece
FADE = 0.3


class Carrier(NamedTuple):
    "The axis of a domain"
    #: The surface the axis is taken from
    surface: object
    #: Length of a closed axis, None for open ones
    period: Optional[float]

    @property
    def n(self) -> int:
        return self.surface.n

    def point(self, s) -> np.ndarray:
        "World position of the axis at coordinate s"
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if isinstance(self.surface, ProfileSurface):
            return self.surface.to_world(np.column_stack([s, np.zeros(len(s))]))
        return np.atleast_2d(self.surface.skeleton.point_at(s))


def carrier_of(surface) -> Carrier:
    if isinstance(surface, ProfileSurface):
        period = surface.period if surface.end_caps == "periodic" else None
        return Carrier(surface, period)
    if isinstance(surface, TubeSurface):
        return Carrier(surface, surface.skeleton.total_length if surface.closed else None)
    raise InputError(f"{type(surface).__name__} has no axis", witness=repr(surface))


def radial_of(surface) -> np.ndarray:
    "The radius function of a profile (its meridian) or tube (its radial samples)"
    if isinstance(surface, ProfileSurface):
        return np.array(surface.meridian)
    return np.array(surface.radial)


def is_capped(radial: np.ndarray) -> bool:
    return radial[0, 1] == 0 and radial[-1, 1] == 0


def realize(carrier: Carrier, radial: np.ndarray):
    """The surface with the given radius function over the carrier's axis

    Raises:
        InputError: a tube radius function leaves the skeleton of an open tube
    """
    base = carrier.surface
    if isinstance(base, ProfileSurface):
        if is_capped(radial):
            return ProfileSurface(radial, base.n, "capped", rotation=base.rotation,
                                  translation=base.translation)
        return ProfileSurface(radial, base.n, base.end_caps, period=base.period,
                              rotation=base.rotation, translation=base.translation)
    skeleton = base.skeleton
    if not is_capped(radial):
        period = carrier.period
        wrapped = np.column_stack([np.mod(radial[:, 0], period), radial[:, 1]])
        wrapped = wrapped[np.argsort(wrapped[:, 0], kind="stable")]
        keep = np.concatenate([[True], np.diff(wrapped[:, 0]) > 1e-12 * period])
        return TubeSurface(skeleton, wrapped[keep], base.n)
    start, end = float(radial[0, 0]), float(radial[-1, 0])
    if not skeleton.closed and (start < -1e-9 or end > skeleton.total_length * (1 + 1e-9)):
        raise InputError("Radius function leaves the skeleton", witness=[start, end])
    if skeleton.closed or start > 1e-12 or end < skeleton.total_length * (1 - 1e-12):
        curve = skeleton.sub_curve(start, end)
        scale = curve.total_length / (end - start)
        return TubeSurface(curve, np.column_stack([(radial[:, 0] - start) * scale, radial[:, 1]]),
                           base.n)
    return TubeSurface(skeleton, radial, base.n)


def interpolate(radial: np.ndarray, s: np.ndarray, period: Optional[float] = None) -> np.ndarray:
    "Radius at the coordinates s; zero outside a capped function"
    if period is not None and not is_capped(radial):
        return np.interp(s, radial[:, 0], radial[:, 1], period=period)
    return np.interp(s, radial[:, 0], radial[:, 1], left=0.0, right=0.0)


# --- strings ----------------------------------------------------------------------------------

class TipJoint(NamedTuple):
    "The junction of a string into the right tip of a piece"
    #: Junction points (s, rho) from the piece to the string
    junction: np.ndarray
    #: Coordinate where the piece is cut off
    cut: float


def _right_joint(piece: np.ndarray, radius: float, sigma: float) -> TipJoint:
    tip = piece[-1, 0]
    near = piece[:-1][piece[:-1, 0] > (piece[0, 0] + tip) / 2]
    distance = tip - near[:, 0]
    rho = near[:, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        spheres = (rho ** 2 + distance ** 2) / (2 * distance)
    target = 2 * radius
    body = None
    for _ in range(TIP_ITERATIONS):
        index = int(np.argmin(np.abs(rho - target)))
        body = float(spheres[index])
        if not radius < body:
            raise ParameterError(f"String radius {radius} does not fit into a tip of radius {body}",
                                 witness=float(tip))
        target = body * (radius / body) ** (sigma / (1 + sigma))
    fillet = fillet_meridian(body, radius, sigma)
    center = tip - body
    junction = np.column_stack([center + fillet[:, 0], fillet[:, 1]])
    cut = float(junction[0, 0])
    mismatch = float(np.interp(cut, piece[:, 0], piece[:, 1])) - junction[0, 1]
    fade = np.clip(np.linspace(0.0, 1.0, len(junction)) / FADE, 0.0, 1.0)
    junction[:, 1] += mismatch * (1 - fade * fade * (3 - 2 * fade))
    return TipJoint(junction, cut)


def _left_joint(piece: np.ndarray, radius: float, sigma: float) -> TipJoint:
    mirrored = piece[::-1] * [-1.0, 1.0]
    joint = _right_joint(mirrored, radius, sigma)
    return TipJoint(joint.junction[::-1] * [-1.0, 1.0], -joint.cut)


def join_pieces(pieces: Sequence[np.ndarray], radius: float, sigma: float = 0.5,
                period: Optional[float] = None, spacing: Optional[float] = None) -> np.ndarray:
    """Joins capped pieces, sorted along the axis, by strings of the given radius between
    consecutive tips; on a closed axis the last piece is joined to the first one as well.

    Piece samples away from the tips are kept unchanged.

    Raises:
        ParameterError: a string is too short for its junctions or too thick for a tip
    """
    spacing = spacing or radius / 4
    pieces = [np.asarray(piece, dtype=float) for piece in pieces]
    count = len(pieces)
    if count == 1 and period is None:
        return pieces[0]
    rights = [_right_joint(piece, radius, sigma) for piece in pieces]
    lefts = [_left_joint(piece, radius, sigma) for piece in pieces]
    parts = []
    for index, piece in enumerate(pieces):
        has_left = period is not None or index > 0
        has_right = period is not None or index < count - 1
        low = lefts[index].cut if has_left else -np.inf
        high = rights[index].cut if has_right else np.inf
        body = piece[(piece[:, 0] > low) & (piece[:, 0] < high)]
        if has_left:
            body = np.vstack([lefts[index].junction, body])
        if has_right:
            body = np.vstack([body, rights[index].junction])
        parts.append(body)
        if not has_right:
            continue
        following = (index + 1) % count
        shift = period if following <= index else 0.0
        start = rights[index].junction[-1, 0]
        end = lefts[following].junction[0, 0] + shift
        if end - start <= 0:
            raise ParameterError("String too short for its junctions", witness=[start, end])
        steps = max(2, int(np.ceil((end - start) / spacing)))
        s = np.linspace(start, end, steps + 1)[1:-1]
        parts.append(np.column_stack([s, np.full(len(s), radius)]))
    joined = np.vstack(parts)
    if period is not None:
        joined[:, 0] = np.mod(joined[:, 0], period)
        joined = joined[np.argsort(joined[:, 0], kind="stable")]
    keep = np.concatenate([[True], np.diff(joined[:, 0]) > 0])
    return joined[keep]


# --- deformations -----------------------------------------------------------------------------

def blend(source: np.ndarray, target: np.ndarray, eta: float,
          zones: Sequence[Tuple[float, float]] = (), period: Optional[float] = None) -> np.ndarray:
    """(1 - eta) source + eta target pointwise over the axis

    With zones, only coordinates inside them move; outside, the source samples are returned
    unchanged."""
    if zones:
        inside = np.zeros(len(source), dtype=bool)
        extra = []
        for low, high in zones:
            inside |= _in_zone(source[:, 0], low, high, period)
            extra.append(target[_in_zone(target[:, 0], low, high, period), 0])
        grid = np.union1d(source[inside, 0], np.concatenate(extra))
        moved = np.column_stack([grid, (1 - eta) * interpolate(source, grid, period)
                                 + eta * interpolate(target, grid, period)])
        result = np.vstack([source[~inside], moved])
    else:
        grid = np.union1d(source[:, 0], target[:, 0])
        result = np.column_stack([grid, (1 - eta) * interpolate(source, grid, period)
                                  + eta * interpolate(target, grid, period)])
    result = result[np.argsort(result[:, 0], kind="stable")]
    keep = np.concatenate([[True], np.diff(result[:, 0]) > 0])
    return result[keep]


def _in_zone(s: np.ndarray, low: float, high: float, period: Optional[float]) -> np.ndarray:
    if period is None:
        return (s >= low) & (s <= high)
    return np.mod(s - low, period) <= high - low


def tip_aligned(source: np.ndarray, target: np.ndarray, eta: float) -> np.ndarray:
    """Moves a capped piece onto another one: tips travel linearly and radii are blended at
    equal relative position between the tips"""
    def relative(piece):
        return (piece[:, 0] - piece[0, 0]) / (piece[-1, 0] - piece[0, 0])

    tau = np.union1d(relative(source), relative(target))
    along_source = source[0, 0] + tau * (source[-1, 0] - source[0, 0])
    along_target = target[0, 0] + tau * (target[-1, 0] - target[0, 0])
    s = (1 - eta) * along_source + eta * along_target
    rho = (1 - eta) * np.interp(along_source, source[:, 0], source[:, 1]) + \
        eta * np.interp(along_target, target[:, 0], target[:, 1])
    rho[0] = rho[-1] = 0.0
    return np.column_stack([s, rho])


def marble_radial(center: float, radius: float, count: int = ARC_SAMPLES) -> np.ndarray:
    "A round ball over the axis, sampled densely at its poles"
    xi = cap_samples((count + 1) // 2)
    angles = np.concatenate([np.pi / 2 * (1 + xi[::-1]), (np.pi / 2 * (1 - xi))[1:]])
    return np.column_stack([center + radius * np.cos(angles), radius * np.sin(angles)])


def marbles_and_strings(carrier: Carrier, centers: Sequence[float], radius
                        ) -> Tuple[List[Marble], List[SkeletonCurve]]:
    """Marbles centered at axis coordinates, and the curves between consecutive ones
    (cyclically on closed axes) along the axis; `radius` is one radius or one per marble"""
    centers = np.asarray(centers, dtype=float)
    radii = np.broadcast_to(np.asarray(radius, dtype=float), centers.shape)
    world = carrier.point(centers)
    marbles = [Marble(point, float(size)) for point, size in zip(world, radii)]
    pairs = list(zip(range(len(centers) - 1), range(1, len(centers))))
    if carrier.period is not None and len(centers) > 1:
        pairs.append((len(centers) - 1, 0))
    curves = []
    for first, second in pairs:
        low = centers[first] + radii[first]
        high = centers[second] - radii[second]
        if high <= low:
            high += carrier.period
        spacing = min(radii[first], radii[second]) / 4
        inner = carrier.point(np.linspace(low, high, max(8, int(np.ceil((high - low) / spacing)))))[1:-1]
        start = marbles[first].center + radii[first] * normalize(inner[0] - marbles[first].center)
        end = marbles[second].center + radii[second] * normalize(inner[-1] - marbles[second].center)
        curves.append(curve_from_points(np.vstack([start, inner, end]), False))
    return marbles, curves

"""Gauss codes of knot diagrams.

A Gauss code lists the crossings met while walking once along a knot diagram. Every crossing
is met twice, once on the over strand and once on the under strand, and carries a sign: +1 for
a right handed crossing, -1 for a left handed one.

Codes are read off regular projections of closed skeleton curves; the projection direction is
perturbed until no crossing is degenerate."""
from logging import debug, warning
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from shapely import LineString, STRtree

from ..error import InputError, ProjectionError
from ..geometry.curves import SkeletonCurve
from ..geometry.vectors import any_perpendicular

#: Projection directions tried before giving up
PROJECTION_ATTEMPTS = 20
#: Size of the random change of the projection direction per attempt
PERTURBATION = 0.02
#: Crossings closer than this fraction of a segment to a segment end are degenerate
ENDPOINT_EPSILON = 1e-6
#: Crossings at which the strands are closer to parallel than this sine are degenerate
MIN_CROSSING_SINE = 1e-3
#: Relative separation below which two crossings or two depths count as equal
SEPARATION_EPSILON = 1e-7


class Crossing(NamedTuple):
    "One passage through a crossing"

    label: int
    #: True on the over strand
    over: bool
    #: +1 for a right handed crossing, -1 for a left handed one
    sign: int

    def __str__(self) -> str:
        return f"{'O' if self.over else 'U'}{self.label}{'+' if self.sign > 0 else '-'}"


class GaussCode(NamedTuple):
    "The sequence of crossing passages along a knot diagram"

    crossings: Tuple[Crossing, ...] = ()

    def __str__(self) -> str:
        return " ".join(str(crossing) for crossing in self.crossings)

    @property
    def labels(self) -> List[int]:
        "The crossing labels in order of first appearance"
        return list(dict.fromkeys(crossing.label for crossing in self.crossings))

    @property
    def crossing_count(self) -> int:
        return len(self.crossings) // 2

    @property
    def writhe(self) -> int:
        "Sum of the crossing signs"
        return sum(crossing.sign for crossing in self.crossings if crossing.over)

    def positions(self, label: int) -> Tuple[int, int]:
        "Indices of the two passages through a crossing"
        first, second = (index for index, crossing in enumerate(self.crossings)
                         if crossing.label == label)
        return first, second

    def check(self):
        """Raises InputError unless every label appears exactly twice, once over and once
        under, with the same sign both times"""
        passages = {}
        for index, crossing in enumerate(self.crossings):
            if crossing.sign not in (-1, 1):
                raise InputError(f"Crossing sign has to be +1 or -1, got {crossing.sign}", witness=index)
            passages.setdefault(crossing.label, []).append(crossing)
        for label, found in passages.items():
            if len(found) != 2:
                raise InputError(f"Crossing {label} appears {len(found)} times", witness=label)
            if found[0].over == found[1].over:
                raise InputError(f"Crossing {label} needs one over and one under passage", witness=label)
            if found[0].sign != found[1].sign:
                raise InputError(f"Crossing {label} has inconsistent signs", witness=label)

    def is_realizable(self) -> bool:
        """Evenness test for planar diagrams: between the two passages through any crossing
        lie an even number of passages"""
        self.check()
        return all((second - first) % 2 == 1
                   for first, second in map(self.positions, self.labels))


def parse_gauss_code(text: str) -> GaussCode:
    """Reads codes like ``"O1+ U2+ O3+ U1+ O2+ U3+"``

    Raises:
        InputError: a token is not of the form (O|U)<label>(+|-), or the code is malformed
    """
    crossings = []
    for token in text.replace(",", " ").split():
        if len(token) < 3 or token[0] not in "OoUu" or token[-1] not in "+-" \
                or not token[1:-1].isdigit():
            raise InputError(f"Cannot read Gauss code token '{token}'", witness=token)
        crossings.append(Crossing(int(token[1:-1]), token[0] in "Oo", 1 if token[-1] == "+" else -1))
    code = GaussCode(tuple(crossings))
    code.check()
    return code


def _next_label(code: GaussCode) -> int:
    return max(code.labels, default=0) + 1


def add_kink(code: GaussCode, position: int, sign: int = 1, over_first: bool = True) -> GaussCode:
    "Inserts a curl (first Reidemeister move) in front of the passage at `position`"
    label = _next_label(code)
    pair = (Crossing(label, over_first, sign), Crossing(label, not over_first, sign))
    crossings = code.crossings[:position] + pair + code.crossings[position:]
    return GaussCode(crossings)


def add_bigon(code: GaussCode, over_position: int, under_position: int) -> GaussCode:
    """Pushes the strand in front of `over_position` across the strand in front of
    `under_position` (second Reidemeister move); the new crossings have opposite signs"""
    if over_position == under_position:
        raise InputError("A strand cannot be pushed across itself", witness=over_position)
    first = _next_label(code)
    second = first + 1
    inserts = {over_position: (Crossing(first, True, 1), Crossing(second, True, -1)),
               under_position: (Crossing(first, False, 1), Crossing(second, False, -1))}
    crossings = []
    for index in range(len(code.crossings) + 1):
        crossings.extend(inserts.get(index, ()))
        if index < len(code.crossings):
            crossings.append(code.crossings[index])
    return GaussCode(tuple(crossings))


def _kink(crossings: Sequence[Crossing]) -> Optional[int]:
    count = len(crossings)
    for index in range(count):
        if crossings[index].label == crossings[(index + 1) % count].label:
            return crossings[index].label
    return None


def _bigon(crossings: Sequence[Crossing]) -> Optional[Tuple[int, int]]:
    "Two crossings passed over twice in a row and under twice in a row, with opposite signs"
    count = len(crossings)
    adjacent = {}
    for index in range(count):
        current, following = crossings[index], crossings[(index + 1) % count]
        if current.over != following.over or current.sign == following.sign:
            continue
        key = frozenset((current.label, following.label))
        if len(key) < 2:
            continue
        if (not current.over) in adjacent.get(key, set()):
            first, second = sorted(key)
            return first, second
        adjacent.setdefault(key, set()).add(current.over)
    return None


def simplify(code: GaussCode) -> GaussCode:
    "Removes curls and bigons until none is left"
    crossings = list(code.crossings)
    while crossings:
        removable = _kink(crossings)
        removed = (removable,) if removable is not None else _bigon(crossings)
        if removed is None:
            break
        crossings = [crossing for crossing in crossings if crossing.label not in removed]
    if len(crossings) < len(code.crossings):
        debug(f"Simplified a Gauss code from {len(code.crossings) // 2} to {len(crossings) // 2} crossings")
    return GaussCode(tuple(crossings))


# --- projections ------------------------------------------------------------------------------


class _Degenerate(Exception):
    "The projection is not regular"


def _projection_basis(direction: np.ndarray) -> np.ndarray:
    "Rows u, v with u x v = direction, so that the plane is seen from the tip of `direction`"
    u = any_perpendicular(direction)
    return np.array([u, np.cross(direction, u)])


def _events(points: np.ndarray, depth: np.ndarray, scale: float) -> List[Tuple[float, int, bool, int]]:
    "Passages (position along the curve, crossing index, over, sign) of a closed polyline"
    count = len(points)
    starts, ends = points, np.roll(points, -1, axis=0)
    lines = [LineString([start, end]) for start, end in zip(starts, ends)]
    tree = STRtree(lines)
    pairs = tree.query(lines, predicate="intersects")
    events, found = [], []
    for first, second in zip(*pairs):
        if second <= first or second == first + 1 or (first == 0 and second == count - 1):
            continue
        hit = lines[first].intersection(lines[second])
        if hit.geom_type != "Point":
            raise _Degenerate(f"segments {first} and {second} overlap")
        point = np.array([hit.x, hit.y])
        params = []
        for index in (first, second):
            edge = ends[index] - starts[index]
            param = float(np.dot(point - starts[index], edge) / np.dot(edge, edge))
            if param < ENDPOINT_EPSILON or param > 1 - ENDPOINT_EPSILON:
                raise _Degenerate(f"crossing at the end of segment {index}")
            params.append(param)
        tangents = [_unit(ends[index] - starts[index]) for index in (first, second)]
        sine = tangents[0][0] * tangents[1][1] - tangents[0][1] * tangents[1][0]
        if abs(sine) < MIN_CROSSING_SINE:
            raise _Degenerate(f"tangential crossing of segments {first} and {second}")
        heights = [depth[index] + param * (depth[(index + 1) % count] - depth[index])
                   for index, param in zip((first, second), params)]
        if abs(heights[0] - heights[1]) < SEPARATION_EPSILON * scale:
            raise _Degenerate(f"segments {first} and {second} meet in space")
        if any(np.linalg.norm(point - other) < SEPARATION_EPSILON * scale for other in found):
            raise _Degenerate("triple point")
        found.append(point)
        first_over = heights[0] > heights[1]
        # right handed: the under strand passes from right to left of the over strand
        sign = int(np.sign(sine if first_over else -sine))
        label = len(found)
        events.append((first + params[0], label, first_over, sign))
        events.append((second + params[1], label, not first_over, sign))
    return sorted(events)


def _unit(vector: np.ndarray) -> np.ndarray:
    return vector / np.linalg.norm(vector)


def gauss_code_along(curve: SkeletonCurve, direction: Iterable[float]) -> GaussCode:
    """The Gauss code of the projection along `direction`, without perturbation

    Raises:
        ProjectionError: the projection is not regular
    """
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    points = curve.samples @ _projection_basis(direction).T
    depth = curve.samples @ direction
    scale = float(np.ptp(curve.samples, axis=0).max())
    try:
        events = _events(points, depth, scale)
    except _Degenerate as degenerate:
        raise ProjectionError(f"Projection along {direction} is not regular: {degenerate}",
                              witness=direction.tolist()) from degenerate
    return GaussCode(tuple(Crossing(label, over, sign) for _, label, over, sign in events))


def gauss_code(curve: SkeletonCurve, direction: Iterable[float] = (0.0, 0.0, 1.0), seed: int = 0,
               attempts: int = PROJECTION_ATTEMPTS) -> GaussCode:
    """The Gauss code of a regular projection of a closed curve

    The curve is projected along `direction` onto the plane orthogonal to it; depth along
    `direction` decides over and under. If the projection has tangencies, triple points or
    crossings at sample points, the direction is perturbed at random (seeded) and the
    projection is tried again.

    Raises:
        InputError: the curve is not closed
        ProjectionError: no regular projection was found within `attempts` tries
    """
    if not curve.closed:
        raise InputError("Only closed curves have knot diagrams")
    rng = np.random.default_rng(seed)
    base = np.asarray(direction, dtype=float)
    base = base / np.linalg.norm(base)
    candidate = base
    for attempt in range(attempts):
        try:
            return gauss_code_along(curve, candidate)
        except ProjectionError as error:
            warning(f"Projection attempt {attempt + 1} failed: {error}")
        candidate = base + PERTURBATION * (attempt + 1) * rng.normal(size=3)
        candidate /= np.linalg.norm(candidate)
    raise ProjectionError(f"No regular projection near {base.tolist()} after {attempts} attempts",
                          witness=base.tolist())

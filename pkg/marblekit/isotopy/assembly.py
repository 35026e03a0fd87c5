"""Backwards assembly of one isotopy from a run of the flow with surgery.

Components cut from a common ancestor stay joined: such a group is realized as one surface
whose members, sorted along their common axis, are connected by strings of radius r_s between
their tips. Replaying the run, flow snapshots move members, every surgery is preceded by the
isotopy that undoes its necks, and every discarded member follows its piece isotopy to marbles,
where it stays. The frames run forward in flow time, from the initial domain to a marble graph,
and the path is monotone outside the exceptional set of the run."""
from concurrent.futures import ThreadPoolExecutor
from logging import debug, info
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..configuration import SurgeryParams, DEFAULT_SURGERY
from ..error import EmbeddingError, InputError, NumericalError, ReroutingError
from ..flow.state import DiscardEvent, FlowLog, Snapshot, SurgeryEvent
from ..geometry.curves import SkeletonCurve, curve_from_points
from ..geometry.profiles import ProfileSurface
from ..geometry.vectors import any_perpendicular, normalize
from ..glue.complex import Marble, MarbleComplex
from ..glue.gluing import glue_marbles
from ..verify.certificate import plain
from .path import FRAMES, MONOTONE, Claim, Frame, IsotopyPath, Segment, sample_family, smoothstep
from .pieces import cut_radial, neck_zone, piece_isotopy
from .radial import blend, carrier_of, join_pieces, marbles_and_strings, radial_of, realize

#: Exceptional balls are enlarged by this factor when strings are routed around them
ENLARGE = 1.2


# --- rerouting --------------------------------------------------------------------------------

def _great_arc(start: np.ndarray, end: np.ndarray, fallback: np.ndarray, count: int) -> np.ndarray:
    "Unit vectors along the shorter great circle arc between two unit vectors"
    angle = float(np.arccos(np.clip(np.dot(start, end), -1.0, 1.0)))
    normal = np.cross(start, end)
    if np.linalg.norm(normal) < 1e-9:
        normal = np.cross(start, fallback)
        if np.linalg.norm(normal) < 1e-9:
            normal = any_perpendicular(start)
    normal = normalize(normal)
    side = np.cross(normal, start)
    phases = np.linspace(0.0, angle, count)
    return np.cos(phases)[:, None] * start + np.sin(phases)[:, None] * side


def reroute_around_ball(curve: SkeletonCurve, center, radius: float,
                        enlarge: float = ENLARGE) -> SkeletonCurve:
    """Replaces every passage of the curve through the enlarged ball by a great circle detour
    on the boundary of the enlarged ball; the result is resampled as a smooth curve

    Args:
        curve: an open curve
        center, radius: the ball to avoid
        enlarge: factor applied to the radius
    Raises:
        ReroutingError: an endpoint of the curve lies inside the enlarged ball, or the detour
            is not embedded; the dump describes the curve and the ball
    """
    center = np.asarray(center, dtype=float)
    outer = enlarge * radius
    points = curve.samples
    inside = np.linalg.norm(points - center, axis=1) < outer
    dump = {"curve": curve.to_dict(), "center": plain(center), "radius": float(radius),
            "enlarge": enlarge}
    if not inside.any():
        return curve
    if inside[0] or inside[-1]:
        raise ReroutingError("The string ends inside an exceptional ball", witness=plain(center),
                             dump=dump)
    pieces = []
    index = 0
    while index < len(points):
        if not inside[index]:
            pieces.append(points[index:index + 1])
            index += 1
            continue
        stop = index
        while inside[stop]:
            stop += 1
        before, after = points[index - 1], points[stop]
        start = normalize(before - center)
        end = normalize(after - center)
        drift = points[index:stop].mean(axis=0) - center
        count = max(8, int(np.ceil(outer * np.arccos(np.clip(np.dot(start, end), -1, 1)) / curve.h_s)))
        arc = center + outer * _great_arc(start, end, drift, count)
        pieces.append(arc[1:-1])
        index = stop
    joined = np.vstack(pieces)
    try:
        try:
            rerouted = curve_from_points(joined, curve.closed, curve.h_s)
        except NumericalError:
            # corners where the string meets the ball need a finer spacing
            rerouted = curve_from_points(joined, curve.closed, None)
    except (EmbeddingError, InputError, NumericalError) as err:
        raise ReroutingError(f"The detour around the ball is blocked: {err}", witness=plain(center),
                             dump=dump) from err
    debug(f"Rerouted a string around the ball at {center} of radius {outer}")
    return rerouted


# --- piece isotopies --------------------------------------------------------------------------

def build_piece_isotopies(log: FlowLog, params: SurgeryParams = DEFAULT_SURGERY,
                          marble_ratio: float = 0.5, r_s: Optional[float] = None,
                          frames: int = FRAMES, workers: int = 1,
                          frame_tol: Optional[float] = None) -> Dict[int, IsotopyPath]:
    """The isotopy of every discarded component to a marble graph, built in parallel

    Marbles get `marble_ratio` times the radius of the tube, or of the inscribed ball of a
    convex component. With frame_tol, consecutive frames are refined to that distance."""
    def build(event: DiscardEvent) -> Tuple[int, IsotopyPath]:
        classification = event.classification
        scale = getattr(classification, "inradius", None) or classification.radius
        path = piece_isotopy(event.component, classification, params, marble_ratio * scale, r_s,
                             frames, frame_tol)
        return event.component.id, path

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        built = dict(executor.map(build, log.discards))
    info(f"Built {len(built)} piece isotopies")
    return built


# --- assembly ---------------------------------------------------------------------------------

class _Group:
    "Members cut from one initial component, on the axis of that component"

    def __init__(self, surface, r_s: float, sigma: float):
        self.carrier = carrier_of(surface)
        self.r_s = r_s
        self.sigma = sigma
        self.members: Dict[int, object] = {}
        self.results: Dict[int, object] = {}
        self.cores: List[SkeletonCurve] = []

    def sorted_radials(self, replaced: Optional[Tuple[int, np.ndarray]] = None) -> List[np.ndarray]:
        radials = {key: radial_of(surface) for key, surface in self.members.items()}
        if replaced is not None:
            radials[replaced[0]] = replaced[1]
        return sorted(radials.values(), key=lambda radial: radial[0, 0])

    def domain(self, replaced: Optional[Tuple[int, np.ndarray]] = None):
        "The group as one surface; `replaced` substitutes the radius function of one member"
        if len(self.members) == 1:
            if replaced is None:
                return next(iter(self.members.values()))
            return realize(self.carrier, replaced[1])
        return realize(self.carrier, join_pieces(self.sorted_radials(replaced), self.r_s,
                                                 self.sigma, self.carrier.period))

    def string_spans(self) -> List[Tuple[float, float]]:
        radials = self.sorted_radials()
        return [(left[-1, 0], right[0, 0]) for left, right in zip(radials, radials[1:])]

    def result(self) -> Optional[MarbleComplex]:
        if len(self.results) == 1:
            return _as_complex(next(iter(self.results.values())), self.carrier.n)
        marbles = []
        for value in self.results.values():
            for item in value or ():
                marbles.extend(item.marbles if isinstance(item, MarbleComplex) else [item])
        if not marbles:
            return None
        surface = self.carrier.surface
        coords = [float(surface.to_local(marble.center[None, :])[0, 0]) for marble in marbles]
        order = np.argsort(coords)
        placed, curves = marbles_and_strings(self.carrier, np.asarray(coords)[order],
                                             [marbles[index].radius for index in order])
        return glue_marbles(placed, curves, self.r_s, self.sigma, self.carrier.n)


def _as_complex(result, n: int) -> Optional[MarbleComplex]:
    if not result:
        return None
    if len(result) == 1 and isinstance(result[0], MarbleComplex):
        return result[0]
    return MarbleComplex([item for item in result if isinstance(item, Marble)], [], n)


class _Assembly:
    "The frames of the assembled path and the provenance of each stretch"

    def __init__(self):
        self.current: List[Tuple[object, ...]] = []
        self.domains: List[Tuple[object, ...]] = []
        self.segments: List[Segment] = []

    def add_group(self, domain) -> int:
        self.current.append((domain,))
        return len(self.current) - 1

    def emit(self, group: int, domain, source: str, flags: Tuple[str, ...] = ()):
        self.current[group] = tuple(domain) if isinstance(domain, tuple) else (domain,)
        self.domains.append(tuple(surface for part in self.current for surface in part))
        index = len(self.domains) - 1
        last = self.segments[-1] if self.segments else None
        if last is not None and last.source == source and last.flags == flags and last.stop == index - 1:
            self.segments[-1] = last._replace(stop=index)
        else:
            self.segments.append(Segment(max(0, index - 1), index, source, flags))


def _single(domain) -> object:
    if len(domain) != 1:
        raise InputError("Piece isotopies have to consist of single surfaces",
                         witness=len(domain))
    return domain[0]


def _segment_of(path: IsotopyPath, index: int) -> Segment:
    for segment in path.segments:
        if segment.start <= index <= segment.stop:
            return segment
    return path.segments[-1]


def assemble_backwards(log: FlowLog, piece_isotopies: Mapping[int, IsotopyPath], r_s: float,
                       params: Optional[SurgeryParams] = None, sigma: float = 0.5,
                       frames: int = FRAMES, frame_tol: Optional[float] = None) -> IsotopyPath:
    """Assembles the isotopy from the initial domain of a run to a marble graph

    Args:
        log: a complete log; every component has to be discarded eventually
        piece_isotopies: for every discarded component id, its path to a marble graph
        r_s: radius of the strings that undo surgeries
        params: surgery parameters; those of the log by default
    Returns:
        A path monotone outside the exceptional set of the run. Its `result` lists the marble
        graph of every initial component; `core` is the core of a loop left as thin torus.
    Raises:
        InputError: the log is incomplete, a piece isotopy is missing, or a surgery cut a tube
            component
        ReroutingError: a string between two members crosses the ball of a later surgery
    """
    params = params or log.surgery_params or DEFAULT_SURGERY
    snapshots: List[Snapshot] = list(log.snapshots)
    initial = [snapshot for snapshot in snapshots if snapshot.parent is None and snapshot.time == 0.0]
    if not initial:
        raise InputError("The log has no snapshot of the initial domain")
    assembly = _Assembly()
    groups: List[_Group] = []
    alive: Dict[int, int] = {}
    for snapshot in initial:
        if snapshot.component in alive:
            continue
        group = _Group(snapshot.surface, r_s, sigma)
        group.members[snapshot.component] = snapshot.surface
        groups.append(group)
        alive[snapshot.component] = assembly.add_group(snapshot.surface)
    assembly.domains.append(tuple(surface for part in assembly.current for surface in part))
    extra_balls = []
    pending = 0

    def apply(snapshot: Snapshot):
        index = alive.get(snapshot.component)
        if index is None:
            return
        group = groups[index]
        if group.members.get(snapshot.component) is snapshot.surface:
            return
        group.members[snapshot.component] = snapshot.surface
        assembly.emit(index, group.domain(), "flow")

    events = [event for event in log.events if isinstance(event, (SurgeryEvent, DiscardEvent))]
    for event in events:
        while pending < len(snapshots) and (snapshots[pending].time < event.time or (
                snapshots[pending].time == event.time and snapshots[pending].component in alive)):
            apply(snapshots[pending])
            pending += 1
        if isinstance(event, SurgeryEvent):
            _undo_surgery(event, groups, alive, assembly, snapshots, params, frames, frame_tol)
        else:
            extra_balls.extend(_discard(event, groups, alive, assembly, piece_isotopies))
    for snapshot in snapshots[pending:]:
        apply(snapshot)
    if alive:
        raise InputError(f"Components {sorted(alive)} are never discarded", witness=sorted(alive))
    balls = tuple((np.asarray(center, dtype=float), float(radius))
                  for center, radius in log.exceptional_set()) + tuple(extra_balls)
    domains = assembly.domains
    times = np.linspace(0.0, 1.0, len(domains)) if len(domains) > 1 else [0.0]
    path = IsotopyPath([Frame(float(t), domain) for t, domain in zip(times, domains)],
                       Claim(MONOTONE, balls), assembly.segments)
    path.result = [group.result() for group in groups]
    cores = [core for group in groups for core in group.cores]
    path.core = cores[0] if len(cores) == 1 else (cores or None)
    info(f"Assembled {path!r} over {len(log.surgeries)} surgeries and {len(log.discards)} discards")
    return path


def _undo_surgery(event: SurgeryEvent, groups: List[_Group], alive: Dict[int, int],
                  assembly: _Assembly, snapshots: Sequence[Snapshot], params: SurgeryParams,
                  frames: int, frame_tol: Optional[float]):
    children = {}
    for snapshot in snapshots:
        if snapshot.time == event.time and snapshot.component in event.after:
            children.setdefault(snapshot.component, snapshot)
    for parent in event.before:
        index = alive.pop(parent)
        group = groups[index]
        if not isinstance(group.carrier.surface, ProfileSurface):
            raise InputError("Surgeries are assembled on surfaces of revolution only",
                             witness=parent)
        necks = [neck for neck in event.necks if neck.component == parent]
        for low, high in group.string_spans():
            for neck in necks:
                ball_low, ball_high = neck_zone(neck.position, neck.radius, params.Gamma)
                if ball_low < high and low < ball_high:
                    raise ReroutingError(
                        "A string crosses the ball of a later surgery",
                        witness=plain(neck.center),
                        dump={"time": event.time, "neck": plain(neck._asdict()),
                              "string": [float(low), float(high)],
                              "members": sorted(group.members)})
        source = radial_of(group.members[parent])
        carrier = group.carrier
        target = join_pieces(cut_radial(carrier, source, necks, params), group.r_s, group.sigma,
                             carrier.period)
        zones = [neck_zone(neck.position, neck.radius, params.Gamma) for neck in necks]

        def family(t, parent=parent, source=source, target=target, zones=zones, group=group,
                   carrier=carrier):
            if t <= 0:
                return group.domain()
            moved = blend(source, target, smoothstep(t), zones, carrier.period)
            return group.domain((parent, moved))

        for frame in sample_family(family, frames, frame_tol)[1:]:
            assembly.emit(index, frame.domain, "neck-undo")
        del group.members[parent]
        for child in event.after:
            snapshot = children.get(child)
            if snapshot is None or snapshot.parent != parent:
                continue
            group.members[child] = snapshot.surface
            alive[child] = index
        assembly.emit(index, group.domain(), "surgery")
        debug(f"Undid {len(necks)} necks of component {parent} at t={event.time}")


def _discard(event: DiscardEvent, groups: List[_Group], alive: Dict[int, int],
             assembly: _Assembly, piece_isotopies: Mapping[int, IsotopyPath]) -> list:
    component = event.component.id
    path = piece_isotopies.get(component)
    if path is None:
        raise InputError(f"No piece isotopy for discarded component {component}", witness=component)
    index = alive.pop(component)
    group = groups[index]
    if group.members.get(component) is not event.component.surface:
        group.members[component] = event.component.surface
        assembly.emit(index, group.domain(), "flow")
    for number, frame in enumerate(path.frames[1:], start=1):
        segment = _segment_of(path, number)
        group.members[component] = _single(frame.domain)
        assembly.emit(index, group.domain(), segment.source, segment.flags)
    group.results[component] = path.result
    if path.core is not None:
        group.cores.append(path.core)
    return list(path.claim.balls)

"""States and event logs of the flow with surgery.

States are immutable: every step, surgery and discard produces a new `FlowState`. The
`FlowLog` collects the events of a run in time order, together with geometry snapshots that
allow replaying the flow backwards."""
from json import dumps
from typing import List, NamedTuple, Optional, Tuple, Union

import numpy as np

from ..geometry.profiles import ProfileSurface
from ..geometry.tubes import TubeSurface
from ..verify.certificate import plain

Surface = Union[ProfileSurface, TubeSurface]


class FlowComponent(NamedTuple):
    "A connected component of the flowing domain"

    #: Unique id within a run
    id: int
    surface: Surface
    #: Id of the component this one was cut from, None for initial components
    parent: Optional[int] = None


class FlowState(NamedTuple):
    "The flowing domain at one time"

    time: float
    components: Tuple[FlowComponent, ...]
    #: The id the next new component receives
    next_id: int

    def replace_components(self, components) -> "FlowState":
        return self._replace(components=tuple(components))

    def component(self, component_id: int) -> FlowComponent:
        for component in self.components:
            if component.id == component_id:
                return component
        raise KeyError(component_id)

    @property
    def empty(self) -> bool:
        return not self.components


def initial_state(surfaces) -> FlowState:
    "The state at time zero with one component per surface"
    if isinstance(surfaces, (ProfileSurface, TubeSurface)):
        surfaces = [surfaces]
    components = tuple(FlowComponent(index, surface) for index, surface in enumerate(surfaces))
    return FlowState(0.0, components, len(components))


class NeckRegion(NamedTuple):
    "A piece of a component that is close to a round cylinder after rescaling"

    component: int
    #: Center point in space
    center: np.ndarray
    #: Measured radius
    radius: float
    #: Unit direction of the cylinder axis
    axis: np.ndarray
    #: Axial half-length of the cylindrical window
    extent: float
    #: Largest C0 + C1 deviation from the round cylinder in the rescaled window
    quality: float
    #: Axial coordinate (profiles) or skeleton arclength (tubes) of the center
    position: float


class StepEvent(NamedTuple):
    "An accepted smooth step"
    time: float
    dt: float
    #: Largest mean curvature after the step
    max_H: float
    #: Smallest two-convexity margin after the step
    margin: float


class SurgeryEvent(NamedTuple):
    "Necks replaced by pairs of opposing standard caps"
    time: float
    necks: Tuple[NeckRegion, ...]
    #: Ids of the cut components
    before: Tuple[int, ...]
    #: Ids of the components produced by the cut
    after: Tuple[int, ...]
    #: Whether every produced component passed the two-convexity check
    certified: bool


class DiscardEvent(NamedTuple):
    "A component of high curvature removed from the flow"
    time: float
    component: FlowComponent
    #: ConvexSphere, CappedTube or TubularLoop
    classification: object
    #: Neck points of tubes and loops, empty for spheres
    neck_points: Tuple[np.ndarray, ...]
    #: Time the component would have needed to become extinct
    remaining: float


Event = Union[StepEvent, SurgeryEvent, DiscardEvent]


class Snapshot(NamedTuple):
    "The geometry of one component at one time"
    time: float
    component: int
    surface: Surface
    #: Id of the component it was cut from
    parent: Optional[int] = None


def _event_type(event: Event) -> str:
    return {StepEvent: "step", SurgeryEvent: "surgery", DiscardEvent: "discard"}[type(event)]


class FlowLog:
    """The events of one run of the flow with surgery

    Events are appended by the run loop only, in nondecreasing time."""

    def __init__(self, surgery_params=None, n: int = 2):
        self.events: List[Event] = []
        self.snapshots: List[Snapshot] = []
        self.extinction_time: Optional[float] = None
        self.surgery_params = surgery_params
        self.n = n

    def __repr__(self) -> str:
        return (f"FlowLog({len(self.surgeries)} surgeries, {len(self.discards)} discards, "
                f"extinct at {self.extinction_time})")

    def append(self, event: Event):
        if self.events and event.time < self.events[-1].time:
            raise ValueError("Flow events have to be appended in time order")
        self.events.append(event)

    def snapshot(self, time: float, component: FlowComponent):
        self.snapshots.append(Snapshot(time, component.id, component.surface, component.parent))

    @property
    def steps(self) -> List[StepEvent]:
        return [event for event in self.events if isinstance(event, StepEvent)]

    @property
    def surgeries(self) -> List[SurgeryEvent]:
        return [event for event in self.events if isinstance(event, SurgeryEvent)]

    @property
    def discards(self) -> List[DiscardEvent]:
        return [event for event in self.events if isinstance(event, DiscardEvent)]

    def exceptional_set(self) -> List[Tuple[np.ndarray, float]]:
        """Balls (center, radius) of radius 10 Gamma r around every surgery neck and every neck
        point recorded for discarded tubes and loops"""
        gamma = self.surgery_params.Gamma if self.surgery_params is not None else 4.0
        balls = []
        for event in self.surgeries:
            balls.extend((neck.center, 10 * gamma * neck.radius) for neck in event.necks)
        for event in self.discards:
            radius = getattr(event.classification, "radius", 0.0)
            balls.extend((point, 10 * gamma * radius) for point in event.neck_points)
        return balls

    def history(self, component_id: int) -> List[Snapshot]:
        "Snapshots of a component and of its ancestors, oldest first"
        parents = {}
        for event in self.surgeries:
            for child in event.after:
                parents[child] = event.before
        lineage = {component_id}
        pending = [component_id]
        while pending:
            for parent in parents.get(pending.pop(), ()):
                if parent not in lineage:
                    lineage.add(parent)
                    pending.append(parent)
        return [snapshot for snapshot in self.snapshots if snapshot.component in lineage]

    def to_records(self) -> List[dict]:
        records = []
        for event in self.events:
            record = {"t": event.time, "type": _event_type(event)}
            if isinstance(event, StepEvent):
                record.update(dt=event.dt, max_H=event.max_H, margin=event.margin)
            elif isinstance(event, SurgeryEvent):
                record.update(before=list(event.before), after=list(event.after),
                              certified=event.certified,
                              necks=[plain(neck._asdict()) for neck in event.necks])
            else:
                record.update(component=event.component.id,
                              classification=type(event.classification).__name__,
                              neck_points=plain(list(event.neck_points)),
                              remaining=event.remaining)
            records.append(record)
        records.append({"t": self.extinction_time, "type": "extinction"})
        return records

    def to_jsonl(self, dest=None) -> Optional[str]:
        "Writes one JSON object per event; returns the text if no destination is given"
        text = "\n".join(dumps(record) for record in self.to_records()) + "\n"
        if dest is None:
            return text
        if isinstance(dest, str):
            with open(dest, "w") as filepointer:
                filepointer.write(text)
        else:
            dest.write(text)
        return None

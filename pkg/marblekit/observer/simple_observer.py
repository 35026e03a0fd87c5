"Contains a simple FlowObserver implementation"
from typing import NamedTuple, Sequence

from ..flow.state import FlowComponent, FlowState, NeckRegion
from .abstract import FlowObserver


class ObservedSurgery(NamedTuple):
    "A surgery seen by the observer"
    time: float
    necks: Sequence[NeckRegion]
    components_before: int
    components_after: int


class ObservedDiscard(NamedTuple):
    "A discarded component together with its classification"
    time: float
    component: FlowComponent
    classification: object


class RejectedStep(NamedTuple):
    "A step that was retried with half the step size"
    time: float
    dt: float
    margin: float


class SimpleObserver(FlowObserver):
    """A simple observer that collects the information and can be
    queried after the run is finished"""

    def __init__(self):
        self.times = []
        self.surgeries = []
        self.discards = []
        self.rejected_steps = []

    def on_step(self, state: FlowState, dt: float):
        self.times.append(state.time)

    def on_surgery(self, before: FlowState, after: FlowState, necks: Sequence[NeckRegion]):
        self.surgeries.append(
            ObservedSurgery(after.time, necks, len(before.components), len(after.components))
        )

    def on_discard(self, time: float, component: FlowComponent, classification):
        self.discards.append(ObservedDiscard(time, component, classification))

    def on_rejected_step(self, state: FlowState, dt: float, margin: float):
        self.rejected_steps.append(RejectedStep(state.time, dt, margin))

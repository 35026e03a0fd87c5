"Contains the abstract observer class for the flow with surgery"
from abc import abstractmethod
from typing import Sequence

from ..flow.state import FlowComponent, FlowState, NeckRegion


class FlowObserver:
    "Abstract class representing an observer to a run of the flow with surgery"

    @abstractmethod
    def on_step(self, state: FlowState, dt: float):
        "Called by the run loop after every accepted smooth step"

    @abstractmethod
    def on_surgery(self, before: FlowState, after: FlowState, necks: Sequence[NeckRegion]):
        "Called after necks were replaced by pairs of opposing standard caps"

    @abstractmethod
    def on_discard(self, time: float, component: FlowComponent, classification):
        "Called when a component of high curvature is removed from the flow"

    def on_rejected_step(self, state: FlowState, dt: float, margin: float):
        """Called when a step failed the two-convexity check and is retried with half the step
        size. The rejected state never enters the log."""

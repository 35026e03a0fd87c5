"""The run loop of the flow with surgery.

After every smooth step, components that lie entirely in the high curvature regime
(min H >= H_thick) are classified and discarded. When the largest remaining mean curvature
reaches H_trig, necks that are delta-close to a cylinder are cut, and thick pieces produced by
the cut are discarded as well. Necks whose balls meet those of earlier surgeries are left
uncut, so the recorded balls stay disjoint. A rejected surgery is retried after the next step.
The loop ends when no component is left."""
from logging import debug, info, warning
from typing import Dict, Optional, Sequence

import numpy as np

from ..configuration import SurgeryParams, Tolerances, DEFAULT_SURGERY
from ..error import ClassificationError, PreconditionError, SurgeryError
from .classify import classify_component, remaining_lifetime
from .evolution import CurvatureSummary, advance, curvature_summary
from .necks import component_necks
from .state import (DiscardEvent, FlowComponent, FlowLog, FlowState, StepEvent, SurgeryEvent,
                    initial_state)
from .surgery import perform_surgery, separated_necks


class _Run:
    "Bookkeeping of one run: the log, the observer and the snapshot clock of every component"

    def __init__(self, log: FlowLog, params: SurgeryParams, observer,
                 frame_tol: float):
        self.log = log
        self.params = params
        self.observer = observer
        self.frame_tol = frame_tol
        self.last_snapshot: Dict[int, float] = {}

    def snapshot(self, time: float, component: FlowComponent):
        self.log.snapshot(time, component)
        self.last_snapshot[component.id] = time

    def snapshot_moved(self, state: FlowState, summaries: Sequence[CurvatureSummary]):
        "Snapshots every component whose normal displacement since its last snapshot may exceed frame_tol/2"
        for component, summary in zip(state.components, summaries):
            since = state.time - self.last_snapshot.get(component.id, state.time)
            if summary.max_H * since > self.frame_tol / 2:
                self.snapshot(state.time, component)

    def discard(self, state: FlowState, component: FlowComponent) -> FlowState:
        try:
            classification = classify_component(component, self.params)
        except ClassificationError as err:
            dump = {"time": state.time, "component": component.id, "surface": err.dump,
                    "state": [{"id": other.id, "parent": other.parent,
                               "surface": other.surface.to_dict()} for other in state.components]}
            raise ClassificationError(str(err), witness=err.witness, dump=dump) from err
        remaining = remaining_lifetime(classification, component.surface.n)
        points = tuple(getattr(classification, "neck_points", ()))
        self.snapshot(state.time, component)
        self.log.append(DiscardEvent(state.time, component, classification, points, remaining))
        info(f"Discarded component {component.id} at t={state.time} as "
             f"{type(classification).__name__}")
        if self.observer is not None:
            self.observer.on_discard(state.time, component, classification)
        return state.replace_components(other for other in state.components
                                        if other.id != component.id)

    def discard_thick(self, state: FlowState, summaries: Dict[int, CurvatureSummary]) -> FlowState:
        for component in state.components:
            if summaries[component.id].min_H >= self.params.H_thick:
                state = self.discard(state, component)
        return state

    def surgery(self, state: FlowState, summaries: Dict[int, CurvatureSummary],
                tol: float) -> FlowState:
        "Cuts the delta-necks of the components at H_trig; without any, the flow goes on"
        found = []
        for component in state.components:
            if summaries[component.id].max_H >= self.params.H_trig:
                found.extend(component_necks(component, self.params))
        recorded = self.log.exceptional_set()
        necks = separated_necks(found, self.params, recorded)
        if len(necks) < len(found):
            debug(f"Skipped {len(found) - len(necks)} necks that meet the balls of earlier surgeries")
        if not necks:
            debug(f"Curvature reached H_trig at t={state.time}, but no admissible neck is "
                  f"delta-close to a cylinder yet")
            return state
        try:
            after = perform_surgery(state, necks, self.params, tol, recorded)
        except SurgeryError as err:
            warning(f"Rejected surgery at t={state.time}: {err}")
            return state
        cut = sorted({neck.component for neck in necks})
        for component_id in cut:
            self.snapshot(state.time, state.component(component_id))
        new = [component for component in after.components if component.parent in cut
               and component.id >= state.next_id]
        new_summaries = {component.id: curvature_summary(component.surface) for component in new}
        certified = all(summary.margin > tol for summary in new_summaries.values())
        self.log.append(SurgeryEvent(state.time, tuple(necks), tuple(cut),
                                     tuple(component.id for component in new), certified))
        for component in new:
            self.snapshot(after.time, component)
        if self.observer is not None:
            self.observer.on_surgery(state, after, necks)
        for component in new:
            if new_summaries[component.id].min_H >= self.params.H_thick:
                after = self.discard(after, component)
        return after


def _extinction_time(log: FlowLog, time: float) -> float:
    discards = log.discards
    if not discards:
        return time
    return max(event.time + event.remaining for event in discards)


def run_flow_with_surgery(initial, params: SurgeryParams = DEFAULT_SURGERY,
                          tolerances: Tolerances = Tolerances(),
                          observer=None, workers: int = 1,
                          dt: Optional[float] = None, max_steps: Optional[int] = None) -> FlowLog:
    """Evolves a two-convex domain by mean curvature flow with surgery until it is extinct

    Args:
        initial: a profile or tube surface, a sequence of them, or a FlowState
        params: the surgery parameters
        tolerances: `tol` is the two-convexity margin, `frame_tol` bounds the displacement
            between snapshots (default: a hundredth of the feature scale)
        observer: notified about steps, surgeries and discards
        workers: number of threads that evolve components in parallel
        dt: upper bound of the step size; the stability bound applies anyway
        max_steps: stop after this many steps and leave the extinction time unset
    Returns:
        The log of the run
    Raises:
        PreconditionError: the initial domain is not two-convex
        ClassificationError: a discarded component is no sphere, capped tube or loop; the
            dump describes the state of the flow
        RuntimeError: the flow did not become extinct before T_max
    """
    state = initial if isinstance(initial, FlowState) else initial_state(initial)
    if state.empty:
        raise PreconditionError("There is nothing to flow")
    tol = tolerances.tol
    summaries = {component.id: curvature_summary(component.surface) for component in state.components}
    for component in state.components:
        if summaries[component.id].margin <= tol:
            raise PreconditionError(f"Component {component.id} is not two-convex",
                                    witness=summaries[component.id].margin)
    n = state.components[0].surface.n
    frame_tol = tolerances.frame_tol
    if frame_tol is None:
        frame_tol = min(component.surface.feature_scale() for component in state.components) / 100
    log = FlowLog(params, n)
    run = _Run(log, params, observer, frame_tol)
    for component in state.components:
        run.snapshot(state.time, component)
    info(f"Flowing {len(state.components)} components with surgery")
    state = run.discard_thick(state, summaries)
    steps = 0
    while not state.empty:
        if state.time > params.T_max:
            raise RuntimeError(f"The flow is not extinct at t={state.time} > T_max={params.T_max}")
        if max_steps is not None and steps >= max_steps:
            warning(f"Stopped after {steps} steps at t={state.time}")
            return log
        previous = state.time
        state, step_summaries = advance(state, np.inf if dt is None else dt, tol,
                                        observer=observer, workers=workers)
        steps += 1
        log.append(StepEvent(state.time, state.time - previous,
                             max(summary.max_H for summary in step_summaries),
                             min(summary.margin for summary in step_summaries)))
        if observer is not None:
            observer.on_step(state, state.time - previous)
        run.snapshot_moved(state, step_summaries)
        summaries = {component.id: summary
                     for component, summary in zip(state.components, step_summaries)}
        state = run.discard_thick(state, summaries)
        if any(summaries[component.id].max_H >= params.H_trig for component in state.components):
            state = run.surgery(state, summaries, tol)
    log.extinction_time = _extinction_time(log, state.time)
    info(f"Extinct at t={log.extinction_time} after {steps} steps, {len(log.surgeries)} "
         f"surgeries and {len(log.discards)} discards")
    return log

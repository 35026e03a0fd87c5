"""Detection of necks: pieces of a component that look like a round cylinder after rescaling.

Both kinds of components are read as a radius function over an axis, the axial coordinate of
a surface of revolution or the skeleton arclength of a tube. A sample is a surgery neck center if
its mean curvature is at least H_neck and, in the window of half-length `surgery_window` times
the local radius around it, the rescaled radius deviates from 1 by at most delta in C0 plus C1
(plus the bending of the axis on tubes)."""
from logging import debug
from typing import List, NamedTuple, Optional

import numpy as np

from ..configuration import SurgeryParams, DEFAULT_SURGERY
from ..geometry.profiles import ProfileSurface
from .state import FlowComponent, FlowState, NeckRegion


class RadiusGraph(NamedTuple):
    "A component read as radius function over its axis"
    #: Axial coordinate of every sample
    coords: np.ndarray
    radii: np.ndarray
    #: Derivative of the radius along the axis
    slopes: np.ndarray
    #: Mean curvature
    mean: np.ndarray
    #: Curvature of the axis
    bend: np.ndarray
    #: Samples that lie on the graph part of the surface
    valid: np.ndarray
    period: Optional[float]


def radius_graph(surface) -> RadiusGraph:
    "Reads a profile or tube surface as radius function over its axis"
    if isinstance(surface, ProfileSurface):
        geometry = surface.geometry
        first, _ = geometry.derivatives(geometry.params)
        k_meridian, k_rotation, _ = geometry.sample_quantities()
        speed = np.linalg.norm(first, axis=1)
        graph_like = first[:, 0] > 0.5 * speed
        slopes = np.where(graph_like, first[:, 1] / np.where(graph_like, first[:, 0], 1.0), np.inf)
        radii = surface.meridian[:, 1]
        period = surface.period if surface.end_caps == "periodic" else None
        return RadiusGraph(surface.meridian[:, 0], radii, slopes,
                           k_meridian + (surface.n - 1) * k_rotation, np.zeros(len(radii)),
                           graph_like & (radii > 0), period)
    geometry = surface.geometry
    first, _ = geometry.derivatives(geometry.params)
    graph_like = first[:, 0] > 0.5 * np.linalg.norm(first, axis=1)
    slopes = np.where(graph_like, first[:, 1] / np.where(graph_like, first[:, 0], 1.0), np.inf)
    s, radii = surface.radial[:, 0], surface.radial[:, 1]
    angles = np.array([0.0, np.pi / 2, np.pi, 3 * np.pi / 2])
    params = np.repeat(geometry.params, len(angles))
    _, _, rows = surface.evaluate(params, np.tile(angles, len(s)))
    mean = rows.sum(axis=1).reshape(len(s), len(angles)).mean(axis=1)
    bend = np.linalg.norm(surface.skeleton.curvature_vector_at(s), axis=1)
    period = surface.skeleton.total_length if surface.closed else None
    return RadiusGraph(s, radii, slopes, mean, bend, graph_like & (radii > 0), period)


def _offsets(graph: RadiusGraph, center: float) -> np.ndarray:
    offset = graph.coords - center
    if graph.period is not None:
        offset = (offset + graph.period / 2) % graph.period - graph.period / 2
    return offset


def window_quality(graph: RadiusGraph, index: int, window: float) -> float:
    """C0 plus C1 deviation of the rescaled radius from the unit cylinder in the window around
    a sample; infinite if the window leaves the graph part"""
    radius = graph.radii[index]
    half = window * radius
    if graph.period is None:
        valid_coords = graph.coords[graph.valid]
        if graph.coords[index] - half < valid_coords.min() or graph.coords[index] + half > valid_coords.max():
            return np.inf
    elif 2 * half > graph.period:
        half = graph.period / 2
    inside = np.abs(_offsets(graph, graph.coords[index])) <= half
    if not np.all(graph.valid[inside]):
        return np.inf
    c0 = np.abs(graph.radii[inside] / radius - 1).max()
    c1 = np.abs(graph.slopes[inside]).max()
    return float(c0 + c1 + radius * graph.bend[inside].max())


def runs_of(mask: np.ndarray, periodic: bool) -> List[np.ndarray]:
    "Index runs of consecutive True entries; runs may wrap around on periodic graphs"
    indices = np.flatnonzero(mask)
    if len(indices) == 0:
        return []
    if periodic and len(indices) == len(mask):
        return [indices]
    breaks = np.flatnonzero(np.diff(indices) > 1) + 1
    runs = np.split(indices, breaks)
    if periodic and len(runs) > 1 and runs[0][0] == 0 and runs[-1][-1] == len(mask) - 1:
        runs = [np.concatenate([runs[-1], runs[0]])] + runs[1:-1]
    return runs


def _run_candidates(graph: RadiusGraph, run: np.ndarray, separation: float, delta: float) -> List[int]:
    """The extreme samples of a run if balls around them are disjoint, otherwise the narrowest
    sample closest to the middle of the run"""
    first, last = int(run[0]), int(run[-1])
    whole = graph.period is not None and len(run) == len(graph.coords)
    gap = abs(_offsets(graph, graph.coords[first])[last])
    if not whole and gap > separation * max(graph.radii[first], graph.radii[last]):
        return [first, last]
    radii = graph.radii[run]
    narrow = run[radii <= radii.min() * (1 + delta / 10)]
    if whole:
        return [int(narrow[0])]
    middle = graph.coords[first] + _offsets(graph, graph.coords[first])[last] / 2
    return [int(narrow[np.argmin(np.abs(_offsets(graph, middle)[narrow]))])]


def _neck(component: FlowComponent, graph: RadiusGraph, index: int, window: float,
          quality: float) -> NeckRegion:
    surface = component.surface
    position = float(graph.coords[index])
    radius = float(graph.radii[index])
    if isinstance(surface, ProfileSurface):
        center = surface.to_world(np.array([[position, 0.0]]))[0]
        axis = surface.rotation[:, 0].copy()
    else:
        center = surface.skeleton.point_at(position)
        axis = surface.skeleton.tangent_at(position)
    return NeckRegion(component.id, center, radius, axis, window * radius, quality, position)


def _select(found: List[NeckRegion], separation: float) -> List[NeckRegion]:
    "Greedy maximal subset whose balls of radius separation/2 times r are disjoint"
    chosen = []
    for neck in found:
        if all(np.linalg.norm(neck.center - other.center) > separation * max(neck.radius, other.radius)
               for other in chosen):
            chosen.append(neck)
    return chosen


def component_necks(component: FlowComponent, params: SurgeryParams = DEFAULT_SURGERY) -> List[NeckRegion]:
    "Surgery necks of a single component; none if no center is delta-close to the cylinder"
    graph = radius_graph(component.surface)
    separation = 20 * params.Gamma
    window = params.surgery_window
    qualities = np.full(len(graph.coords), np.inf)
    for index in np.flatnonzero(graph.valid & (graph.mean >= params.H_neck)):
        qualities[index] = window_quality(graph, index, window)
    runs = runs_of(qualities <= params.delta, graph.period is not None)
    found = [_neck(component, graph, index, window, qualities[index])
             for run in runs for index in _run_candidates(graph, run, separation, params.delta)]
    return _select(found, separation)


def detect_necks(state: FlowState, params: SurgeryParams = DEFAULT_SURGERY) -> List[NeckRegion]:
    """Finds a maximal set of disjoint necks in every component

    In a run of consecutive neck centers the two extreme ones are taken when the balls of
    radius 10 Gamma r around them are disjoint, so that the thin piece between them is cut out
    as a whole; otherwise the narrowest center closest to the middle of the run."""
    necks = []
    for component in state.components:
        found = component_necks(component, params)
        debug(f"Component {component.id}: {len(found)} necks")
        necks.extend(found)
    return necks

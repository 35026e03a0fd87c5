"""Smooth mean curvature flow of surfaces of revolution and tubes.

Every sample moves with normal velocity -H. Meridians of surfaces of revolution are moved in
their half plane and redistributed along their arclength with a density proportional to the
largest principal curvature. Tubes are moved ring by ring: every cross section circle is
sampled, moved, and replaced by the circle through the moved points, whose center becomes the
new skeleton point.

Steps are explicit. The step size is bounded by the squared sample spacing and, on tubes, by
the squared radius."""
from concurrent.futures import ThreadPoolExecutor
from logging import debug
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from ..error import EmbeddingError, InputError, NumericalError, SingularityError
from ..geometry.curves import curve_from_points
from ..geometry.profiles import MeridianGeometry, ProfileSurface
from ..geometry.tubes import TubeSurface
from .state import FlowComponent, FlowState

#: Step size factor of the squared sample spacing
CFL = 0.2
#: Step size factor of the squared tube radius
RADIAL_CFL = 0.02
#: Samples per curvature radius
RESOLVE = 16
#: Upper bound of the meridian samples of one component
MAX_SAMPLES = 4096
#: Samples around a tube cross section
TUBE_RING = 16
#: Smallest step size, relative to the squared feature scale
DT_MIN_FACTOR = 1e-8


class CurvatureSummary(NamedTuple):
    "Extremal curvature quantities of one component"
    #: Smallest lambda_1 + lambda_2
    margin: float
    min_H: float
    max_H: float


def curvature_rows(surface) -> np.ndarray:
    "Principal curvature rows at the samples the flow moves"
    if isinstance(surface, ProfileSurface):
        return surface.curvature_rows()
    params = surface.geometry.params
    angles = np.linspace(0.0, 2 * np.pi, TUBE_RING, endpoint=False)
    return surface.evaluate(np.repeat(params, TUBE_RING), np.tile(angles, len(params)))[2]


def curvature_summary(surface) -> CurvatureSummary:
    rows = curvature_rows(surface)
    mean = rows.sum(axis=1)
    return CurvatureSummary(float((rows[:, 0] + rows[:, 1]).min()), float(mean.min()),
                            float(mean.max()))


# --- surfaces of revolution -----------------------------------------------------------------

def _ends(surface: ProfileSurface) -> Tuple[str, str]:
    if surface.end_caps == "open":
        raise InputError("Profiles with boundary do not flow; use capped or periodic profiles",
                         witness=repr(surface))
    return ("axis", "axis") if surface.end_caps == "capped" else ("periodic", "periodic")


def redistribute(points: np.ndarray, density: np.ndarray, ends: Tuple[str, str],
                 period: Optional[float] = None) -> np.ndarray:
    """Resamples a meridian with the given sample density per unit length, by its cubic
    arclength spline"""
    geometry = MeridianGeometry(points, ends, period)
    params = geometry.params
    if ends[0] == "periodic":
        closing = np.linalg.norm(points[0] + [period, 0.0] - points[-1])
        params = np.append(params, params[-1] + closing)
        density = np.append(density, density[0])
    weight = np.concatenate([[0.0], np.cumsum((density[:-1] + density[1:]) / 2 * np.diff(params))])
    count = int(np.clip(np.ceil(weight[-1]), 16, MAX_SAMPLES))
    targets = np.linspace(0.0, weight[-1], count + 1)
    new_params = np.interp(targets, weight, params)
    if ends[0] == "periodic":
        new_params = new_params[:-1]
    resampled = geometry.spline(new_params)
    if ends[0] == "axis":
        resampled[0, 1] = resampled[-1, 1] = 0.0
    return resampled


def _density(k_meridian: np.ndarray, k_rotation: np.ndarray, extent: float) -> np.ndarray:
    largest = np.maximum(np.abs(k_meridian), np.abs(k_rotation))
    return RESOLVE * np.maximum(largest, 1 / extent)


def evolve_profile(surface: ProfileSurface, dt: float) -> ProfileSurface:
    """Moves the meridian by -H along its normal for time dt

    Raises:
        SingularityError: the meridian reaches the axis in the interior
        InputError: the profile has boundary
    """
    ends = _ends(surface)
    points = surface.meridian
    k_meridian, k_rotation, normals = surface.geometry.sample_quantities()
    mean = k_meridian + (surface.n - 1) * k_rotation
    moved = points - dt * mean[:, None] * normals
    if ends[0] == "axis":
        moved[0, 1] = moved[-1, 1] = 0.0
        interior = moved[1:-1, 1]
    else:
        interior = moved[:, 1]
    if np.any(interior <= 0):
        raise SingularityError("The profile pinches off", witness=int(np.argmin(interior)))
    extent = surface.period if ends[0] == "periodic" else np.ptp(points[:, 0])
    density = _density(k_meridian, k_rotation, extent)
    if ends[0] == "periodic":
        order = np.argsort(moved[:, 0])
        moved, density = moved[order], density[order]
    return surface.with_meridian(redistribute(moved, density, ends, surface.period))


# --- tubes ----------------------------------------------------------------------------------

def tube_density(tube: TubeSurface) -> np.ndarray:
    """Radial samples per unit length the flow keeps: one per skeleton spacing, more where the
    radial meridian bends"""
    k_radial, _, _ = tube.geometry.sample_quantities()
    return np.maximum(RESOLVE * np.abs(k_radial), 1 / tube.skeleton.h_s)


def regular_radial(tube: TubeSurface) -> np.ndarray:
    "The radial meridian resampled with the tube density"
    period = tube.skeleton.total_length if tube.closed else None
    return redistribute(np.array(tube.radial), tube_density(tube), tube.ends, period)


def evolve_tube(tube: TubeSurface, dt: float) -> TubeSurface:
    """Moves every cross section ring by -H along the normal and fits new circles

    Raises:
        SingularityError: a ring degenerates or the tube reaches its focal set
        InputError: the tube has a free boundary circle
    """
    if not tube.closed and not all(tube.capped):
        raise InputError("Only closed or capped tubes can flow", witness=repr(tube))
    tube = tube.with_radial(regular_radial(tube))
    params = tube.geometry.params
    angles = np.linspace(0.0, 2 * np.pi, TUBE_RING, endpoint=False)
    points, normals, rows = tube.evaluate(np.repeat(params, TUBE_RING), np.tile(angles, len(params)))
    mean = rows.sum(axis=1)
    moved = (points - dt * mean[:, None] * normals).reshape(len(params), TUBE_RING, 3)
    centers = moved.mean(axis=1)
    radii = np.linalg.norm(moved - centers[:, None], axis=2).mean(axis=1)
    interior = radii if tube.closed else radii[1:-1]
    if np.any(interior <= 0):
        raise SingularityError("A tube section collapses", witness=int(np.argmin(interior)))
    skeleton = curve_from_points(centers, tube.closed, h_s=tube.skeleton.h_s)
    knots = np.vstack([centers, centers[:1]]) if tube.closed else centers
    chord = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(knots, axis=0), axis=1))])
    s = chord[:len(centers)] * skeleton.total_length / chord[-1]
    if not tube.closed:
        radii[0] = radii[-1] = 0.0
    return TubeSurface(skeleton, np.column_stack([s, radii]), tube.n)


# --- steps ----------------------------------------------------------------------------------

def evolve(surface, dt: float):
    "The surface after a smooth step of length dt"
    if isinstance(surface, ProfileSurface):
        return evolve_profile(surface, dt)
    if isinstance(surface, TubeSurface):
        return evolve_tube(surface, dt)
    raise InputError(f"{type(surface).__name__} cannot flow; only profiles and tubes can")


def stable_dt(surface) -> float:
    "Largest step size the explicit scheme accepts for a surface"
    if isinstance(surface, ProfileSurface):
        spacing = np.linalg.norm(np.diff(surface.meridian, axis=0), axis=1).min()
        return float(CFL * spacing ** 2)
    rho = surface.radial[:, 1]
    spacing = 1 / tube_density(surface).max()
    return float(min(CFL * spacing ** 2, RADIAL_CFL * rho[rho > 0].min() ** 2))


def state_dt(state: FlowState) -> float:
    return min(stable_dt(component.surface) for component in state.components)


def advance(state: FlowState, dt: float, tol: float = 1e-9, dt_min: Optional[float] = None,
            observer=None, workers: int = 1) -> Tuple[FlowState, List[CurvatureSummary]]:
    """Performs one accepted step of at most dt and returns the new state together with the
    curvature summary of every component

    A step whose result is not two-convex, or whose computation degenerates, is retried with
    half the step size.

    Raises:
        NumericalError: the step size fell below dt_min
    """
    if state.empty:
        return state, []
    dt = min(dt, state_dt(state))
    if dt_min is None:
        scale = min(component.surface.feature_scale() for component in state.components)
        dt_min = DT_MIN_FACTOR * scale ** 2
    while True:
        try:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                surfaces = list(executor.map(lambda component: evolve(component.surface, dt),
                                             state.components))
            summaries = [curvature_summary(surface) for surface in surfaces]
            margin = min(summary.margin for summary in summaries)
        except (SingularityError, EmbeddingError, NumericalError) as err:
            debug(f"Step of size {dt} degenerated: {err}")
            margin = -np.inf
        if margin > tol:
            components = [FlowComponent(component.id, surface, component.parent)
                          for component, surface in zip(state.components, surfaces)]
            return FlowState(state.time + dt, tuple(components), state.next_id), summaries
        debug(f"Rejected step of size {dt} at t={state.time}: margin {margin}")
        if observer is not None:
            observer.on_rejected_step(state, dt, margin)
        dt /= 2
        if dt < dt_min:
            raise NumericalError(f"Step size fell below {dt_min} at t={state.time}",
                                 witness=state.time)


def flow_step(state: FlowState, dt: float, tol: float = 1e-9, observer=None,
              workers: int = 1) -> FlowState:
    """Evolves every component by mean curvature flow for one step of at most dt

    The step is clamped to the stability bound of the explicit scheme and halved until the
    result is two-convex."""
    return advance(state, dt, tol, observer=observer, workers=workers)[0]

"""Rotationally symmetric junctions between a round body and a string.

In a half plane containing the string axis, with z the distance from the body center along the
axis and rho the distance from the axis, the junction meridian leaves the body sphere and runs
by arclength s with

    d theta/ds = sigma sin(theta)/rho,  d rho/ds = -cos(theta),  dz/ds = sin(theta)

where theta is the angle between the outward normal and the axis. Along it
sin(theta) rho^sigma is constant, so the meridian becomes parallel to the axis at
rho_end = rho_0 sin(theta_0)^(1/sigma); starting on a sphere of radius R at the polar angle
phi_0 with R sin(phi_0)^(1 + 1/sigma) = r it ends on the cylinder of radius r.

The principal curvatures are -sigma sin(theta)/rho along the meridian and sin(theta)/rho around
the axis, so every pair sums to (1 - sigma) sin(theta)/rho > 0: junctions are two-convex."""
from typing import List, NamedTuple, Optional

import numpy as np
from scipy.integrate import solve_ivp

from ..error import NumericalError, ParameterError
from ..geometry.profiles import ProfileSurface, meridian_from_pieces

#: Meridian samples of a junction
JUNCTION_SAMPLES = 129


class Junction(NamedTuple):
    "A junction meridian attached to a ball"

    #: Center of the ball
    center: np.ndarray
    #: Unit direction of the string leaving the ball
    axis: np.ndarray
    #: Radius of the ball
    body_radius: float
    #: Radius of the string
    radius: float
    #: Shape exponent
    sigma: float
    #: (K, 2) meridian points (z, rho) from the ball to the string cylinder, z increasing
    meridian: np.ndarray

    @property
    def start_angle(self) -> float:
        "Polar angle of the hole the junction cuts into the ball"
        return float(np.arcsin(self.meridian[0, 1] / self.body_radius))

    @property
    def footprint(self) -> float:
        "Radius of the hole circle"
        return float(self.meridian[0, 1])

    @property
    def end_height(self) -> float:
        "Distance from the ball center at which the string cylinder begins"
        return float(self.meridian[-1, 0])

    @property
    def contact_point(self) -> np.ndarray:
        return self.center + self.body_radius * self.axis

    def extent(self) -> float:
        "Largest distance of a junction point from the contact point"
        offset = self.meridian - [self.body_radius, 0.0]
        return float(np.linalg.norm(offset, axis=1).max())


def fillet_meridian(body_radius: float, radius: float, sigma: float = 0.5,
                    count: int = JUNCTION_SAMPLES) -> np.ndarray:
    """Integrates the junction meridian from a sphere of radius `body_radius` down to a string of
    the given radius; returns (count, 2) points (z, rho) at uniform arclength

    Raises:
        ParameterError: the string is not thinner than the body or sigma is not in (0, 1)
        NumericalError: the integration does not reach the string cylinder
    """
    if not 0 < radius < body_radius:
        raise ParameterError("A junction needs 0 < r < R", witness=radius)
    if not 0 < sigma < 1:
        raise ParameterError("sigma must lie in (0, 1)", witness=sigma)
    start = np.arcsin((radius / body_radius) ** (sigma / (1 + sigma)))

    def rhs(_, state):
        theta, rho, _z = state
        return [sigma * np.sin(theta) / rho, -np.cos(theta), np.sin(theta)]

    def vertical(_, state):
        return state[0] - np.pi / 2
    vertical.terminal = True
    vertical.direction = 1

    initial = [start, body_radius * np.sin(start), body_radius * np.cos(start)]
    length = 4 * body_radius * np.sin(start) + 4 * body_radius
    solution = solve_ivp(rhs, (0.0, length), initial, events=vertical, dense_output=True,
                         rtol=1e-10, atol=1e-12 * body_radius)
    if solution.status != 1:
        raise NumericalError("Junction meridian did not reach the string cylinder",
                             witness=[body_radius, radius])
    end = float(solution.t_events[0][0])
    _, rho, z = solution.sol(np.linspace(0.0, end, count))
    rho[-1] = radius
    return np.column_stack([z, rho])


def make_junction(center, axis, body_radius: float, radius: float, sigma: float = 0.5) -> Junction:
    "The junction of a string of the given radius leaving a ball along `axis`"
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    meridian = fillet_meridian(body_radius, radius, sigma)
    meridian.setflags(write=False)
    return Junction(np.asarray(center, dtype=float), axis, float(body_radius), float(radius),
                    float(sigma), meridian)


def string_radius_family(center, axis, body_radius: float, r_from: float, r_to: float,
                         count: int = 8, sigma: float = 0.5) -> List[Junction]:
    """Junctions of strings whose radius changes geometrically from `r_from` to `r_to`

    Consecutive junctions differ little in shape; the family widens or thins a string where it
    leaves a marble."""
    radii = np.geomspace(r_from, r_to, count)
    return [make_junction(center, axis, body_radius, radius, sigma) for radius in radii]


def _sphere_arc(center_x: float, radius: float, angle_from: float, angle_to: float,
                spacing: float) -> np.ndarray:
    count = max(9, int(np.ceil(radius * abs(angle_to - angle_from) / (spacing / 4))) + 1)
    angles = np.linspace(angle_from, angle_to, count)
    return np.column_stack([center_x + radius * np.cos(angles), radius * np.sin(angles)])


def dumbbell_profile(bulb_radius: float = 1.0, waist: float = 0.1, neck_length: float = 0.0,
                     n: int = 2, sigma: float = 0.5, spacing: Optional[float] = None) -> ProfileSurface:
    """Two round balls on the x axis joined through junctions by a cylinder of radius `waist`

    With `neck_length` zero the two junctions meet directly and the waist is a smooth concave
    neck with meridian curvature -sigma/waist. The profile is symmetric around x = 0."""
    spacing = spacing or min(bulb_radius / 64, waist / 16)
    fillet = fillet_meridian(bulb_radius, waist, sigma, 16 * JUNCTION_SAMPLES)
    center = fillet[-1, 0] + neck_length / 2
    start = float(np.arctan2(fillet[0, 1], fillet[0, 0]))
    left = [_sphere_arc(-center, bulb_radius, np.pi, start, spacing),
            np.column_stack([fillet[:, 0] - center, fillet[:, 1]])]
    if neck_length > 0:
        count = max(3, int(np.ceil(neck_length / (spacing / 4))) + 1)
        left.append(np.column_stack([np.linspace(-neck_length / 2, 0.0, count), np.full(count, waist)]))
    half = np.vstack(left)
    mirrored = (half * [-1.0, 1.0])[::-1]
    meridian = meridian_from_pieces([half, mirrored], spacing)
    meridian[0, 1] = meridian[-1, 1] = 0.0
    return ProfileSurface(meridian, n, "capped")

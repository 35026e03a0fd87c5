"""Attaching strings to domains.

`glue` replaces every string of a controlled configuration by a tube of radius r. Within the
ball of radius delta(r) around an endpoint on a domain, the tube runs into the domain through a
rotationally symmetric junction; at a loose end it is closed off by the standard cap. Outside
these balls the result coincides with the domains and the r-tubes around the strings.

Junctions are built on round balls, so the domains have to be balls."""
from logging import debug, info
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..configuration import ControlParams, DEFAULT_CONTROL, Tolerances
from ..error import ConfigurationError, EmbeddingError, InputError, ParameterError
from ..geometry.curves import SkeletonCurve, curve_from_points
from ..geometry.profiles import ProfileSurface, sphere_profile
from ..geometry.tubes import TubeSurface
from ..verify import check_configuration
from .caps import cap_radial
from .complex import GluedString, Marble, MarbleComplex
from .junction import make_junction

#: Relative flatness of the curvature that identifies a profile surface as round sphere
ROUND_TOLERANCE = 1e-3
#: Bisection steps of the admissible radius
BISECTION_STEPS = 40


class Attachment(NamedTuple):
    "A string end touching a marble"
    marble: int
    #: Unit vector from the marble center to the contact point
    axis: np.ndarray


class GlueSpec(NamedTuple):
    "The parameters a gluing was performed with"

    #: String radius
    radius: float
    #: Radius of the balls around the endpoints outside which nothing changes
    delta: float
    #: Largest admissible string radius of the configuration
    r_bar: float
    params: ControlParams


def gap_radius(radius: float, params: ControlParams = DEFAULT_CONTROL) -> float:
    """The radius delta(r) of the balls around string endpoints that contain the junctions

    delta(r) = max(10 r, 2 (r R^2)^(1/3)) with R = n/c_H, the largest umbilic curvature radius
    of a domain with H >= c_H. It is increasing and tends to zero with r."""
    largest = params.n / params.c_H
    return float(max(10 * radius, 2 * np.cbrt(radius * largest ** 2)))


def as_marble(domain) -> Marble:
    """Reads a round ball from a marble or a capped profile surface of constant curvature

    Raises:
        InputError: the domain is not a round ball
    """
    if isinstance(domain, Marble):
        return domain
    if isinstance(domain, ProfileSurface) and domain.end_caps == "capped":
        rows = domain.curvature_rows()
        mean = float(rows.mean())
        if mean > 0 and np.ptp(rows) <= ROUND_TOLERANCE * mean:
            xs = domain.meridian[:, 0]
            center = domain.to_world(np.array([[(xs.min() + xs.max()) / 2, 0.0]]))[0]
            return Marble(center, float(np.ptp(xs) / 2))
    raise InputError("Strings can only be glued to round balls", witness=repr(domain))


def find_attachments(marbles: Sequence[Marble], curve: SkeletonCurve,
                     tol: float) -> Tuple[Optional[Attachment], Optional[Attachment]]:
    "The marbles touched by the two ends of an open curve"
    result = []
    for point in (curve.samples[0], curve.samples[-1]):
        found = None
        for index, marble in enumerate(marbles):
            if abs(marble.distance(point)[0]) <= tol:
                offset = point - marble.center
                found = Attachment(index, offset / np.linalg.norm(offset))
                break
        result.append(found)
    return tuple(result)


def admissible_radius(marbles: Sequence[Marble], attachments: Sequence[Attachment],
                      params: ControlParams, sigma: float = 0.5) -> float:
    """The largest r <= b/10 for which the delta(r)-balls of all attached endpoints are pairwise
    disjoint and contain their junctions, found by bisection; 0 if there is none"""
    contacts = np.array([marbles[item.marble].center + marbles[item.marble].radius * item.axis
                         for item in attachments]).reshape(-1, 3)
    distances = np.linalg.norm(contacts[:, None] - contacts[None, :], axis=2)
    np.fill_diagonal(distances, np.inf)
    closest = float(distances.min()) if len(contacts) > 1 else np.inf

    def admissible(radius: float) -> bool:
        delta = gap_radius(radius, params)
        if 2 * delta >= closest:
            return False
        for item in attachments:
            marble = marbles[item.marble]
            if radius >= marble.radius:
                return False
            junction = make_junction(marble.center, item.axis, marble.radius, radius, sigma)
            if junction.extent() > delta:
                return False
        return True

    upper = params.b / 10
    if admissible(upper * (1 - 1e-9)):
        return upper
    low, high = 0.0, upper
    for _ in range(BISECTION_STEPS):
        middle = (low + high) / 2
        if admissible(middle):
            low = middle
        else:
            high = middle
    return low


def tubular_neighborhood(curve: SkeletonCurve, radius: float, n: int = 2) -> TubeSurface:
    """The tube of constant radius around a curve; a torus for closed curves

    Raises:
        EmbeddingError: the radius is not below the normal injectivity radius
    """
    injectivity = curve.normal_injectivity_radius()
    if radius >= injectivity:
        raise EmbeddingError(f"Radius {radius} exceeds the normal injectivity radius {injectivity}",
                             witness=radius)
    return TubeSurface(curve, radius, n)


def glue_string(marbles: Sequence[Marble], curve: SkeletonCurve,
                ends: Tuple[Optional[Attachment], Optional[Attachment]], radius: float,
                sigma: float = 0.5, n: int = 2) -> GluedString:
    """The tube of one string: the skeleton is extended radially to the centers of the marbles
    it touches, where junctions lead into the marbles; loose ends get standard caps"""
    knots = curve.samples
    spacing = min(curve.h_s, radius / 2)
    junctions = [None, None]
    for end, item in enumerate(ends):
        if item is None:
            continue
        marble = marbles[item.marble]
        count = max(4, int(np.ceil(marble.radius / curve.h_s)))
        ray = marble.center + np.linspace(0.0, marble.radius, count + 1)[:-1, None] * item.axis
        junctions[end] = make_junction(marble.center, item.axis, marble.radius, radius, sigma)
        if end == 0:
            knots = np.vstack([ray, marble.center + marble.radius * item.axis, knots[1:]])
        else:
            knots = np.vstack([knots[:-1], marble.center + marble.radius * item.axis, ray[::-1]])
    skeleton = curve_from_points(knots, closed=False, h_s=curve.h_s)
    length = skeleton.total_length
    low = junctions[0].end_height if junctions[0] is not None else 0.0
    high = length - (junctions[1].end_height if junctions[1] is not None else 0.0)
    if high <= low:
        raise ParameterError("String too short for its junctions", witness=[low, high])
    loose = [item is None for item in ends]
    side = {(True, True): "both", (True, False): "left", (False, True): "right"}.get(tuple(loose))
    if side is None:
        count = max(5, int(np.ceil((high - low) / spacing)) + 1)
        core = np.column_stack([np.linspace(low, high, count), np.full(count, radius)])
    else:
        core = cap_radial(radius, low, high, side, spacing)
    pieces = [core]
    if junctions[0] is not None:
        pieces.insert(0, junctions[0].meridian[:-1])
    if junctions[1] is not None:
        mirrored = junctions[1].meridian[:-1][::-1]
        pieces.append(np.column_stack([length - mirrored[:, 0], mirrored[:, 1]]))
    tube = TubeSurface(skeleton, np.vstack(pieces), n)
    marble_ends = tuple(None if item is None else item.marble for item in ends)
    return GluedString(tube, marble_ends, float(radius), tuple(junctions))


def glue(domains, curves: Sequence[SkeletonCurve], radius: float,
         params: ControlParams = DEFAULT_CONTROL, tolerances: Tolerances = Tolerances(),
         sigma: float = 0.5, check: bool = True) -> MarbleComplex:
    """Attaches strings of the given radius to round balls

    Args:
        domains: marbles or round sphere profiles
        curves: the strings; their ends either touch a ball orthogonally or are loose
        radius: string radius, below the admissible radius of the configuration
        params: control of the configuration
        check: verify the configuration first
    Returns:
        The glued complex; its `spec` attribute holds the :py:class:`GlueSpec`
    Raises:
        ConfigurationError: the configuration is not controlled
        ParameterError: the delta(r)-balls of the endpoints overlap or r >= b/10
    """
    domains = list(domains)
    curves = [curves] if isinstance(curves, SkeletonCurve) else list(curves)
    if check:
        report = check_configuration([_as_surface(domain) for domain in domains], curves, params,
                                     tolerances)
        if not report.passed:
            raise ConfigurationError("Domains and curves do not form a controlled configuration",
                                     witness=report.witness, dump=report.to_dict())
    marbles = [as_marble(domain) for domain in domains]
    tol = max(tolerances.distance_factor * params.b, 1e-9)
    ends = [find_attachments(marbles, curve, tol) for curve in curves]
    attachments = [item for pair in ends for item in pair if item is not None]
    r_bar = admissible_radius(marbles, attachments, params, sigma)
    if not 0 < radius < r_bar:
        raise ParameterError(f"String radius {radius} is not below the admissible radius {r_bar}",
                             witness=radius)
    strings = [glue_string(marbles, curve, pair, radius, sigma, params.n)
               for curve, pair in zip(curves, ends)]
    result = MarbleComplex(marbles, strings, params.n)
    result.spec = GlueSpec(radius, gap_radius(radius, params), r_bar, params)
    info(f"Glued {len(strings)} strings of radius {radius} to {len(marbles)} balls")
    debug(f"Gluing used delta={result.spec.delta}, r_bar={r_bar}")
    return result


def _as_surface(domain):
    "Marbles are verified as sphere profiles"
    if isinstance(domain, Marble):
        return sphere_profile(domain.radius).translated(domain.center)
    return domain


def glue_marbles(marbles: Sequence[Marble], curves: Sequence[SkeletonCurve], radius: float,
                 sigma: float = 0.5, n: int = 2, tol: float = 1e-6) -> MarbleComplex:
    """Glues strings to marbles without checking control; used by constructions that produce
    marble graphs directly"""
    strings = [glue_string(marbles, curve, find_attachments(marbles, curve, tol), radius, sigma, n)
               for curve in curves]
    return MarbleComplex(marbles, strings, n)


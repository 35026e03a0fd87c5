"Contains the construction and classification of marble graphs"
from logging import debug
from typing import NamedTuple, Sequence

import numpy as np

from ..configuration import ControlParams, DEFAULT_CONTROL, Tolerances
from ..error import ConfigurationError, ParameterError
from ..geometry.curves import SkeletonCurve
from .complex import Marble, MarbleComplex
from .gluing import admissible_radius, find_attachments, glue_string

#: Radius of the ball around a marble center, in marble radii, in which strings run radially
STRAIGHT_RAY = 3.0


class MarbleGraphKind(NamedTuple):
    "Homotopy type of a marble graph"

    #: ``tree``, ``circuit`` or ``general``
    kind: str
    #: E - V + number of components
    cycle_rank: int
    components: int


def classify_marble_graph(graph: MarbleComplex) -> MarbleGraphKind:
    """A connected marble graph without cycles is a tree, one with a single independent cycle a
    circuit; everything else is general"""
    multigraph = graph.graph()
    rank = multigraph.cycle_rank()
    components = len(multigraph.components())
    if components == 1 and rank == 0:
        kind = "tree"
    elif components == 1 and rank == 1:
        kind = "circuit"
    else:
        kind = "general"
    return MarbleGraphKind(kind, rank, components)


def _check_straight(curve: SkeletonCurve, marble: Marble, axis: np.ndarray, index: int, tol: float):
    "Raises ConfigurationError if the curve deviates from the radial ray near the marble"
    offset = curve.samples - marble.center
    near = np.linalg.norm(offset, axis=1) <= STRAIGHT_RAY * marble.radius
    along = offset[near] @ axis
    deviation = np.linalg.norm(offset[near] - along[:, None] * axis, axis=1)
    if np.any(deviation > tol) or np.any(along < 0):
        worst = int(np.argmax(deviation))
        raise ConfigurationError(f"String {index} is not straight near its marble",
                                 witness=curve.samples[near][worst].tolist())


def build_marble_graph(centers: Sequence, strings: Sequence[SkeletonCurve], r_m: float, r_s: float,
                       params: ControlParams = DEFAULT_CONTROL, tolerances: Tolerances = Tolerances(),
                       sigma: float = 0.5) -> MarbleComplex:
    """Builds a marble graph: balls of radius r_m around the centers, joined by strings of
    radius r_s

    Every string has to start and end on a marble and run radially within 3 r_m of the marble
    centers. The result carries its classification in the `kind` attribute.

    Raises:
        ConfigurationError: a string has a loose end or bends near a marble
        ParameterError: r_s is not below the admissible string radius
    """
    marbles = [Marble(np.asarray(center, dtype=float), float(r_m)) for center in centers]
    tol = max(tolerances.distance_factor * params.b, 1e-3 * r_m)
    ends = []
    for index, curve in enumerate(strings):
        pair = find_attachments(marbles, curve, tol)
        if any(item is None for item in pair):
            raise ConfigurationError(f"String {index} has a loose end", witness=index)
        for item in pair:
            _check_straight(curve, marbles[item.marble], item.axis, index, tol)
        ends.append(pair)
    attachments = [item for pair in ends for item in pair]
    r_bar = admissible_radius(marbles, attachments, params._replace(b=max(params.b, 10 * r_m)), sigma)
    if not 0 < r_s < min(r_bar, r_m):
        raise ParameterError(f"String radius {r_s} is not below the admissible radius {r_bar}",
                             witness=r_s)
    result = MarbleComplex(marbles, [glue_string(marbles, curve, pair, r_s, sigma, params.n)
                                     for curve, pair in zip(strings, ends)], params.n)
    result.kind = classify_marble_graph(result)
    debug(f"Built marble graph {result!r}: {result.kind}")
    return result

"""Knot class comparison of solid tori and the path component verdict for embedded tori.

In dimension two two 2-convex tori lie in the same path component exactly if their core curves
have the same knot class (up to orientation and mirror image); in higher dimensions all of them
do. Knot classes are compared through invariants, so the comparison may stay undecided."""
from logging import info, warning
from typing import Iterable, NamedTuple, Optional, Union

import numpy as np
from scipy.spatial import cKDTree

from ..configuration import Tolerances
from ..error import InputError
from ..geometry.curves import SkeletonCurve, curve_from_points
from ..geometry.mesh import TriMesh, estimate_curvatures_mesh
from ..geometry.tubes import TubeSurface
from ..glue.complex import MarbleComplex
from ..glue.marbles import classify_marble_graph
from ..verify.convexity import check_two_convex
from ..verify.curves import check_controlled_curve
from .gauss import gauss_code
from .invariants import KnotInvariants, code_invariants, identify

EQUAL = "equal"
DISTINCT = "distinct"
UNKNOWN = "unknown"

SAME = "same"

#: Vertices of a mesh used to locate its core
MESH_CORE_SAMPLES = 4000
#: Longest admissible step of a core chain, in tube radii
MAX_CHAIN_STEP = 4.0


class KnotVerdict(NamedTuple):
    "Outcome of a knot class comparison"

    #: EQUAL, DISTINCT or UNKNOWN
    verdict: str
    #: The compared invariants and the table entries they identify
    evidence: dict

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "evidence": self.evidence}


class ComponentVerdict(NamedTuple):
    "Outcome of the path component comparison of two tori"

    #: SAME, DISTINCT or UNKNOWN
    verdict: str
    #: Dimension n of the tori
    n: int
    #: The knot comparison of the cores, for n = 2
    knot: Optional[KnotVerdict] = None

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "n": self.n,
                "knot": None if self.knot is None else self.knot.to_dict()}


def _chain(points: np.ndarray) -> np.ndarray:
    "Orders points into a closed chain by walking to the nearest unvisited point"
    tree = cKDTree(points)
    order = [0]
    visited = np.zeros(len(points), dtype=bool)
    visited[0] = True
    for _ in range(len(points) - 1):
        _, candidates = tree.query(points[order[-1]], k=len(points))
        following = next(int(index) for index in np.atleast_1d(candidates) if not visited[index])
        visited[following] = True
        order.append(following)
    return points[order]


def mesh_core_curve(mesh: TriMesh, seed: int = 0) -> SkeletonCurve:
    """Core of a thin tube given as triangle mesh

    Sampled vertices are moved inward by the curvature radius of their largest principal
    curvature, the resulting points are averaged over balls of the median tube radius, thinned
    and chained into a closed curve.

    Raises:
        InputError: the mesh is not a torus, or the inner points do not form one chain
    """
    if mesh.euler_characteristic() != 0:
        raise InputError("Only meshes of Euler characteristic 0 have a core curve",
                         witness=mesh.euler_characteristic())
    rng = np.random.default_rng(seed)
    interior = np.setdiff1d(np.arange(len(mesh.vertices)), mesh.boundary_vertices)
    chosen = rng.choice(interior, size=min(len(interior), MESH_CORE_SAMPLES), replace=False)
    inner, radii = [], []
    for vertex in np.sort(chosen):
        largest = max(estimate_curvatures_mesh(mesh, int(vertex)).principal)
        if largest <= 0:
            continue
        inner.append(mesh.vertices[vertex] - mesh.vertex_normals[vertex] / largest)
        radii.append(1 / largest)
    if len(inner) < 8:
        raise InputError("Too few convex vertices to locate the core of the mesh")
    inner = np.array(inner)
    radius = float(np.median(radii))
    tree = cKDTree(inner)
    kept = []
    taken = np.zeros(len(inner), dtype=bool)
    for index in range(len(inner)):
        if not taken[index]:
            kept.append(index)
            taken[tree.query_ball_point(inner[index], radius / 2)] = True
    centers = np.array([inner[tree.query_ball_point(inner[index], radius)].mean(axis=0)
                        for index in kept])
    chained = _chain(centers)
    steps = np.linalg.norm(np.diff(np.vstack([chained, chained[:1]]), axis=0), axis=1)
    if steps.max() > MAX_CHAIN_STEP * radius:
        raise InputError("The inner points of the mesh do not form a single closed chain",
                         witness=float(steps.max()))
    return curve_from_points(chained, closed=True, h_s=radius / 2)


def core_curve(torus: Union[MarbleComplex, TubeSurface, TriMesh], b: Optional[float] = None,
               seed: int = 0) -> SkeletonCurve:
    """The core of a solid torus: the skeleton of a closed tube, the cycle through the marble
    centers and string skeletons of a marble circuit, or the chained inner points of a tube mesh

    If `b` is given, a core that is not b-controlled is reported with a warning.

    Raises:
        InputError: the input is not a realization of a solid torus
    """
    if isinstance(torus, TriMesh):
        core = mesh_core_curve(torus, seed)
    elif isinstance(torus, TubeSurface):
        if not torus.closed:
            raise InputError("Only closed tubes are solid tori")
        core = torus.skeleton
    elif isinstance(torus, MarbleComplex):
        kind = classify_marble_graph(torus)
        if kind.kind != "circuit":
            raise InputError(f"A marble {kind.kind} is not a solid torus", witness=kind.cycle_rank)
        points = []
        for _, string_index, forward in torus.cycle():
            skeleton = torus.strings[string_index].skeleton
            if not forward:
                skeleton = skeleton.reversed()
            points.append(skeleton.samples[:-1])
        spacing = min(string.skeleton.h_s for string in torus.strings)
        core = curve_from_points(np.vstack(points), closed=True, h_s=spacing)
    else:
        raise InputError(f"Cannot extract a core curve from {type(torus).__name__}")
    if b is not None:
        report = check_controlled_curve(core, b)
        if not report.passed:
            warning(f"Core curve is not {b}-controlled: {[r.name for r in report.failed_details()]}")
    return core


def knot_invariants(curve: SkeletonCurve, direction: Iterable[float] = (0.0, 0.0, 1.0),
                    seed: int = 0) -> KnotInvariants:
    "Determinant and Alexander polynomial of a regular projection near `direction`"
    return code_invariants(gauss_code(curve, direction, seed))


def same_knot_class(first: SkeletonCurve, second: SkeletonCurve,
                    direction: Iterable[float] = (0.0, 0.0, 1.0), seed: int = 0) -> KnotVerdict:
    """Compares the knot classes of two closed curves

    DISTINCT if the determinant or the Alexander polynomial differ, EQUAL if both curves are
    identified with the same single entry of :py:data:`~marblekit.knots.invariants.KNOT_TABLE`,
    UNKNOWN otherwise. The invariants do not see orientation or mirror image."""
    invariants = [knot_invariants(curve, direction, seed) for curve in (first, second)]
    names = [identify(entry) for entry in invariants]
    evidence = {"invariants": [entry.to_dict() for entry in invariants], "table": names}
    differing = [field for field in KnotInvariants._fields
                 if getattr(invariants[0], field) != getattr(invariants[1], field)]
    if differing:
        evidence["differing"] = differing
        verdict = DISTINCT
    elif len(names[0]) == 1 and names[0] == names[1]:
        verdict = EQUAL
    else:
        verdict = UNKNOWN
    info(f"Knot comparison: {verdict} ({names[0]} vs {names[1]})")
    return KnotVerdict(verdict, evidence)


def _check_torus(torus, tolerances: Tolerances):
    report = check_two_convex(torus, tolerances.tol)
    if not report.passed:
        raise InputError(f"Torus is not 2-convex, margin {report.margin}", witness=report.witness)
    characteristic = torus.euler_characteristic()
    if characteristic != 0:
        raise InputError(f"Euler characteristic {characteristic} is not the one of a torus",
                         witness=characteristic)


def path_component_verdict(first: Union[MarbleComplex, TubeSurface],
                           second: Union[MarbleComplex, TubeSurface], n: Optional[int] = None,
                           tolerances: Tolerances = Tolerances(), seed: int = 0) -> ComponentVerdict:
    """Decides whether two 2-convex tori lie in the same path component

    For n >= 3 they always do. For n = 2 the knot classes of the core curves decide;
    an undecided knot comparison gives UNKNOWN.

    Raises:
        InputError: an input is not 2-convex or not a torus
    """
    for torus in (first, second):
        _check_torus(torus, tolerances)
    n = first.n if n is None else int(n)
    if n >= 3:
        return ComponentVerdict(SAME, n)
    knot = same_knot_class(core_curve(first, seed=seed), core_curve(second, seed=seed), seed=seed)
    verdict = {EQUAL: SAME, DISTINCT: DISTINCT}.get(knot.verdict, UNKNOWN)
    return ComponentVerdict(verdict, n, knot)

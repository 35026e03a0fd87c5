"""Contains the check of controlled configurations (domains with curves attached
orthogonally) and the embeddedness certificate of single carriers"""
from logging import info
from typing import Sequence, Union

import numpy as np

from ..configuration import ControlParams, Tolerances
from ..error import ConfigurationError, EmbeddingError
from ..geometry.curves import SkeletonCurve, check_polyline_embedded
from ..geometry.mesh import TriMesh
from ..geometry.profiles import ProfileSurface
from ..geometry.tubes import TubeSurface
from .certificate import CertificateReport, make_report, merge_reports
from .convexity import check_controlled_domain
from .curves import check_controlled_curve, _as_list


def _endpoint_reports(curve: SkeletonCurve, index: int, domains: list, params: ControlParams,
                      tolerances: Tolerances) -> list:
    "Orthogonal contact or distance 10 b for both ends of an open curve"
    b = params.b
    tol_distance = tolerances.distance_factor * b
    reports = []
    for end, point, direction in ((0, curve.samples[0], curve.tangents[0]),
                                  (1, curve.samples[-1], -curve.tangents[-1])):
        witness = {"curve": index, "end": end, "point": point.tolist()}
        distances = [domain.nearest(point[None, :]) for domain in domains]
        closest = int(np.argmin([distance[0][0] for distance in distances]))
        distance, normal, _ = distances[closest]
        if distance[0] <= tol_distance:
            cosine = np.clip(np.dot(direction, normal[0]), -1.0, 1.0)
            angle = float(np.degrees(np.arccos(cosine)))
            witness.update(domain=closest, angle=angle)
            reports.append(make_report(f"orthogonal-contact[{index}:{end}]",
                                       tolerances.orthogonality_deg - angle, witness, strict=False))
        else:
            witness["domain"] = closest
            reports.append(make_report(f"loose-end[{index}:{end}]", distance[0] - 10 * b, witness,
                                       strict=False))
    return reports


def check_configuration(domains, curves: Union[SkeletonCurve, Sequence[SkeletonCurve]],
                        params: ControlParams, tolerances: Tolerances = Tolerances(),
                        include_controls: bool = True) -> CertificateReport:
    """Checks that curves are attached to domains as a controlled configuration

    The interior of every curve has to lie outside the domains. Every endpoint either touches a
    domain boundary orthogonally (up to `orthogonality_deg`) or keeps a distance of 10 b from
    all domains. Away from the balls of radius b/10 around the endpoints the curves keep a
    distance of b/20 from all boundaries.

    With `include_controls`, the controlledness of every domain and of the curves is part of the
    report.

    Raises:
        ConfigurationError: a curve runs through the interior of a domain
    """
    domains = list(domains) if isinstance(domains, (list, tuple)) else [domains]
    curves = _as_list(curves)
    b = params.b
    tol_distance = tolerances.distance_factor * b
    reports = []
    if include_controls:
        reports.extend(check_controlled_domain(domain, params) for domain in domains)
        reports.append(check_controlled_curve(curves, b))
    for index, curve in enumerate(curves):
        points = curve.samples
        ends = points[[0, -1]] if not curve.closed else np.empty((0, 3))
        inner = np.ones(len(points), dtype=bool)
        for end in ends:
            inner &= np.linalg.norm(points - end, axis=1) > b / 10
        clearance, clearance_witness = np.inf, None
        for number, domain in enumerate(domains):
            distance, _, _ = domain.nearest(points)
            inside = domain.contains(points) & (distance > tol_distance)
            if np.any(inside):
                crossing = int(np.argmax(inside))
                raise ConfigurationError(f"Curve {index} runs through domain {number}",
                                         witness=points[crossing].tolist())
            if np.any(inner):
                candidates = np.where(inner, distance, np.inf)
                worst = int(np.argmin(candidates))
                if candidates[worst] < clearance:
                    clearance = float(candidates[worst])
                    clearance_witness = {"curve": index, "domain": number,
                                         "point": points[worst].tolist()}
        if clearance_witness is not None:
            reports.append(make_report(f"clearance[{index}]", clearance - b / 20, clearance_witness,
                                       strict=False))
        if not curve.closed:
            reports.extend(_endpoint_reports(curve, index, domains, params, tolerances))
    report = merge_reports("configuration", reports)
    if not report.passed:
        info(f"Configuration is not controlled: {[r.name for r in report.failed_details()]}")
    return report


def check_embedded(geom, tolerances: Tolerances = Tolerances()) -> CertificateReport:
    """Embeddedness certificate of a carrier

    - profile surfaces: the meridian is a simple arc that stays off the axis in its interior;
      the margin is the smallest interior distance from the axis
    - tubes: far apart cross sections keep a positive gap and the radius stays below the
      curvature radius of the skeleton; the margin is the smaller of the gap and 1 - max rho kappa
    - triangle meshes: no two faces intersect; the margin is 1 without and minus the number of
      intersecting face pairs with intersections
    - skeleton curves: no two non-adjacent segments touch
    - everything else with an ``embedding_report`` method reports itself
    """
    if isinstance(geom, ProfileSurface):
        meridian = geom.meridian
        interior = meridian[1:-1] if geom.end_caps == "capped" else meridian
        try:
            check_polyline_embedded(meridian, closed=False)
        except EmbeddingError as err:
            return CertificateReport("embedded", False, 0.0, err.witness)
        worst = int(np.argmin(interior[:, 1]))
        return make_report("embedded", interior[worst, 1], interior[worst].tolist())
    if isinstance(geom, TubeSurface):
        gap, pair = geom.clearance()
        kappa = geom.skeleton.curvatures()
        bend = geom.radius_at(geom.skeleton.arclength) * kappa
        worst = int(np.argmax(bend))
        return merge_reports("embedded", [
            make_report("tube-clearance", gap, pair),
            make_report("tube-bending", 1 - bend[worst], geom.skeleton.samples[worst].tolist()),
        ])
    if isinstance(geom, TriMesh):
        edge = float(geom.mesh.edges_unique_length.mean())
        slack = tolerances.tol_emb / edge if tolerances.tol_emb is not None else 0.1
        hits = geom.self_intersections(-slack)
        return make_report("embedded", 1.0 if not hits else -float(len(hits)), hits[0] if hits else None)
    if isinstance(geom, SkeletonCurve):
        try:
            check_polyline_embedded(geom.samples, geom.closed)
        except EmbeddingError as err:
            return CertificateReport("embedded", False, -1.0, err.witness)
        return make_report("embedded", geom.normal_injectivity_radius(), None)
    return geom.embedding_report(tolerances)

"""Contains the curvature based checks of a domain boundary: two-convexity, noncollapsedness and
the bounds of a controlled domain.

All checks work on :py:class:`~marblekit.geometry.SurfaceSamples`, so they accept every carrier
implementing :py:class:`~marblekit.geometry.Hypersurface`, and triangle meshes."""
from concurrent.futures import ThreadPoolExecutor
from logging import debug, info
from typing import Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..configuration import ControlParams
from ..error import PreconditionError
from ..geometry.abstract import SurfaceSamples
from .certificate import CertificateReport, make_report, merge_reports

#: Pairs of samples closer than this fraction of the ball radius are covered by the exact
#: curvature condition instead of the sampled clearance
NEAR_FRACTION = 0.25
#: Margins of noncollapsedness this close to zero are flagged as the equality case
NONCOLLAPSED_BOUNDARY = 1e-3
#: Rows of the sample-pair matrix handled at once
CHUNK = 128


def _samples(geom, spacing: Optional[float], angular: int = 32) -> SurfaceSamples:
    if isinstance(geom, SurfaceSamples):
        return geom
    return geom.sample(spacing, angular)


def _point_witness(samples: SurfaceSamples, index: int) -> dict:
    witness = {"index": int(index), "point": samples.points[index].tolist()}
    if samples.labels is not None:
        witness["label"] = int(samples.labels[index])
    return witness


def check_two_convex(geom, tol: float = 1e-9, spacing: Optional[float] = None,
                     angular: int = 32) -> CertificateReport:
    """Checks lambda_1 + lambda_2 > tol at every sample

    The margin is the smallest sampled value of lambda_1 + lambda_2 (1/length)."""
    samples = _samples(geom, spacing, angular)
    values = samples.two_convex_margin
    worst = int(np.argmin(values))
    margin = float(values[worst])
    report = CertificateReport("two-convex", margin > tol, margin, _point_witness(samples, worst))
    if not report.passed:
        info(f"Two-convexity fails with margin {margin} at {samples.points[worst]}")
    return report


def _worst_pair(points, normals, radius, rows, near) -> Tuple[float, int, int]:
    "Smallest ball clearance ratio of the samples `rows` against all samples"
    offsets = points[None, :, :] - points[rows, None, :]
    square = np.sum(offsets ** 2, axis=2)
    along = np.abs(np.einsum("ijk,ik->ij", offsets, normals[rows]))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = 1 - 2 * radius[rows, None] * along / square
    ratio[square < near[rows, None] ** 2] = np.inf
    flat = int(np.argmin(ratio))
    row, column = np.unravel_index(flat, ratio.shape)
    return float(ratio[row, column]), int(rows[row]), int(column)


def check_alpha_noncollapsed(geom, alpha: float, spacing: Optional[float] = None,
                             angular: int = 32, workers: int = 1) -> CertificateReport:
    """Checks that the interior and the exterior ball of radius alpha/H tangent at every
    sample contain no other sample

    For a sample p with normal N and ball radius rho, a sample q lies outside both tangent balls
    iff ``1 - 2 rho |<q - p, N>| / |q - p|^2`` is nonnegative; this ratio is the reported
    margin. It is scale invariant, zero for q on the ball boundary and equal to
    ``1 - rho lambda`` in the limit of q approaching p along a principal direction with
    curvature lambda. Close pairs are evaluated through that limit, using the exact curvature.

    The inequality is not strict: a margin of zero up to sampling error is flagged "boundary"
    and does not pass (the round sphere with alpha = n).

    Raises:
        PreconditionError: the mean curvature is not positive everywhere
    """
    samples = _samples(geom, spacing, angular)
    mean = samples.mean_curvature
    if np.any(mean <= 0):
        worst = int(np.argmin(mean))
        raise PreconditionError(f"Noncollapsedness needs H > 0, found H = {mean[worst]}",
                                witness=samples.points[worst].tolist())
    radius = alpha / mean
    rows = samples.curvatures
    local = np.minimum(1 - radius * rows[:, -1], 1 + radius * rows[:, 0])
    local_worst = int(np.argmin(local))
    near = NEAR_FRACTION * radius
    chunks = [np.arange(start, min(start + CHUNK, len(mean))) for start in range(0, len(mean), CHUNK)]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        results = list(executor.map(
            lambda chunk: _worst_pair(samples.points, samples.normals, radius, chunk, near), chunks))
    ratio, p_index, q_index = min(results)
    debug(f"Noncollapsedness: local margin {local[local_worst]}, sampled margin {ratio}")
    if local[local_worst] < ratio:
        margin, witness = float(local[local_worst]), _point_witness(samples, local_worst)
    else:
        margin = ratio
        witness = _point_witness(samples, p_index)
        witness["other"] = samples.points[q_index].tolist()
    report = make_report("noncollapsed", margin, witness, strict=False, boundary=NONCOLLAPSED_BOUNDARY)
    if not report.passed:
        info(f"{alpha}-noncollapsedness fails with margin {margin} at {witness['point']}")
    return report


def shape_operator_gradient(samples: SurfaceSamples, neighbours: int = 8) -> np.ndarray:
    """First differences of the principal curvatures between each sample and its nearest
    neighbours; the largest one approximates |grad A| at the sample"""
    count = min(neighbours + 1, len(samples.points))
    distance, index = cKDTree(samples.points).query(samples.points, k=count)
    differences = np.linalg.norm(samples.curvatures[index] - samples.curvatures[:, None, :], axis=2)
    scale = np.median(distance[:, 1:]) if count > 1 else 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        slopes = np.where(distance > 1e-9 * scale, differences / distance, 0.0)
    return slopes.max(axis=1)


def check_controlled_domain(geom, params: ControlParams, spacing: Optional[float] = None,
                            angular: int = 32, workers: int = 1) -> CertificateReport:
    """Checks that a domain is controlled: H >= c_H, lambda_1 + lambda_2 >= beta H,
    |A| + |grad A| <= C_A and alpha-noncollapsedness

    The margin is the smallest margin of the four conditions, each in its own units; C_A bounds
    a sum of quantities with units 1/length and 1/length^2 as is."""
    samples = _samples(geom, spacing, angular)
    mean = samples.mean_curvature
    curvature = np.linalg.norm(samples.curvatures, axis=1) + shape_operator_gradient(samples)
    ratio = samples.two_convex_margin - params.beta * mean
    reports = []
    for name, values in (("mean-curvature", mean - params.c_H), ("two-convex-ratio", ratio),
                         ("curvature-bound", params.C_A - curvature)):
        worst = int(np.argmin(values))
        reports.append(make_report(name, values[worst], _point_witness(samples, worst), strict=False))
    try:
        reports.append(check_alpha_noncollapsed(samples, params.alpha, workers=workers))
    except PreconditionError as err:
        reports.append(CertificateReport("noncollapsed", False, float(mean.min()), err.witness))
    report = merge_reports("controlled-domain", reports)
    if not report.passed:
        info(f"Domain is not controlled: {[r.name for r in report.failed_details()]}")
    return report

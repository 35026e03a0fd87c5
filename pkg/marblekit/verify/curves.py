"Contains the check of b-controlled curves"
from itertools import combinations
from logging import info
from typing import Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

from ..geometry.curves import SkeletonCurve
from .certificate import CertificateReport, make_report, merge_reports


def _as_list(curves: Union[SkeletonCurve, Sequence[SkeletonCurve]]) -> list:
    return [curves] if isinstance(curves, SkeletonCurve) else list(curves)


def check_controlled_curve(curves: Union[SkeletonCurve, Sequence[SkeletonCurve]],
                           b: float) -> CertificateReport:
    """Checks that a curve or a disjoint union of curves is b-controlled

    Every component needs |kappa| <= 1/b, |d kappa/ds| <= 1/b^2 and a normal injectivity
    radius of at least b/10; distinct components have to be at least 10 b apart. The margins
    of the conditions are reported as sub-reports."""
    curves = _as_list(curves)
    reports = []
    for index, curve in enumerate(curves):
        kappa = curve.curvatures()
        worst = int(np.argmax(kappa))
        reports.append(make_report(f"curvature[{index}]", 1 / b - kappa[worst],
                                   {"curve": index, "point": curve.samples[worst].tolist()},
                                   strict=False))
        derivative = curve.curvature_derivative()
        worst = int(np.argmax(derivative))
        reports.append(make_report(f"curvature-derivative[{index}]", b ** -2 - derivative[worst],
                                   {"curve": index, "point": curve.samples[worst].tolist()},
                                   strict=False))
        reports.append(make_report(f"injectivity-radius[{index}]",
                                   curve.normal_injectivity_radius() - b / 10, {"curve": index},
                                   strict=False))
    for first, second in combinations(range(len(curves)), 2):
        distance, nearest = cKDTree(curves[second].samples).query(curves[first].samples)
        worst = int(np.argmin(distance))
        witness = {"pair": [first, second],
                   "points": [curves[first].samples[worst].tolist(),
                              curves[second].samples[nearest[worst]].tolist()]}
        reports.append(make_report(f"separation[{first},{second}]", distance[worst] - 10 * b,
                                   witness, strict=False))
    report = merge_reports("controlled-curve", reports)
    if not report.passed:
        info(f"Curves are not {b}-controlled: {[r.name for r in report.failed_details()]}")
    return report

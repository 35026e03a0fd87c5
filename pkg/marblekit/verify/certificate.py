"Contains the CertificateReport record produced by every verifier"
from typing import Any, Iterable, NamedTuple, Tuple

import numpy as np

#: Margins within this relative distance of zero are flagged as boundary cases
BOUNDARY_EPSILON = 1e-6


class CertificateReport(NamedTuple):
    """The outcome of one check

    `passed` is true if and only if the margin is positive. When the checked inequality is not
    strict, a margin that vanishes up to rounding carries the flag ``"boundary"``; the verdict
    stays with the sign of the margin."""

    #: Name of the checked condition
    name: str
    #: Verdict
    passed: bool
    #: Worst value of the checked inequality, in the units of that inequality
    margin: float
    #: Location attaining the margin: a point, a sample index or a pair
    witness: Any = None
    #: Sub-reports of the conditions this check is made of
    details: Tuple["CertificateReport", ...] = ()
    #: Remarks such as "boundary"
    flags: Tuple[str, ...] = ()

    def failed_details(self) -> Tuple["CertificateReport", ...]:
        return tuple(report for report in self.details if not report.passed)

    def to_dict(self) -> dict:
        "JSON-serializable representation"
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "margin": plain(self.margin),
            "witness": plain(self.witness),
            "flags": list(self.flags),
            "details": [report.to_dict() for report in self.details],
        }


def plain(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, (tuple, list)):
        return [plain(item) for item in value]
    if isinstance(value, dict):
        return {key: plain(item) for key, item in value.items()}
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    return value


def make_report(name: str, margin: float, witness: Any = None, strict: bool = True,
                details: Iterable[CertificateReport] = (),
                boundary: float = BOUNDARY_EPSILON) -> CertificateReport:
    """Builds a report from a margin

    The verdict is `margin > 0`. Without `strict`, a margin within `boundary` of zero adds the
    flag "boundary"."""
    margin = float(margin)
    flags = ()
    if not strict and abs(margin) <= boundary:
        flags = ("boundary",)
    passed = margin > 0
    return CertificateReport(name, passed, margin, witness, tuple(details), flags)


def merge_reports(name: str, reports: Iterable[CertificateReport]) -> CertificateReport:
    """Min-reduction of sub-reports into one certificate

    The merged report passes if every sub-report passes. Its margin and witness are those of
    the sub-report with the smallest margin."""
    reports = tuple(reports)
    if not reports:
        return CertificateReport(name, True, float("inf"))
    worst = min(reports, key=lambda report: report.margin)
    flags = tuple(sorted({flag for report in reports for flag in report.flags}))
    return CertificateReport(name, all(report.passed for report in reports), worst.margin,
                             worst.witness, reports, flags)

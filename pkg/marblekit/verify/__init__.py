"""Verifiers of the controlledness conditions.

Every check returns a :py:class:`CertificateReport` with the worst sampled margin and the
location attaining it. A failed inequality never raises; exceptions are reserved for violated
preconditions."""

from .certificate import CertificateReport, make_report, merge_reports
from .convexity import check_two_convex, check_alpha_noncollapsed, check_controlled_domain
from .curves import check_controlled_curve
from .placement import check_configuration, check_embedded

"""Standard caps and capped-off tubes.

The standard cap is the domain of revolution of the concave function

    u(xi) = 1                          for xi <= 0
    u(xi) = sqrt(1 - psi(xi) / psi(1))  for 0 <= xi <= 1

where psi is the double integral of a smoothstep ramp that rises from 0 to 1 on [0, RAMP].
psi is convex and increasing, so 1 - psi/psi(1) is concave and positive on [0, 1), and so is
its square root. The cap vanishes exactly at xi = 1 and joins the flat part with vanishing
first, second and third derivative."""
from typing import NamedTuple, Optional

import numpy as np

from ..configuration import ControlParams, DEFAULT_CONTROL
from ..error import ParameterError
from ..geometry.curves import SkeletonCurve
from ..geometry.profiles import ProfileSurface
from ..geometry.tubes import TubeSurface
from ..verify import check_alpha_noncollapsed, check_controlled_domain
from ..verify.convexity import shape_operator_gradient

#: Length of the ramp that blends the flat part into the cap
RAMP = 0.1
#: Meridian samples of a cap
CAP_SAMPLES = 97
#: Sample spacing of the verified unit cylinder
VERIFY_SPACING = 0.04


def _psi(xi: np.ndarray) -> np.ndarray:
    xi = np.clip(np.asarray(xi, dtype=float), 0.0, None)
    t = np.minimum(xi, RAMP) / RAMP
    ramp_part = RAMP ** 2 * (t ** 4 / 4 - t ** 5 / 10)
    beyond = np.maximum(xi - RAMP, 0.0)
    return ramp_part + RAMP / 2 * beyond + beyond ** 2 / 2


def u_st(xi) -> np.ndarray:
    "The standard cap profile, defined on (-inf, 1]"
    xi = np.asarray(xi, dtype=float)
    if np.any(xi > 1 + 1e-12):
        raise ParameterError("The standard cap is defined up to xi = 1", witness=float(np.max(xi)))
    return np.sqrt(np.clip(1 - _psi(np.minimum(xi, 1.0)) / _psi(1.0), 0.0, None))


def cap_samples(count: int = CAP_SAMPLES) -> np.ndarray:
    """Parameters in [0, 1] for sampling the cap, denser towards the tip where u has a
    square root singularity in xi"""
    fraction = np.linspace(0.0, 1.0, count)
    return 1 - (1 - fraction) ** 2


def capped_cylinder_profile(radius: float = 1.0, length: float = 2.0, n: int = 2,
                            spacing: Optional[float] = None) -> ProfileSurface:
    "A round cylinder of the given length, closed off by standard caps on both sides"
    spacing = spacing or radius / 32
    xi = cap_samples()
    cap = np.column_stack([length / 2 + radius * xi, radius * u_st(xi)])
    flat_count = max(3, int(np.ceil(length / spacing)) + 1)
    flat = np.column_stack([np.linspace(-length / 2, length / 2, flat_count), np.full(flat_count, radius)])
    left = cap[::-1] * [-1.0, 1.0]
    meridian = np.vstack([left[:-1], flat, cap[1:]])
    return ProfileSurface(meridian, n, "capped")


class StandardCap(NamedTuple):
    "The standard cap of a parameter set together with the control it was verified for"

    #: Sample parameters on [-L, 1]
    xi: np.ndarray
    #: u_st at the sample parameters
    u: np.ndarray
    #: Cap separation in units of the neck radius
    Gamma: float
    #: The requested control parameters
    params: ControlParams
    #: Control parameters the capped unit cylinder was verified with
    verified: ControlParams
    #: The verification report
    report: object

    def surface(self, radius: float = 1.0, length: float = 2.0) -> ProfileSurface:
        "The cap applied to both ends of a cylinder"
        return capped_cylinder_profile(radius, length, self.params.n)


def standard_cap(params: ControlParams = DEFAULT_CONTROL, Gamma: float = 4.0,
                 flat_length: float = 1.0) -> StandardCap:
    """Samples the standard cap and verifies a capped unit cylinder

    The reported control parameters keep alpha and beta of `params` where they hold and lower
    them otherwise; c_H and C_A are taken from the sampled curvature with a margin of one
    percent."""
    xi = np.concatenate([np.linspace(-flat_length, 0.0, 33)[:-1], cap_samples()])
    u = u_st(xi)
    surface = capped_cylinder_profile(1.0, 2 * flat_length, params.n)
    samples = surface.sample(VERIFY_SPACING)
    mean = samples.mean_curvature
    ratio = float(np.min(samples.two_convex_margin / mean))
    bound = float(np.max(np.linalg.norm(samples.curvatures, axis=1) + shape_operator_gradient(samples)))
    alpha = params.alpha
    while not check_alpha_noncollapsed(samples, alpha).passed and alpha > 1e-3:
        alpha /= 2
    verified = params._replace(alpha=alpha, beta=min(params.beta, 0.99 * ratio),
                               c_H=0.99 * float(mean.min()), C_A=1.01 * bound)
    report = check_controlled_domain(samples, verified)
    return StandardCap(xi, u, Gamma, params, verified, report)


def cap_radial(radius: float, s_start: float, s_end: float, side: str, spacing: float) -> np.ndarray:
    """(s, rho) pairs of a tube of the given radius on [s_start, s_end] closed off by the
    standard cap at the `right` end (s_end), the `left` end (s_start) or `both`"""
    if side not in ("left", "right", "both"):
        raise ParameterError(f"Unknown cap side {side}", witness=side)
    xi = cap_samples()
    flat_from = s_start + radius if side in ("left", "both") else s_start
    flat_to = s_end - radius if side in ("right", "both") else s_end
    if flat_to < flat_from:
        raise ParameterError("The curve is too short for its caps", witness=s_end - s_start)
    count = max(5, int(np.ceil((flat_to - flat_from) / spacing)) + 1)
    pieces = [np.column_stack([np.linspace(flat_from, flat_to, count), np.full(count, radius)])]
    cap = np.column_stack([radius * xi, radius * u_st(xi)])
    if side in ("right", "both"):
        pieces.append(np.column_stack([flat_to + cap[1:, 0], cap[1:, 1]]))
    if side in ("left", "both"):
        pieces.insert(0, np.column_stack([flat_from - cap[:0:-1, 0], cap[:0:-1, 1]]))
    return np.vstack(pieces)


def capped_tube(curve: SkeletonCurve, radius: float, side: str = "right",
                b: float = DEFAULT_CONTROL.b, n: int = 2) -> TubeSurface:
    """The tube of the given radius around an open curve, closed off by the standard cap

    On the `right` side the radius is ``r u_st(1 - (L - s)/r)``, so the tube coincides with
    the plain tube for s <= L - r and closes at the endpoint s = L; the `left` side is the
    mirror image.

    Raises:
        ParameterError: r >= b/10, or the curve is closed or too short
    """
    if radius >= b / 10:
        raise ParameterError(f"A capped tube needs r < b/10 = {b / 10}", witness=radius)
    if curve.closed:
        raise ParameterError("Only open curves can be capped off")
    spacing = min(curve.h_s, radius / 4)
    return TubeSurface(curve, cap_radial(radius, 0.0, curve.total_length, side, spacing), n)

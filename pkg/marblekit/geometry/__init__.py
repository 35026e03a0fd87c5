"""Carriers of curves and hypersurfaces with exact or estimated curvature.

This is the substrate the verifiers, constructions and the flow work on."""

from .abstract import Hypersurface, SurfaceSamples
from .curvature import CurvatureData, curvature_data
from .curves import (
    SkeletonCurve,
    curve_from_points,
    curve_from_function,
    circle_curve,
    ellipse_curve,
    segment_curve,
    arc_curve,
    torus_knot_curve,
    figure_eight_curve,
    connected_sum_curve,
    mirror_curve,
)
from .profiles import (
    ProfileSurface,
    principal_curvatures_profile,
    sphere_profile,
    ellipsoid_profile,
    cylinder_profile,
    cosine_profile,
)
from .tubes import TubeSurface, principal_curvatures_tube, round_torus, constant_radial
from .mesh import TriMesh, estimate_curvatures_mesh, euler_characteristic
from .meshing import mesh_from
from .io import export_mesh, import_mesh, save_curve, load_curve
from .vectors import hausdorff_distance

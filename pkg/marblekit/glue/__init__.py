"""Explicit domains: standard caps, capped-off tubes, junctions, the gluing of strings to balls
and marble graphs."""

from .caps import StandardCap, standard_cap, u_st, cap_radial, capped_tube, capped_cylinder_profile
from .junction import Junction, make_junction, fillet_meridian, string_radius_family, dumbbell_profile
from .graph import Edge, MarbleGraph
from .complex import Marble, GluedString, MarbleComplex
from .gluing import (
    Attachment,
    GlueSpec,
    gap_radius,
    as_marble,
    admissible_radius,
    tubular_neighborhood,
    glue,
    glue_marbles,
)
from .marbles import MarbleGraphKind, build_marble_graph, classify_marble_graph

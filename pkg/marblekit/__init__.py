#!/usr/bin/env python3
"""
Two-convex domains, their flow with surgery and isotopies to marble graphs.
"""

from .configuration import (RunConfig, ControlParams, SurgeryParams, Resolution, Tolerances,
                            load_config, load_params, save_config, DEFAULT_CONFIG)
from .error import MarbleKitError
from .observer import FlowObserver, SimpleObserver
from .flow import run_flow_with_surgery
from .isotopy import assemble_backwards, certify_isotopy, circuit_to_thin_torus
from .knots import same_knot_class, path_component_verdict, torus_matrix_extends

from ._version import (
    __title__,
    __description__,
    __url__,
    __version__,
    __author__,
    __author_email__,
    __license__,
)

"""
Mean curvature flow with surgery of surfaces of revolution and tubes.
"""

from .state import (FlowComponent, FlowState, FlowLog, NeckRegion, StepEvent, SurgeryEvent,
                    DiscardEvent, Snapshot, initial_state)
from .evolution import CurvatureSummary, curvature_summary, flow_step, advance, evolve
from .necks import detect_necks, component_necks
from .surgery import perform_surgery, check_neck_separation, separated_necks
from .classify import (ConvexSphere, CappedTube, TubularLoop, classify_component,
                       remaining_lifetime, neck_points)
from .run import run_flow_with_surgery

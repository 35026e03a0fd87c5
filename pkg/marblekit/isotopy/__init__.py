"""
Discrete two-convex isotopies: their certification, the isotopies of single components and
the assembly of one isotopy from a run of the flow with surgery.
"""

from .path import (IsotopyPath, Frame, Claim, Segment, MONOTONE, TRIVIAL, UNCLAIMED,
                   constant_path, sample_family)
from .certify import certify_isotopy
from .pieces import (neck_undo_isotopy, glued_neck, convex_to_marble, tube_to_marble_tree,
                     loop_to_marble_circuit, piece_isotopy)
from .assembly import assemble_backwards, build_piece_isotopies, reroute_around_ball
from .circuits import circuit_to_thin_torus, thin_torus_isotopy

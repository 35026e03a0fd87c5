"""
Flow observer package.
"""

from .simple_observer import SimpleObserver
from .abstract import FlowObserver

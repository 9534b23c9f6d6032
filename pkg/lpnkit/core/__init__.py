"""
Core configuration and utilities.
"""

from lpnkit.core.config import settings, get_settings
from lpnkit.core.rng import RngStreams

__all__ = ["settings", "get_settings", "RngStreams"]

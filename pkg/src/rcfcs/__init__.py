"""Excitation-current statistics for a driven qubit embedded with a reaction-coordinate mode."""

__version__ = "0.1.0"

from .hilbert import Truncation
from .model import BathThermo, ModelParams

__all__ = ["Truncation", "ModelParams", "BathThermo", "__version__"]

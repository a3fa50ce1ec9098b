"""
sor_mql: SOR minimax Q-learning for two-player zero-sum Markov games.
"""

__version__ = "0.1.0"

from .main import main

__all__ = ["main", "__version__"]

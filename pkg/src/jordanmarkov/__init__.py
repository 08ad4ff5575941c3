"""Exact Jordan/Lie closure checks for Markov rate-matrix models, with a
uniformization matrix exponential for numerical cross-checks."""

__version__ = "0.1.0"

from .linalg import MatrixSubspace, RationalMatrix  # noqa: E402
from .perms import PermGroup, Permutation  # noqa: E402

__all__ = ["MatrixSubspace", "PermGroup", "Permutation", "RationalMatrix", "__version__"]

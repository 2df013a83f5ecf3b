"""Exact multivariate polynomial coding for distributed matrix chain
multiplication over a prime field: encoders, grid/general decoders,
storage placement, closed-form overhead analysis, and a straggler
simulator.
"""

__version__ = "0.1.0"

from mvchain.kernels import BACKEND

__all__ = ["BACKEND", "__version__"]

"""Local degeneracy, degree and heavy tails in Chimera-structured Ising benchmarks."""
from ._kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]

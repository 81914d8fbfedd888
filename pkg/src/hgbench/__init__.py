"""Field-stratified h- and g-index benchmarking."""
from hgbench._backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]

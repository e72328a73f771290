from . import alloc, detectors, geometry, numerics

__version__ = "0.1.0"

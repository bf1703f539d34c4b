"""Geometry kernels, transport solves, the functional algebra and the metric
flow of the linearised sigma model on surfaces, plus a runnable check suite."""

__version__ = "0.1.0"

from . import geometry, hadamard, rgflow, wick  # noqa: F401

__all__ = ["geometry", "hadamard", "rgflow", "wick", "__version__"]

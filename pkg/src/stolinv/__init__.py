"""Exact and numeric tools for the invariance equation of Stolarsky means.

``S_{p,q}(S_{a,b}(x,y), S_{c,d}(x,y)) = S_{p,q}(x,y)`` holds for all positive
``x, y`` exactly for three parameter families; :func:`run_full_pipeline`
re-derives that characterisation with exact polynomial arithmetic.
"""

from .engine import PipelineConfig, VerificationReport, run_full_pipeline
from .families import family_generator
from .means import gini, gini_eval, invariance_residual, stolarsky, stolarsky_eval

__all__ = [
    "PipelineConfig",
    "VerificationReport",
    "family_generator",
    "gini",
    "gini_eval",
    "invariance_residual",
    "run_full_pipeline",
    "stolarsky",
    "stolarsky_eval",
]

__version__ = "0.1.0"

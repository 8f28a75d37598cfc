"""Diffusion maps, geometric harmonics and gappy POD for out-of-sample estimation.

Typical use::

    from gappydmap import datagen, workflows
    P = datagen.cvd_parameter_grid(720)
    X = datagen.generate_surrogate_cvd(P)
    pipe = workflows.fit_pipeline(X, P, partial_size=7)
"""

from . import datagen, dmaps, gappy_pod, harmonics, kernel, parsimony, workflows
from .errors import (
    DataMismatch,
    DegenerateData,
    FormatError,
    GappyDmapError,
    IllPosedError,
    InvalidArgument,
    InvalidData,
    NumericError,
    OutOfSupport,
)

__version__ = "0.1.0"

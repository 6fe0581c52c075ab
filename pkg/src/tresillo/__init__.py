"""Measure how strongly songs use the tresillo rhythm.

Pipeline: MIDI bytes -> onset table -> 16-slot rhythm vector -> (weighted)
cosine similarity against a tresillo reference -> weekly chart trends.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND  # noqa: E402
from .rhythm import (centroid, clave_template, corpus_mean, normalize,  # noqa: E402
                     reggaeton_template, rhythm_vector, tresillo_template)
from .similarity import cosine, parameterized_cosine, scale  # noqa: E402

__all__ = [
    "BACKEND", "centroid", "clave_template", "corpus_mean", "cosine", "normalize",
    "parameterized_cosine", "reggaeton_template", "rhythm_vector", "scale",
    "tresillo_template",
]

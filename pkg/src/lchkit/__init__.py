"""Filtered Legendrian contact homology barcodes and chord-length bounds.

The package is organized around a small pipeline:

    chords + differential  ->  composable words  ->  filtered GF(2) complex
                           ->  persistence barcode  ->  invariants and bounds

plus a numerical harness that searches for the Hamiltonian chords whose
existence the barcode invariants predict.
"""

__version__ = "0.1.0"

from .persistence import Bar, Barcode, Death
from .dga import Chord, DGASpec

__all__ = [
    "Bar",
    "Barcode",
    "Chord",
    "DGASpec",
    "Death",
    "__version__",
]

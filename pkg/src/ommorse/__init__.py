"""Discrete Morse data for complexified linear arrangements.

Sign-vector combinatorics, exact-rational arrangement geometry, shelling
machinery for locally ranked posets, tope-poset linear extensions, the
stratified Salvetti complex with its maximum acyclic matchings, and the
chamber-to-nbc-set bijection that indexes the critical cells.
"""

from .arrangement import Arrangement, parse_arrangement
from .signs import OrientedMatroid, SignVector, parse_covector_file

__all__ = [
    "Arrangement",
    "OrientedMatroid",
    "SignVector",
    "parse_arrangement",
    "parse_covector_file",
]

__version__ = "0.1.0"

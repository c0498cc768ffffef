"""Spectra of Linial-Meshulam random complexes and the combinatorics of their moment method."""

from .cells import ComplexSample, OrientedCell, sample_complex
from .errors import DomainError, ResourceError, WordValidationError
from .operators import SymmetricOperator, adjacency, centered_H, complete_adjacency
from .words import TwoWord, Word, validate_two_word, validate_word

__all__ = [
    "ComplexSample",
    "OrientedCell",
    "sample_complex",
    "DomainError",
    "ResourceError",
    "WordValidationError",
    "SymmetricOperator",
    "adjacency",
    "centered_H",
    "complete_adjacency",
    "Word",
    "TwoWord",
    "validate_word",
    "validate_two_word",
]

__version__ = "0.1.0"

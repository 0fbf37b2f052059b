"""Exact counting of Steiner trees (per size) and Hamiltonian cycles over tree decompositions.

Joins run either by direct per-vertex pairing or through sign-twisted subset
convolutions evaluated in a Clifford algebra via integer matrix products.
"""

from .hamiltonian import count_hamiltonian, ham_join, ham_tables
from .instance import FormatError, Graph, NiceDecomposition, TreeDecomposition, make_nice, parse_graph, parse_td, parse_terminals, validate_td
from .dpcore import CapacityError, SpaceMeter
from .steiner import count_steiner, steiner_join, steiner_tables

__all__ = [
    "CapacityError",
    "FormatError",
    "Graph",
    "NiceDecomposition",
    "SpaceMeter",
    "TreeDecomposition",
    "count_hamiltonian",
    "count_steiner",
    "ham_join",
    "ham_tables",
    "make_nice",
    "parse_graph",
    "parse_td",
    "parse_terminals",
    "steiner_join",
    "steiner_tables",
    "validate_td",
]

__version__ = "0.1.0"

"""Independent colored Jones computations and the loop-expansion bridge."""
from .jones import (
    N_MAX,
    BiJet,
    BraidWord,
    JonesSequence,
    RecursionReport,
    colored_jones,
    ev,
    extract_loop,
    r_matrix,
    verify_recursion,
)
from ._kernels import backend

__all__ = [
    "BiJet",
    "BraidWord",
    "JonesSequence",
    "N_MAX",
    "RecursionReport",
    "backend",
    "colored_jones",
    "ev",
    "extract_loop",
    "r_matrix",
    "verify_recursion",
]

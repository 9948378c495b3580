"""Exact q-difference operators, torus skein algebra and loop-expansion hierarchies."""
from .coeffs import Laurent, MultiLaurent, RationalFn, TruncatedSeries, laurent_mul, series_expand
from .errors import (
    AllZeroThroughM,
    InconsistentSystem,
    NotEven,
    NotInImage,
    OracleMismatch,
    OutOfRange,
    ParseError,
    PoleAtExpansionPoint,
    QHolonomicError,
    ResourceLimit,
    SingularAtExpansionPoint,
)
from .hierarchy import (
    CharPoly,
    DiffOp,
    Hierarchy,
    LoopJet,
    build_hierarchy,
    char_poly,
    degree_invariants,
    dm_monomial_oracle,
    dm_operator,
    hierarchy_residuals,
    normalize_annihilator,
    solve_hierarchy,
)
from .skein import (
    Convention,
    SkeinElement,
    SolidTorusElement,
    chebyshev_s,
    chebyshev_t,
    gelca_action,
    phi,
    phi_inverse,
    recursion_from_orthogonal,
    skein_mul,
)
from .weyl import DiscreteFunction, WeylElement, reflect, tau, weyl_apply, weyl_mul, z2_split

__version__ = "0.1.0"

__all__ = [
    "AllZeroThroughM",
    "CharPoly",
    "Convention",
    "DiffOp",
    "DiscreteFunction",
    "Hierarchy",
    "InconsistentSystem",
    "Laurent",
    "LoopJet",
    "MultiLaurent",
    "NotEven",
    "NotInImage",
    "OracleMismatch",
    "OutOfRange",
    "ParseError",
    "PoleAtExpansionPoint",
    "QHolonomicError",
    "RationalFn",
    "ResourceLimit",
    "SingularAtExpansionPoint",
    "SkeinElement",
    "SolidTorusElement",
    "TruncatedSeries",
    "WeylElement",
    "build_hierarchy",
    "char_poly",
    "chebyshev_s",
    "chebyshev_t",
    "degree_invariants",
    "dm_monomial_oracle",
    "dm_operator",
    "gelca_action",
    "hierarchy_residuals",
    "laurent_mul",
    "normalize_annihilator",
    "phi",
    "phi_inverse",
    "recursion_from_orthogonal",
    "reflect",
    "series_expand",
    "skein_mul",
    "solve_hierarchy",
    "tau",
    "weyl_apply",
    "weyl_mul",
    "z2_split",
]

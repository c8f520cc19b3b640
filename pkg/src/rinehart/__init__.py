"""Exact truncated cohomology of Lie-Rinehart algebras over coordinate rings.

Everything is computed in exact rational arithmetic.  Infinite
dimensional objects (polynomial rings, enveloping algebras, cochain
complexes) are handled through degree or order truncations, with
stabilization across a window of truncation levels standing in for a
termination proof.
"""

from .cohomology import CohomologyReport, DegreeReport, truncated_cohomology
from .derham import (
    de_rham_cohomology,
    de_rham_differential,
    exterior_power_presentation,
    kaehler_presentation,
)
from .envelope import (
    FiniteCoalgebra,
    KoszulComplex,
    OrderOverflowError,
    TruncatedEnveloping,
    TruncatedJet,
    alt_map,
    cobar_truncated_cohomology,
    grothendieck_connection,
    hom_complex_compare,
    jet_from_symbols,
    jet_product,
    koszul_checks,
    pbw_symmetrize,
    proj_map,
    reduced_koszul_differential,
)
from .lierinehart import (
    LRModule,
    LieRinehartAlgebra,
    LieRinehartError,
    NotCertifiedFreeError,
    ce_cohomology,
    ce_differential,
    connection_flatness,
    log_derivations,
    lr_check_axioms,
    saito_check,
)
from .polyring import GroebnerBasis, PolyRing, QuotientRing

__version__ = "0.1.0"

__all__ = [
    "CohomologyReport",
    "DegreeReport",
    "FiniteCoalgebra",
    "GroebnerBasis",
    "KoszulComplex",
    "LRModule",
    "LieRinehartAlgebra",
    "LieRinehartError",
    "NotCertifiedFreeError",
    "OrderOverflowError",
    "PolyRing",
    "QuotientRing",
    "TruncatedEnveloping",
    "TruncatedJet",
    "alt_map",
    "ce_cohomology",
    "ce_differential",
    "cobar_truncated_cohomology",
    "connection_flatness",
    "de_rham_cohomology",
    "de_rham_differential",
    "exterior_power_presentation",
    "grothendieck_connection",
    "hom_complex_compare",
    "jet_from_symbols",
    "jet_product",
    "kaehler_presentation",
    "koszul_checks",
    "log_derivations",
    "lr_check_axioms",
    "pbw_symmetrize",
    "proj_map",
    "reduced_koszul_differential",
    "saito_check",
    "truncated_cohomology",
]

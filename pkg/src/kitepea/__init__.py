"""Kites, lexicographic extensions and refinement properties of pseudo effect algebras."""

from .errors import ConfigError, KitepeaError, NotEnumerableError, NotLatticeError, Unavailable, UsageError
from .kite import KiteAlgebra, KiteElement, lower, upper
from .lexext import LexElement, LexGroup, NPerfectAlgebra, canonical_state, check_slices
from .pea import CheckReport, PeaUniverse, Status, check_mv_axioms, check_pea_axioms, check_symmetric
from .permutation import Permutation
from .pogroup import Kind, PoGroup, RdpClass, RefinementTable, Verdict
from .rdp import brute_refine, check_rip, classify_rdp, lex_refine_rdp1, verify_table
from .structure import (
    build_phi,
    canonical_form,
    check_iso,
    components,
    decide_subdirect_irreducibility,
    decompose,
    iso_phi,
)

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "ConfigError",
    "KiteAlgebra",
    "KiteElement",
    "Kind",
    "KitepeaError",
    "LexElement",
    "LexGroup",
    "NPerfectAlgebra",
    "NotEnumerableError",
    "NotLatticeError",
    "PeaUniverse",
    "Permutation",
    "PoGroup",
    "RdpClass",
    "RefinementTable",
    "Status",
    "Unavailable",
    "UsageError",
    "Verdict",
    "brute_refine",
    "build_phi",
    "canonical_form",
    "canonical_state",
    "check_iso",
    "check_mv_axioms",
    "check_pea_axioms",
    "check_rip",
    "check_slices",
    "check_symmetric",
    "classify_rdp",
    "components",
    "decide_subdirect_irreducibility",
    "decompose",
    "iso_phi",
    "lex_refine_rdp1",
    "lower",
    "upper",
    "verify_table",
]

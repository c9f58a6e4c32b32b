"""rouxforge: construction and certification of doubly transitive complex
line packings (equiangular tight frames) from finite-group data.

The layers, bottom to top: exact finite-field arithmetic (``field``),
enumerable finite groups with actions and characters (``group``), the
integer group algebra of a cyclic group (``cycalg``), roux matrices and
their idempotent data (``roux``), radicalization and Higman-pair
machinery (``radical``), the numeric line-packing layer (``lines``), the
built-in group families and refutation witnesses (``families``), and a
CLI (``cli``).
"""

from .field import FieldSpec, FieldElement, MultiplicativeCharacter
from .group import FiniteGroup, GroupAction, LinearCharacter, Subgroup
from .cycalg import CyclicCharacter, CyclicElement, GroupAlgebraElement
from .roux import IdempotentData, RouxMatrix, RouxParameters, verify_roux
from .radical import CoverData, Key, Radicalization, detect_higman, radicalize
from .lines import ETFCertificate, LineGram, TwoGraph, verify_etf
from .families import FamilyReport, sl2_family, su3_family

__version__ = "0.1.0"

__all__ = [
    "CoverData",
    "CyclicCharacter",
    "CyclicElement",
    "ETFCertificate",
    "FamilyReport",
    "FieldElement",
    "FieldSpec",
    "FiniteGroup",
    "GroupAction",
    "GroupAlgebraElement",
    "IdempotentData",
    "Key",
    "LineGram",
    "LinearCharacter",
    "MultiplicativeCharacter",
    "Radicalization",
    "RouxMatrix",
    "RouxParameters",
    "Subgroup",
    "TwoGraph",
    "detect_higman",
    "radicalize",
    "sl2_family",
    "su3_family",
    "verify_etf",
    "verify_roux",
]

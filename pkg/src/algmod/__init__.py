"""Based rank-n commutative algebras over small prime fields.

Modules: exactla (exact linear algebra), algebra (structure tables),
symmetry (GL_n action), localstruct (local structure and canonical data),
enumeration (search and classification), bounds (dimension formulas),
deform (tangent spaces and lifting), ringlift (finite rings), cli.
"""

from .algebra import BasedAlgebra, InvalidStructure, StructureTable, discriminant, validate
from .exactla import BudgetExceeded, InvertibleMatrix, Subspace
from .symmetry import act, automorphisms, isomorphic

__all__ = [
    "BasedAlgebra",
    "BudgetExceeded",
    "InvalidStructure",
    "InvertibleMatrix",
    "StructureTable",
    "Subspace",
    "act",
    "automorphisms",
    "discriminant",
    "isomorphic",
    "validate",
]

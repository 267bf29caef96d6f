"""Exact computations for finite symmetric tensor categories in characteristic 2.

Submodules: :mod:`~symtwist.exactbase` (finite fields and truncated
deformation rings), :mod:`~symtwist.witt` (Witt vectors),
:mod:`~symtwist.abcoh` (twists and Sweedler cohomology of abelian p-groups),
:mod:`~symtwist.tensorops` (tensor powers and cobar complexes),
:mod:`~symtwist.quasihopf` (triangular quasi-Hopf data),
:mod:`~symtwist.normalize` (twisting to the canonical form) and
:mod:`~symtwist.cli`.
"""

from .errors import (
    CapacityError,
    MalformedInputError,
    NotInvertibleError,
    SymtwistError,
    VerificationError,
)
from .exactbase import BaseRing, FieldSpec, make_field, prime_ring
from .normalize import NormalizationResult, identify_fpdim2, normalize
from .quasihopf import (
    QuasiHopfDatum,
    TwistCertificate,
    apply_twist,
    check_axioms,
    constructors,
    jacobson_radical,
)
from .tensorops import TensorElement

__version__ = "0.1.0"

__all__ = [
    "BaseRing", "CapacityError", "FieldSpec", "MalformedInputError", "NormalizationResult",
    "NotInvertibleError", "QuasiHopfDatum", "SymtwistError", "TensorElement",
    "TwistCertificate", "VerificationError", "apply_twist", "check_axioms", "constructors",
    "identify_fpdim2", "jacobson_radical", "make_field", "normalize", "prime_ring",
]

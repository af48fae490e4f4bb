"""Exact calculus of middle convolutions, extensions and restrictions of
Fuchsian systems, with the combinatorial spectral-type calculus alongside.

Everything is computed over the Gaussian rationals (complex numbers with
rational real and imaginary parts), so every rank decision and every
equivalence test is exact.
"""

from .scalars import GaussianRational, gr, parse_scalar, format_scalar
from .linalg import ExactMatrix
from .spectral import (
    PartitionTuple,
    RiemannScheme,
    enumerate_basic,
    format_spectral_type,
    parse_spectral_type,
)
from .schlesinger import (
    SchlesingerTuple,
    index_of_rigidity,
    infer_scheme,
    is_equivalent,
    is_irreducible,
)
from .katz import addition, mc_max, middle_convolution
from .okubo import OkuboSystem, euler_transform, onf_from_scf, scf_from_onf
from .yokoyama import (
    ExtensionParams,
    RestrictionParams,
    extend_direct,
    restrict,
)

__version__ = "0.1.0"

__all__ = [
    "GaussianRational",
    "gr",
    "parse_scalar",
    "format_scalar",
    "ExactMatrix",
    "PartitionTuple",
    "RiemannScheme",
    "enumerate_basic",
    "format_spectral_type",
    "parse_spectral_type",
    "SchlesingerTuple",
    "index_of_rigidity",
    "infer_scheme",
    "is_equivalent",
    "is_irreducible",
    "addition",
    "mc_max",
    "middle_convolution",
    "OkuboSystem",
    "euler_transform",
    "onf_from_scf",
    "scf_from_onf",
    "ExtensionParams",
    "RestrictionParams",
    "extend_direct",
    "restrict",
    "__version__",
]

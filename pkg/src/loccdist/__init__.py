"""Local (LOCC) discrimination of orthonormal bipartite pure states.

The pipeline: a state family becomes a set of coefficient matrices, those
generate a space of traceless Hermitian operators on Bob's side, a
joint-numerical-range zero-vector finder and a deflation loop turn that
space into a distinguishing measurement basis, and a two-round
measure-and-tell protocol is compiled from it, with success bounds and a
Monte Carlo simulator to check them.
"""

from .basisbuilder import DistinguishingBasis, build_distinguishing_basis, compress, verify_basis
from .errors import LoccdistError
from .jnr import ZeroVectorResult, evaluate_point, find_zero_vector, sample_range
from .kspace import KSpaceBasis, build_kspace, gram_operators, verify_traceless
from .protocol import (
    BoundReport,
    Protocol,
    compile_protocol,
    discrimination_bound,
    error_mass,
    load_protocol,
)
from .simulator import SimulationStats, outcome_distribution, simulate
from .states import (
    OperatorRep,
    SchmidtProfile,
    StateFamily,
    conjugate_J,
    from_operator,
    load_family,
    make_family,
    operator_rep,
    schmidt_profile,
    to_operator,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "DistinguishingBasis",
    "KSpaceBasis",
    "LoccdistError",
    "OperatorRep",
    "Protocol",
    "SchmidtProfile",
    "SimulationStats",
    "StateFamily",
    "ZeroVectorResult",
    "build_distinguishing_basis",
    "build_kspace",
    "compile_protocol",
    "compress",
    "conjugate_J",
    "discrimination_bound",
    "error_mass",
    "evaluate_point",
    "find_zero_vector",
    "from_operator",
    "gram_operators",
    "load_family",
    "load_protocol",
    "make_family",
    "operator_rep",
    "outcome_distribution",
    "sample_range",
    "schmidt_profile",
    "simulate",
    "to_operator",
    "verify_basis",
    "verify_traceless",
    "__version__",
]

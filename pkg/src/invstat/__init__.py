"""GL(n)-invariant statistical geometry of zero-mean multivariate normals."""
from . import _backend
from .errors import (
    ArityError,
    DomainError,
    InvalidOrderError,
    InvstatError,
    NumericalBreakdown,
    ShapeError,
    StepTooLargeError,
)
from .symcone import GroupElement, SpdPoint, SymMat, VechBasis, identity, sample, sym_basis, sym_sqrt
from .gaussian import (
    McConfig,
    McEstimate,
    ac_alpha_at,
    act,
    directional_score,
    fisher_at,
    mc_moment,
    pushforward,
)
from .family import InvariantCubic, RawCubicTensor, invariant_cubic_eval, on_invariance_check, raw_components
from .polys import SymCubicPoly, dimension, phi, phi_inverse
from .verdict import Verdict

__version__ = "0.1.0"

BACKEND = _backend.name()

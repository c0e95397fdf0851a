"""Border-collision bifurcations of continuous two-piece piecewise-linear maps."""

from .classifier import Classification, Scenario, census, classify
from .errors import (
    BCBError,
    Degenerate,
    DegeneracyError,
    InternalConsistencyError,
    NoConvergence,
    ProblemFileError,
)
from .matrix_core import FLOAT, RATIONAL, Matrix, Poly, char_poly, det
from .model import (
    BranchReport,
    ContinuityError,
    Obj,
    PwlMap,
    Side,
    Stable,
    fixed_points,
    llr_admissible_one_side,
    lr_cycle,
)
from .simulator import Orbit, Outcome, detect_attractor
from .spectral import SpectralCounts, counts, spectral_radius, stability, sturm_count
from .verifier import SampleSpec, VerifyReport

__all__ = [
    "BCBError", "BranchReport", "Classification", "ContinuityError", "Degenerate",
    "DegeneracyError", "FLOAT", "InternalConsistencyError", "Matrix", "NoConvergence",
    "Obj", "Orbit", "Outcome", "Poly", "ProblemFileError", "PwlMap", "RATIONAL",
    "SampleSpec", "Scenario", "Side", "SpectralCounts", "Stable", "VerifyReport",
    "census", "char_poly", "classify", "counts", "det", "detect_attractor",
    "fixed_points", "llr_admissible_one_side", "lr_cycle", "spectral_radius",
    "stability", "sturm_count",
]

"""Boolean entropy, Boolean convolution and random-matrix large deviations.

Modules
-------
measures     probability measures on the line, moments, bounded-Lipschitz distance
transforms   Cauchy/K transforms, Boolean convolution, Stieltjes inversion
laws         reference laws: Rademacher, semicircle, Marchenko-Pastur, p_alpha
entropy      Boolean/free/classical entropies and rate functionals
ensembles    Wishart-block and conditioned-GUE samplers, Theta_M, scaled pairs
booleanclt   the Boolean CLT semigroup and its entropy curve
verify       weight-ratio and convergence checks
cli          command-line front end
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BoolentError,
    DomainError,
    InvalidMeasureError,
    InversionError,
    NumericalError,
    SingularTransformError,
)
from .measures import Atomic, Empirical, GridDensity, SubMeasure, d_bl, dilate, moment, symmetrize  # noqa: E402

__all__ = [
    "Atomic",
    "Empirical",
    "GridDensity",
    "SubMeasure",
    "d_bl",
    "dilate",
    "moment",
    "symmetrize",
    "BoolentError",
    "DomainError",
    "InvalidMeasureError",
    "InversionError",
    "NumericalError",
    "SingularTransformError",
]

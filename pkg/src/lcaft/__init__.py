"""Vector-valued Fourier analysis on models of LCA groups.

Group models and duals live in :mod:`lcaft.groups`, finitely supported
vector-valued functions and their norms in :mod:`lcaft.functions`, the
transforms and transfer maps in :mod:`lcaft.transform`, Fourier-type
estimation in :mod:`lcaft.ftype` and the checks in :mod:`lcaft.verify`.
"""

from .estimator import FourierTransformer, FourierTypeEstimator
from .exceptions import (
    CapabilityError,
    DomainError,
    GroupSpecError,
    LCAFTError,
    NumericError,
    ValidationError,
)
from .ftype import Estimate, brute_force_constant, dual_operator, estimate_constant, ratio, ratio_gradient
from .functions import BanachSpec, NormResult, OperatorSpec, VecFunction, delta_function, lp_norm, random_function
from .groups import (
    Cyclic,
    Finite,
    GroupModel,
    Lattice,
    Product,
    RealGrid,
    SubgroupDecomposition,
    Torus,
    annihilator,
    dual_group,
    haar_weight,
    make_group,
    pair,
    parse_group,
    subgroup,
)
from .transform import (
    fourier,
    grid_discretize,
    interleave,
    make_interleaving,
    step_extension,
    tensor_transform,
    weil_decompose,
    zero_extend,
)
from .verify import CheckReport

__version__ = "0.1.0"

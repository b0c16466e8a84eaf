"""Connectedness of finite value-quantale metric spaces."""

from .quantale import EXT, INF, BudgetError, ExtRationalQuantale, OmegaElement, OmegaQuantale, QuantaleError, ext
from .scales import (
    ALL,
    BOUNDED_EXISTS,
    UNIFORM,
    All,
    BoundedBelowExists,
    BoundedBelowFixed,
    ExpansionRate,
    Scale,
    ScaleSystem,
    Uniform,
    canonical_finest_scale,
    enumerate_scales,
    find_walk,
    is_sigma_connected,
    is_sigma_continuous,
    r_components,
    sigma_components,
)
from .spaces import FiniteTopSpace, VMetricSpace, flagg_metrize, induced_topology, mutual_metrize, standard_space

__version__ = "0.1.0"

__all__ = [
    "EXT",
    "INF",
    "ALL",
    "UNIFORM",
    "BOUNDED_EXISTS",
    "All",
    "Uniform",
    "BoundedBelowExists",
    "BoundedBelowFixed",
    "ExpansionRate",
    "BudgetError",
    "QuantaleError",
    "ExtRationalQuantale",
    "OmegaElement",
    "OmegaQuantale",
    "FiniteTopSpace",
    "VMetricSpace",
    "Scale",
    "ScaleSystem",
    "canonical_finest_scale",
    "enumerate_scales",
    "ext",
    "find_walk",
    "flagg_metrize",
    "induced_topology",
    "is_sigma_connected",
    "is_sigma_continuous",
    "mutual_metrize",
    "r_components",
    "sigma_components",
    "standard_space",
]

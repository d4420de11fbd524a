"""Spectral toolkit and verification harness for the twisted Laplacian on R^(2n)."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    FitError,
    InvalidInputError,
    ResourceLimitError,
    TruncationKeyError,
    TruncationWarning,
)
from .special_functions import (
    GaussHermiteRule,
    enumerate_level,
    gauss_hermite_rule,
    hermite_function_table,
    hermite_function_values,
    hermite_polynomial_table,
    multi_index_order,
)
from .special_hermite import (
    BasisTable,
    QuadratureGrid,
    SpectralField,
    analyze,
    build_basis,
    eval_special_hermite,
    evaluate_pairs,
    load_basis,
    save_basis,
    synthesize,
)
from .spectral_ops import (
    NormOrder,
    NormParams,
    TimeSeriesField,
    apply_twisted_laplacian_fd,
    auto_time_samples,
    fractional_power,
    heat_semigroup,
    interior_mask,
    landau_level,
    mixed_norm,
    project,
    propagate,
    propagate_series,
    sobolev_norm,
    triebel_lizorkin_norm,
    weighted_lp_norm,
)

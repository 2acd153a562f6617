"""Nonlinear cross-correlation estimators built from piecewise-linear functions.

Submodules:

- ``pwl``: generating functions ``h`` and correlator scores
- ``price``: theoretical expected output ``g(R)`` under Gaussian inputs
- ``sampling``: correlated sample pairs with reproducible seeding
- ``wht``: normalized fast Walsh-Hadamard transform
- ``calibration``: Monte-Carlo inverse-map fitting and estimation
- ``metrics``: Cramér-Rao bound, error sweeps and SNR
- ``cli``: batch front-end writing CSV
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateInputError,
    DomainError,
    ModelFormatError,
    ModelVersionError,
    NumericError,
    ParameterError,
    PwlCorrError,
    SpecMismatchError,
)
from .pwl import (
    DEFAULT_SPECS,
    CorrelatorSpec,
    Kind,
    PwlMixture,
    batch_score,
    correlator_f,
    format_spec,
    huber_h,
    lse_h,
    mp_h,
    parse_spec,
    pwl_h,
)
from .price import GCurve, build_gcurve, dg_dR, g_l1_closed, g_l2_closed, g_of_R, l1_quartic_identity
from .sampling import (
    Family,
    RngStream,
    SampleBatch,
    sample_bivariate_gaussian,
    sample_block,
    sample_nongaussian,
    sample_pairs,
    standardize,
)
from .wht import WhtVector, fwht, pad_pow2, transform_batch
from .calibration import (
    CalibrationModel,
    CalibrationTable,
    build_table,
    calibrate,
    estimate_r,
    fit_inverse,
    invert,
    load_model,
    save_model,
)
from .metrics import (
    SweepResult,
    crb_sigma,
    empirical_product_variance,
    error_std_sweep,
    fisher_info,
    snr_db,
    snr_sweep,
)

"""Average age of information of a two-hop decode-and-forward relay link."""

from ._core import (  # noqa: F401
    AoiEstimate,
    ErrorMethod,
    ErrorReport,
    Evaluator,
    Hop,
    Kernel,
    LinkBudget,
    ServiceMoments,
    SimMode,
    SimResult,
    SweepParam,
    SweepResult,
    SweepRow,
    SystemConfig,
    aaoi_analytic,
    aaoi_for_error,
    approx_params,
    avg_error_closed_form,
    avg_error_quadrature,
    build_link_budgets,
    capacity,
    conditional_error,
    dbm_to_watts,
    default_grid,
    dispersion,
    overall_df_error,
    path_gain,
    pk_mean_wait,
    q_function,
    replicate,
    service_moments,
    simulate,
    sweep,
    system_error,
    watts_to_dbm,
)

__version__ = "0.1.0"

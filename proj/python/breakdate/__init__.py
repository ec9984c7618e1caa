"""Break-date estimation for high-dimensional panels.

Thin wrapper around the C++ core: U-statistic and least-squares break
scans, nuisance estimation, the limiting argmin distribution, and the
plug-in/bootstrap confidence interval menu.
"""

from ._core import (
    InvalidInput,
    NumericError,
    build_delta,
    build_sigma,
    confidence_intervals,
    estimate,
    generate_panel,
    load_panel_csv,
    rothman_pd,
    scan_ssr,
    scan_ustat,
    xi_density,
    xi_quantile,
    xi_sample_mc,
)

__all__ = [
    "InvalidInput",
    "NumericError",
    "build_delta",
    "build_sigma",
    "confidence_intervals",
    "estimate",
    "generate_panel",
    "load_panel_csv",
    "rothman_pd",
    "scan_ssr",
    "scan_ustat",
    "xi_density",
    "xi_quantile",
    "xi_sample_mc",
]

__version__ = "0.1.0"

"""Bradley-Terry-Luce estimation on general comparison graphs.

Modules:

* :mod:`btlrank.graph` - comparison graphs, generators, spectra
* :mod:`btlrank.model` - BTL parameters, outcome data, simulation
* :mod:`btlrank.estimators` - likelihood, gradient descent MLE, tree closed form
* :mod:`btlrank.ensemble` - add-MLE assembly from subgraph fits
* :mod:`btlrank.bounds` - upper and minimax lower error bounds
* :mod:`btlrank.experiments` - seeded Monte Carlo recipes with CSV output
"""

from .errors import BtlError, MLENonexistenceError, NumericalError, ValidationError
from .graph import (
    ComparisonGraph,
    NormalizedLaplacianSpectrum,
    SpectralSummary,
    is_connected,
    is_strongly_connected_directed,
    normalized_spectrum,
    spectral_summary,
)
from .model import BtlParameters, ComparisonData, kappa, kappa_E, linear_theta, simulate, win_prob
from .estimators import FitConfig, FitResult, d_infinity, fit, fit_tree_closed_form
from .ensemble import SubgraphFit, add_mle_barbell, add_mle_island_chain, add_mle_three

__version__ = "0.1.0"

__all__ = [
    "BtlError",
    "MLENonexistenceError",
    "NumericalError",
    "ValidationError",
    "ComparisonGraph",
    "NormalizedLaplacianSpectrum",
    "SpectralSummary",
    "is_connected",
    "is_strongly_connected_directed",
    "normalized_spectrum",
    "spectral_summary",
    "BtlParameters",
    "ComparisonData",
    "kappa",
    "kappa_E",
    "linear_theta",
    "simulate",
    "win_prob",
    "FitConfig",
    "FitResult",
    "d_infinity",
    "fit",
    "fit_tree_closed_form",
    "SubgraphFit",
    "add_mle_barbell",
    "add_mle_island_chain",
    "add_mle_three",
]

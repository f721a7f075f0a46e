"""Credit default risk with q-Gaussian return distributions.

Structural Merton / Black-Cox models generalized to fat-tailed q-Gaussian
log-asset-returns, with the full estimation pipeline: asset-value
construction from equity and liability data, rolling maximum-likelihood
parameter tracks, default-probability term structures, and ROC/AUC
validation on labeled portfolios.
"""

from .dist import GammaParams, GaussianLaw, QGaussianParams, StudentParams
from .market import AssetSeries, FirmSeries, ReturnSeries
from .models import DistanceToDefault, PDCurve, PDModel

__version__ = "0.1.0"

__all__ = [
    "GammaParams",
    "GaussianLaw",
    "QGaussianParams",
    "StudentParams",
    "AssetSeries",
    "FirmSeries",
    "ReturnSeries",
    "DistanceToDefault",
    "PDCurve",
    "PDModel",
    "__version__",
]

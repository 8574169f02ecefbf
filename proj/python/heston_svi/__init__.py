"""Large-maturity Heston implied variance, its SVI form, and the tools around it."""

from ._core import *  # noqa: F401,F403
from ._core import (
    HestonParams,
    HestonSviError,
    SVIOmegaParams,
    SVIRawParams,
    Smile,
)

P0 = HestonParams(kappa=1.0, theta=0.04, sigma=0.25, rho=-0.5, v0=0.04)

__version__ = "0.1.0"

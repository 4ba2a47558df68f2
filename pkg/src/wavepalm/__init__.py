"""Palm distributions of wave characteristics for a Gaussian sea.

The package computes exact distributions of slope, wave velocity and
half-wavelength/waveheight geometry observed at wave centers, both along a
spatial transect and as encountered by a ship, and cross-validates every
closed form against a spectral-synthesis Monte Carlo simulator.
"""

from wavepalm.spectrum import (
    SpectrumConfig,
    JonswapSpectrum,
    ScaledSpectrum,
    MomentSet,
    CovKernel,
    NormalizationScales,
    SpectrumError,
    dispersion,
    jonswap_density,
    spectral_moment,
    covariance,
    normalize,
)

__version__ = "0.1.0"

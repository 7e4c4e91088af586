"""Spectral paracontrolled solver and Monte Carlo verification harness
for periodic SDEs with distributional drift and symmetric stable noise.

Submodules:
  fields, spectral, semigroup, enhanced_drift, pde, levy, mcsim,
  probes, report, cli
"""

__version__ = "0.1.0"

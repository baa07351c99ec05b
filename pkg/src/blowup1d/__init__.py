"""Simulation and verification lab for 1D models of boundary blow-up.

Modules:
  grids        uniform grids, spectral derivatives, resolution monitoring
  fields       field states, symmetry class, presets, log coordinates
  biotsavart   velocity reconstruction laws and their quadrature oracles
  kernels      closed-form kernels and numerical property certification
  evolve       RK4 time stepping with CFL control and termination detection
  diagnostics  functionals, norms, inequality margins, quadratic forms
  bounds       comparison-ODE envelopes and blow-up time bounds
  config/output/report/cli  run configuration, artifacts, figures, commands
"""

__version__ = "0.1.0"

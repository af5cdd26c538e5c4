"""
Weighted NLS Toolkit

Simulator and numerical-analysis toolkit for the 2D defocusing nonlinear
Schrodinger equation with singular weighted exponential nonlinearity
i u_t + Δu = |x|^{-b} u (e^{α|u|²} - 1), α = 2π(2 - b).
"""

__version__ = "0.1.0"

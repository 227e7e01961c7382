"""
tvglasso: estimation of time-varying sparse Gaussian graphical models
with the kernel-smoothed graphical lasso.
"""

__version__ = "1.0.0"

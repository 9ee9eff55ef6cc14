"""Numerical Mellin analysis on the positive half-line and the polar half-plane."""
from .core import PositiveAxisSignal, xnorm, mellin_translate, mellin_derivative
from .errors import *  # noqa: F401,F403
from .quadrature import LogGrid, QuadratureConfig
from .transform import MellinSpectrum, mellin_forward, mellin_inverse, plancherel_ratio, consistency_check
from .polar import PolarFunction, Curve, Segment, cr_residual, d_pol, line_integral, from_strip, to_strip

__version__ = "0.1.0"

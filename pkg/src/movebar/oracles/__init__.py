"""Numerical cross-checks: quadrature, lattice and simulation pricers.

Three independent routes to the same prices as the closed forms, used by the
validation command and the test suite.  Each is slower but assumption-free:
the quadrature integrates the image-kernel representation, the lattice solves
the pricing PDE directly, and the simulation walks the log-spot with a
crossing-probability correction between steps.
"""
from .heatkernel import HeatCoords, to_heat_coords, heat_kernel_price
from .pde import PdeGrid, pde_price
from .montecarlo import McEstimate, mc_price

__all__ = [
    "HeatCoords", "to_heat_coords", "heat_kernel_price",
    "PdeGrid", "pde_price",
    "McEstimate", "mc_price",
]

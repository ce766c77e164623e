"""Entropy-stable and low-Mach-compliant finite-volume fluxes for the 2-D Euler equations."""
from .eos import GasModel, IDEAL_AIR
from .fluxes import FluxKind, numerical_flux

__version__ = "0.1.0"

__all__ = ["GasModel", "IDEAL_AIR", "FluxKind", "numerical_flux", "__version__"]

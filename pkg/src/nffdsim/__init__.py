"""Simulator for near-field Fresnel diffraction trap arrays and
collision-based two-qubit gates on neutral atoms."""

__version__ = "0.1.0"

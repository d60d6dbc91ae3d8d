"""Legendre-Galerkin solver for the free Schrödinger equation on a rectangle
with discrete transparent boundary conditions (convolution-quadrature and
Padé-based)."""

__version__ = "0.1.0"

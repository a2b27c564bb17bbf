"""Entropy-stable discontinuous Galerkin solver for compressible Euler
equations with gravity, built on skew-hybridized summation-by-parts
operators and flux differencing."""

__version__ = "0.1.0"

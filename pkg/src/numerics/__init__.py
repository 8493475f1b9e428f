"""Numerical building blocks: special functions, quadrature, search."""

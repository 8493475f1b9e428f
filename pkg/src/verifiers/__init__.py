"""Verifiers for the area bounds, the sweepout and the Jacobi analysis."""

"""Spectral-geometry laboratory for the first Neumann and Steklov eigenvalues.

The package computes the scale-invariant quantities mu1(Omega)*|Omega| and
sigma1(Omega)*P(Omega) on planar convex domains, their ratio functional
F(Omega), and the one-dimensional weighted problems that arise when a domain
collapses onto a segment.
"""

__version__ = "0.1.0"

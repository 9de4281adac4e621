"""
degree0 - exact classification of compact complex surfaces by transcendence degree.

This package provides functionality for:
- Exact arithmetic in multi-quadratic number fields
- Exact linear algebra: determinants, integer kernel lattices, signatures
- Two-dimensional complex tori: Riemann locus, degenerate locus, certificates
- Hopf surfaces: normal forms, multiplicative dependence, invariant functions
- K3 surfaces: intersection forms, period points, Picard kernels
- Reproducible density experiments over the moduli spaces
"""

__version__ = "0.1.0"
__author__ = "Your Name"
__email__ = "your.email@example.com"

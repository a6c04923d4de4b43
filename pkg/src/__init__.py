"""
tcas - Two-Mode Tensor Computer Algebra Package

Abstract-index rewriting, component calculation and the geometrization of
Maxwell's equations, driven by Cadabra-style and FORM-style scripts.
"""

__version__ = "0.1.0"
__author__ = "tcas developers"

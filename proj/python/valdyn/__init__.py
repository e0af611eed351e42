"""Valuation spaces of normal surface singularities and the dynamics of
non-invertible germs acting on them.

Valuations are passed as literals such as ``"vertex:E1"`` or
``"edge:(E1,E2) t=1/2"``; exact values come back as ``fractions.Fraction``.
"""

from ._core import Cusp, Germ, Graph, ValdynError, detect_recursion

__all__ = ["Cusp", "Germ", "Graph", "ValdynError", "detect_recursion"]

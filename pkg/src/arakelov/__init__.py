"""Exact Arakelov machinery for the modular curve X0(p).

Modules: ``fiber`` (special fibre, vertical divisors), ``heights`` (height
comparisons and the quadratic-point bound b(p)), ``modsym`` (modular
symbols, winding quotient), ``theta`` (genus <= 2 theta evaluator) and
``cli``.
"""

from .bound import BoundExpr
from .ledger import DEFAULT_LEDGER, ConstantLedger

__version__ = "0.1.0"

__all__ = ["BoundExpr", "ConstantLedger", "DEFAULT_LEDGER", "__version__"]

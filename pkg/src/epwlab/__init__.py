"""Exact finite-field and rational computations around Lagrangian degeneracy loci:
EPW quartic sections, Kummer quartics, (1,1)-conics on Verra varieties, Schubert
calculus on G(3, 6) and lattice identities."""

from .exactlin import GF, GF2, QQ, Field, Matrix, Subspace

__version__ = "0.1.0"
SCHEMA_VERSION = 1

__all__ = ["GF", "GF2", "QQ", "Field", "Matrix", "Subspace", "SCHEMA_VERSION", "__version__"]

"""sparseavg: numerical laboratory for sparse averaging operators on
homogeneous spaces (tori, Heisenberg nilmanifold products, modular-surface
products), their radial Fourier kernels, decay-exponent estimation and the
horizontal-character obstruction search."""

__version__ = "0.1.0"

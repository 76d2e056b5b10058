"""Weight-one Hilbert Eisenstein series, their p-adic families, p-adic L-functions,
L-invariants and first-order cuspidal deformations over Q and real quadratic fields."""

__version__ = "0.1.0"

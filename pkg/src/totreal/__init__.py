"""Desk-scale computations for automorphic forms over Q and real quadratic
fields: Whittaker functions, Hecke/Eisenstein coefficients, Kloosterman
sums, Kuznetsov transforms, oldform orthogonalization, and shifted
convolution sums."""

__version__ = "0.1.0"

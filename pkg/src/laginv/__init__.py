"""Discrete invariants of Lagrangian surfaces in symplectic 4-manifolds."""

__version__ = "0.1.0"

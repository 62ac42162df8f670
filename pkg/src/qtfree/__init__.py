"""Kerr quotients of pointed graphs, exact Lipschitz-free norms, and affine actions."""
__version__ = "0.1.0"

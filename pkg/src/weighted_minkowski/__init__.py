"""Weighted surface area measures, mixed measures, projection functions and the
discrete weighted Minkowski problem for origin-symmetric polytopes in R^2..R^4."""

__version__ = "0.1.0"

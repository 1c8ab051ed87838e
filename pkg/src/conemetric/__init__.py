"""Spherical cone metrics: rational developing maps, character 1-forms,
Schwarzian weights, Frobenius local solutions and cusp indicators."""

__version__ = "0.1.0"

"""Exact finite-group Hopf algebra constructions: matched pairs, bicrossed
products, Drinfeld doubles, twisted doubles and their representation categories."""

__version__ = "0.1.0"

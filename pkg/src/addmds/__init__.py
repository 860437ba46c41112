"""Additive MDS codes over small fields via arcs of projective subspaces."""

__version__ = "0.1.0"

"""Spectral singularities of complex one-dimensional potentials."""

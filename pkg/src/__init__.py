"""Noise-field laboratory: Euclidean kernels, lattice and Wightman checks."""

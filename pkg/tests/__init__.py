"""Tests of the noise-field laboratory."""

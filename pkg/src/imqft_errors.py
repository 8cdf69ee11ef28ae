#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Exceptions raised by the noise-field laboratory.

Library code raises these; the command line maps them to exit codes.
"""

__author__ = "IMQFT Lab developers"
__copyright__ = "Copyright 2026, IMQFT Lab developers"
__license__ = "MIT"
__version__ = "1.0.0"
__status__ = "Development"


class ImqftError(Exception):
    """Base class of all laboratory errors."""

    EXIT_CODE = 1


class ParseError(ImqftError):
    """A model document violates the schema."""

    def __init__(self, key, message):
        super().__init__('%s: %s' % (key, message))
        self.key = key


class ValidationError(ImqftError):
    """A model violates one or more invariants."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__('; '.join(self.errors))


class UnsupportedSpectrumError(ImqftError):
    """The operation needs a no-dipole spectrum of distinct masses."""


class NumericToleranceError(ImqftError):
    """A numerical tolerance could not be met."""

    EXIT_CODE = 2


class ResolutionError(NumericToleranceError):
    """The grid is too coarse for the tolerance or too large to allocate."""

    def __init__(self, message, fine=None, coarse=None):
        super().__init__(message)
        self.fine = fine
        self.coarse = coarse


class NearPoleError(NumericToleranceError):
    """An on-shell configuration sits on the pole of a Wightman term."""

    def __init__(self, term, distance):
        super().__init__('term %d is %.3e from its pole' % (term, distance))
        self.term = term
        self.distance = distance


class SingularityError(NumericToleranceError):
    """A kernel was evaluated at a point where it diverges."""


class DomainError(ImqftError, ValueError):
    """An argument lies outside its documented range."""

    EXIT_CODE = 3


class InputError(DomainError):
    """A family of correlation values misses a required order."""


class SampleSizeError(DomainError):
    """Too few Monte Carlo samples for a meaningful error bar."""


class ConfigurationError(DomainError):
    """Run configuration is inconsistent (defaults file, random streams)."""


class UsageError(DomainError):
    """The command line could not be parsed."""

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Covariant operator data: ``p(t)``, the inverse symbol of ``D``, partial
fractions of the mass spectrum and Euclidean Green's kernels.
"""

import math
import typing
from dataclasses import dataclass

import numpy as np
import numpy.polynomial.polynomial as npoly
from logzero import logger
from scipy import integrate, special

from src.imqft_errors import (DomainError, NumericToleranceError,
                              SingularityError, UnsupportedSpectrumError)
from src.imqft_model import MassSpectrum, ValidatedModel

__author__ = "IMQFT Lab developers"
__copyright__ = "Copyright 2026, IMQFT Lab developers"
__license__ = "MIT"
__version__ = "1.0.0"
__status__ = "Development"

SINGULAR_RADIUS = 1e-12
QUADRATURE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class PartialFractions:
    """Coefficients ``b_l`` of ``1/prod(t+m_l^2) = sum b_l/(t+m_l^2)``."""

    coefficients: typing.Tuple[float, ...]
    masses: typing.Tuple[float, ...]

    def evaluate(self, t) -> np.ndarray:
        """Right-hand side of the decomposition."""

        t = np.asarray(t, dtype=float)
        return sum(coefficient / (t + mass ** 2) for coefficient, mass
                   in zip(self.coefficients, self.masses))


def p_polynomial(t, spectrum: MassSpectrum):
    """``prod_l (t + m_l^2)^nu_l / prod_l m_l^(2 nu_l)``; ``p(0) = 1``."""

    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError('p(t) is defined for t >= 0 only')
    return denominator(t, spectrum) / spectrum.normalization


def denominator(t, spectrum: MassSpectrum):
    """``prod_l (t + m_l^2)^nu_l``."""

    t = np.asarray(t, dtype=float)
    value = np.ones_like(t)
    for mass, nu in spectrum.entries:
        value = value * (t + mass ** 2) ** nu
    return value


def dhat_inverse(k, model: ValidatedModel) -> np.ndarray:
    """``Q_E(k) / prod_l (|k|^2 + m_l^2)^nu_l`` for momenta ``(..., d)``."""

    k = np.asarray(k, dtype=float)
    q_euclid = model.qE.evaluate(k[..., np.newaxis, :])
    denom = denominator(np.sum(k ** 2, axis=-1), model.spectrum)
    return q_euclid / denom[..., np.newaxis, np.newaxis]


def partial_fractions(spectrum: MassSpectrum) -> PartialFractions:
    """Residue formula ``b_l = prod_{j != l} (m_j^2 - m_l^2)^-1``."""

    masses = spectrum.masses
    if not spectrum.no_dipole:
        raise UnsupportedSpectrumError('partial fractions need a no-dipole '
                                       'spectrum')
    if len(set(masses.tolist())) != len(masses):
        raise UnsupportedSpectrumError('partial fractions need pairwise '
                                       'distinct masses')
    squares = masses ** 2
    coefficients = []
    for l, square in enumerate(squares):
        others = np.delete(squares, l)
        coefficients.append(float(np.prod(1.0 / (others - square))))
    return PartialFractions(tuple(coefficients), tuple(masses.tolist()))


def pole_expansion(spectrum: MassSpectrum, numerator=(1.0,)) \
        -> typing.List[typing.List[float]]:
    """
    Coefficients ``c[l][j-1]`` with
    ``P(t)/prod(t+m_l^2)^nu_l = sum_l sum_j c_lj/(t+m_l^2)^j`` plus a
    polynomial part, which is dropped (it is supported at the origin).
    """

    squares = spectrum.masses ** 2
    degrees = spectrum.degrees
    numerator = npoly.Polynomial(numerator)
    expansion = []
    for l, (square, nu) in enumerate(zip(squares, degrees)):
        shift = npoly.Polynomial([-square, 1.0])
        series = numerator(shift).coef[:nu]
        series = np.pad(series, (0, nu - len(series)))
        for i, (other, other_nu) in enumerate(zip(squares, degrees)):
            if i == l:
                continue
            gap = other - square
            factor = np.array([(-1) ** q * math.comb(other_nu + q - 1, q) *
                               gap ** (-other_nu - q) for q in range(nu)])
            series = npoly.polymul(series, factor)[:nu]
            series = np.pad(series, (0, nu - len(series)))
        expansion.append([float(series[nu - j]) for j in range(1, nu + 1)])
    return expansion


def momentum_grid(size: int, spacing: float, dim: int) -> np.ndarray:
    """FFT momenta ``2 pi n / (size spacing)``, shape ``(size,)*d + (d,)``."""

    axis = 2 * np.pi * np.fft.fftfreq(size, d=spacing)
    mesh = np.meshgrid(*([axis] * dim), indexing='ij')
    return np.stack(mesh, axis=-1)


def _heat_kernel_log_integrand(log_t, radius, mass, dim, power):
    with np.errstate(over='ignore', under='ignore'):
        t = np.exp(log_t)
        exponent = power * log_t - 0.5 * dim * (np.log(4 * np.pi) + log_t) \
            - radius ** 2 / (4 * t) - mass ** 2 * t - special.gammaln(power)
        return float(np.exp(exponent))


def green_kernel_power(radius: float, mass: float, dim: int,
                       power: int = 1) -> float:
    """Kernel of ``(-Delta + m^2)^-power`` in d dimensions at ``|x| = r``."""

    if radius < SINGULAR_RADIUS:
        if power > dim / 2:
            return float(special.gamma(power - dim / 2) /
                         (special.gamma(power) * (4 * np.pi) ** (dim / 2)) *
                         mass ** (dim - 2 * power))
        raise SingularityError('kernel of (-Delta+m^2)^-%d diverges at the '
                               'origin in d=%d' % (power, dim))
    if power == 1 and dim == 1:
        return float(np.exp(-mass * radius) / (2 * mass))
    if power == 1 and dim == 2:
        return float(special.k0(mass * radius) / (2 * np.pi))
    if power == 1 and dim == 3:
        return float(np.exp(-mass * radius) / (4 * np.pi * radius))

    shifted = power - dim / 2
    peak = (shifted + np.sqrt(shifted ** 2 + mass ** 2 * radius ** 2)) / \
        (2 * mass ** 2)
    split = float(np.log(peak)) if peak > 0 else 0.0
    args = (radius, mass, dim, power)
    total, error = 0.0, 0.0
    for lower, upper in ((-np.inf, split), (split, np.inf)):
        value, estimate = integrate.quad(
            _heat_kernel_log_integrand, lower, upper, args=args,
            epsabs=QUADRATURE_TOLERANCE, epsrel=QUADRATURE_TOLERANCE,
            limit=200)
        total += value
        error += estimate
    if error > 10 * QUADRATURE_TOLERANCE + 1e-8 * abs(total):
        raise NumericToleranceError('radial quadrature error %.2e at r=%g'
                                    % (error, radius))
    logger.debug('Quadrature\t: r=%g d=%d power=%d -> %.6e (+- %.1e)',
                 radius, dim, power, total, error)
    return total


def green_kernel(x, mass: float, dim: int) -> float:
    """Fundamental solution of ``-Delta + m^2`` at the point ``x``."""

    x = np.atleast_1d(np.asarray(x, dtype=float))
    radius = float(np.linalg.norm(x))
    if radius < SINGULAR_RADIUS:
        raise SingularityError('Green kernel evaluated at |x| < %g'
                               % SINGULAR_RADIUS)
    return green_kernel_power(radius, mass, dim, 1)

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Analytic truncated Schwinger functions of the field ``D phi = eta``.

The two-point function is evaluated by radial quadrature when
``Q^E_2(k, -k)`` depends on ``|k|^2`` only and by a momentum sum otherwise.
Higher orders are vertex integrals computed by FFT convolution on a
periodic grid; off-grid points are placed by exact Fourier phases.
"""

import math
import string
import typing
from dataclasses import dataclass, field

import numpy as np
from logzero import logger

from src.imqft_errors import (DomainError, ResolutionError,
                              UnsupportedSpectrumError)
from src.imqft_levy import cumulant_tensor
from src.imqft_model import ValidatedModel
from src.imqft_polynomial import ContractedPolynomial
from src.imqft_propagator import (denominator, green_kernel_power,
                                  momentum_grid, partial_fractions,
                                  pole_expansion)

__author__ = "IMQFT Lab developers"
__copyright__ = "Copyright 2026, IMQFT Lab developers"
__license__ = "MIT"
__version__ = "1.0.0"
__status__ = "Development"

DEFAULT_SPACING = 0.05
DEFAULT_EXTENT = 16.0
GRID_SITE_BUDGET = 2 ** 22
ISOTROPY_TOLERANCE = 1e-9


def euclidean_polynomial(model: ValidatedModel,
                         order: int) -> ContractedPolynomial:
    """``Q^E_n = C^{b_1..b_n} prod_l Q_{E,b_l,a_l}`` with raised indices."""

    cumulant = cumulant_tensor(order, model.levy)
    return ContractedPolynomial(cumulant.raised(model.inverse_metric),
                                model.qE)


def schwinger1(alpha: int, model: ValidatedModel) -> float:
    """Mean field ``<phi_alpha>``."""

    poly = euclidean_polynomial(model, 1)
    value = poly.evaluate(np.zeros((1, model.d)))[alpha]
    return float(np.real(value)) / model.spectrum.normalization


def default_spacing(extent: float, dim: int) -> float:
    """``DEFAULT_SPACING``, coarsened until the grid fits the site budget."""

    per_axis = math.floor(GRID_SITE_BUDGET ** (1.0 / dim)) - 2
    return max(DEFAULT_SPACING, extent / per_axis)


def _grid_size(spacing: float, extent: float, dim: int) -> int:
    size = int(math.ceil(extent / spacing - 1e-9))
    size = size + 1 if size % 2 == 0 else size
    if size ** dim > GRID_SITE_BUDGET:
        raise ResolutionError('a %d^%d grid exceeds the budget of %d sites, '
                              'use a coarser spacing or a smaller extent'
                              % (size, dim, GRID_SITE_BUDGET))
    return size


def _radial_numerator(model: ValidatedModel, alpha1: int, alpha2: int):
    """Coefficients of ``Q^E_2(k,-k)`` as a polynomial in ``|k|^2``."""

    poly = euclidean_polynomial(model, 2)
    degree = poly.degree_bound

    def entry(k):
        momenta = np.stack([k, -k], axis=-2)
        return poly.evaluate(momenta)[..., alpha1, alpha2]

    squares = np.arange(degree + 1, dtype=float)
    axis = np.zeros((degree + 1, model.d))
    axis[:, 0] = np.sqrt(squares)
    samples = entry(axis)
    coefficients = np.linalg.solve(np.vander(squares, increasing=True),
                                   samples)

    rng = np.random.default_rng(12345)
    probes = rng.normal(size=(4, model.d))
    expected = np.polynomial.polynomial.polyval(np.sum(probes ** 2, axis=-1),
                                                coefficients)
    actual = entry(probes)
    scale = max(1.0, float(np.max(np.abs(actual))))
    isotropic = np.max(np.abs(actual - expected)) <= ISOTROPY_TOLERANCE * \
        scale and np.max(np.abs(np.imag(coefficients))) <= \
        ISOTROPY_TOLERANCE * scale
    return isotropic, np.real(coefficients)


def _two_point_momentum_sum(x, alpha1, alpha2, model, spacing, extent):
    size = _grid_size(spacing, extent, model.d)
    momenta = momentum_grid(size, spacing, model.d)
    poly = euclidean_polynomial(model, 2)
    values = poly.evaluate(np.stack([momenta, -momenta], axis=-2))
    symbol = values[..., alpha1, alpha2] / denominator(
        np.sum(momenta ** 2, axis=-1), model.spectrum)
    phases = np.exp(1j * momenta @ np.asarray(x, dtype=float))
    total = np.sum(symbol * phases) / (size * spacing) ** model.d
    return float(np.real(total)) / model.spectrum.normalization


def schwinger2_truncated(x, alpha1: int, alpha2: int,
                         model: ValidatedModel,
                         spacing: float = None,
                         extent: float = DEFAULT_EXTENT) -> float:
    """Truncated two-point function at the separation ``x = x_1 - x_2``."""

    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (model.d,):
        raise DomainError('separation must have %d components' % model.d)
    isotropic, numerator = _radial_numerator(model, alpha1, alpha2)
    if not isotropic:
        logger.debug('Two-point\t: anisotropic Q^E_2, momentum sum')
        if spacing is None:
            spacing = default_spacing(extent, model.d)
        return _two_point_momentum_sum(x, alpha1, alpha2, model, spacing,
                                       extent)
    if not np.any(numerator):
        return 0.0
    radius = float(np.linalg.norm(x))
    total = 0.0
    expansion = pole_expansion(model.spectrum, numerator)
    for (mass, _nu), coefficients in zip(model.spectrum.entries, expansion):
        for power, coefficient in enumerate(coefficients, start=1):
            if coefficient != 0:
                total += coefficient * green_kernel_power(radius, mass,
                                                          model.d, power)
    return total / model.spectrum.normalization


def _scalar_symbol(model: ValidatedModel, squares: np.ndarray,
                   use_partial_fractions: bool) -> np.ndarray:
    if use_partial_fractions:
        fractions = partial_fractions(model.spectrum)
        return fractions.evaluate(squares)
    return 1.0 / denominator(squares, model.spectrum)


def _vertex_integral(points, indices, model, spacing, extent,
                     use_partial_fractions):
    order = len(points)
    size = _grid_size(spacing, extent, model.d)
    logger.debug('Grid\t\t: %d^%d sites, spacing %g', size, model.d, spacing)
    momenta = momentum_grid(size, spacing, model.d)
    scalar = _scalar_symbol(model, np.sum(momenta ** 2, axis=-1),
                            use_partial_fractions)
    matrix = model.qE.evaluate(-momenta[..., np.newaxis, :])
    cumulant = euclidean_polynomial(model, order).cumulant

    kernels = []
    for point, alpha in zip(points, indices):
        phase = np.exp(-1j * momenta @ point)
        spectrum = matrix[..., :, alpha] * (scalar * phase)[..., np.newaxis]
        spectrum = np.moveaxis(spectrum, -1, 0)
        axes = tuple(range(1, model.d + 1))
        kernel = np.fft.ifftn(spectrum, axes=axes) / spacing ** model.d
        kernels.append(kernel.reshape(model.n_fields, -1))

    betas = string.ascii_lowercase[:order]
    subscripts = betas + ',' + ','.join(beta + 'z' for beta in betas) + '->'
    total = np.einsum(subscripts, cumulant, *kernels, optimize=True) * \
        spacing ** model.d
    if abs(np.imag(total)) > 1e-8 * max(1.0, abs(np.real(total))):
        logger.warning('Vertex\t\t: imaginary residue %.3e', np.imag(total))
    return float(np.real(total))


def schwingerN_truncated(points, indices, model: ValidatedModel,
                         spacing: float = None,
                         extent: float = None, tolerance: float = None,
                         use_partial_fractions: bool = None) -> float:
    """
    Truncated n-point function (n >= 3) at ``points`` with component
    ``indices``; the no-dipole path sums single-mass kernels weighted by
    the partial-fraction coefficients.
    """

    # pylint: disable=invalid-name,too-many-arguments
    points = np.asarray(points, dtype=float)
    order = len(points)
    if order < 3:
        raise DomainError('vertex integrals start at order 3, got %d' % order)
    if points.shape != (order, model.d) or len(indices) != order:
        raise DomainError('need %d points in d=%d with one index each'
                          % (order, model.d))
    if use_partial_fractions is None:
        use_partial_fractions = model.spectrum.no_dipole
    elif use_partial_fractions and not model.spectrum.no_dipole:
        raise UnsupportedSpectrumError('the partial-fraction path needs a '
                                       'no-dipole spectrum')
    if extent is None:
        spread = float(np.max(np.ptp(points, axis=0)))
        extent = max(DEFAULT_EXTENT, spread + 24.0 / model.spectrum.lightest)
    if spacing is None:
        spacing = default_spacing(extent, model.d)

    value = _vertex_integral(points, indices, model, spacing, extent,
                             use_partial_fractions)
    if tolerance is not None:
        coarse = _vertex_integral(points, indices, model, 2 * spacing,
                                  extent, use_partial_fractions)
        gap = abs(value - coarse) / max(abs(value), 1e-300)
        logger.debug('Resolution\t: fine %.6e coarse %.6e gap %.2e',
                     value, coarse, gap)
        if gap > tolerance and abs(value - coarse) > 1e-14:
            raise ResolutionError(
                'spacing %g too coarse: fine %.6e vs coarse %.6e (relative '
                'gap %.2e > %.2e)' % (spacing, value, coarse, gap, tolerance),
                value, coarse)
    return value


@dataclass(frozen=True, eq=False)
class TruncatedKernel:
    """Evaluation rule of the truncated Schwinger function of one order."""

    order: int
    model: ValidatedModel
    options: typing.Dict[str, typing.Any] = field(default_factory=dict)

    def __call__(self, points, indices) -> float:
        points = np.asarray(points, dtype=float)
        if len(points) != self.order or len(indices) != self.order:
            raise DomainError('kernel of order %d got %d points'
                              % (self.order, len(points)))
        if self.order == 1:
            return schwinger1(indices[0], self.model)
        if self.order == 2:
            options = {key: value for key, value in self.options.items()
                       if key in ('spacing', 'extent')}
            return schwinger2_truncated(points[0] - points[1], indices[0],
                                        indices[1], self.model, **options)
        return schwingerN_truncated(points, indices, self.model,
                                    **self.options)

    def dump_rows(self, probes) -> typing.List[list]:
        """CSV rows ``(x coordinates..., indices..., value)``."""

        rows = []
        for points, indices in probes:
            value = self(points, indices)
            rows.append([float(c) for point in np.asarray(points)
                         for c in point] + [int(i) for i in indices] +
                        [value])
        return rows

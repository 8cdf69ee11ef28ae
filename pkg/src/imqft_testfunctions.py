#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Gauss-Hermite test functions with closed-form Fourier transforms and a
weighted-supremum Schwartz norm.
"""

import itertools
import math
import typing
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import hermite

from src.imqft_errors import DomainError

__author__ = "IMQFT Lab developers"
__copyright__ = "Copyright 2026, IMQFT Lab developers"
__license__ = "MIT"
__version__ = "1.0.0"
__status__ = "Development"

NORM_ORDER = 4
NORM_REACH = 8.0


def hermite_functions(order: int, u) -> np.ndarray:
    """Normalized ``psi_0 .. psi_order`` at ``u``, stacked on axis 0."""

    u = np.asarray(u, dtype=float)
    values = np.empty((order + 1,) + u.shape)
    values[0] = np.pi ** -0.25 * np.exp(-u ** 2 / 2)
    if order > 0:
        values[1] = np.sqrt(2.0) * u * values[0]
    for n in range(1, order):
        values[n + 1] = np.sqrt(2.0 / (n + 1)) * u * values[n] - \
            np.sqrt(n / (n + 1)) * values[n - 1]
    return values


def _derivative(coefficients: np.ndarray) -> np.ndarray:
    """Hermite-function coefficients of the derivative."""

    result = np.zeros(len(coefficients) + 1)
    for n, value in enumerate(coefficients):
        if n > 0:
            result[n - 1] += value * np.sqrt(n / 2)
        result[n + 1] -= value * np.sqrt((n + 1) / 2)
    return result


@dataclass(frozen=True)
class HermiteMode:
    """``prod_mu psi_{n_mu}((x_mu - c_mu) / s)`` on ``R^d``."""

    orders: typing.Tuple[int, ...]
    center: typing.Tuple[float, ...]
    width: float = 1.0

    @property
    def dim(self) -> int:
        """Dimension of the domain."""
        return len(self.orders)

    def evaluate(self, x, derivative: typing.Sequence[int] = None):
        """Value (or partial derivative) at points ``(..., d)``."""

        x = np.asarray(x, dtype=float)
        derivative = (0,) * self.dim if derivative is None else derivative
        value = np.ones(x.shape[:-1])
        for axis, (order, shift, times) in enumerate(
                zip(self.orders, self.center, derivative)):
            coefficients = np.zeros(order + 1)
            coefficients[order] = 1.0
            for _ in range(times):
                coefficients = _derivative(coefficients)
            u = (x[..., axis] - shift) / self.width
            basis = hermite_functions(len(coefficients) - 1, u)
            value = value * np.tensordot(coefficients, basis, axes=1) / \
                self.width ** times
        return value

    def fourier(self, p) -> np.ndarray:
        """``int f(x) exp(-i p.x) dx`` at momenta ``(..., d)``."""

        p = np.asarray(p, dtype=float)
        value = np.ones(p.shape[:-1], dtype=complex)
        for axis, (order, shift) in enumerate(zip(self.orders, self.center)):
            scaled = self.width * p[..., axis]
            value = value * self.width * np.sqrt(2 * np.pi) * \
                (-1j) ** order * hermite_functions(order, scaled)[order] * \
                np.exp(-1j * p[..., axis] * shift)
        return value


@dataclass(frozen=True)
class TestFunction:
    """Real linear combination of Hermite modes."""

    modes: typing.Tuple[HermiteMode, ...]
    coefficients: typing.Tuple[float, ...]

    @property
    def dim(self) -> int:
        """Dimension of the domain."""
        return self.modes[0].dim

    @property
    def width(self) -> float:
        """Narrowest mode width."""
        return min(mode.width for mode in self.modes)

    def evaluate(self, x, derivative=None) -> np.ndarray:
        """Value at points ``(..., d)``."""

        return sum(c * mode.evaluate(x, derivative)
                   for c, mode in zip(self.coefficients, self.modes))

    def fourier(self, p) -> np.ndarray:
        """Euclidean transform ``int f(x) exp(-i p.x) dx``."""

        return sum(c * mode.fourier(p)
                   for c, mode in zip(self.coefficients, self.modes))

    def minkowski_fourier(self, k) -> np.ndarray:
        """``int f(x) exp(-i k.x) dx`` with the Minkowski product."""

        k = np.asarray(k, dtype=float)
        flipped = np.concatenate([k[..., :1], -k[..., 1:]], axis=-1)
        return self.fourier(flipped)

    def integral(self) -> float:
        """``int f(x) dx``."""
        return float(np.real(self.fourier(np.zeros(self.dim))))

    def scaled(self, factor: float) -> "TestFunction":
        """``factor * f``."""
        return replace(self, coefficients=tuple(
            factor * c for c in self.coefficients))

    def shifted(self, vector) -> "TestFunction":
        """``f(x - vector)``."""

        vector = np.asarray(vector, dtype=float)
        modes = tuple(replace(mode, center=tuple(
            (np.asarray(mode.center) + vector).tolist()))
            for mode in self.modes)
        return replace(self, modes=modes)

    def schwartz_norm(self, order: int = NORM_ORDER,
                      points: int = None) -> float:
        """
        ``sup_x max_{|alpha| <= K} (1 + |x|^2)^(K/2) |d^alpha f(x)|``,
        the supremum taken on a grid covering the modes.
        """

        points = (65 if self.dim <= 2 else 25) if points is None else points
        lower = min(np.min(np.asarray(mode.center) - NORM_REACH * mode.width)
                    for mode in self.modes)
        upper = max(np.max(np.asarray(mode.center) + NORM_REACH * mode.width)
                    for mode in self.modes)
        axis = np.linspace(lower, upper, points)
        grid = np.stack(np.meshgrid(*([axis] * self.dim), indexing='ij'),
                        axis=-1)
        weight = (1 + np.sum(grid ** 2, axis=-1)) ** (order / 2)
        best = 0.0
        for alpha in itertools.product(range(order + 1), repeat=self.dim):
            if sum(alpha) > order:
                continue
            values = weight * np.abs(self.evaluate(grid, alpha))
            best = max(best, float(np.max(values)))
        return best


@dataclass(frozen=True)
class TestFunctionFamily:
    """Basis of Hermite modes; random elements of its span."""

    dim: int
    modes: typing.Tuple[HermiteMode, ...]

    @classmethod
    def default(cls, dim: int, max_order: int = 2, width: float = 1.0,
                center=None) -> "TestFunctionFamily":
        """Modes of total order up to ``max_order`` around ``center``."""

        if dim < 1 or max_order < 0 or not width > 0:
            raise DomainError('need dim >= 1, max_order >= 0, width > 0')
        center = (0.0,) * dim if center is None else tuple(center)
        modes = tuple(HermiteMode(orders, center, width)
                      for orders in itertools.product(range(max_order + 1),
                                                      repeat=dim)
                      if sum(orders) <= max_order)
        return cls(dim, modes)

    def draw(self, rng: np.random.Generator) -> TestFunction:
        """Random element with standard normal coefficients."""

        coefficients = rng.standard_normal(len(self.modes))
        return TestFunction(self.modes, tuple(coefficients.tolist()))

    def gaussian(self) -> TestFunction:
        """The ground mode alone."""
        return TestFunction(self.modes[:1], (1.0,))


def tensor_norm(functions: typing.Sequence[TestFunction],
                order: int = NORM_ORDER) -> float:
    """Cross norm of an elementary tensor ``f_1 x ... x f_n``."""
    return math.prod(f.schwartz_norm(order) for f in functions)


def hermite_rule(nodes: int, scale: float):
    """Nodes and weights for ``int_R F(k) dk`` with ``k = scale * x``."""

    x, weights = hermite.hermgauss(nodes)
    return scale * x, scale * weights * np.exp(x ** 2)


def staggered_rule(counts: typing.Sequence[int], scale: float):
    """Tensor-product rule with ``counts[i]`` nodes on axis ``i``."""

    rules = [hermite_rule(count, scale) for count in counts]
    points = np.stack(np.meshgrid(*[x for x, _ in rules], indexing='ij'),
                      axis=-1).reshape(-1, len(rules))
    total = np.ones(1)
    for _, weights in rules:
        total = np.multiply.outer(total, weights).reshape(-1)
    return points, total


def product_rule(nodes: int, scale: float, dims: int):
    """Tensor-product rule over ``R^dims``: points ``(Q, dims)``, weights."""
    return staggered_rule([nodes] * dims, scale)

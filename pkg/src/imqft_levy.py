#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Levy function of the Gauss-Poisson noise and its cumulant tensors.
"""

import itertools
import typing
from dataclasses import dataclass

import numpy as np

from src.imqft_errors import DomainError
from src.imqft_model import LevySpec

__author__ = "IMQFT Lab developers"
__copyright__ = "Copyright 2026, IMQFT Lab developers"
__license__ = "MIT"
__version__ = "1.0.0"
__status__ = "Development"

MAX_ORDER = 8


@dataclass(frozen=True, eq=False)
class CumulantTensor:
    """Fully symmetric cumulant tensor ``C_{b_1..b_n}`` of order n."""

    order: int
    entries: np.ndarray

    def raised(self, inverse_metric) -> np.ndarray:
        """Tensor with every index raised by the inverse metric."""

        tensor = self.entries
        for axis in range(self.order):
            tensor = np.moveaxis(
                np.tensordot(inverse_metric, tensor, axes=([1], [axis])),
                0, axis)
        return tensor


def levy_psi(t, levy: LevySpec) -> complex:
    """``i a.t - t.sigma^2 t / 2 + z sum_i w_i (exp(i t.s_i) - 1)``."""

    t = np.asarray(t, dtype=float).reshape(levy.n_fields)
    value = 1j * float(levy.drift @ t) - 0.5 * float(t @ levy.gaussian @ t)
    if levy.atoms:
        phases = levy.locations @ t
        value += levy.z * complex(np.sum(levy.weights *
                                         (np.exp(1j * phases) - 1.0)))
    return complex(value)


def cumulant_tensor(order: int, levy: LevySpec,
                    max_order: int = MAX_ORDER) -> CumulantTensor:
    """Closed-form ``(-i)^n d^n psi / dt_b1..dt_bn`` at ``t = 0``."""

    if order < 1 or order > max_order:
        raise DomainError('cumulant order must lie in 1..%d, got %d'
                          % (max_order, order))
    n_fields = levy.n_fields
    if order == 2:
        return CumulantTensor(2, levy.sigma2_bar)

    entries = np.zeros((n_fields,) * order)
    if levy.atoms and levy.z != 0:
        locations = levy.locations
        for weight, location in zip(levy.weights, locations):
            outer = np.array(weight * levy.z)
            for _ in range(order):
                outer = np.multiply.outer(outer, location)
            entries = entries + outer
    if order == 1:
        entries = entries + levy.drift
    return CumulantTensor(order, entries)


def finite_difference_cumulant(indices: typing.Sequence[int],
                               levy: LevySpec, step: float = 0.2,
                               levels: int = 4) -> float:
    """
    Mixed central difference of ``psi`` at zero, Richardson-extrapolated
    over ``levels`` halvings of ``step``.
    """

    order = len(indices)
    if order < 1:
        raise DomainError('at least one index required')
    estimates = []
    for level in range(levels):
        spacing = step / 2 ** level
        total = 0.0 + 0.0j
        for signs in itertools.product((1, -1), repeat=order):
            t = np.zeros(levy.n_fields)
            for sign, index in zip(signs, indices):
                t[index] += sign * spacing
            total += np.prod(signs) * levy_psi(t, levy)
        estimates.append(total / (2 * spacing) ** order)
    # central differences expand in even powers of the step
    for column in range(1, levels):
        factor = 4.0 ** column
        estimates = [(factor * fine - coarse) / (factor - 1)
                     for coarse, fine in zip(estimates, estimates[1:])]
    return float(np.real((-1j) ** order * estimates[0]))


def finite_difference_tensor(order: int, levy: LevySpec, step: float = 0.2,
                             levels: int = 4) -> np.ndarray:
    """Finite-difference oracle for a whole cumulant tensor."""

    entries = np.zeros((levy.n_fields,) * order)
    for indices in itertools.combinations_with_replacement(
            range(levy.n_fields), order):
        value = finite_difference_cumulant(indices, levy, step, levels)
        for perm in set(itertools.permutations(indices)):
            entries[perm] = value
    return entries

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Covariant polynomials in one or several momentum arguments.

A polynomial maps momenta ``k_1, ..., k_n`` (each a d-vector) to a tensor
with ``n_indices`` field indices. It is used for the matrix polynomial
``Q_E(k)``, for the cumulant-contracted ``Q^E_n`` and for user-supplied
Minkowski polynomials ``Q^M_n``.
"""

import itertools
import string
import typing
from dataclasses import dataclass, field

import numpy as np

from src.imqft_errors import DomainError, ParseError

__author__ = "IMQFT Lab developers"
__copyright__ = "Copyright 2026, IMQFT Lab developers"
__license__ = "MIT"
__version__ = "1.0.0"
__status__ = "Development"

Key = typing.Tuple[typing.Tuple[int, ...], typing.Tuple[int, ...]]


@dataclass(frozen=True)
class CovariantPolynomial:
    """
    Polynomial with complex coefficients.

    ``coefficients`` maps ``(indices, powers)`` to a coefficient, where
    ``indices`` holds ``n_indices`` field indices and ``powers`` holds the
    exponent of every momentum component, argument after argument
    (``n_args * dim`` entries).
    """

    n_args: int
    dim: int
    n_fields: int
    n_indices: int
    degree_bound: int
    coefficients: typing.Dict[Key, complex] = field(default_factory=dict)

    @classmethod
    def identity(cls, n_fields: int, dim: int) -> "CovariantPolynomial":
        """The constant identity matrix, the default ``Q_E``."""

        coefficients = {((beta, beta), (0,) * dim): 1.0 + 0.0j
                        for beta in range(n_fields)}
        return cls(1, dim, n_fields, 2, 0, coefficients)

    @classmethod
    def constant(cls, value, n_args: int, dim: int,
                 n_fields: int = 1) -> "CovariantPolynomial":
        """Same constant for every index tuple (a symmetric polynomial)."""

        coefficients = {
            (indices, (0,) * (n_args * dim)): complex(value)
            for indices in itertools.product(range(n_fields), repeat=n_args)}
        return cls(n_args, dim, n_fields, n_args, 0, coefficients)

    def degrees(self) -> typing.Tuple[int, ...]:
        """Maximal total degree in each argument."""

        result = [0] * self.n_args
        for (_indices, powers), value in self.coefficients.items():
            if value == 0:
                continue
            for arg in range(self.n_args):
                degree = sum(powers[arg * self.dim:(arg + 1) * self.dim])
                result[arg] = max(result[arg], degree)
        return tuple(result)

    def evaluate(self, momenta) -> np.ndarray:
        """Evaluate at momenta of shape ``(..., n_args, dim)``."""

        momenta = np.asarray(momenta)
        if momenta.shape[-2:] != (self.n_args, self.dim):
            raise DomainError('momenta must have shape (..., %d, %d)'
                              % (self.n_args, self.dim))
        batch = momenta.shape[:-2]
        flat = momenta.reshape(batch + (self.n_args * self.dim,))
        out = np.zeros(batch + (self.n_fields,) * self.n_indices,
                       dtype=complex)
        for (indices, powers), value in self.coefficients.items():
            term = np.full(batch, value, dtype=complex)
            for axis, power in enumerate(powers):
                if power:
                    term = term * flat[..., axis] ** power
            out[(Ellipsis,) + tuple(indices)] += term
        return out

    def continued(self) -> "CovariantPolynomial":
        """Substitute ``k^0 -> i k^0`` in every argument."""

        coefficients = {}
        for (indices, powers), value in self.coefficients.items():
            energy = sum(powers[arg * self.dim]
                         for arg in range(self.n_args))
            coefficients[(indices, powers)] = value * 1j ** energy
        return CovariantPolynomial(self.n_args, self.dim, self.n_fields,
                                   self.n_indices, self.degree_bound,
                                   coefficients)

    def is_symmetric(self, rng=None, samples: int = 3,
                     rtol: float = 1e-9) -> bool:
        """Check symmetry under permutations of (argument, index) pairs."""

        if self.n_indices != self.n_args:
            return False
        rng = np.random.default_rng(0) if rng is None else rng
        for _ in range(samples):
            momenta = rng.normal(size=(self.n_args, self.dim))
            reference = self.evaluate(momenta)
            scale = max(1.0, float(np.max(np.abs(reference))))
            for perm in itertools.permutations(range(self.n_args)):
                permuted = self.evaluate(momenta[list(perm)])
                permuted = np.transpose(permuted, np.argsort(perm))
                if np.max(np.abs(permuted - reference)) > rtol * scale:
                    return False
        return True

    def to_table(self) -> typing.List[dict]:
        """Rows of the JSON coefficient table."""

        rows = []
        for (indices, powers), value in sorted(self.coefficients.items()):
            rows.append({
                'indices': list(indices),
                'powers': [list(powers[arg * self.dim:(arg + 1) * self.dim])
                           for arg in range(self.n_args)],
                'value': float(np.real(value)),
                'imag': float(np.imag(value))})
        return rows

    @classmethod
    def from_table(cls, rows, n_args: int, dim: int, n_fields: int,
                   n_indices: int, degree_bound: int = None,
                   key: str = 'terms') -> "CovariantPolynomial":
        """Build a polynomial from JSON coefficient rows."""

        coefficients = {}
        if not isinstance(rows, list):
            raise ParseError(key, 'expected a list of coefficient rows')
        for i, row in enumerate(rows):
            path = '%s[%d]' % (key, i)
            try:
                indices = tuple(int(item) for item in row['indices'])
                powers = tuple(int(p) for arg in row['powers'] for p in arg)
                value = complex(float(row['value']),
                                float(row.get('imag', 0.0)))
            except (KeyError, TypeError, ValueError) as error:
                raise ParseError(path, 'malformed coefficient row (%s)'
                                 % error) from error
            if len(indices) != n_indices or \
                    any(not 0 <= item < n_fields for item in indices):
                raise ParseError(path + '.indices',
                                 'expected %d indices below %d'
                                 % (n_indices, n_fields))
            if len(powers) != n_args * dim or any(p < 0 for p in powers):
                raise ParseError(path + '.powers',
                                 'expected %d rows of %d nonnegative powers'
                                 % (n_args, dim))
            coefficients[(indices, powers)] = \
                coefficients.get((indices, powers), 0) + value
        poly = cls(n_args, dim, n_fields, n_indices, 0, coefficients)
        bound = max(poly.degrees(), default=0) if degree_bound is None \
            else int(degree_bound)
        return cls(n_args, dim, n_fields, n_indices, bound, coefficients)


@dataclass(frozen=True, eq=False)
class ContractedPolynomial:
    """
    Cumulant-contracted polynomial
    ``Q_{n,a_1..a_n}(k_1..k_n) = C^{b_1..b_n} prod_l Q_{b_l,a_l}(k_l)``.
    """

    cumulant: np.ndarray
    factor: CovariantPolynomial

    @property
    def n_args(self) -> int:
        """Number of momentum arguments (the order)."""
        return self.cumulant.ndim

    @property
    def dim(self) -> int:
        """Spacetime dimension."""
        return self.factor.dim

    @property
    def n_fields(self) -> int:
        """Number of field components."""
        return self.factor.n_fields

    @property
    def degree_bound(self) -> int:
        """Degree bound per argument."""
        return self.factor.degree_bound

    def degrees(self) -> typing.Tuple[int, ...]:
        """Maximal degree in each argument."""
        return self.factor.degrees() * self.n_args

    def evaluate(self, momenta) -> np.ndarray:
        """Evaluate at momenta of shape ``(..., n_args, dim)``."""

        momenta = np.asarray(momenta)
        order = self.n_args
        betas = string.ascii_lowercase[:order]
        alphas = string.ascii_uppercase[:order]
        factors = [self.factor.evaluate(momenta[..., arg:arg + 1, :])
                   for arg in range(order)]
        subscripts = betas + ',' + \
            ','.join('...' + betas[arg] + alphas[arg]
                     for arg in range(order)) + '->...' + alphas
        return np.einsum(subscripts, self.cumulant, *factors, optimize=True)

    def continued(self) -> "ContractedPolynomial":
        """Substitute ``k^0 -> i k^0`` in every argument."""
        return ContractedPolynomial(self.cumulant, self.factor.continued())

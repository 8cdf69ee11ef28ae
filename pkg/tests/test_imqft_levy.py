#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Tests of the Levy function and the cumulant tensors."""

import itertools
import unittest

import numpy as np

from src.imqft_errors import DomainError
from src.imqft_levy import (cumulant_tensor, finite_difference_cumulant,
                            finite_difference_tensor, levy_psi)
from src.imqft_model import LevySpec
from tests.test_imqft_abstract import TestImqftAbstract


def _random_levy(rng, n_fields):
    root = rng.normal(size=(n_fields, n_fields))
    weights = rng.uniform(0.2, 1.0, size=2)
    weights /= weights.sum()
    locations = rng.uniform(-1.0, 1.0, size=(2, n_fields))
    return LevySpec(tuple(rng.normal(size=n_fields).tolist()),
                    tuple(map(tuple, (root @ root.T / 2).tolist())),
                    float(rng.uniform(0.1, 1.0)),
                    tuple((float(w), tuple(s.tolist()))
                          for w, s in zip(weights, locations)))


class TestLevy(TestImqftAbstract, unittest.TestCase):
    """Closed-form cumulants against the Levy function."""

    def test_psi(self):
        """Testing psi against direct substitution."""

        poisson = LevySpec((0.0,), ((0.0,),), 2.0, ((1.0, (3.0,)),))
        self.assertEqual(levy_psi([0.0], poisson), 0)
        for t in (0.1, -0.7, 2.0):
            self.assertAlmostEqual(levy_psi([t], poisson),
                                   2 * (np.exp(3j * t) - 1), places=12)

        gauss = LevySpec((0.0,), ((1.0,),))
        self.assertAlmostEqual(levy_psi([1.0], gauss), -0.5, places=15)

    def test_closed_form(self):
        """Testing the documented cumulant values."""

        poisson = LevySpec((0.0,), ((0.0,),), 2.0, ((1.0, (3.0,)),))
        self.assertAlmostEqual(float(cumulant_tensor(3, poisson).entries),
                               54.0, places=10)
        self.assertAlmostEqual(finite_difference_cumulant((0, 0, 0),
                                                          poisson, step=0.02),
                               54.0, delta=54e-6)

        unit = self.headline.levy
        for order in range(2, 9):
            self.assertAlmostEqual(float(cumulant_tensor(order,
                                                         unit).entries),
                                   1.0, places=12)

        for order in range(3, 9):
            entries = cumulant_tensor(order, self.gaussian.levy).entries
            self.assertFalse(np.any(entries))

    def test_second_order(self):
        """Testing that C_2 is the stored noise covariance."""

        levy = self.model('two_field').levy
        np.testing.assert_array_equal(cumulant_tensor(2, levy).entries,
                                      levy.sigma2_bar)

    def test_first_order(self):
        """Testing the mean: drift plus jump mean."""

        levy = self.model('two_field').levy
        np.testing.assert_allclose(cumulant_tensor(1, levy).entries,
                                   [0.1 + 0.5 * (0.5 + 0.25), -0.25],
                                   rtol=1e-14)

    def test_symmetry(self):
        """Testing permutation symmetry up to rounding."""

        levy = _random_levy(np.random.default_rng(5), 3)
        entries = cumulant_tensor(4, levy).entries
        for perm in itertools.permutations(range(4)):
            np.testing.assert_allclose(np.transpose(entries, perm), entries,
                                       rtol=1e-14, atol=1e-15)

    def test_finite_differences(self):
        """Testing closed forms against finite differences of psi."""

        rng = np.random.default_rng(6)
        for _ in range(20):
            levy = _random_levy(rng, int(rng.integers(1, 4)))
            for order in range(1, 6):
                exact = cumulant_tensor(order, levy).entries
                oracle = finite_difference_tensor(order, levy)
                scale = max(1.0, float(np.max(np.abs(exact))))
                self.assertLess(float(np.max(np.abs(exact - oracle))) / scale,
                                1e-6)

    def test_order_range(self):
        """Testing the order bounds."""

        with self.assertRaises(DomainError):
            cumulant_tensor(0, self.headline.levy)
        with self.assertRaises(DomainError):
            cumulant_tensor(9, self.headline.levy)
        with self.assertRaises(DomainError):
            finite_difference_cumulant((), self.headline.levy)


if __name__ == '__main__':
    unittest.main()

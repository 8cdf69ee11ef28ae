#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Tests of the covariant polynomials."""

import unittest

import numpy as np

from src.imqft_errors import DomainError, ParseError
from src.imqft_polynomial import ContractedPolynomial, CovariantPolynomial
from src.imqft_wightman import continue_qM
from tests.test_imqft_abstract import TestImqftAbstract


def _scalar(rows, n_args=1, dim=2):
    return CovariantPolynomial.from_table(rows, n_args, dim, 1, n_args)


class TestCovariantPolynomial(TestImqftAbstract, unittest.TestCase):
    """Evaluation, continuation and symmetry."""

    def test_identity(self):
        """Testing the default Q_E."""

        poly = CovariantPolynomial.identity(3, 2)
        momenta = np.random.default_rng(1).normal(size=(5, 1, 2))
        values = poly.evaluate(momenta)
        self.assertEqual(values.shape, (5, 3, 3))
        for value in values:
            np.testing.assert_array_equal(value, np.eye(3))
        self.assertEqual(poly.degrees(), (0,))

    def test_evaluate_shape(self):
        """Testing the momentum shape check."""

        poly = CovariantPolynomial.identity(1, 2)
        with self.assertRaises(DomainError):
            poly.evaluate(np.zeros((1, 3)))

    def test_continuation(self):
        """Testing k0 -> i k0."""

        constant = CovariantPolynomial.constant(1.0, 1, 2)
        self.assertEqual(continue_qM(constant).evaluate([[0.3, 0.4]])[0],
                         1.0)

        energy = _scalar([{'indices': [0], 'powers': [[1, 0]], 'value': 1}])
        self.assertEqual(continue_qM(energy).evaluate([[2.0, 3.0]])[0], 2j)

        square = _scalar([
            {'indices': [0], 'powers': [[2, 0]], 'value': 1},
            {'indices': [0], 'powers': [[0, 2]], 'value': 1}])
        continued = continue_qM(square)
        for k in np.random.default_rng(2).normal(size=(10, 2)):
            expected = -k[0] ** 2 + k[1] ** 2
            self.assertAlmostEqual(continued.evaluate([k])[0], expected,
                                   places=12)

    def test_continuation_twice(self):
        """Testing that two continuations flip the energies."""

        poly = _scalar([
            {'indices': [0], 'powers': [[1, 0]], 'value': 0.5},
            {'indices': [0], 'powers': [[3, 1]], 'value': -2.0,
             'imag': 1.0},
            {'indices': [0], 'powers': [[2, 2]], 'value': 1.5}])
        twice = continue_qM(continue_qM(poly))
        for k in np.random.default_rng(3).normal(size=(10, 2)):
            flipped = np.array([-k[0], k[1]])
            self.assertAlmostEqual(twice.evaluate([k])[0],
                                   poly.evaluate([flipped])[0], places=12)

    def test_symmetry(self):
        """Testing the permutation symmetry check."""

        self.assertTrue(CovariantPolynomial.constant(2.0, 3, 2).is_symmetric())
        lopsided = _scalar([{'indices': [0, 0], 'powers': [[1, 0], [0, 0]],
                             'value': 1}], n_args=2)
        self.assertFalse(lopsided.is_symmetric())
        balanced = _scalar([
            {'indices': [0, 0], 'powers': [[1, 0], [0, 0]], 'value': 1},
            {'indices': [0, 0], 'powers': [[0, 0], [1, 0]], 'value': 1}],
            n_args=2)
        self.assertTrue(balanced.is_symmetric())

    def test_table(self):
        """Testing the coefficient table format."""

        poly = _scalar([
            {'indices': [0], 'powers': [[1, 0]], 'value': 0.5, 'imag': 2},
            {'indices': [0], 'powers': [[0, 2]], 'value': 1}])
        self.assertEqual(poly.degree_bound, 2)
        self.assertEqual(poly.degrees(), (2,))
        restored = CovariantPolynomial.from_table(poly.to_table(), 1, 2, 1,
                                                  1, poly.degree_bound)
        self.assertEqual(restored, poly)

    def test_malformed_table(self):
        """Testing that broken rows name their position."""

        with self.assertRaises(ParseError) as error:
            _scalar([{'indices': [0], 'value': 1}])
        self.assertEqual(error.exception.key, 'terms[0]')

        with self.assertRaises(ParseError) as error:
            _scalar([{'indices': [0], 'powers': [[1, 0, 0]], 'value': 1}])
        self.assertEqual(error.exception.key, 'terms[0].powers')

        with self.assertRaises(ParseError):
            _scalar({'indices': [0]})


class TestContractedPolynomial(TestImqftAbstract, unittest.TestCase):
    """Cumulant contraction of Q_E factors."""

    def test_contraction(self):
        """Testing C^{b1 b2} Q_{b1 a1}(k1) Q_{b2 a2}(k2)."""

        rng = np.random.default_rng(4)
        cumulant = rng.normal(size=(2, 2))
        factor = CovariantPolynomial.from_table([
            {'indices': [0, 0], 'powers': [[1, 0]], 'value': 1},
            {'indices': [0, 1], 'powers': [[0, 0]], 'value': 2},
            {'indices': [1, 0], 'powers': [[0, 1]], 'value': -1},
            {'indices': [1, 1], 'powers': [[0, 0]], 'value': 1}],
            1, 2, 2, 2)
        poly = ContractedPolynomial(cumulant, factor)
        momenta = rng.normal(size=(2, 2))
        first = factor.evaluate(momenta[0:1])
        second = factor.evaluate(momenta[1:2])
        expected = np.einsum('ab,aA,bB->AB', cumulant, first, second)
        np.testing.assert_allclose(poly.evaluate(momenta), expected,
                                   rtol=1e-12)
        self.assertEqual(poly.n_args, 2)
        self.assertEqual(poly.degrees(), (1, 1))


if __name__ == '__main__':
    unittest.main()

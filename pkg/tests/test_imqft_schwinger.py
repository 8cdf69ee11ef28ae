#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Tests of the analytic truncated Schwinger functions."""

import json
import math
import unittest

import numpy as np
from scipy import special

from src.imqft_errors import (DomainError, ResolutionError,
                              UnsupportedSpectrumError)
from src.imqft_model import parse_model_config, validate_model
from src.imqft_schwinger import (DEFAULT_SPACING, TruncatedKernel,
                                 default_spacing, euclidean_polynomial,
                                 schwinger1, schwinger2_truncated,
                                 schwingerN_truncated)
from tests.test_imqft_abstract import TestImqftAbstract

POINTS = np.array([[0.0, 0.0], [0.5, 0.25], [-0.25, 0.75]])
GRID = {'spacing': 0.25, 'extent': 16.0}


def _scalar_model(levy, masses=(1.0,), q_euclid=None):
    document = {'d': 2, 'N': 1, 'masses': [{'m': m} for m in masses],
                'levy': levy}
    if q_euclid is not None:
        document['qE'] = q_euclid
    return validate_model(parse_model_config(json.dumps(document)))


class TestSchwingerLowOrders(TestImqftAbstract, unittest.TestCase):
    """Mean field and two-point function."""

    def test_mean(self):
        """Testing the one-point function."""

        self.assertAlmostEqual(schwinger1(0, self.headline), 1.0, places=15)
        self.assertAlmostEqual(schwinger1(0, self.model('two_mass')), 0.25,
                               places=15)
        self.assertEqual(schwinger1(0, self.gaussian), 0.0)

    def test_polynomial(self):
        """Testing Q^E_3 of the headline model."""

        poly = euclidean_polynomial(self.headline, 3)
        value = poly.evaluate(np.random.default_rng(0).normal(size=(3, 2)))
        self.assertAlmostEqual(complex(value[0, 0, 0]), 1.0, places=15)

    def test_single_mass(self):
        """Testing the scaled Green kernel of one mass."""

        expected = special.k0(1.0) / (2 * math.pi)
        self.assertAlmostEqual(
            schwinger2_truncated([1.0, 0.0], 0, 0, self.headline), expected,
            places=12)
        self.assertAlmostEqual(
            schwinger2_truncated([0.0, -1.0], 0, 0, self.gaussian), expected,
            places=12)
        heavy = _scalar_model({'sigma2': [[1]]}, masses=(2.0,))
        self.assertAlmostEqual(
            schwinger2_truncated([0.3, 0.4], 0, 0, heavy),
            special.k0(1.0) / (2 * math.pi) / 4, places=12)

    def test_symmetry(self):
        """Testing x -> -x."""

        for model in (self.headline, self.model('two_mass')):
            self.assertAlmostEqual(
                schwinger2_truncated([0.7, -0.2], 0, 0, model),
                schwinger2_truncated([-0.7, 0.2], 0, 0, model), places=14)

    def test_no_noise(self):
        """Testing that a silent noise gives a silent field."""

        silent = _scalar_model({'sigma2': [[0]]})
        self.assertEqual(schwinger2_truncated([1.0, 0.0], 0, 0, silent), 0.0)

    def test_two_masses(self):
        """Testing the partial-fraction sum of Green kernels."""

        radius = 1.3
        expected = (special.k0(radius) - special.k0(2 * radius)) / \
            (3 * 2 * math.pi) / 4
        self.assertAlmostEqual(
            schwinger2_truncated([radius, 0.0], 0, 0,
                                 self.model('two_mass')), expected, places=12)

    def test_dipole(self):
        """Testing the squared propagator of a dipole."""

        expected = special.k1(1.0) / (4 * math.pi)
        value = schwinger2_truncated([0.0, 1.0], 0, 0, self.model('dipole'))
        self.assertAlmostEqual(value / expected, 1.0, places=7)

    def test_polynomial_numerator(self):
        """Testing a radial Q_E that cancels one pole."""

        q_euclid = [{'indices': [0, 0], 'powers': [[0, 0]], 'value': 1},
                    {'indices': [0, 0], 'powers': [[2, 0]], 'value': 1},
                    {'indices': [0, 0], 'powers': [[0, 2]], 'value': 1}]
        model = _scalar_model({'sigma2': [[1]]}, masses=(1.0, 2.0),
                              q_euclid=q_euclid)
        expected = -3 * special.k0(2.0) / (2 * math.pi) / 4
        self.assertAlmostEqual(
            schwinger2_truncated([1.0, 0.0], 0, 0, model), expected,
            places=12)

    def test_anisotropic(self):
        """Testing the momentum-sum path."""

        q_euclid = [{'indices': [0, 0], 'powers': [[0, 0]], 'value': 1},
                    {'indices': [0, 0], 'powers': [[1, 0]], 'value': 1}]
        once = _scalar_model({'sigma2': [[1]]}, q_euclid=q_euclid)
        twice = _scalar_model({'sigma2': [[2]]}, q_euclid=q_euclid)
        value = schwinger2_truncated([1.0, 0.5], 0, 0, once, spacing=0.1)
        self.assertTrue(np.isfinite(value))
        self.assertAlmostEqual(
            schwinger2_truncated([-1.0, -0.5], 0, 0, once, spacing=0.1),
            value, places=10)
        self.assertAlmostEqual(
            schwinger2_truncated([1.0, 0.5], 0, 0, twice, spacing=0.1),
            2 * value, places=10)

    def test_shape(self):
        """Testing the separation shape check."""

        with self.assertRaises(DomainError):
            schwinger2_truncated([1.0, 0.0, 0.0], 0, 0, self.headline)


class TestSchwingerVertex(TestImqftAbstract, unittest.TestCase):
    """Vertex integrals of order three and above."""

    def test_gaussian(self):
        """Testing that Gaussian noise has no vertex."""

        for order in (3, 4):
            value = schwingerN_truncated(np.zeros((order, 2)) +
                                         np.arange(order)[:, None],
                                         [0] * order, self.gaussian, **GRID)
            self.assertEqual(value, 0.0)

    def test_permutation(self):
        """Testing symmetry under permuted insertions."""

        reference = schwingerN_truncated(POINTS, [0, 0, 0], self.headline,
                                         **GRID)
        self.assertGreater(reference, 0.0)
        for perm in ((1, 0, 2), (2, 1, 0), (1, 2, 0)):
            value = schwingerN_truncated(POINTS[list(perm)], [0, 0, 0],
                                         self.headline, **GRID)
            self.assertAlmostEqual(value / reference, 1.0, places=10)

    def test_lattice_symmetries(self):
        """Testing lattice translations and quarter turns."""

        reference = schwingerN_truncated(POINTS, [0, 0, 0], self.headline,
                                         **GRID)
        shifted = schwingerN_truncated(POINTS + [0.5, -0.25], [0, 0, 0],
                                       self.headline, **GRID)
        self.assertAlmostEqual(shifted / reference, 1.0, places=10)
        turn = np.array([[0.0, -1.0], [1.0, 0.0]])
        rotated = schwingerN_truncated(POINTS @ turn.T, [0, 0, 0],
                                       self.headline, **GRID)
        self.assertAlmostEqual(rotated / reference, 1.0, places=10)

    def test_partial_fractions(self):
        """Testing the partial-fraction path against the direct one."""

        model = self.model('two_mass')
        direct = schwingerN_truncated(POINTS, [0, 0, 0], model,
                                      use_partial_fractions=False, **GRID)
        split = schwingerN_truncated(POINTS, [0, 0, 0], model,
                                     use_partial_fractions=True, **GRID)
        self.assertAlmostEqual(split / direct, 1.0, places=10)

    def test_clustering(self):
        """Testing decay of a separated insertion."""

        values = []
        for distance in (2.0, 4.0, 6.0):
            points = [[0.0, 0.0], [0.5, 0.0], [distance, 0.0]]
            values.append(schwingerN_truncated(points, [0, 0, 0],
                                               self.headline, spacing=0.25))
        self.assertTrue(all(value > 0 for value in values))
        self.assertLess(values[1], values[0] / 3)
        self.assertLess(values[2], values[1] / 3)

    def test_resolution(self):
        """Testing the coarse-lattice diagnostic."""

        with self.assertRaises(ResolutionError) as error:
            schwingerN_truncated(POINTS, [0, 0, 0], self.headline,
                                 spacing=0.5, extent=16.0, tolerance=1e-12)
        self.assertIsNotNone(error.exception.fine)
        self.assertIsNotNone(error.exception.coarse)

    def test_site_budget(self):
        """Testing the default spacing and the grid size limit."""

        self.assertEqual(default_spacing(16.0, 2), DEFAULT_SPACING)
        self.assertGreater(default_spacing(24.0, 3), DEFAULT_SPACING)
        document = {'d': 3, 'N': 1, 'masses': [{'m': 1}],
                    'levy': {'z': 1, 'atoms': [{'w': 1, 's': [1]}]}}
        model = validate_model(parse_model_config(json.dumps(document)))
        points = np.zeros((3, 3))
        points[1, 0] = 0.5
        with self.assertRaises(ResolutionError):
            schwingerN_truncated(points, [0, 0, 0], model,
                                 spacing=DEFAULT_SPACING, extent=24.0)

    def test_errors(self):
        """Testing order and spectrum checks."""

        with self.assertRaises(DomainError):
            schwingerN_truncated(POINTS[:2], [0, 0], self.headline)
        with self.assertRaises(DomainError):
            schwingerN_truncated(POINTS, [0, 0], self.headline)
        with self.assertRaises(UnsupportedSpectrumError):
            schwingerN_truncated(POINTS, [0, 0, 0], self.model('dipole'),
                                 use_partial_fractions=True, **GRID)


class TestTruncatedKernel(TestImqftAbstract, unittest.TestCase):
    """Order dispatch and kernel dumps."""

    def test_dispatch(self):
        """Testing that each order reaches its evaluator."""

        first = TruncatedKernel(1, self.headline)
        self.assertEqual(first([[0.3, 0.1]], [0]), 1.0)
        second = TruncatedKernel(2, self.headline)
        self.assertAlmostEqual(second([[1.0, 0.5], [0.0, 0.5]], [0, 0]),
                               special.k0(1.0) / (2 * math.pi), places=12)
        third = TruncatedKernel(3, self.headline, GRID)
        self.assertEqual(third(POINTS, [0, 0, 0]),
                         schwingerN_truncated(POINTS, [0, 0, 0],
                                              self.headline, **GRID))
        with self.assertRaises(DomainError):
            third(POINTS[:2], [0, 0])

    def test_dump_rows(self):
        """Testing the CSV row layout."""

        kernel = TruncatedKernel(2, self.headline)
        rows = kernel.dump_rows([(POINTS[:2], (0, 0))])
        self.assertEqual(len(rows), 1)
        self.assertEqual(rows[0][:4], [0.0, 0.0, 0.5, 0.25])
        self.assertEqual(rows[0][4:6], [0, 0])
        self.assertEqual(len(rows[0]), 7)


if __name__ == '__main__':
    unittest.main()

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Tests of the model files and their validation."""

import json
import unittest

import numpy as np

from src.imqft_errors import ParseError, ValidationError
from src.imqft_model import (LevySpec, MassSpectrum, emit_model_config,
                             parse_model_config, validate_model)
from tests.test_imqft_abstract import TestImqftAbstract

SCALAR = {'d': 2, 'N': 1, 'masses': [{'m': 1, 'nu': 1}],
          'levy': {'z': 1, 'atoms': [{'w': 1, 's': [1]}]}}


def _document(**changes):
    document = json.loads(json.dumps(SCALAR))
    document.update(changes)
    return json.dumps(document)


class TestModelConfig(TestImqftAbstract, unittest.TestCase):
    """Parsing, emitting and validating models."""

    def test_parse_scalar(self):
        """Testing defaults of a minimal scalar model."""

        spec = parse_model_config(_document())
        self.assertEqual((spec.d, spec.N), (2, 1))
        self.assertEqual(spec.levy.a, (0.0,))
        np.testing.assert_array_equal(spec.levy.sigma2_bar, [[1.0]])
        self.assertEqual(spec.qE.degrees(), (0,))
        self.assertEqual(spec.metric, ((1.0,),))

    def test_parse_gaussian(self):
        """Testing the pure Gaussian model."""

        spec = parse_model_config(_document(levy={'z': 0, 'sigma2': [[1]]}))
        np.testing.assert_array_equal(spec.levy.sigma2_bar, [[1.0]])
        self.assertEqual(spec.levy.atoms, ())

    def test_duplicate_masses(self):
        """Testing the distinct-mass rule."""

        with self.assertRaises(ValidationError) as error:
            parse_model_config(_document(masses=[{'m': 1}, {'m': 1}]))
        self.assertTrue(any('pairwise distinct' in message
                            for message in error.exception.errors))

    def test_error_list(self):
        """Testing that every violation is reported with its path."""

        with self.assertRaises(ValidationError) as error:
            self.model('invalid')
        errors = error.exception.errors
        self.assertIn('masses[0].m: mass must be positive', errors)
        self.assertTrue(any(message.startswith('levy.atoms: jump measure '
                                               'not normalized')
                            for message in errors))
        self.assertEqual(len(errors), 2)

    def test_schema_errors(self):
        """Testing that schema violations name the key."""

        cases = [(_document(foo=1), 'foo'),
                 (json.dumps({'d': 2, 'N': 1, 'masses': []}), 'levy'),
                 (_document(masses=[{'m': 'heavy'}]), 'masses[0].m'),
                 (_document(levy={'z': 1, 'jumps': []}), 'levy.jumps'),
                 (_document(N=1.5), 'N'),
                 ('[1, 2]', 'document'),
                 ('{', 'document')]
        for text, key in cases:
            with self.assertRaises(ParseError) as error:
                parse_model_config(text)
            self.assertEqual(error.exception.key, key)

    def test_dimension(self):
        """Testing the lower bound on d."""

        with self.assertRaises(ValidationError):
            parse_model_config(_document(d=1))

    def test_round_trip(self):
        """Testing parse(emit(spec)) == spec."""

        for name in ('headline', 'gaussian', 'two_mass', 'two_field',
                     'dipole'):
            spec = self.model(name).spec
            self.assertEqual(parse_model_config(emit_model_config(spec)),
                             spec)

    def test_validate_is_pure(self):
        """Testing that validation has no hidden state."""

        spec = parse_model_config(_document())
        first = validate_model(spec)
        second = validate_model(spec)
        self.assertEqual(first.spec, second.spec)
        self.assertEqual(first.custom_qm, {})

    def test_custom_qm(self):
        """Testing custom Minkowski polynomials in the model file."""

        rows = [{'indices': [0, 0, 0], 'powers': [[0, 0]] * 3,
                 'value': 2.5}]
        spec = parse_model_config(_document(qM={'3': {'terms': rows}}))
        model = validate_model(spec)
        self.assertIn(3, model.custom_qm)
        value = model.custom_qm[3].evaluate(np.zeros((3, 2)))
        self.assertEqual(value[0, 0, 0], 2.5)

        rows = [{'indices': [0, 0, 0], 'powers': [[1, 0], [0, 0], [0, 0]],
                 'value': 1}]
        with self.assertRaises(ValidationError) as error:
            parse_model_config(_document(qM={'3': {'terms': rows}}))
        self.assertIn('qM.3: polynomial must be symmetric',
                      error.exception.errors)


class TestModelTypes(TestImqftAbstract, unittest.TestCase):
    """Derived quantities of the model types."""

    def test_spectrum(self):
        """Testing the spectrum properties."""

        spectrum = MassSpectrum(((1.0, 1), (2.0, 1)))
        self.assertEqual(spectrum.size, 2)
        self.assertTrue(spectrum.no_dipole)
        self.assertEqual(spectrum.lightest, 1.0)
        self.assertEqual(spectrum.normalization, 4.0)
        self.assertFalse(MassSpectrum(((1.0, 2),)).no_dipole)

    def test_sigma2_bar(self):
        """Testing the full noise covariance."""

        levy = LevySpec((0.0, 0.0), ((1.0, 0.0), (0.0, 2.0)), 0.5,
                        ((0.5, (1.0, 0.0)), (0.5, (0.5, -1.0))))
        expected = np.array([[1.0, 0.0], [0.0, 2.0]]) + 0.5 * (
            0.5 * np.array([[1.0, 0.0], [0.0, 0.0]]) +
            0.5 * np.array([[0.25, -0.5], [-0.5, 1.0]]))
        np.testing.assert_allclose(levy.sigma2_bar, expected, rtol=1e-15)

    def test_metric(self):
        """Testing the invariant product."""

        model = self.model('two_field')
        np.testing.assert_array_equal(model.inverse_metric,
                                      [[1.0, 0.0], [0.0, -1.0]])


if __name__ == '__main__':
    unittest.main()

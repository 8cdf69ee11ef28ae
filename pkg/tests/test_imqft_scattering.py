#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Tests of the scattering amplitudes and the decay scan."""

import json
import math
import unittest

import numpy as np

from src.imqft_errors import (DomainError, ParseError,
                              UnsupportedSpectrumError, ValidationError)
from src.imqft_model import parse_model_config, validate_model
from src.imqft_polynomial import CovariantPolynomial
from src.imqft_scattering import (INCOMING, OUTGOING, ParticleState,
                                  amplitude, breakup_momentum, decay_scan,
                                  onshell, parse_process, with_custom_qM)
from tests.test_imqft_abstract import TestImqftAbstract

DECAY = 2j * math.pi / 512


def _decay_model(**levy):
    document = {'d': 2, 'N': 1, 'masses': [{'m': 1}, {'m': 3}],
                'levy': levy}
    return validate_model(parse_model_config(json.dumps(document)))


def _mass_sum():
    """``sum_j k_j.k_j`` on three arguments."""

    rows = []
    for slot in range(3):
        for axis, sign in ((0, 1), (1, -1)):
            powers = [[0, 0] for _ in range(3)]
            powers[slot][axis] = 2
            rows.append({'indices': [0, 0, 0], 'powers': powers,
                         'value': sign})
    return CovariantPolynomial.from_table(rows, 3, 2, 1, 3, degree_bound=2)


def _energy_cubes():
    """``sum_j (k_j^0)^3`` on three arguments, odd under ``k -> -k``."""

    rows = []
    for slot in range(3):
        powers = [[0, 0] for _ in range(3)]
        powers[slot][0] = 3
        rows.append({'indices': [0, 0, 0], 'powers': powers, 'value': 1})
    return CovariantPolynomial.from_table(rows, 3, 2, 1, 3, degree_bound=3)


def _boosted_decay(rapidity):
    """Heavy mass 3 to two unit masses, boosted along the axis."""

    q = math.sqrt(1.25)
    cosh, sinh = math.cosh(rapidity), math.sinh(rapidity)
    ins = (ParticleState(INCOMING, 1, 0, (3 * sinh,)),)
    outs = tuple(ParticleState(OUTGOING, 0, 0, (1.5 * sinh + s * q * cosh,))
                 for s in (1, -1))
    return ins, outs


class TestKinematics(TestImqftAbstract, unittest.TestCase):
    """On-shell momenta and two-body thresholds."""

    def test_onshell(self):
        """Testing omega = sqrt(|k|^2 + m^2)."""

        np.testing.assert_array_equal(onshell(1.0, [0.0]), [1.0, 0.0])
        np.testing.assert_array_equal(onshell(4.0, [3.0]), [5.0, 3.0])
        with self.assertRaises(DomainError):
            onshell(0.0, [1.0])

    def test_breakup(self):
        """Testing the threshold and the rest-frame momentum."""

        self.assertAlmostEqual(breakup_momentum(3.0, 1.0, 1.0),
                               math.sqrt(1.25), places=14)
        self.assertEqual(breakup_momentum(2.0, 1.0, 1.0), 0.0)
        self.assertIsNone(breakup_momentum(1.5, 1.0, 1.0))
        with self.assertRaises(DomainError):
            breakup_momentum(3.0, -1.0, 1.0)


class TestAmplitude(TestImqftAbstract, unittest.TestCase):
    """Truncated amplitudes."""

    def setUp(self):
        super().setUp()
        self.decay = self.model('decay')

    def test_decay(self):
        """Testing the witness of heavy -> light light."""

        report = decay_scan(3.0, 1.0, self.decay)
        self.assertTrue(report.feasible)
        self.assertAlmostEqual(report.momentum, math.sqrt(1.25), places=14)
        self.assertTrue(report.amplitude.conserved)
        self.assertAlmostEqual(report.amplitude.value, DECAY, places=12)
        self.assertTrue(report.nonzero)
        document = report.to_document()
        self.assertAlmostEqual(document['amplitude']['value']['im'],
                               DECAY.imag, places=12)
        self.assertEqual(document['witness']['ins'][0]['l'], 1)

    def test_infeasible(self):
        """Testing a heavy mass below threshold."""

        report = decay_scan(1.5, 1.0, self.decay)
        self.assertFalse(report.feasible)
        self.assertFalse(report.nonzero)
        self.assertNotIn('momentum', report.to_document())

    def test_gaussian(self):
        """Testing that Gaussian noise has no three-particle amplitude."""

        report = decay_scan(3.0, 1.0, _decay_model(sigma2=[[1]]))
        self.assertTrue(report.feasible)
        self.assertFalse(report.nonzero)

    def test_intensity(self):
        """Testing linearity in the jump intensity."""

        doubled = _decay_model(z=2, atoms=[{'w': 1, 's': [1]}])
        report = decay_scan(3.0, 1.0, doubled)
        self.assertAlmostEqual(report.amplitude.value, 2 * DECAY, places=12)

    def test_process_file(self):
        """Testing the amplitude of the stored process."""

        with open(self.path('process.json')) as handle:
            ins, outs = parse_process(handle.read())
        result = amplitude(ins, outs, self.decay)
        self.assertAlmostEqual(result.value, DECAY, places=12)
        self.assertLess(result.gap, 1e-12)

    def test_conservation(self):
        """Testing that a violated balance gives zero."""

        ins = (ParticleState(INCOMING, 1, 0, (0.0,)),)
        outs = (ParticleState(OUTGOING, 0, 0, (1.0,)),
                ParticleState(OUTGOING, 0, 0, (-1.0,)))
        result = amplitude(ins, outs, self.decay)
        self.assertFalse(result.conserved)
        self.assertEqual(result.value, 0j)
        self.assertGreater(result.gap, 0.1)

    def test_custom_constant(self):
        """Testing two-to-two scattering with a constant Q^M_4."""

        coupling = 0.7
        model = with_custom_qM(self.headline, {
            4: CovariantPolynomial.constant(coupling, 4, 2)})
        ins = tuple(ParticleState(INCOMING, 0, 0, (k,)) for k in (0.5, -0.5))
        outs = tuple(ParticleState(OUTGOING, 0, 0, (k,)) for k in (-0.5, 0.5))
        result = amplitude(ins, outs, model)
        self.assertAlmostEqual(result.value, -2j * math.pi * coupling,
                               places=12)
        self.assertEqual(self.headline.custom_qm, {})

    def test_boost(self):
        """Testing Lorentz invariance of an invariant Q^M_3."""

        model = with_custom_qM(self.decay, {3: _mass_sum()})
        expected = DECAY * 11
        for rapidity in (0.0, 0.4, -1.1):
            ins, outs = _boosted_decay(rapidity)
            result = amplitude(ins, outs, model)
            self.assertTrue(result.conserved)
            self.assertAlmostEqual(result.value / expected, 1.0, places=10)

    def test_crossing(self):
        """Testing the sign flip of momenta moved across the process."""

        ins, outs = _boosted_decay(0.4)
        fusion_ins = tuple(ParticleState(INCOMING, state.mass_index,
                                         state.alpha, state.spatial)
                           for state in outs)
        fusion_outs = tuple(ParticleState(OUTGOING, state.mass_index,
                                          state.alpha, state.spatial)
                            for state in ins)
        for poly, parity in ((_mass_sum(), 1.0), (_energy_cubes(), -1.0)):
            model = with_custom_qM(self.decay, {3: poly})
            decay = amplitude(ins, outs, model)
            fusion = amplitude(fusion_ins, fusion_outs, model)
            self.assertTrue(fusion.conserved)
            self.assertGreater(abs(decay.value), 1e-3)
            self.assertAlmostEqual(fusion.value / decay.value, parity,
                                   places=12)

    def test_invalid_custom(self):
        """Testing that asymmetric polynomials are refused."""

        rows = [{'indices': [0, 0, 0], 'powers': [[1, 0], [0, 0], [0, 0]],
                 'value': 1}]
        poly = CovariantPolynomial.from_table(rows, 3, 2, 1, 3)
        with self.assertRaises(ValidationError):
            with_custom_qM(self.decay, {3: poly})

    def test_errors(self):
        """Testing spectrum and state checks."""

        ins, outs = _boosted_decay(0.0)
        with self.assertRaises(UnsupportedSpectrumError):
            amplitude(ins, outs, self.model('dipole'))
        with self.assertRaises(DomainError):
            amplitude((ParticleState(INCOMING, 5, 0, (0.0,)),), outs,
                      self.decay)


class TestProcessFile(TestImqftAbstract, unittest.TestCase):
    """Parsing of process descriptions."""

    def test_parse(self):
        """Testing defaults and directions."""

        ins, outs = parse_process('{"ins": [{"k": [0.0]}], '
                                  '"outs": [{"l": 1, "k": [1.0]}]}')
        self.assertEqual(ins, (ParticleState(INCOMING, 0, 0, (0.0,)),))
        self.assertEqual(outs, (ParticleState(OUTGOING, 1, 0, (1.0,)),))

    def test_errors(self):
        """Testing that malformed processes name the key."""

        cases = [('{"ins": [], "foo": []}', 'foo'),
                 ('[1]', 'document'),
                 ('{"ins": [{"l": 0}]}', 'ins[0]'),
                 ('{"outs": [{"k": [0], "m": 1}]}', 'outs[0].m'),
                 ('{"ins": {}}', 'ins')]
        for text, key in cases:
            with self.assertRaises(ParseError) as error:
                parse_process(text)
            self.assertEqual(error.exception.key, key)


if __name__ == '__main__':
    unittest.main()

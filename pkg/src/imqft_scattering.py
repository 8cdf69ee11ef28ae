#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Truncated scattering amplitudes, two-body decay kinematics and
user-supplied Minkowski polynomials.
"""

import dataclasses
import json
import math
import typing
from dataclasses import dataclass

import numpy as np
from logzero import logger

from src.imqft_errors import (DomainError, ParseError,
                              UnsupportedSpectrumError, ValidationError)
from src.imqft_model import ValidatedModel, check_custom_polynomial
from src.imqft_polynomial import CovariantPolynomial
from src.imqft_wightman import coupling_prefactor, minkowski_polynomial

__author__ = "IMQFT Lab developers"
__copyright__ = "Copyright 2026, IMQFT Lab developers"
__license__ = "MIT"
__version__ = "1.0.0"
__status__ = "Development"

CONSERVATION_TOLERANCE = 1e-9
INCOMING = 'in'
OUTGOING = 'out'


def onshell(mass: float, spatial) -> np.ndarray:
    """``(omega, k)`` with ``omega = sqrt(|k|^2 + m^2)``."""

    if not mass > 0:
        raise DomainError('mass must be positive')
    spatial = np.atleast_1d(np.asarray(spatial, dtype=float))
    return np.concatenate([[math.sqrt(float(spatial @ spatial) +
                                      mass * mass)], spatial])


@dataclass(frozen=True)
class ParticleState:
    """Asymptotic particle with positive energy."""

    direction: str
    mass_index: typing.Optional[int]
    alpha: int
    spatial: typing.Tuple[float, ...]

    def momentum(self, model: ValidatedModel) -> np.ndarray:
        """On-shell momentum for the mass this state carries."""

        if self.mass_index is None or \
                not 0 <= self.mass_index < model.spectrum.size:
            raise DomainError('mass index %s outside the spectrum'
                              % self.mass_index)
        if len(self.spatial) != model.d - 1:
            raise DomainError('spatial momentum needs %d components'
                              % (model.d - 1))
        return onshell(float(model.spectrum.masses[self.mass_index]),
                       self.spatial)


@dataclass(frozen=True)
class AmplitudeResult:
    """Conservation-stripped amplitude; zero unless momentum is conserved."""

    value: complex
    conserved: bool
    gap: float

    def to_document(self) -> dict:
        """JSON-ready form."""
        return {'value': {'re': float(np.real(self.value)),
                          'im': float(np.imag(self.value))},
                'conserved': self.conserved, 'gap': self.gap}


@dataclass(frozen=True)
class DecayReport:
    """Feasibility of ``m -> mu mu`` with a rest-frame witness."""

    heavy: float
    light: float
    feasible: bool
    momentum: typing.Optional[float] = None
    ins: typing.Tuple[ParticleState, ...] = ()
    outs: typing.Tuple[ParticleState, ...] = ()
    amplitude: typing.Optional[AmplitudeResult] = None

    @property
    def nonzero(self) -> bool:
        """True iff a witness amplitude exists and does not vanish."""
        return self.amplitude is not None and abs(self.amplitude.value) > 0

    def to_document(self) -> dict:
        """JSON-ready form."""

        document = {'m': self.heavy, 'mu': self.light,
                    'feasible': self.feasible}
        if self.feasible:
            document['momentum'] = self.momentum
            document['witness'] = {
                'ins': [_state_document(state) for state in self.ins],
                'outs': [_state_document(state) for state in self.outs]}
            document['amplitude'] = None if self.amplitude is None else \
                self.amplitude.to_document()
            document['nonzero'] = self.nonzero
        return document


def _state_document(state: ParticleState) -> dict:
    return {'l': state.mass_index, 'alpha': state.alpha,
            'k': list(state.spatial)}


def amplitude(ins: typing.Sequence[ParticleState],
              outs: typing.Sequence[ParticleState], model: ValidatedModel,
              tolerance: float = CONSERVATION_TOLERANCE) -> AmplitudeResult:
    """``-2 pi i`` times the prefactor times ``Q^M_n(-k_in.., k_out..)``."""

    if not model.spectrum.no_dipole:
        raise UnsupportedSpectrumError('scattering needs a no-dipole '
                                       'spectrum')
    states = list(ins) + list(outs)
    incoming = sum((state.momentum(model) for state in ins),
                   np.zeros(model.d))
    outgoing = sum((state.momentum(model) for state in outs),
                   np.zeros(model.d))
    difference = incoming - outgoing
    gap = float(np.linalg.norm(difference))
    conserved = bool(np.max(np.abs(difference)) <= tolerance)
    if not conserved:
        logger.info('Amplitude\t: momentum not conserved (gap %.3e)', gap)
        return AmplitudeResult(0j, False, gap)
    if len(states) < 3:
        return AmplitudeResult(0j, True, gap)

    momenta = np.array([-state.momentum(model) for state in ins] +
                       [state.momentum(model) for state in outs])
    indices = tuple(state.alpha for state in states)
    if any(not 0 <= alpha < model.n_fields for alpha in indices):
        raise DomainError('component index outside 0..%d'
                          % (model.n_fields - 1))
    poly = minkowski_polynomial(model, len(states))
    prefactor = coupling_prefactor(model, [state.mass_index
                                           for state in states])
    value = -2j * np.pi * prefactor * poly.evaluate(momenta)[indices]
    return AmplitudeResult(complex(value), True, gap)


def breakup_momentum(heavy: float, first: float,
                     second: float) -> typing.Optional[float]:
    """Rest-frame momentum of a two-body decay; None below threshold."""

    if not heavy > 0 or not first > 0 or not second > 0:
        raise DomainError('masses must be positive')
    kallen = (heavy ** 2 - (first + second) ** 2) * \
        (heavy ** 2 - (first - second) ** 2)
    if kallen < 0:
        return None
    return math.sqrt(kallen) / (2 * heavy)


def _spectrum_index(model: ValidatedModel, mass: float):
    for l, other in enumerate(model.spectrum.masses):
        if math.isclose(other, mass, rel_tol=1e-12):
            return l
    return None


def decay_scan(heavy: float, light: float, model: ValidatedModel,
               tolerance: float = CONSERVATION_TOLERANCE) -> DecayReport:
    """Check ``m >= 2 mu`` and evaluate the back-to-back witness."""

    momentum = breakup_momentum(heavy, light, light)
    if momentum is None:
        return DecayReport(heavy, light, False)
    axis = [0.0] * (model.d - 1)
    forward = list(axis)
    forward[0] = momentum
    backward = list(axis)
    backward[0] = -momentum
    heavy_index = _spectrum_index(model, heavy)
    light_index = _spectrum_index(model, light)
    ins = (ParticleState(INCOMING, heavy_index, 0, tuple(axis)),)
    outs = tuple(ParticleState(OUTGOING, light_index, 0, tuple(spatial))
                 for spatial in (forward, backward))
    result = None
    if heavy_index is not None and light_index is not None:
        result = amplitude(ins, outs, model, tolerance)
    else:
        logger.info('Decay\t\t: masses %g, %g not both in the spectrum',
                    heavy, light)
    return DecayReport(heavy, light, True, momentum, ins, outs, result)


def with_custom_qM(model: ValidatedModel,  # pylint: disable=invalid-name
                   polynomials: typing.Mapping[int, CovariantPolynomial],
                   degree_bound: int = None) -> ValidatedModel:
    """Variant of ``model`` that uses the given ``Q^M_n``."""

    errors = []
    for order, poly in sorted(polynomials.items()):
        errors += check_custom_polynomial(poly, order, model.d,
                                          model.n_fields, degree_bound)
    if errors:
        raise ValidationError(errors)
    custom = dict(model.custom_qm)
    custom.update(polynomials)
    return dataclasses.replace(model, custom_qm=custom)


def _parse_states(document, key: str, direction: str):
    if not isinstance(document, list):
        raise ParseError(key, 'expected a list of particles')
    states = []
    for i, item in enumerate(document):
        path = '%s[%d]' % (key, i)
        if not isinstance(item, dict) or 'k' not in item:
            raise ParseError(path, 'expected an object with key k')
        unknown = set(item) - {'l', 'alpha', 'k'}
        if unknown:
            raise ParseError('%s.%s' % (path, sorted(unknown)[0]),
                             'unknown key')
        try:
            spatial = tuple(float(c) for c in item['k'])
            states.append(ParticleState(direction, int(item.get('l', 0)),
                                        int(item.get('alpha', 0)), spatial))
        except (TypeError, ValueError) as error:
            raise ParseError(path, 'malformed particle (%s)' % error) \
                from error
    return tuple(states)


def parse_process(text: str):
    """``{ins: [{l, alpha, k}], outs: [...]}`` into two state tuples."""

    try:
        document = json.loads(text)
    except ValueError as error:
        raise ParseError('document', 'not valid JSON (%s)' % error) \
            from error
    if not isinstance(document, dict):
        raise ParseError('document', 'expected a JSON object')
    for key in document:
        if key not in ('ins', 'outs'):
            raise ParseError(key, 'unknown key')
    return (_parse_states(document.get('ins', []), 'ins', INCOMING),
            _parse_states(document.get('outs', []), 'outs', OUTGOING))

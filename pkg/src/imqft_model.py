#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Model data shared by every part of the laboratory: mass spectrum, Levy
noise parameters, the covariant polynomial ``Q_E`` and the JSON model files.
"""

import json
import typing
from dataclasses import dataclass, field

import numpy as np
from logzero import logger

from src.imqft_errors import ParseError, ValidationError
from src.imqft_polynomial import CovariantPolynomial

__author__ = "IMQFT Lab developers"
__copyright__ = "Copyright 2026, IMQFT Lab developers"
__license__ = "MIT"
__version__ = "1.0.0"
__status__ = "Development"

NORMALIZATION_TOLERANCE = 1e-12
EIGENVALUE_TOLERANCE = 1e-12
_TOP_LEVEL_KEYS = ('d', 'N', 'masses', 'levy', 'qE', 'qM', 'metric')
_LEVY_KEYS = ('a', 'sigma2', 'z', 'atoms')


@dataclass(frozen=True)
class MassSpectrum:
    """Masses ``m_l`` with their dipole degrees ``nu_l``."""

    entries: typing.Tuple[typing.Tuple[float, int], ...]

    @property
    def masses(self) -> np.ndarray:
        """Masses as an array."""
        return np.array([mass for mass, _nu in self.entries], dtype=float)

    @property
    def degrees(self) -> np.ndarray:
        """Dipole degrees as an array."""
        return np.array([nu for _mass, nu in self.entries], dtype=int)

    @property
    def size(self) -> int:
        """Number of spectrum entries ``P``."""
        return len(self.entries)

    @property
    def no_dipole(self) -> bool:
        """True iff every degree equals one."""
        return all(nu == 1 for _mass, nu in self.entries)

    @property
    def lightest(self) -> float:
        """Smallest mass."""
        return float(np.min(self.masses))

    @property
    def normalization(self) -> float:
        """``prod_l m_l^(2 nu_l)``."""
        return float(np.prod(self.masses ** (2 * self.degrees)))


@dataclass(frozen=True)
class LevySpec:
    """Drift, Gaussian part and compound Poisson part of the noise."""

    a: typing.Tuple[float, ...]
    sigma2: typing.Tuple[typing.Tuple[float, ...], ...]
    z: float = 0.0
    atoms: typing.Tuple[typing.Tuple[float, typing.Tuple[float, ...]],
                        ...] = ()

    @property
    def n_fields(self) -> int:
        """Number of noise components."""
        return len(self.a)

    @property
    def drift(self) -> np.ndarray:
        """Drift vector ``a``."""
        return np.array(self.a, dtype=float)

    @property
    def gaussian(self) -> np.ndarray:
        """Gaussian covariance ``sigma^2``."""
        return np.array(self.sigma2, dtype=float).reshape(
            (self.n_fields, self.n_fields))

    @property
    def weights(self) -> np.ndarray:
        """Atom weights ``w_i``."""
        return np.array([weight for weight, _s in self.atoms], dtype=float)

    @property
    def locations(self) -> np.ndarray:
        """Atom locations ``s_i`` with shape ``(atoms, N)``."""
        return np.array([s for _weight, s in self.atoms],
                        dtype=float).reshape((len(self.atoms),
                                              self.n_fields))

    @property
    def sigma2_bar(self) -> np.ndarray:
        """``sigma^2 + z sum_i w_i s_i s_i^T``, the full noise covariance."""

        locations = self.locations
        jumps = np.einsum('i,ia,ib->ab', self.weights, locations, locations)
        return self.gaussian + self.z * jumps


@dataclass(frozen=True)
class ModelSpec:
    """Complete model: dimensions, spectrum, noise, ``Q_E`` and metric."""

    d: int
    N: int  # pylint: disable=invalid-name
    spectrum: MassSpectrum
    levy: LevySpec
    qE: CovariantPolynomial  # pylint: disable=invalid-name
    metric: typing.Tuple[typing.Tuple[float, ...], ...]
    qM: typing.Dict[int, CovariantPolynomial] = field(  # noqa: N815
        default_factory=dict)  # pylint: disable=invalid-name


@dataclass(frozen=True, eq=False)
class ValidatedModel:
    """A model whose invariants hold; accepted by every other module."""

    spec: ModelSpec
    custom_qm: typing.Dict[int, CovariantPolynomial] = field(
        default_factory=dict)

    @property
    def d(self) -> int:
        """Spacetime dimension."""
        return self.spec.d

    @property
    def n_fields(self) -> int:
        """Number of field components ``N``."""
        return self.spec.N

    @property
    def spectrum(self) -> MassSpectrum:
        """Mass spectrum."""
        return self.spec.spectrum

    @property
    def levy(self) -> LevySpec:
        """Noise parameters."""
        return self.spec.levy

    @property
    def qE(self) -> CovariantPolynomial:  # pylint: disable=invalid-name
        """Euclidean matrix polynomial ``Q_E``."""
        return self.spec.qE

    @property
    def metric(self) -> np.ndarray:
        """Invariant product on ``R^N``."""
        return np.array(self.spec.metric, dtype=float)

    @property
    def inverse_metric(self) -> np.ndarray:
        """Inverse metric, used to raise indices."""
        return np.linalg.inv(self.metric)


def _check_spectrum(spectrum: MassSpectrum) -> typing.List[str]:
    errors = []
    if spectrum.size == 0:
        errors.append('masses: spectrum must not be empty')
    seen = []
    for i, (mass, nu) in enumerate(spectrum.entries):
        if not np.isfinite(mass) or mass <= 0:
            errors.append('masses[%d].m: mass must be positive' % i)
        if int(nu) != nu or nu < 1:
            errors.append('masses[%d].nu: degree must be a positive integer'
                          % i)
        if any(mass == other for other in seen):
            errors.append('masses[%d].m: masses must be pairwise distinct'
                          % i)
        seen.append(mass)
    return errors


def _check_levy(levy: LevySpec, n_fields: int) -> typing.List[str]:
    errors = []
    if len(levy.a) != n_fields:
        errors.append('levy.a: expected %d entries' % n_fields)
    sigma2 = np.array(levy.sigma2, dtype=float)
    if sigma2.shape != (n_fields, n_fields):
        errors.append('levy.sigma2: expected a %dx%d matrix'
                      % (n_fields, n_fields))
    else:
        if not np.allclose(sigma2, sigma2.T, rtol=0, atol=1e-14):
            errors.append('levy.sigma2: matrix must be symmetric')
        elif np.min(np.linalg.eigvalsh(sigma2)) < -EIGENVALUE_TOLERANCE:
            errors.append('levy.sigma2: matrix must be positive '
                          'semidefinite')
    if not np.isfinite(levy.z) or levy.z < 0:
        errors.append('levy.z: jump intensity must be nonnegative')
    for i, (weight, location) in enumerate(levy.atoms):
        if not weight > 0:
            errors.append('levy.atoms[%d].w: weight must be positive' % i)
        if len(location) != n_fields:
            errors.append('levy.atoms[%d].s: expected %d entries'
                          % (i, n_fields))
        elif not np.any(np.asarray(location, dtype=float) != 0):
            errors.append('levy.atoms[%d].s: jump must not be zero' % i)
    if levy.atoms:
        total = sum(weight for weight, _s in levy.atoms)
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            errors.append('levy.atoms: jump measure not normalized '
                          '(total weight %.15g)' % total)
    elif levy.z > 0:
        errors.append('levy.atoms: positive jump intensity needs atoms')
    return errors


def _check_polynomial(poly, path: str, n_args: int, dim: int,
                      n_fields: int, n_indices: int) -> typing.List[str]:
    errors = []
    if (poly.n_args, poly.dim, poly.n_fields, poly.n_indices) != \
            (n_args, dim, n_fields, n_indices):
        errors.append('%s: expected %d argument(s) in dimension %d with %d '
                      'indices over %d fields'
                      % (path, n_args, dim, n_indices, n_fields))
        return errors
    if any(degree > poly.degree_bound for degree in poly.degrees()):
        errors.append('%s: degree exceeds declared bound %d'
                      % (path, poly.degree_bound))
    if not all(np.isfinite(complex(value)) for value in
               poly.coefficients.values()):
        errors.append('%s: coefficients must be finite' % path)
    return errors


def check_custom_polynomial(poly, order: int, dim: int, n_fields: int,
                            degree_bound: int = None,
                            path: str = None) -> typing.List[str]:
    """Invariant violations of a custom Minkowski polynomial ``Q^M_n``."""

    path = 'qM.%d' % order if path is None else path
    errors = _check_polynomial(poly, path, order, dim, n_fields, order)
    if errors:
        return errors
    bound = poly.degree_bound if degree_bound is None else degree_bound
    if any(degree > bound for degree in poly.degrees()):
        errors.append('%s: degree exceeds bound %d' % (path, bound))
    if not poly.is_symmetric():
        errors.append('%s: polynomial must be symmetric' % path)
    return errors


def check_model(spec: ModelSpec) -> typing.List[str]:
    """Complete list of violated invariants; empty for a valid model."""

    errors = []
    if int(spec.d) != spec.d or spec.d < 2:
        errors.append('d: spacetime dimension must be at least 2')
    if int(spec.N) != spec.N or spec.N < 1:
        errors.append('N: at least one field component required')
        return errors
    errors += _check_spectrum(spec.spectrum)
    errors += _check_levy(spec.levy, spec.N)
    errors += _check_polynomial(spec.qE, 'qE', 1, spec.d, spec.N, 2)
    metric = np.array(spec.metric, dtype=float)
    if metric.shape != (spec.N, spec.N):
        errors.append('metric: expected a %dx%d matrix' % (spec.N, spec.N))
    elif not np.allclose(metric, metric.T, rtol=0, atol=1e-14):
        errors.append('metric: matrix must be symmetric')
    elif abs(np.linalg.det(metric)) < 1e-12:
        errors.append('metric: matrix must be invertible')
    for order, poly in sorted(spec.qM.items()):
        errors += check_custom_polynomial(poly, order, spec.d, spec.N)
    return errors


def validate_model(spec: ModelSpec) -> ValidatedModel:
    """Return a validated model or raise with every violated invariant."""

    errors = check_model(spec)
    if errors:
        for error in errors:
            logger.debug('Invalid\t\t: %s', error)
        raise ValidationError(errors)
    return ValidatedModel(spec, dict(spec.qM))


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(path, 'expected a number')
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(path, 'expected an integer')
    return value


def _vector(value, path: str) -> typing.Tuple[float, ...]:
    if not isinstance(value, list):
        raise ParseError(path, 'expected a list of numbers')
    return tuple(_number(item, '%s[%d]' % (path, i))
                 for i, item in enumerate(value))


def _matrix(value, path: str) -> typing.Tuple[typing.Tuple[float, ...], ...]:
    if not isinstance(value, list):
        raise ParseError(path, 'expected a list of rows')
    return tuple(_vector(row, '%s[%d]' % (path, i))
                 for i, row in enumerate(value))


def _parse_spectrum(document) -> MassSpectrum:
    if not isinstance(document, list):
        raise ParseError('masses', 'expected a list of {m, nu} objects')
    entries = []
    for i, item in enumerate(document):
        path = 'masses[%d]' % i
        if not isinstance(item, dict) or 'm' not in item:
            raise ParseError(path, 'expected an object with key m')
        unknown = set(item) - {'m', 'nu'}
        if unknown:
            raise ParseError('%s.%s' % (path, sorted(unknown)[0]),
                             'unknown key')
        entries.append((_number(item['m'], path + '.m'),
                        _integer(item.get('nu', 1), path + '.nu')))
    return MassSpectrum(tuple(entries))


def _parse_levy(document, n_fields: int) -> LevySpec:
    if not isinstance(document, dict):
        raise ParseError('levy', 'expected an object')
    for key in document:
        if key not in _LEVY_KEYS:
            raise ParseError('levy.%s' % key, 'unknown key')
    drift = _vector(document.get('a', [0.0] * n_fields), 'levy.a')
    sigma2 = _matrix(document.get('sigma2', [[0.0] * n_fields] * n_fields),
                     'levy.sigma2')
    intensity = _number(document.get('z', 0.0), 'levy.z')
    atoms = []
    raw_atoms = document.get('atoms', [])
    if not isinstance(raw_atoms, list):
        raise ParseError('levy.atoms', 'expected a list of {w, s} objects')
    for i, atom in enumerate(raw_atoms):
        path = 'levy.atoms[%d]' % i
        if not isinstance(atom, dict) or 'w' not in atom or 's' not in atom:
            raise ParseError(path, 'expected an object with keys w and s')
        atoms.append((_number(atom['w'], path + '.w'),
                      _vector(atom['s'], path + '.s')))
    return LevySpec(drift, sigma2, intensity, tuple(atoms))


def _parse_polynomial(document, key: str, n_args: int, dim: int,
                      n_fields: int, n_indices: int) -> CovariantPolynomial:
    degree_bound = None
    rows = document
    if isinstance(document, dict):
        if 'terms' not in document:
            raise ParseError(key + '.terms', 'missing coefficient rows')
        rows = document['terms']
        if 'degree_bound' in document:
            degree_bound = _integer(document['degree_bound'],
                                    key + '.degree_bound')
    return CovariantPolynomial.from_table(rows, n_args, dim, n_fields,
                                          n_indices, degree_bound,
                                          key=key + '.terms')


def parse_model_config(text: str) -> ModelSpec:
    """Parse and validate a JSON model document."""

    try:
        document = json.loads(text)
    except ValueError as error:
        raise ParseError('document', 'not valid JSON (%s)' % error) \
            from error
    if not isinstance(document, dict):
        raise ParseError('document', 'expected a JSON object')
    for key in document:
        if key not in _TOP_LEVEL_KEYS:
            raise ParseError(key, 'unknown key')
    for key in ('d', 'N', 'masses', 'levy'):
        if key not in document:
            raise ParseError(key, 'missing required key')

    dim = _integer(document['d'], 'd')
    n_fields = _integer(document['N'], 'N')
    if n_fields < 1 or dim < 1:
        raise ValidationError(['d: spacetime dimension must be at least 2']
                              if dim < 1 else
                              ['N: at least one field component required'])
    spectrum = _parse_spectrum(document['masses'])
    levy = _parse_levy(document['levy'], n_fields)
    if 'qE' in document:
        q_euclid = _parse_polynomial(document['qE'], 'qE', 1, dim,
                                     n_fields, 2)
    else:
        q_euclid = CovariantPolynomial.identity(n_fields, dim)
    metric = _matrix(document['metric'], 'metric') if 'metric' in document \
        else tuple(tuple(float(i == j) for j in range(n_fields))
                   for i in range(n_fields))
    custom = {}
    raw_custom = document.get('qM', {})
    if not isinstance(raw_custom, dict):
        raise ParseError('qM', 'expected an object keyed by order')
    for order_key, poly in raw_custom.items():
        try:
            order = int(order_key)
        except ValueError as error:
            raise ParseError('qM.%s' % order_key, 'order must be an '
                             'integer') from error
        custom[order] = _parse_polynomial(poly, 'qM.%d' % order, order, dim,
                                          n_fields, order)

    spec = ModelSpec(dim, n_fields, spectrum, levy, q_euclid, metric, custom)
    errors = check_model(spec)
    if errors:
        raise ValidationError(errors)
    return spec


def _polynomial_document(poly: CovariantPolynomial) -> dict:
    return {'degree_bound': poly.degree_bound, 'terms': poly.to_table()}


def emit_model_config(spec: ModelSpec) -> str:
    """Serialize a model so that ``parse_model_config`` restores it."""

    document = {
        'd': spec.d,
        'N': spec.N,
        'masses': [{'m': mass, 'nu': nu}
                   for mass, nu in spec.spectrum.entries],
        'levy': {
            'a': list(spec.levy.a),
            'sigma2': [list(row) for row in spec.levy.sigma2],
            'z': spec.levy.z,
            'atoms': [{'w': weight, 's': list(location)}
                      for weight, location in spec.levy.atoms]},
        'qE': _polynomial_document(spec.qE),
        'metric': [list(row) for row in spec.metric]}
    if spec.qM:
        document['qM'] = {str(order): _polynomial_document(poly)
                          for order, poly in sorted(spec.qM.items())}
    return json.dumps(document, indent=2, sort_keys=True)


def load_model(path: str) -> ValidatedModel:
    """Read, parse and validate a model file."""

    with open(path, encoding='utf8') as filepointer:
        spec = parse_model_config(filepointer.read())
    logger.info('Model\t\t: %s (d=%d, N=%d, P=%d)', path, spec.d, spec.N,
                spec.spectrum.size)
    return validate_model(spec)

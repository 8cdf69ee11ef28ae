#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Relativistic side of the model: continuation of the Euclidean
polynomials, momentum-space truncated Wightman terms, their smeared
values and the checks built on them (Fourier-Laplace representation,
Hilbert space structure witness, cluster decay).

Conventions: ``W(x_1..x_n) = (2 pi)^(-dn) int W^(k) exp(i sum k_l.x_l) dk``
with the Minkowski product ``k.x = k^0 x^0 - k.x``; shell integrals use the
measure ``d^(d-1)k / ((2 pi)^(d-1) 2 omega)`` per on-shell slot.
"""

import concurrent.futures
import itertools
import math
import typing
from dataclasses import dataclass

import numpy as np
from logzero import logger
from numpy.polynomial import legendre
from scipy import integrate, special

from src.imqft_errors import (DomainError, NearPoleError,
                              NumericToleranceError, SingularityError,
                              UnsupportedSpectrumError)
from src.imqft_lattice import RandomStreams
from src.imqft_model import ValidatedModel
from src.imqft_partitions import untruncate_subsets
from src.imqft_propagator import partial_fractions
from src.imqft_schwinger import (euclidean_polynomial, schwinger1,
                                 schwinger2_truncated)
from src.imqft_testfunctions import (TestFunction, TestFunctionFamily,
                                     product_rule, staggered_rule,
                                     tensor_norm)

__author__ = "IMQFT Lab developers"
__copyright__ = "Copyright 2026, IMQFT Lab developers"
__license__ = "MIT"
__version__ = "1.0.0"
__status__ = "Development"

VERTEX_NORMALIZATION = 1.0
POLE_EPSILON = 1e-6
DEFAULT_NODES = 48
QUADRATURE_BUDGET = 200000
MAX_WITNESS_ORDER = 4
DECAY_REACH = 9.0
PRINCIPAL_TOLERANCE = 1e-4


def continue_qM(poly):  # pylint: disable=invalid-name
    """``k^0 -> i k^0`` in every argument of a Euclidean polynomial."""
    return poly.continued()


def minkowski_square(k) -> np.ndarray:
    """``(k^0)^2 - |k|^2`` over the last axis."""

    k = np.asarray(k, dtype=float)
    return k[..., 0] ** 2 - np.sum(k[..., 1:] ** 2, axis=-1)


@dataclass(frozen=True)
class ShellMomentum:
    """Momentum on the mass shell ``k^2 = m^2`` with ``sign(k^0) = sign``."""

    mass: float
    sign: int
    spatial: typing.Tuple[float, ...]

    @property
    def omega(self) -> float:
        """``sqrt(|k|^2 + m^2)``."""
        return math.sqrt(sum(c * c for c in self.spatial) + self.mass ** 2)

    @property
    def energy(self) -> float:
        """``k^0 = sign * omega``."""
        return self.sign * self.omega

    @property
    def vector(self) -> np.ndarray:
        """``(k^0, k)``."""
        return np.array((self.energy,) + tuple(self.spatial))


@dataclass(frozen=True)
class WightmanTerm:
    """Slot pattern of one term: minus shells, pole (if any), plus shells."""

    pole: typing.Optional[int]
    minus: typing.Tuple[int, ...]
    plus: typing.Tuple[int, ...]

    @property
    def free(self) -> typing.Tuple[int, ...]:
        """On-shell slots, ascending; their spatial momenta are free."""
        return tuple(sorted(self.minus + self.plus))

    @property
    def fixed(self) -> int:
        """Slot whose momentum follows from conservation."""

        if self.pole is not None:
            return self.pole
        taken = set(self.free)
        return next(slot for slot in itertools.count() if slot not in taken)

    def sign(self, slot: int) -> int:
        """Shell sign of an on-shell slot."""
        return -1 if slot in self.minus else 1


@dataclass(frozen=True, eq=False)
class WightmanTermList:
    """Truncated Wightman function of one order and mass assignment."""

    order: int
    masses: typing.Tuple[float, ...]
    terms: typing.Tuple[WightmanTerm, ...]
    prefactor: float
    polynomial: typing.Any
    dimension: int

    def to_document(self) -> dict:
        """JSON-ready description of the term list."""

        return {'order': self.order,
                'masses': list(self.masses),
                'prefactor': self.prefactor,
                'terms': [{'pole': term.pole, 'minus': list(term.minus),
                           'plus': list(term.plus)} for term in self.terms]}


@dataclass(frozen=True)
class FourierLaplaceResult:
    """Euclidean two-point value against its shell representation."""

    lhs: float
    rhs: float
    gap: float


@dataclass(frozen=True)
class WitnessReport:
    """Ratio statistics of the Hilbert space structure witness."""

    n: int
    m: int
    draws: int
    ratios: typing.Tuple[float, ...]
    accepted: typing.Tuple[int, ...]
    failures: int
    maximum: float
    mean: float
    histogram: typing.Tuple[int, ...]
    edges: typing.Tuple[float, ...]


@dataclass(frozen=True)
class ClusterRow:
    """One shift of the cluster decay table."""

    shift: float
    joint: complex
    product: complex
    gap: float


def minkowski_polynomial(model: ValidatedModel, order: int):
    """``Q^M_n``: the custom polynomial if given, else the continued one."""

    if order in model.custom_qm:
        return model.custom_qm[order]
    return continue_qM(euclidean_polynomial(model, order))


def coupling_prefactor(model: ValidatedModel,
                       assignment: typing.Sequence[int]) -> float:
    """
    Constant in front of ``Q^M_n``: ``(2 pi)^(d+1) b_l / prod m^2`` for two
    points, ``VERTEX_NORMALIZATION * prod b_l`` above.
    """

    coefficients = partial_fractions(model.spectrum).coefficients
    if len(assignment) == 2:
        return (2 * np.pi) ** (model.d + 1) * coefficients[assignment[0]] / \
            model.spectrum.normalization
    return VERTEX_NORMALIZATION * math.prod(coefficients[l]
                                            for l in assignment)


def build_wightman_terms(order: int, assignment: typing.Sequence[int],
                         model: ValidatedModel) -> WightmanTermList:
    """Term list of ``W^T_n`` for the masses ``m_{l_1} .. m_{l_n}``."""

    if order < 2:
        raise DomainError('Wightman terms start at order 2, got %d' % order)
    if not model.spectrum.no_dipole:
        raise UnsupportedSpectrumError('Wightman terms need a no-dipole '
                                       'spectrum')
    assignment = tuple(assignment)
    if len(assignment) != order or \
            any(not 0 <= l < model.spectrum.size for l in assignment):
        raise DomainError('mass assignment must name %d spectrum entries'
                          % order)
    if order == 2:
        if assignment[0] != assignment[1]:
            raise DomainError('the two-point function is diagonal in the '
                              'masses')
        terms = (WightmanTerm(None, (0,), ()),)
    else:
        terms = tuple(WightmanTerm(j, tuple(range(j)),
                                   tuple(range(j + 1, order)))
                      for j in range(order))
    masses = tuple(float(model.spectrum.masses[l]) for l in assignment)
    return WightmanTermList(order, masses, terms,
                            coupling_prefactor(model, assignment),
                            minkowski_polynomial(model, order), model.d)


def build_wightman_family(order: int, model: ValidatedModel) \
        -> typing.List[WightmanTermList]:
    """Term lists over every admissible mass assignment."""

    size = model.spectrum.size
    if order == 2:
        assignments = [(l, l) for l in range(size)]
    else:
        assignments = itertools.product(range(size), repeat=order)
    return [build_wightman_terms(order, assignment, model)
            for assignment in assignments]


def term_momenta(terms: WightmanTermList, j: int, spatial) -> np.ndarray:
    """Momenta ``(..., n, d)`` of term ``j`` from its free spatial momenta."""

    term = terms.terms[j]
    spatial = np.asarray(spatial, dtype=float)
    if spatial.shape[-2:] != (terms.order - 1, terms.dimension - 1):
        raise DomainError('term %d needs spatial momenta of shape '
                          '(..., %d, %d)' % (j, terms.order - 1,
                                             terms.dimension - 1))
    momenta = np.zeros(spatial.shape[:-2] + (terms.order, terms.dimension))
    for position, slot in enumerate(term.free):
        vector = spatial[..., position, :]
        omega = np.sqrt(np.sum(vector ** 2, axis=-1) +
                        terms.masses[slot] ** 2)
        momenta[..., slot, 0] = term.sign(slot) * omega
        momenta[..., slot, 1:] = vector
    momenta[..., term.fixed, :] = -np.sum(momenta, axis=-2)
    return momenta


def _term_density(terms: WightmanTermList, j: int, spatial,
                  indices: typing.Sequence[int], epsilon: float):
    term = terms.terms[j]
    momenta = term_momenta(terms, j, spatial)
    energies = np.abs(momenta[..., list(term.free), 0])
    density = terms.prefactor / np.prod(2 * energies, axis=-1)
    if term.pole is not None:
        offshell = minkowski_square(momenta[..., term.pole, :]) - \
            terms.masses[term.pole] ** 2
        distance = float(np.min(np.abs(offshell)))
        if distance <= epsilon:
            raise NearPoleError(j, distance)
        density = density * (-1.0 / offshell)
    values = terms.polynomial.evaluate(momenta)[(Ellipsis,) + tuple(indices)]
    return momenta, density * values


def evaluate_onshell(terms: WightmanTermList,
                     config: typing.Mapping[int, typing.Any],
                     indices: typing.Sequence[int] = None,
                     epsilon: float = POLE_EPSILON):
    """Conservation-stripped density summed over the terms of ``terms``."""

    indices = (0,) * terms.order if indices is None else tuple(indices)
    total = 0
    for j in range(len(terms.terms)):
        _momenta, density = _term_density(terms, j, config[j], indices,
                                          epsilon)
        total = total + density
    return total


def shared_config(terms: WightmanTermList, spatial) -> dict:
    """Per-term configuration from one spatial momentum per slot."""

    spatial = np.asarray(spatial, dtype=float)
    return {j: spatial[..., list(term.free), :]
            for j, term in enumerate(terms.terms)}


def conjugate_config(terms: WightmanTermList,
                     config: typing.Mapping[int, typing.Any]) -> dict:
    """Order-reversed, momentum-negated configuration."""

    if terms.order == 2:
        return {0: np.asarray(config[0], dtype=float)}
    last = terms.order - 1
    return {last - j: -np.asarray(config[j], dtype=float)[..., ::-1, :]
            for j in range(terms.order)}


def check_spectral_support(terms: WightmanTermList, spatial) -> bool:
    """Plus shells in the forward cone, minus shells in the backward cone."""

    for j, term in enumerate(terms.terms):
        momenta = term_momenta(terms, j, spatial[j])
        lengths = np.linalg.norm(momenta[..., 1:], axis=-1)
        for slot in term.plus:
            if np.any(momenta[..., slot, 0] < lengths[..., slot]):
                return False
        for slot in term.minus:
            if np.any(momenta[..., slot, 0] > -lengths[..., slot]):
                return False
    return True


def _radial_shell_integrand(k, tau, radius, mass, dims):
    omega = np.sqrt(k * k + mass * mass)
    half = dims / 2
    if radius == 0:
        angular = 1.0
    elif dims == 1:
        angular = np.cos(k * radius)
    else:
        angular = special.gamma(half) * (2 / (k * radius)) ** (half - 1) * \
            special.jv(half - 1, k * radius) if k > 0 else 1.0
    surface = 2 * np.pi ** half / special.gamma(half)
    return surface / (2 * np.pi) ** dims * k ** (dims - 1) * angular * \
        np.exp(-omega * abs(tau)) / (2 * omega)


def shell_integral(tau: float, spatial, mass: float) -> float:
    """``int exp(-omega|tau| + i k.x) d^(d-1)k / ((2 pi)^(d-1) 2 omega)``."""

    spatial = np.atleast_1d(np.asarray(spatial, dtype=float))
    radius = float(np.linalg.norm(spatial))
    value, error = integrate.quad(
        _radial_shell_integrand, 0, np.inf,
        args=(tau, radius, mass, len(spatial)), epsabs=1e-13, epsrel=1e-11,
        limit=400)
    if error > 1e-7 * abs(value) + 1e-12:
        raise NumericToleranceError('shell quadrature error %.2e at tau=%g'
                                    % (error, tau))
    return value


def fourier_laplace_check(model: ValidatedModel, tau: float,
                          spatial) -> FourierLaplaceResult:
    """Euclidean two-point function against its shell representation."""

    spatial = np.atleast_1d(np.asarray(spatial, dtype=float))
    if tau == 0:
        raise DomainError('the Fourier-Laplace representation needs tau != 0')
    if model.n_fields != 1 or model.qE.degrees() != (0,):
        raise DomainError('the shell representation is implemented for '
                          'scalar models with constant Q_E')
    if spatial.shape != (model.d - 1,):
        raise DomainError('spatial separation must have %d components'
                          % (model.d - 1))
    lhs = schwinger2_truncated(np.concatenate([[tau], spatial]), 0, 0, model)
    rhs = 0.0
    zero = np.zeros((2, model.d))
    for terms in build_wightman_family(2, model):
        strength = float(np.real(terms.polynomial.evaluate(zero)[0, 0]))
        rhs += terms.prefactor / (2 * np.pi) ** (model.d + 1) * strength * \
            shell_integral(tau, spatial, terms.masses[0])
    gap = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    logger.debug('Fourier-Laplace\t: tau=%g lhs=%.10e rhs=%.10e gap=%.2e',
                 tau, lhs, rhs, gap)
    return FourierLaplaceResult(lhs, rhs, gap)


def _nodes_for(dims: int, nodes: int) -> int:
    return int(min(nodes, max(4, math.floor(QUADRATURE_BUDGET **
                                            (1.0 / dims)))))


def pole_reach(terms: WightmanTermList, j: int) -> str:
    """
    Whether the pole of term ``j`` meets the support of its shells:
    ``'none'``, ``'crossing'`` (a hypersurface inside the domain) or
    ``'tangent'`` (touching only at the edge of the shell configurations).
    """

    term = terms.terms[j]
    if term.pole is None:
        return 'none'
    pole = terms.masses[term.pole]
    minus = [terms.masses[slot] for slot in term.minus]
    plus = [terms.masses[slot] for slot in term.plus]
    if not minus or not plus:
        # (sum k)^2 >= (sum m)^2 for shells on one side
        gap = pole - sum(minus or plus)
    elif len(minus) == 1 and len(plus) == 1:
        # (k_- + k_+)^2 <= (m_- - m_+)^2
        gap = abs(minus[0] - plus[0]) - pole
    else:
        return 'crossing'
    if abs(gap) <= 1e-12 * max(1.0, pole):
        return 'tangent'
    return 'crossing' if gap > 0 else 'none'


def _inner_slot(term: WightmanTerm) -> int:
    """Shell slot whose partners all lie on one side of the cone."""

    if len(term.minus) == 1 and term.plus:
        return term.minus[0]
    if len(term.plus) == 1 and term.minus:
        return term.plus[0]
    if not term.minus or not term.plus:
        return term.free[0]
    raise DomainError('no principal-value parametrization for %d minus and '
                      '%d plus shells' % (len(term.minus), len(term.plus)))


def _directions(space: int, nodes: int):
    """Unit vectors and weights on the sphere of ``R^space``."""

    if space == 1:
        return np.array([[1.0], [-1.0]]), np.ones(2)
    count = max(8, nodes // 4)
    angles = 2 * np.pi * np.arange(count) / count
    return np.stack([np.cos(angles), np.sin(angles)], axis=-1), \
        np.full(count, 2 * np.pi / count)


def _boost(total: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Vectors ``(Q, K, d)`` given in the rest frame of ``total (Q, d)``."""

    mass = np.sqrt(minkowski_square(total))
    unit = np.sign(total[:, :1]) * total / mass[:, None]
    gamma = unit[:, 0][:, None]
    velocity = unit[:, None, 1:]
    energy = vectors[..., 0]
    space = vectors[..., 1:]
    along = np.sum(space * velocity, axis=-1)
    boosted = np.empty_like(vectors)
    boosted[..., 0] = gamma * energy + along
    boosted[..., 1:] = space + velocity * \
        (energy + along / (1 + gamma))[..., None]
    return boosted


def _momentum_reach(functions: typing.Sequence[TestFunction]) -> float:
    """Momentum beyond which every transform is negligible."""

    return max((math.sqrt(2 * max(max(mode.orders) for mode in f.modes) + 1)
                + DECAY_REACH) / f.width for f in functions)


def _pole_integral(slope, crossing, upper, anchored, space):
    """
    ``PV int_0^L sinh^(space-1) / (slope (cosh - crossing))`` with
    ``cosh L = upper``, for ``-1 < crossing < upper``.
    """

    safe = np.where(anchored, crossing, 2.0)
    if space == 1:
        # tanh(eta / 2) turns the integral into a rational one
        top = np.tanh(np.arccosh(upper) / 2)
        below = safe < 1
        ratio = np.sqrt(np.abs(safe - 1) / (1 + safe)) / top
        ratio = np.where(below, np.maximum(ratio, 1e-300),
                         np.minimum(ratio, np.nextafter(1.0, 0.0)))
        small = ~below & (ratio < 1e-6)
        with np.errstate(divide='ignore', invalid='ignore'):
            series = np.where(small, 1 + ratio ** 2 / 3,
                              np.arctanh(ratio) / ratio)
            bounded = np.arctan(1 / ratio) / ratio
        value = np.where(below, 2 * bounded, -2 * series) / \
            (slope * (1 + safe) * top)
    else:
        with np.errstate(divide='ignore'):
            value = np.log((upper - safe) / np.abs(safe - 1)) / slope
    return np.where(anchored, value, 0.0)


def _principal_term(terms, j, functions, indices, nodes):
    """
    Term ``j`` with the pole factor read as a principal value.

    One shell slot is integrated in the rest frame of the sum of the other
    shells, where the off-shellness of the pole slot is linear in its
    energy. The pole is subtracted in rapidity and integrated in closed
    form; the remaining shells use the Gauss-Hermite rule.
    """

    # pylint: disable=too-many-locals,too-many-statements
    term = terms.terms[j]
    space = terms.dimension - 1
    if space > 2:
        raise DomainError('principal-value smearing is implemented for '
                          'd <= 3')
    inner = _inner_slot(term)
    outer = [slot for slot in term.free if slot != inner]
    dims = (terms.order - 1) * space
    count = _nodes_for(dims, nodes)
    # distinct node counts keep paired shells off the threshold k_a = k_b
    points, weights = staggered_rule(
        [count - position for position in range(len(outer))
         for _ in range(space)],
        1.0 / (np.sqrt(2.0) * min(f.width for f in functions)))
    spatial = points.reshape(-1, len(outer), space)
    masses = np.array([terms.masses[slot] for slot in outer])
    omega = np.sqrt(np.sum(spatial ** 2, axis=-1) + masses ** 2)
    signs = np.array([term.sign(slot) for slot in outer])
    shells = np.concatenate([(signs * omega)[..., None], spatial], axis=-1)
    total = np.sum(shells, axis=1)
    weights = weights * terms.prefactor / np.prod(2 * omega, axis=-1)

    mass = terms.masses[inner]
    invariant = np.sqrt(minkowski_square(total))
    alpha = invariant ** 2 + mass ** 2 - terms.masses[term.pole] ** 2
    slope = 2 * np.sign(total[:, 0]) * term.sign(inner) * invariant * mass
    crossing = -alpha / slope
    doppler = (np.abs(total[:, 0]) +
               np.linalg.norm(total[:, 1:], axis=-1)) / invariant
    upper = np.maximum(2.0, _momentum_reach(functions) * doppler / mass)
    # the pole sits at cosh(eta) = crossing; below 1 it still peaks at 0
    anchored = (crossing > -1) & (crossing < upper)
    if space == 2:
        near = anchored & (np.abs(crossing - 1) <= POLE_EPSILON)
        if np.any(near):
            raise NearPoleError(j, float(np.min(np.abs(crossing[near] - 1))))

    directions, direction_weights = _directions(space, nodes)
    inner_count = max(8, min(nodes, 2 * QUADRATURE_BUDGET //
                             (len(weights) * len(direction_weights) * 2)))
    x, w = legendre.leggauss(inner_count)
    length = np.arccosh(upper)
    split = np.where(anchored, np.arccosh(np.clip(crossing, 1.0, upper)),
                     length / 2)
    eta = np.concatenate([split[:, None] * (x + 1) / 2,
                          split[:, None] + (length - split)[:, None] *
                          (x + 1) / 2, split[:, None]], axis=1)
    eta_weights = np.concatenate([split[:, None] * w / 2,
                                  (length - split)[:, None] * w / 2], axis=1)

    rest = np.empty(eta.shape + (len(directions), space + 1))
    rest[..., 0] = term.sign(inner) * mass * np.cosh(eta)[..., None]
    rest[..., 1:] = mass * np.sinh(eta)[..., None, None] * directions
    lab = _boost(total, rest.reshape(len(total), -1, space + 1))
    momenta = np.zeros(lab.shape[:2] + (terms.order, space + 1))
    for position, slot in enumerate(outer):
        momenta[:, :, slot, :] = shells[:, None, position, :]
    momenta[:, :, inner, :] = lab
    momenta[:, :, term.pole, :] = -(total[:, None, :] + lab)
    values = terms.polynomial.evaluate(momenta)[(Ellipsis,) + tuple(indices)]
    for slot, function in enumerate(functions):
        values = values * function.minkowski_fourier(-momenta[..., slot, :])
    values = values.reshape(eta.shape + (len(directions),))
    # -1 / (k^2 - m^2) and the shell measure d^(d-1)k / (2 omega)
    reduced = -0.5 * mass ** (space - 1) * \
        np.sum(values * direction_weights, axis=-1)

    at_root = np.where(anchored, reduced[:, -1], 0)
    offshell = alpha[:, None] + slope[:, None] * np.cosh(eta[:, :-1])
    offshell = np.where(offshell == 0.0, 1.0, offshell)
    integrand = np.sinh(eta[:, :-1]) ** (space - 1) * \
        (reduced[:, :-1] - at_root[:, None]) / offshell
    inner_values = np.sum(eta_weights * integrand, axis=1) + at_root * \
        _pole_integral(slope, crossing, upper, anchored, space)
    return complex(np.sum(weights * inner_values)) / (2 * np.pi) ** dims


def _smeared_term(terms, j, functions, indices, nodes, epsilon):
    reach = pole_reach(terms, j)
    if reach == 'tangent':
        raise SingularityError('term %d: the pole touches the edge of the '
                               'shell configurations, the smeared value '
                               'diverges' % j)
    if reach == 'crossing':
        return _principal_term(terms, j, functions, indices, nodes)
    dims = (terms.order - 1) * (terms.dimension - 1)
    scale = 1.0 / (np.sqrt(2.0) * min(f.width for f in functions))
    points, weights = product_rule(_nodes_for(dims, nodes), scale, dims)
    spatial = points.reshape(-1, terms.order - 1, terms.dimension - 1)
    momenta, density = _term_density(terms, j, spatial, indices, epsilon)
    integrand = density
    for slot, function in enumerate(functions):
        integrand = integrand * function.minkowski_fourier(
            -momenta[:, slot, :])
    return complex(np.sum(weights * integrand)) / \
        (2 * np.pi) ** dims


def smeared_truncated(model: ValidatedModel,
                      functions: typing.Sequence[TestFunction],
                      indices: typing.Sequence[int] = None,
                      nodes: int = DEFAULT_NODES,
                      epsilon: float = POLE_EPSILON) -> complex:
    """``W^T_n(f_1 x ... x f_n)`` for orders 1 to 4."""

    order = len(functions)
    indices = (0,) * order if indices is None else tuple(indices)
    if not 1 <= order <= MAX_WITNESS_ORDER:
        raise DomainError('smeared Wightman functions cover orders 1..%d'
                          % MAX_WITNESS_ORDER)
    if order == 1:
        return complex(schwinger1(indices[0], model) *
                       functions[0].integral())
    if order not in model.custom_qm and \
            not np.any(euclidean_polynomial(model, order).cumulant):
        return 0j
    total = 0j
    for terms in build_wightman_family(order, model):
        for j in range(len(terms.terms)):
            total += _smeared_term(terms, j, functions, indices, nodes,
                                   epsilon)
    if order == 2:
        total /= (2 * np.pi) ** (model.d + 1)
    return total


def smeared_wightman(model: ValidatedModel,
                     functions: typing.Sequence[TestFunction],
                     indices: typing.Sequence[int] = None,
                     nodes: int = DEFAULT_NODES,
                     epsilon: float = POLE_EPSILON) -> complex:
    """Full ``W_n(f_1 x ... x f_n)`` from the truncated values."""

    order = len(functions)
    indices = (0,) * order if indices is None else tuple(indices)
    truncated = {}
    for size in range(1, order + 1):
        for subset in itertools.combinations(range(order), size):
            truncated[subset] = smeared_truncated(
                model, [functions[i] for i in subset],
                [indices[i] for i in subset], nodes, epsilon)
    return complex(untruncate_subsets(truncated, tuple(range(order))))


def hssc_ratio(model: ValidatedModel, left: typing.Sequence[TestFunction],
               right: typing.Sequence[TestFunction],
               indices: typing.Sequence[int] = None,
               nodes: int = DEFAULT_NODES) -> float:
    """``|W_{n+m}(f* x h)| / (||f|| ||h||)`` for real elementary tensors."""

    functions = list(reversed(left)) + list(right)
    value = smeared_wightman(model, functions, indices, nodes)
    return abs(value) / (tensor_norm(left) * tensor_norm(right))


def _witness_draw(model, n, m, family, streams, draw, nodes, tolerance):
    rng = streams.generator(draw)
    left = [family.draw(rng) for _ in range(n)]
    right = [family.draw(rng) for _ in range(m)]
    indices = tuple(int(i) for i in rng.integers(model.n_fields, size=n + m))
    functions = list(reversed(left)) + right
    try:
        fine = smeared_wightman(model, functions, indices, nodes)
        coarse = smeared_wightman(model, functions, indices,
                                  max(4, 2 * nodes // 3))
    except NumericToleranceError as error:
        logger.debug('Draw\t\t: %d failed (%s)', draw, error)
        return None
    if not np.isfinite(fine) or \
            abs(fine - coarse) > tolerance * max(1.0, abs(fine)):
        logger.debug('Draw\t\t: %d failed (rules disagree by %.2e)', draw,
                     abs(fine - coarse))
        return None
    return abs(fine) / (tensor_norm(left) * tensor_norm(right))


def _has_crossing(model: ValidatedModel, order: int) -> bool:
    """Whether a term of order 3..``order`` is smeared as a principal value."""

    return any(pole_reach(terms, j) == 'crossing'
               for size in range(3, order + 1)
               for terms in build_wightman_family(size, model)
               for j in range(len(terms.terms)))


def hssc_witness(model: ValidatedModel, n: int, m: int,
                 family: TestFunctionFamily, draws: int, seed: int = 0,
                 threads: int = 1, tolerance: float = 1e-8,
                 nodes: int = DEFAULT_NODES) -> WitnessReport:
    """Ratio statistics over random elementary tensors ``f`` and ``h``."""

    # pylint: disable=too-many-arguments,too-many-locals
    if n < 1 or m < 1 or n + m > MAX_WITNESS_ORDER:
        raise DomainError('need n, m >= 1 and n + m <= %d'
                          % MAX_WITNESS_ORDER)
    if draws < 1:
        raise DomainError('at least one draw required')
    if family.dim != model.d:
        raise DomainError('test functions live in dimension %d' % model.d)
    if tolerance < PRINCIPAL_TOLERANCE and _has_crossing(model, n + m):
        logger.debug('Witness\t\t: principal-value terms, rules compared '
                     'at %g', PRINCIPAL_TOLERANCE)
        tolerance = PRINCIPAL_TOLERANCE
    streams = RandomStreams(seed)
    with concurrent.futures.ThreadPoolExecutor(
            max_workers=max(1, threads)) as executor:
        results = list(executor.map(
            lambda draw: _witness_draw(model, n, m, family, streams, draw,
                                       nodes, tolerance), range(draws)))
    accepted = tuple(draw for draw, r in enumerate(results) if r is not None)
    ratios = tuple(float(results[draw]) for draw in accepted)
    failures = draws - len(ratios)
    if failures:
        logger.warning('Witness\t\t: %d of %d draws excluded', failures,
                       draws)
    if ratios:
        counts, edges = np.histogram(ratios, bins=10)
        maximum, mean = max(ratios), float(np.mean(ratios))
    else:
        counts, edges = np.zeros(10, dtype=int), np.zeros(11)
        maximum, mean = float('nan'), float('nan')
    return WitnessReport(n, m, draws, ratios, accepted, failures, maximum,
                         mean, tuple(int(c) for c in counts),
                         tuple(float(e) for e in edges))


def clustering_check(model: ValidatedModel, order: int, split: int,
                     shifts: typing.Sequence[float],
                     family: TestFunctionFamily = None,
                     nodes: int = DEFAULT_NODES) -> typing.List[ClusterRow]:
    """``W_n(f x h_ta) - W_n1(f) W_n2(h)`` along a spacelike direction."""

    if model.n_fields != 1:
        raise DomainError('the cluster check is implemented for scalar '
                          'models')
    if not 1 <= split < order <= MAX_WITNESS_ORDER:
        raise DomainError('need 1 <= split < order <= %d'
                          % MAX_WITNESS_ORDER)
    family = TestFunctionFamily.default(model.d, 0) if family is None \
        else family
    ground = family.gaussian()
    direction = np.zeros(model.d)
    direction[1] = 1.0
    left = [ground] * split
    rows = []
    for shift in shifts:
        right = [ground.shifted(shift * direction)] * (order - split)
        joint = smeared_wightman(model, left + right, nodes=nodes)
        product = smeared_wightman(model, left, nodes=nodes) * \
            smeared_wightman(model, right, nodes=nodes)
        rows.append(ClusterRow(float(shift), joint, product,
                               abs(joint - product)))
        logger.debug('Cluster\t\t: t=%g gap=%.6e', shift, abs(joint - product))
    return rows

#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Monte Carlo oracle on a periodic lattice.

Noise is drawn site by site (white Gauss plus compound Poisson, plus a
Gaussian counterterm with covariance ``sigma_bar^2 (p(-Delta) - 1)``), the
equation ``D phi = eta`` is solved by FFT with the lattice Laplacian, and
raw moments at probe tuples are turned into truncated moments with block
jackknife error bars. ``lattice_analytic_kernel`` evaluates the analytic
kernels on the same lattice symbol.
"""

import concurrent.futures
import itertools
import string
import threading
import typing
from dataclasses import dataclass

import numpy as np
from logzero import logger

from src.imqft_errors import (ConfigurationError, DomainError,
                              SampleSizeError)
from src.imqft_model import ValidatedModel
from src.imqft_partitions import truncate_subsets
from src.imqft_propagator import denominator, p_polynomial
from src.imqft_schwinger import euclidean_polynomial, schwinger1

__author__ = "IMQFT Lab developers"
__copyright__ = "Copyright 2026, IMQFT Lab developers"
__license__ = "MIT"
__version__ = "1.0.0"
__status__ = "Development"

MAX_SITES = 2 ** 24
MAX_MOMENT_ORDER = 6
MIN_SAMPLES = 100
BLOCK_SIZE = 100
BOX_DECAY_LENGTHS = 6.0


@dataclass(frozen=True)
class LatticeSpec:
    """Periodic hypercubic lattice with ``size`` sites per axis."""

    d: int
    size: int
    spacing: float
    max_sites: int = MAX_SITES

    def __post_init__(self):
        if self.size < 2 or self.size & (self.size - 1):
            raise DomainError('lattice size must be a power of two, got %d'
                              % self.size)
        if not self.spacing > 0:
            raise DomainError('lattice spacing must be positive')
        if self.sites > self.max_sites:
            raise DomainError('lattice %d^%d exceeds the budget of %d sites'
                              % (self.size, self.d, self.max_sites))

    @property
    def shape(self) -> typing.Tuple[int, ...]:
        """Array shape of one field component."""
        return (self.size,) * self.d

    @property
    def sites(self) -> int:
        """Number of lattice sites."""
        return self.size ** self.d

    @property
    def cell(self) -> float:
        """Cell volume ``a^d``."""
        return self.spacing ** self.d

    @property
    def axes(self) -> typing.Tuple[int, ...]:
        """Lattice axes of an ``(N,) + shape`` field array."""
        return tuple(range(1, self.d + 1))

    def check_box(self, model: ValidatedModel) -> bool:
        """Warn when the box is short against the longest decay length."""

        wide = self.spacing * self.size > BOX_DECAY_LENGTHS / \
            model.spectrum.lightest
        if not wide:
            logger.warning('Lattice\t\t: box %.3g shorter than %g decay '
                           'lengths', self.spacing * self.size,
                           BOX_DECAY_LENGTHS)
        return wide


@dataclass(frozen=True, eq=False)
class FieldSample:
    """Field (or noise) values with shape ``(N,) + lattice.shape``."""

    values: np.ndarray
    lattice: LatticeSpec
    seed: int
    stream: int
    jumps: np.ndarray = None


@dataclass(frozen=True)
class Probe:
    """Lattice sites (integer coordinates) with one component index each."""

    points: typing.Tuple[typing.Tuple[int, ...], ...]
    indices: typing.Tuple[int, ...]

    @property
    def order(self) -> int:
        """Number of field insertions."""
        return len(self.points)


@dataclass(frozen=True)
class MomentEstimate:
    """Monte Carlo truncated moment with its jackknife standard error."""

    order: int
    probe: Probe
    mean: float
    stderr: float
    count: int

    def z_score(self, reference: float) -> float:
        """Deviation from ``reference`` in standard errors."""

        if self.stderr == 0:
            return 0.0 if self.mean == reference else float('inf')
        return (self.mean - reference) / self.stderr


class RandomStreams:
    """Counter-based streams keyed by ``(seed, stream)``; each used once."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._used = set()
        self._lock = threading.Lock()

    def generator(self, stream: int) -> np.random.Generator:
        """Fresh generator for ``stream``; reuse is a configuration error."""

        with self._lock:
            if stream in self._used:
                raise ConfigurationError('random stream %d of seed %d used '
                                         'twice' % (stream, self.seed))
            self._used.add(stream)
        sequence = np.random.SeedSequence([self.seed, int(stream)])
        return np.random.Generator(np.random.Philox(sequence))


def lattice_frequencies(lattice: LatticeSpec) -> np.ndarray:
    """FFT momenta ``2 pi n / (L a)`` with shape ``shape + (d,)``."""

    axis = 2 * np.pi * np.fft.fftfreq(lattice.size, d=lattice.spacing)
    return np.stack(np.meshgrid(*([axis] * lattice.d), indexing='ij'),
                    axis=-1)


def laplacian_eigenvalues(lattice: LatticeSpec) -> np.ndarray:
    """``(4/a^2) sum_mu sin^2(k_mu a / 2)``."""

    half = lattice_frequencies(lattice) * lattice.spacing / 2
    return np.sum(4.0 / lattice.spacing ** 2 * np.sin(half) ** 2, axis=-1)


def lattice_momenta(lattice: LatticeSpec) -> np.ndarray:
    """Lattice momenta ``(2/a) sin(k a / 2)`` fed into polynomials."""

    half = lattice_frequencies(lattice) * lattice.spacing / 2
    return 2.0 / lattice.spacing * np.sin(half)


def _transfer(model: ValidatedModel, lattice: LatticeSpec) -> np.ndarray:
    """``T[..., alpha, beta] = Q_E(k)_{beta alpha} / prod(lambda+m^2)^nu``."""

    momenta = lattice_momenta(lattice)
    q_euclid = model.qE.evaluate(momenta[..., np.newaxis, :])
    denom = denominator(laplacian_eigenvalues(lattice), model.spectrum)
    return np.swapaxes(q_euclid, -1, -2) / denom[..., np.newaxis, np.newaxis]


def _matrix_sqrt(matrix: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh(matrix)
    return vectors @ np.diag(np.sqrt(np.clip(values, 0, None))) @ vectors.T


def _draw_noise(lattice: LatticeSpec, model: ValidatedModel,
                rng: np.random.Generator, smoothing: bool):
    levy = model.levy
    n_fields = model.n_fields
    shape = (n_fields,) + lattice.shape
    values = np.broadcast_to(levy.drift.reshape((n_fields,) + (1,) *
                                                lattice.d), shape).copy()
    white = rng.standard_normal(size=shape)
    values += np.tensordot(_matrix_sqrt(levy.gaussian), white, axes=1) / \
        np.sqrt(lattice.cell)

    jumps = np.zeros(lattice.shape, dtype=np.int64)
    if levy.atoms and levy.z > 0:
        for weight, location in zip(levy.weights, levy.locations):
            counts = rng.poisson(levy.z * lattice.cell * weight,
                                 size=lattice.shape)
            jumps += counts
            values += np.multiply.outer(location, counts) / lattice.cell

    if smoothing:
        excess = p_polynomial(laplacian_eigenvalues(lattice),
                              model.spectrum) - 1.0
        if np.any(excess > 0):
            filtered = np.fft.fftn(rng.standard_normal(size=shape),
                                   axes=lattice.axes)
            filtered = np.fft.ifftn(filtered * np.sqrt(np.clip(excess, 0,
                                                               None)),
                                    axes=lattice.axes).real
            values += np.tensordot(_matrix_sqrt(levy.sigma2_bar), filtered,
                                   axes=1) / np.sqrt(lattice.cell)
    return values, jumps


def sample_noise(lattice: LatticeSpec, model: ValidatedModel,
                 streams: RandomStreams, stream: int,
                 smoothing: bool = True) -> FieldSample:
    """
    One noise configuration from its own random stream.

    With ``smoothing`` off the counterterm field is left out and the noise
    is white with the Levy cumulants alone.
    """

    rng = streams.generator(stream)
    values, jumps = _draw_noise(lattice, model, rng, smoothing)
    return FieldSample(values, lattice, streams.seed, stream, jumps)


def _solve(values: np.ndarray, transfer: np.ndarray,
           model: ValidatedModel, lattice: LatticeSpec) -> np.ndarray:
    raised = np.tensordot(model.inverse_metric, values, axes=1)
    spectrum = np.fft.fftn(raised, axes=lattice.axes)
    spectrum = np.einsum('...ab,b...->a...', transfer, spectrum)
    return np.fft.ifftn(spectrum, axes=lattice.axes).real


def solve_spde(noise: FieldSample, model: ValidatedModel) -> FieldSample:
    """Solve ``D phi = eta`` (``eta`` index raised by the metric)."""

    lattice = noise.lattice
    values = _solve(noise.values, _transfer(model, lattice), model, lattice)
    return FieldSample(values, lattice, noise.seed, noise.stream, noise.jumps)


def apply_operator(sample: FieldSample, model: ValidatedModel) -> np.ndarray:
    """Forward lattice operator: recovers the noise that ``solve_spde`` saw."""

    lattice = sample.lattice
    transfer = _transfer(model, lattice)
    spectrum = np.fft.fftn(sample.values, axes=lattice.axes)
    spectrum = np.moveaxis(spectrum, 0, -1)[..., np.newaxis]
    try:
        raised = np.linalg.solve(transfer, spectrum)[..., 0]
    except np.linalg.LinAlgError as error:
        raise DomainError('Q_E is singular on the lattice') from error
    raised = np.fft.ifftn(np.moveaxis(raised, -1, 0), axes=lattice.axes).real
    return np.tensordot(model.metric, raised, axes=1)


def _green_matrix(model: ValidatedModel, lattice: LatticeSpec) -> np.ndarray:
    """``G[beta, alpha, x]`` on the lattice."""

    momenta = lattice_momenta(lattice)
    q_euclid = model.qE.evaluate(momenta[..., np.newaxis, :])
    symbol = q_euclid / denominator(laplacian_eigenvalues(lattice),
                                    model.spectrum)[..., np.newaxis,
                                                    np.newaxis]
    symbol = np.moveaxis(symbol, (-2, -1), (0, 1))
    axes = tuple(range(2, lattice.d + 2))
    return np.fft.ifftn(symbol, axes=axes).real / lattice.cell


def _two_point_table(model: ValidatedModel, lattice: LatticeSpec):
    momenta = lattice_momenta(lattice)
    poly = euclidean_polynomial(model, 2)
    values = poly.evaluate(np.stack([momenta, -momenta], axis=-2))
    denom = denominator(laplacian_eigenvalues(lattice), model.spectrum) * \
        model.spectrum.normalization
    symbol = np.moveaxis(values / denom[..., np.newaxis, np.newaxis],
                         (-2, -1), (0, 1))
    axes = tuple(range(2, lattice.d + 2))
    return np.fft.ifftn(symbol, axes=axes).real / lattice.cell


def _vertex_value(green, cumulant, probe: Probe, lattice: LatticeSpec):
    axes = tuple(range(1, lattice.d + 1))
    kernels = []
    for point, alpha in zip(probe.points, probe.indices):
        reflected = np.roll(np.flip(green[:, alpha], axis=axes), 1,
                            axis=axes)
        shifted = np.roll(reflected, tuple(point), axis=axes)
        kernels.append(shifted.reshape(shifted.shape[0], -1))
    betas = string.ascii_lowercase[:probe.order]
    subscripts = betas + ',' + ','.join(beta + 'z' for beta in betas) + '->'
    return float(np.einsum(subscripts, cumulant, *kernels, optimize=True)) * \
        lattice.cell


def lattice_analytic_kernel(model: ValidatedModel, lattice: LatticeSpec,
                            order: int,
                            probes: typing.Sequence[Probe]) -> np.ndarray:
    """Analytic truncated kernels on the lattice symbol of ``solve_spde``."""

    if not 1 <= order <= MAX_MOMENT_ORDER:
        raise DomainError('lattice kernels cover orders 1..%d, got %d'
                          % (MAX_MOMENT_ORDER, order))
    if any(probe.order != order for probe in probes):
        raise DomainError('every probe must carry %d points' % order)
    if order == 1:
        return np.array([schwinger1(probe.indices[0], model)
                         for probe in probes])
    if order == 2:
        table = _two_point_table(model, lattice)
        values = []
        for probe in probes:
            gap = tuple((np.subtract(*probe.points) % lattice.size).tolist())
            values.append(table[probe.indices[0], probe.indices[1]][gap])
        return np.array(values)
    green = _green_matrix(model, lattice)
    cumulant = euclidean_polynomial(model, order).cumulant
    return np.array([_vertex_value(green, cumulant, probe, lattice)
                     for probe in probes])


def default_probes(lattice: LatticeSpec, orders: typing.Iterable[int],
                   count: int = 5, n_fields: int = 1) -> typing.List[Probe]:
    """Deterministic probe tuples at short separations."""

    probes = []
    for order in sorted(orders):
        for i in range(count):
            points = []
            for j in range(order):
                site = [0] * lattice.d
                site[0] = (j * (i + 1)) % lattice.size
                site[1 % lattice.d] = (site[1 % lattice.d] +
                                       (j * (i % 2))) % lattice.size
                points.append(tuple(site))
            indices = tuple((i + j) % n_fields for j in range(order))
            probes.append(Probe(tuple(points), indices))
    return probes


class MonteCarloRun:
    """Streams field samples block by block and accumulates raw moments."""

    def __init__(self, model: ValidatedModel, lattice: LatticeSpec,
                 probes: typing.Sequence[Probe], seed: int):
        self.model = model
        self.lattice = lattice
        self.probes = list(probes)
        self.streams = RandomStreams(seed)
        self.transfer = _transfer(model, lattice)
        self.subsets = [[subset for size in range(1, probe.order + 1)
                         for subset in itertools.combinations(
                             range(probe.order), size)]
                        for probe in self.probes]

    def _probe_values(self, field_values: np.ndarray, probe: Probe):
        return np.array([field_values[(alpha,) + tuple(point)]
                         for point, alpha in zip(probe.points,
                                                 probe.indices)])

    def run_block(self, block: int, size: int) -> typing.List[np.ndarray]:
        """Sums of subset products over one block of samples."""

        rng = self.streams.generator(block)
        sums = [np.zeros(len(subsets)) for subsets in self.subsets]
        for _ in range(size):
            noise, _jumps = _draw_noise(self.lattice, self.model, rng, True)
            field_values = _solve(noise, self.transfer, self.model,
                                  self.lattice)
            for p, probe in enumerate(self.probes):
                values = self._probe_values(field_values, probe)
                sums[p] += [np.prod(values[list(subset)])
                            for subset in self.subsets[p]]
        logger.debug('Block\t\t: %d (%d samples)', block, size)
        return sums

    def run(self, samples: int, threads: int = 1):
        """Return per-block sums and counts, merged in block order."""

        block_size = min(BLOCK_SIZE, samples // 2)
        sizes = [block_size] * (samples // block_size)
        sizes[-1] += samples - sum(sizes)
        results = [None] * len(sizes)
        with concurrent.futures.ThreadPoolExecutor(
                max_workers=max(1, threads)) as executor:
            futures = {executor.submit(self.run_block, block, size): block
                       for block, size in enumerate(sizes)}
            for done, future in enumerate(
                    concurrent.futures.as_completed(futures), start=1):
                results[futures[future]] = future.result()
                logger.info('Progress\t: %s / %s (blocks)', done, len(sizes))
        return results, np.array(sizes, dtype=float)

    def truncated(self, p: int, moments: np.ndarray) -> float:
        """Truncated moment of probe ``p`` from its subset means."""

        table = dict(zip(self.subsets[p], moments))
        return float(truncate_subsets(table, tuple(range(
            self.probes[p].order))))


def estimate_truncated_moments(model: ValidatedModel, lattice: LatticeSpec,
                               orders: typing.Iterable[int],
                               probes: typing.Sequence[Probe], samples: int,
                               seed: int, threads: int = 1) \
        -> typing.List[MomentEstimate]:
    """Monte Carlo truncated moments with block jackknife errors."""

    # pylint: disable=too-many-arguments,too-many-locals
    orders = set(orders)
    if not orders or not orders <= set(range(1, MAX_MOMENT_ORDER + 1)):
        raise DomainError('moment orders must lie in 1..%d'
                          % MAX_MOMENT_ORDER)
    if samples < MIN_SAMPLES:
        raise SampleSizeError('%d samples requested, at least %d needed'
                              % (samples, MIN_SAMPLES))
    selected = [probe for probe in probes if probe.order in orders]
    for probe in selected:
        for point in probe.points:
            if len(point) != lattice.d or \
                    any(not 0 <= c < lattice.size for c in point):
                raise DomainError('probe site %s outside the lattice'
                                  % (point,))
    lattice.check_box(model)
    logger.info('Lattice\t\t: %d^%d (spacing %g)', lattice.size, lattice.d,
                lattice.spacing)

    run = MonteCarloRun(model, lattice, selected, seed)
    blocks, counts = run.run(samples, threads)
    total = counts.sum()
    estimates = []
    for p, probe in enumerate(selected):
        block_sums = np.array([block[p] for block in blocks])
        full = block_sums.sum(axis=0)
        mean = run.truncated(p, full / total)
        leave_out = np.array([
            run.truncated(p, (full - block_sums[b]) / (total - counts[b]))
            for b in range(len(counts))])
        spread = len(counts) - 1
        stderr = float(np.sqrt(spread / len(counts) *
                               np.sum((leave_out - leave_out.mean()) ** 2)))
        estimates.append(MomentEstimate(probe.order, probe, mean, stderr,
                                        int(total)))
        logger.debug('Moment\t\t: order %d %s -> %.6e +- %.2e',
                     probe.order, probe.points, mean, stderr)
    return estimates

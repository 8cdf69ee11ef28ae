#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Command line of the noise-field laboratory: validate models and compute
cumulants, Schwinger kernels, Monte Carlo moments, Wightman terms,
amplitudes and the structure checks built on them.
"""

import argparse
import itertools
import logging
import sys
import typing

import logzero
import numpy as np
from logzero import logger

from src.imqft_config import DEFAULTS, apply_defaults, load_defaults
from src.imqft_errors import (ImqftError, NumericToleranceError, UsageError,
                              ValidationError)
from src.imqft_lattice import (LatticeSpec, default_probes,
                               estimate_truncated_moments,
                               lattice_analytic_kernel)
from src.imqft_levy import cumulant_tensor, finite_difference_tensor
from src.imqft_model import load_model
from src.imqft_output import ResultWriter, RunManifest
from src.imqft_scattering import amplitude, decay_scan, parse_process
from src.imqft_schwinger import TruncatedKernel
from src.imqft_testfunctions import TestFunctionFamily
from src.imqft_wightman import (build_wightman_family, clustering_check,
                                fourier_laplace_check, hssc_witness)

__author__ = "IMQFT Lab developers"
__copyright__ = "Copyright 2026, IMQFT Lab developers"
__license__ = "MIT"
__version__ = "1.0.0"
__status__ = "Development"

EXIT_OK = 0
EXIT_USAGE = 3
CUMULANT_CHECK_TOLERANCE = 1e-6


class _ArgumentParser(argparse.ArgumentParser):
    """Parser whose usage errors become exceptions instead of exit 2."""

    def error(self, message):
        raise UsageError(message)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int,
                        help="random seed (default: %s)" % DEFAULTS['seed'])
    common.add_argument("--threads", type=int,
                        help="worker threads (default: %s)"
                        % DEFAULTS['threads'])
    common.add_argument("--lattice", type=int,
                        help="sites per axis, a power of two (default: %s)"
                        % DEFAULTS['lattice'])
    common.add_argument("--spacing", type=float,
                        help="lattice spacing (default: %s)"
                        % DEFAULTS['spacing'])
    common.add_argument("--samples", type=int,
                        help="Monte Carlo samples (default: %s)"
                        % DEFAULTS['samples'])
    common.add_argument("--tolerance", type=float,
                        help="numerical tolerance (default: %s)"
                        % DEFAULTS['tolerance'])
    common.add_argument("--out",
                        help="output directory (default: %s)"
                        % DEFAULTS['out'])
    common.add_argument("--stdout", action='store_true',
                        help="write results to stdout instead of files")
    common.add_argument("--config",
                        help="defaults file (default: ~/.imqft.ini)")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        dest="verbosity", help="be more verbose (-v, -vv)")
    return common


def handle_arguments(argv=None) -> argparse.Namespace:
    """Provide CLI handler for application."""

    common = _common_flags()
    parser = _ArgumentParser(
        prog='imqft', formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument(
        "--version",
        action="version",
        version="%(prog)s (version {version})".format(version=__version__))
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name, text):
        sub = commands.add_parser(
            name, help=text, parents=[common],
            formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        sub.add_argument("model", help="JSON model file")
        return sub

    command("validate", "check a model file")
    sub = command("cumulants", "cumulant tensors of the noise")
    sub.add_argument("--order", type=int, default=4,
                     help="highest order")
    sub.add_argument("--check", action='store_true',
                     help="compare with finite differences of psi")
    sub = command("schwinger", "truncated Schwinger kernel at given points")
    sub.add_argument("--points", required=True,
                     help="points as 'x0,x1;y0,y1;...'")
    sub.add_argument("--indices", help="component indices as '0,0,...'")
    sub.add_argument("--grid-spacing", type=float,
                     help="grid spacing of the vertex integral (default: "
                     "0.05, coarser when the grid would be too large)")
    sub.add_argument("--extent", type=float, help="periodic box length")
    sub.add_argument("--resolution", type=float,
                     help="fail when halving the resolution moves the "
                     "value by more than this")
    sub = command("simulate", "Monte Carlo truncated moments")
    sub.add_argument("--orders", default="2,3,4", help="moment orders")
    sub.add_argument("--probes", type=int, default=5,
                     help="probe tuples per order")
    sub = command("wightman", "truncated Wightman term lists")
    sub.add_argument("--order", type=int, default=3, help="order n")
    sub.add_argument("--tau", type=float,
                     help="run the Fourier-Laplace check at this tau")
    sub.add_argument("--x", help="spatial separation for the check")
    sub = command("scatter", "truncated scattering amplitude")
    sub.add_argument("process", help="JSON process file")
    sub = command("decay", "two-body decay kinematics and amplitude")
    sub.add_argument("--m", type=float, required=True, dest="heavy",
                     help="heavy mass")
    sub.add_argument("--mu", type=float, required=True, dest="light",
                     help="light mass")
    sub = command("hssc", "Hilbert space structure witness")
    sub.add_argument("--n", type=int, default=1, dest="left",
                     help="order of f")
    sub.add_argument("--m", type=int, default=1, dest="right",
                     help="order of h")
    sub.add_argument("--draws", type=int, default=100,
                     help="random test function draws")
    sub.add_argument("--max-order", type=int, default=2,
                     help="highest Hermite order of the family")
    sub.add_argument("--width", type=float, default=1.0,
                     help="width of the family")
    sub = command("cluster", "cluster decay along a spacelike direction")
    sub.add_argument("--order", type=int, default=2, help="order n")
    sub.add_argument("--split", type=int, default=1,
                     help="insertions in the first cluster")
    sub.add_argument("--shifts", default="0,1,2,3,4",
                     help="spacelike shift magnitudes")

    args = parser.parse_args(argv)

    logzero.loglevel(logging.WARNING - args.verbosity * 10)
    logzero.formatter(logging.Formatter("%(message)s"))

    return args


def _numbers(text: str, kind=float) -> typing.List:
    try:
        return [kind(item) for item in text.split(',') if item.strip()]
    except ValueError as error:
        raise UsageError('cannot parse %r as numbers' % text) from error


def _points(text: str, dim: int) -> np.ndarray:
    points = [_numbers(chunk) for chunk in text.split(';')]
    if any(len(point) != dim for point in points):
        raise UsageError('every point needs %d coordinates' % dim)
    return np.array(points, dtype=float)


def command_validate(args, model, writer):  # pylint: disable=unused-argument
    """Report the model summary."""

    writer.write_json('validate.json', {
        'valid': True, 'd': model.d, 'N': model.n_fields,
        'P': model.spectrum.size, 'no_dipole': model.spectrum.no_dipole})


def command_cumulants(args, model, writer):
    """Cumulant tensors, optionally against the finite-difference oracle."""

    header = ['order', 'indices', 'value']
    if args.check:
        header += ['finite_difference', 'relative_gap']
    rows, worst = [], 0.0
    for order in range(1, args.order + 1):
        tensor = cumulant_tensor(order, model.levy).entries
        oracle = finite_difference_tensor(order, model.levy) if args.check \
            else None
        gap = 0.0
        if args.check:
            gap = float(np.max(np.abs(tensor - oracle)) /
                        max(float(np.max(np.abs(tensor))), 1.0))
            worst = max(worst, gap)
        for indices in itertools.product(range(model.n_fields),
                                         repeat=order):
            row = [order, ' '.join(str(i) for i in indices),
                   float(tensor[indices])]
            if args.check:
                row += [float(oracle[indices]), gap]
            rows.append(row)
    writer.write_csv('cumulants.csv', header, rows)
    if worst > CUMULANT_CHECK_TOLERANCE:
        raise NumericToleranceError('finite-difference check off by %.2e'
                                    % worst)


def command_schwinger(args, model, writer):
    """Kernel dump at one configuration."""

    points = _points(args.points, model.d)
    order = len(points)
    indices = _numbers(args.indices, int) if args.indices else [0] * order
    if len(indices) != order:
        raise UsageError('need one index per point')
    options = {}
    if args.grid_spacing is not None:
        options['spacing'] = args.grid_spacing
    if args.extent is not None:
        options['extent'] = args.extent
    if order >= 3 and args.resolution is not None:
        options['tolerance'] = args.resolution
    kernel = TruncatedKernel(order, model, options)
    header = ['x%d_%d' % (j, mu) for j in range(order)
              for mu in range(model.d)] + \
        ['alpha%d' % j for j in range(order)] + ['value']
    writer.write_csv('schwinger.csv', header,
                     kernel.dump_rows([(points, indices)]))


def command_simulate(args, model, writer):
    """Monte Carlo against the lattice-analytic kernels."""

    lattice = LatticeSpec(model.d, args.lattice, args.spacing)
    orders = sorted(set(_numbers(args.orders, int)))
    probes = default_probes(lattice, orders, args.probes, model.n_fields)
    logger.warning('Lattice\t\t: %d^%d (spacing %g)', lattice.size,
                   lattice.d, lattice.spacing)
    logger.warning('Samples\t\t: %d (seed %d, threads %d)', args.samples,
                   args.seed, args.threads)
    estimates = estimate_truncated_moments(model, lattice, orders, probes,
                                           args.samples, args.seed,
                                           args.threads)
    rows = []
    for order in orders:
        chosen = [e for e in estimates if e.order == order]
        analytic = lattice_analytic_kernel(model, lattice, order,
                                           [e.probe for e in chosen])
        for probe_id, (estimate, value) in enumerate(zip(chosen, analytic)):
            rows.append([order, probe_id, estimate.mean, estimate.stderr,
                         float(value), estimate.z_score(float(value))])
    writer.manifest.overrides.update({'lattice': lattice.size,
                                      'spacing': lattice.spacing,
                                      'samples': args.samples,
                                      'orders': orders})
    writer.write_csv('simulate.csv', ['order', 'probe', 'mc_mean',
                                      'mc_stderr', 'analytic_value',
                                      'z_score'], rows)


def command_wightman(args, model, writer):
    """Term lists of one order, optionally with the Fourier-Laplace check."""

    document = {'order': args.order, 'term_lists': [
        terms.to_document() for terms in
        build_wightman_family(args.order, model)]}
    if args.tau is not None:
        spatial = _numbers(args.x, float) if args.x else [0.0] * (model.d - 1)
        result = fourier_laplace_check(model, args.tau, spatial)
        document['fourier_laplace'] = {'tau': args.tau, 'x': spatial,
                                       'lhs': result.lhs, 'rhs': result.rhs,
                                       'gap': result.gap}
    writer.write_json('wightman.json', document)


def command_scatter(args, model, writer):
    """Amplitude of the process file."""

    with open(args.process, encoding='utf8') as filepointer:
        ins, outs = parse_process(filepointer.read())
    result = amplitude(ins, outs, model)
    writer.write_json('scatter.json', result.to_document())


def command_decay(args, model, writer):
    """Decay feasibility report."""

    writer.write_json('decay.json',
                      decay_scan(args.heavy, args.light, model).to_document())


def command_hssc(args, model, writer):
    """Witness ratios and their statistics."""

    family = TestFunctionFamily.default(model.d, args.max_order, args.width)
    report = hssc_witness(model, args.left, args.right, family, args.draws,
                          args.seed, args.threads, args.tolerance)
    writer.write_csv('hssc.csv', ['draw', 'ratio'],
                     zip(report.accepted, report.ratios))
    writer.write_json('hssc.json', {
        'n': report.n, 'm': report.m, 'draws': report.draws,
        'failures': report.failures, 'max': report.maximum,
        'mean': report.mean, 'histogram': list(report.histogram),
        'edges': list(report.edges)})


def command_cluster(args, model, writer):
    """Cluster decay table."""

    rows = clustering_check(model, args.order, args.split,
                            _numbers(args.shifts, float))
    writer.write_csv('cluster.csv', ['shift', 'joint_re', 'joint_im',
                                     'product_re', 'product_im', 'gap'],
                     [[row.shift, row.joint.real, row.joint.imag,
                       row.product.real, row.product.imag, row.gap]
                      for row in rows])


COMMANDS = {'validate': command_validate, 'cumulants': command_cumulants,
            'schwinger': command_schwinger, 'simulate': command_simulate,
            'wightman': command_wightman, 'scatter': command_scatter,
            'decay': command_decay, 'hssc': command_hssc,
            'cluster': command_cluster}


def run(argv=None) -> int:
    """Parse ``argv``, dispatch the subcommand and return the exit code."""

    try:
        args = handle_arguments(argv)
    except UsageError as error:
        logger.error('Usage\t\t: %s', error)
        return EXIT_USAGE
    except SystemExit as exit_request:
        return exit_request.code if isinstance(exit_request.code, int) \
            else EXIT_OK

    overrides = {key: getattr(args, key) for key in DEFAULTS
                 if getattr(args, key, None) is not None}
    try:
        apply_defaults(args, load_defaults(args.config))
        logger.warning('Command\t\t: %s', args.command)
        logger.warning('Model\t\t: %s', args.model)
        model = load_model(args.model)
        manifest = RunManifest(args.command, args.model, overrides,
                               args.seed)
        writer = ResultWriter(manifest, args.out, args.stdout)
        COMMANDS[args.command](args, model, writer)
        writer.write_manifest()
    except ValidationError as error:
        for message in error.errors:
            logger.error('Invalid\t\t: %s', message)
        return error.EXIT_CODE
    except ImqftError as error:
        logger.error('Error\t\t: %s', error)
        return error.EXIT_CODE
    except OSError as error:
        logger.error('Error\t\t: %s', error)
        return EXIT_USAGE
    except KeyboardInterrupt as error:
        raise SystemExit('\nCancelling...') from error
    return EXIT_OK


def main():
    """Run the command line and exit with its code."""

    raise SystemExit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()

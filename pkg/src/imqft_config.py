#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Run defaults from an INI file, overridden by the environment and flags.
"""

import configparser
import os
import typing
from dataclasses import dataclass

from logzero import logger

from src.imqft_errors import ConfigurationError

__author__ = "IMQFT Lab developers"
__copyright__ = "Copyright 2026, IMQFT Lab developers"
__license__ = "MIT"
__version__ = "1.0.0"
__status__ = "Development"

SECTION = 'imqft'
DEFAULT_PATH = '~/.imqft.ini'
THREADS_VARIABLE = 'IMQFT_THREADS'
DEFAULTS = {'seed': '0', 'threads': '1', 'lattice': '64',
            'spacing': '0.25', 'samples': '1000', 'tolerance': '1e-8',
            'out': 'results'}


@dataclass(frozen=True)
class RunDefaults:
    """Resolved defaults for the run flags."""

    seed: int
    threads: int
    lattice: int
    spacing: float
    samples: int
    tolerance: float
    out: str


def load_defaults(path: str = None,
                  environ: typing.Mapping[str, str] = None) -> RunDefaults:
    """
    Read ``[imqft]`` from ``path`` (or ``~/.imqft.ini`` when present) on top
    of the built-in defaults; ``IMQFT_THREADS`` beats the file.
    """

    environ = os.environ if environ is None else environ
    parser = configparser.ConfigParser()
    parser.read_dict({SECTION: DEFAULTS})
    explicit = path is not None
    path = os.path.expanduser(DEFAULT_PATH if path is None else path)
    if os.path.exists(path):
        try:
            parser.read(path, encoding='utf8')
        except configparser.Error as error:
            raise ConfigurationError('cannot read %s: %s' % (path, error)) \
                from error
        logger.debug('Defaults\t: %s', path)
    elif explicit:
        raise ConfigurationError('defaults file %s not found' % path)

    section = parser[SECTION]
    unknown = set(section) - set(DEFAULTS)
    if unknown:
        raise ConfigurationError('unknown key %s in [%s]'
                                 % (sorted(unknown)[0], SECTION))
    try:
        threads = section.getint('threads')
        if environ.get(THREADS_VARIABLE):
            threads = int(environ[THREADS_VARIABLE])
        defaults = RunDefaults(seed=section.getint('seed'), threads=threads,
                               lattice=section.getint('lattice'),
                               spacing=section.getfloat('spacing'),
                               samples=section.getint('samples'),
                               tolerance=section.getfloat('tolerance'),
                               out=section.get('out'))
    except ValueError as error:
        raise ConfigurationError('bad default value: %s' % error) from error
    if defaults.threads < 1:
        raise ConfigurationError('threads must be at least 1')
    return defaults


def apply_defaults(args, defaults: RunDefaults):
    """Fill every run flag the command line left unset."""

    for key in DEFAULTS:
        if getattr(args, key, None) is None:
            setattr(args, key, getattr(defaults, key))
    return args

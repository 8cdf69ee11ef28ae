#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Result files: CSV tables, JSON documents and the run manifest sidecar.
"""

import csv
import datetime
import io
import json
import os
import sys
import typing
from dataclasses import asdict, dataclass, field

import numpy as np
from logzero import logger

__author__ = "IMQFT Lab developers"
__copyright__ = "Copyright 2026, IMQFT Lab developers"
__license__ = "MIT"
__version__ = "1.0.0"
__status__ = "Development"

FLOAT_FORMAT = '%.16e'


def manifest_timestamp(environ: typing.Mapping[str, str] = None) -> str:
    """UTC timestamp; ``SOURCE_DATE_EPOCH`` pins it for reproducible runs."""

    environ = os.environ if environ is None else environ
    epoch = environ.get('SOURCE_DATE_EPOCH')
    utc = datetime.timezone.utc
    moment = datetime.datetime.fromtimestamp(int(epoch), utc) if epoch \
        else datetime.datetime.now(utc)
    return moment.replace(microsecond=0).isoformat()


@dataclass
class RunManifest:
    """Provenance of one command run."""

    command: str
    model: typing.Optional[str]
    overrides: typing.Dict[str, typing.Any]
    seed: typing.Optional[int]
    outputs: typing.List[str] = field(default_factory=list)
    version: str = __version__
    timestamp: str = field(default_factory=manifest_timestamp)

    @property
    def filename(self) -> str:
        """Sidecar file name."""
        return '%s.manifest.json' % self.command


def format_value(value) -> str:
    """CSV cell: round-trippable floats, plain integers and strings."""

    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, complex):
        return {'re': value.real, 'im': value.imag}
    return value


class ResultWriter:
    """Writes results to ``out`` (or stdout) and records them in a manifest."""

    def __init__(self, manifest: RunManifest, out: str,
                 to_stdout: bool = False, stream=None):
        self.manifest = manifest
        self.out = out
        self.to_stdout = to_stdout
        self.stream = sys.stdout if stream is None else stream

    def _emit(self, name: str, text: str) -> str:
        if self.to_stdout:
            self.stream.write(text)
            self.manifest.outputs.append('<stdout>:' + name)
            return '<stdout>'
        os.makedirs(self.out, exist_ok=True)
        path = os.path.join(self.out, name)
        with open(path, 'w', encoding='utf8', newline='') as filepointer:
            filepointer.write(text)
        self.manifest.outputs.append(name)
        logger.info('Output\t\t: %s', path)
        return path

    def write_csv(self, name: str, header: typing.Sequence[str],
                  rows: typing.Iterable[typing.Sequence]) -> str:
        """Header row plus one line per row."""

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value) for value in row])
        return self._emit(name, buffer.getvalue())

    def write_json(self, name: str, document) -> str:
        """Sorted, indented JSON that names the manifest."""

        document = dict(_jsonable(document))
        document['manifest'] = self.manifest.filename
        return self._emit(name, json.dumps(document, indent=2,
                                           sort_keys=True) + '\n')

    def write_manifest(self) -> str:
        """Sidecar with the run provenance (always a file)."""

        os.makedirs(self.out, exist_ok=True)
        path = os.path.join(self.out, self.manifest.filename)
        with open(path, 'w', encoding='utf8') as filepointer:
            json.dump(_jsonable(asdict(self.manifest)), filepointer,
                      indent=2, sort_keys=True)
            filepointer.write('\n')
        return path

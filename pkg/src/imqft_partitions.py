#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Set partitions and the truncation recursion between full and truncated
correlation families.

A family is a map ``order -> tensor`` over ``M`` variables; the entry
``T_k[i_1, ..., i_k]`` is the (truncated) correlation of the variables
``i_1 .. i_k`` in that order. The ``*_subsets`` variants take values keyed
by ordered label tuples instead and only touch the entries one correlation
needs.
"""

import functools
import string
import typing
from dataclasses import dataclass

import numpy as np

from src.imqft_errors import DomainError, InputError

__author__ = "IMQFT Lab developers"
__copyright__ = "Copyright 2026, IMQFT Lab developers"
__license__ = "MIT"
__version__ = "1.0.0"
__status__ = "Development"

MAX_PARTITION_ORDER = 10

Partition = typing.Tuple[typing.Tuple[int, ...], ...]


@dataclass(frozen=True)
class PartitionFamily:
    """All partitions of ``{0, ..., n-1}`` into nonempty ascending blocks."""

    order: int
    partitions: typing.Tuple[Partition, ...]

    def __len__(self):
        return len(self.partitions)


def _grow(elements: int) -> typing.List[typing.List[typing.List[int]]]:
    if elements == 0:
        return [[]]
    result = []
    for smaller in _grow(elements - 1):
        newest = elements - 1
        for i in range(len(smaller)):
            result.append(smaller[:i] + [smaller[i] + [newest]] +
                          smaller[i + 1:])
        result.append(smaller + [[newest]])
    return result


@functools.lru_cache(maxsize=None)
def _partitions(order: int) -> typing.Tuple[Partition, ...]:
    return tuple(tuple(tuple(block) for block in partition)
                 for partition in _grow(order))


def partitions(order: int) -> PartitionFamily:
    """Enumerate every set partition of an ``order``-element set."""

    if not 1 <= order <= MAX_PARTITION_ORDER:
        raise DomainError('partition order must lie in 1..%d, got %d'
                          % (MAX_PARTITION_ORDER, order))
    return PartitionFamily(order, _partitions(order))


def _as_family(values: typing.Mapping[int, typing.Any], order: int):
    family = {}
    scalar = True
    for k in range(1, order + 1):
        if k not in values:
            raise InputError('order %d missing from the family' % k)
        tensor = np.asarray(values[k])
        if tensor.ndim == 0:
            tensor = tensor.reshape((1,) * k)
        else:
            scalar = False
        if tensor.ndim != k or len(set(tensor.shape)) != 1:
            raise InputError('order %d entry must be a cube tensor of rank '
                             '%d' % (k, k))
        family[k] = tensor
    sizes = {tensor.shape[0] for tensor in family.values()}
    if len(sizes) != 1:
        raise InputError('all orders must share the number of variables')
    return family, scalar


def _product(family, partition: Partition, order: int) -> np.ndarray:
    letters = string.ascii_lowercase[:order]
    subscripts = ','.join(''.join(letters[j] for j in block)
                          for block in partition)
    operands = [family[len(block)] for block in partition]
    return np.einsum(subscripts + '->' + letters, *operands)


def _finish(tensor: np.ndarray, scalar: bool):
    return tensor.reshape(-1)[0].item() if scalar else tensor


def untruncate(truncated: typing.Mapping[int, typing.Any], order: int):
    """Full tensor ``sum_partitions prod_blocks W^T_block``."""

    family, scalar = _as_family(truncated, order)
    result = sum(_product(family, partition, order)
                 for partition in partitions(order).partitions)
    return _finish(result, scalar)


def truncate(full: typing.Mapping[int, typing.Any], order: int):
    """Invert ``untruncate`` by Moebius recursion on the partition lattice."""

    family, scalar = _as_family(full, order)
    truncated = {}
    for k in range(1, order + 1):
        value = family[k].astype(np.result_type(family[k], float))
        for partition in partitions(k).partitions:
            if len(partition) > 1:
                value = value - _product(truncated, partition, k)
        truncated[k] = value
    return _finish(truncated[order], scalar)


def untruncate_subsets(truncated: typing.Mapping[tuple, typing.Any],
                       labels: typing.Sequence):
    """Full value of ``labels`` from truncated values keyed by label tuples."""

    labels = tuple(labels)
    total = 0
    for partition in partitions(len(labels)).partitions:
        term = 1
        for block in partition:
            key = tuple(labels[j] for j in block)
            if key not in truncated:
                raise InputError('truncated value for %s missing' % (key,))
            term = term * truncated[key]
        total = total + term
    return total


def truncate_subsets(moments: typing.Mapping[tuple, typing.Any],
                     labels: typing.Sequence, cache: dict = None):
    """Truncated value of ``labels`` from moments keyed by label tuples."""

    labels = tuple(labels)
    cache = {} if cache is None else cache
    if labels in cache:
        return cache[labels]
    if labels not in moments:
        raise InputError('moment for %s missing' % (labels,))
    value = moments[labels]
    for partition in partitions(len(labels)).partitions:
        if len(partition) == 1:
            continue
        term = 1
        for block in partition:
            term = term * truncate_subsets(
                moments, tuple(labels[j] for j in block), cache)
        value = value - term
    cache[labels] = value
    return value

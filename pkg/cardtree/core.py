"""
Shared data layer: labels, condensed distance vectors, partitions and grouped card-sort samples.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from cardtree.exceptions import ArgumentError

# tolerance for algebraic identities in the whole package
EPSILON = 1e-12


def condensed_size(m):
    return m * (m - 1) // 2


def condensed_index(i, j, m):
    """
    Offset of the unordered pair {i, j} in a condensed vector over m labels

    Pairs are stored in the order (0,1), (0,2), ..., (0,m-1), (1,2), ...
    """
    if not (0 <= i < m and 0 <= j < m):
        raise ArgumentError('pair ({}, {}) out of range for m={}'.format(i, j, m))
    if i == j:
        raise ArgumentError('a pair needs two distinct labels, got ({}, {})'.format(i, j))
    if i > j:
        i, j = j, i
    return m * i - i * (i + 1) // 2 + (j - i - 1)


def condensed_pair(offset, m):
    """
    Inverse of condensed_index
    """
    if not 0 <= offset < condensed_size(m):
        raise ArgumentError('offset {} out of range for m={}'.format(offset, m))
    i = 0
    row = m - 1
    while offset >= row:
        offset -= row
        i += 1
        row -= 1
    return i, i + 1 + offset


@dataclass(frozen=True)
class LabelSet:
    """
    Ordered, duplicate-free item names; the position of a name is its index for the whole run
    """

    labels: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, 'labels', labels)
        if len(labels) < 2:
            raise ArgumentError('at least two labels are required')
        if len(set(labels)) != len(labels):
            seen = set()
            for label in labels:
                if label in seen:
                    raise ArgumentError('duplicate label "{}"'.format(label))
                seen.add(label)

    @property
    def m(self):
        return len(self.labels)

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise ArgumentError('unknown label "{}"'.format(label))

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)


class CondensedMatrix(object):
    """
    Symmetric, zero-diagonal distance over m labels stored as its upper triangle

    The vector is read-only once constructed.
    """

    __slots__ = ('m', 'values')

    def __init__(self, m, values):
        values = np.array(values, dtype=np.float64)
        if values.ndim != 1 or values.shape[0] != condensed_size(m):
            raise ArgumentError(
                'a condensed matrix over {} labels needs {} entries, got {}'.format(
                    m, condensed_size(m), values.size
                )
            )
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ArgumentError('distances must be finite and non-negative')
        values.setflags(write=False)
        self.m = m
        self.values = values

    @classmethod
    def from_square(cls, square):
        square = np.asarray(square, dtype=np.float64)
        if square.ndim != 2 or square.shape[0] != square.shape[1]:
            raise ArgumentError('expected a square matrix, got shape {}'.format(square.shape))
        m = square.shape[0]
        upper = np.triu_indices(m, 1)
        if not np.allclose(square[upper], square.T[upper], rtol=0.0, atol=EPSILON):
            raise ArgumentError('matrix is not symmetric')
        return cls(m, square[upper])

    @classmethod
    def from_pairs(cls, m, pairs):
        """
        Build from a mapping {(i, j): distance}; missing pairs are zero
        """
        values = np.zeros(condensed_size(m))
        for (i, j), value in pairs.items():
            values[condensed_index(i, j, m)] = value
        return cls(m, values)

    def entry(self, i, j):
        if i == j:
            return 0.0
        return float(self.values[condensed_index(i, j, self.m)])

    def to_square(self):
        square = np.zeros((self.m, self.m))
        upper = np.triu_indices(self.m, 1)
        square[upper] = self.values
        return square + square.T

    def scaled(self, factor):
        return CondensedMatrix(self.m, self.values * factor)

    def allclose(self, other, atol=EPSILON):
        return self.m == other.m and bool(np.allclose(self.values, other.values, rtol=0.0, atol=atol))

    def is_ultrametric(self, atol=EPSILON):
        """
        d(i,k) <= max(d(i,j), d(j,k)) for all triples
        """
        square = self.to_square()
        bound = np.maximum(square[:, :, None], square[None, :, :])
        return bool(np.all(square[:, None, :] <= bound + atol))

    def __len__(self):
        return self.values.shape[0]

    def __repr__(self):
        return 'CondensedMatrix(m={}, values={})'.format(self.m, self.values.tolist())


class Partition(object):
    """
    One participant's grouping of the m labels into disjoint, nonempty blocks
    """

    __slots__ = ('m', 'blocks')

    def __init__(self, m, blocks):
        blocks = tuple(frozenset(block) for block in blocks)
        covered = set()
        for block in blocks:
            if not block:
                raise ArgumentError('partition blocks must be nonempty')
            if any(not 0 <= index < m for index in block):
                raise ArgumentError('block {} has indices outside 0..{}'.format(sorted(block), m - 1))
            if covered & block:
                raise ArgumentError('index {} appears in more than one block'.format(min(covered & block)))
            covered |= block
        if len(covered) != m:
            missing = min(set(range(m)) - covered)
            raise ArgumentError('index {} is not in any block'.format(missing))
        self.m = m
        self.blocks = blocks

    @classmethod
    def from_assignment(cls, assignment):
        """
        Build from a block id per index
        """
        grouped = {}
        for index, block_id in enumerate(assignment):
            grouped.setdefault(block_id, []).append(index)
        return cls(len(assignment), grouped.values())

    def assignment(self):
        labels = np.empty(self.m, dtype=np.int64)
        for block_id, block in enumerate(self.blocks):
            labels[list(block)] = block_id
        return labels

    def __eq__(self, other):
        return isinstance(other, Partition) and self.m == other.m and set(self.blocks) == set(other.blocks)

    def __hash__(self):
        return hash((self.m, frozenset(self.blocks)))

    def __repr__(self):
        return 'Partition({})'.format([sorted(block) for block in self.blocks])


def co_classification(partition):
    """
    0 where two labels share a block, 1 otherwise
    """
    assignment = partition.assignment()
    upper = np.triu_indices(partition.m, 1)
    values = (assignment[upper[0]] != assignment[upper[1]]).astype(np.float64)
    return CondensedMatrix(partition.m, values)


def hamming_mean(xs: Sequence[CondensedMatrix]):
    """
    Entrywise mean of co-classification vectors, i.e. d_H(i,j) = 1 - n(i,j)/N
    """
    xs = list(xs)
    if not xs:
        raise ArgumentError('hamming_mean needs at least one matrix')
    m = xs[0].m
    if any(x.m != m for x in xs):
        raise ArgumentError('all matrices must share the same label count')
    return CondensedMatrix(m, np.mean([x.values for x in xs], axis=0))


def frobenius(t1, t2):
    """
    Frobenius norm of t1 - t2 over the full symmetric matrix (each stored pair counted twice)
    """
    if t1.m != t2.m:
        raise ArgumentError('cannot compare matrices over {} and {} labels'.format(t1.m, t2.m))
    diff = t1.values - t2.values
    return float(np.sqrt(2.0 * np.dot(diff, diff)))


@dataclass(frozen=True)
class Participant:
    participant_id: str
    group: str
    partition: Partition


class GroupedSample(object):
    """
    All participants of a study, each with a group tag and a partition of the same label set
    """

    def __init__(self, label_set: LabelSet, participants: Iterable[Participant]):
        self.label_set = label_set
        self.participants = tuple(participants)
        for participant in self.participants:
            if participant.partition.m != label_set.m:
                raise ArgumentError(
                    'participant "{}" partitions {} labels, expected {}'.format(
                        participant.participant_id, participant.partition.m, label_set.m
                    )
                )
        self._matrix = None

    @property
    def m(self):
        return self.label_set.m

    def groups(self):
        """
        Group tags in order of first appearance
        """
        seen = []
        for participant in self.participants:
            if participant.group not in seen:
                seen.append(participant.group)
        return seen

    def indices(self, group):
        indices = [k for k, participant in enumerate(self.participants) if participant.group == group]
        if not indices:
            raise ArgumentError('group "{}" has no participants'.format(group))
        return indices

    def co_classification_matrix(self):
        """
        One row of co-classification entries per participant, in participant order
        """
        if self._matrix is None:
            matrix = np.array([co_classification(p.partition).values for p in self.participants])
            matrix = matrix.reshape(len(self.participants), condensed_size(self.m))
            matrix.setflags(write=False)
            self._matrix = matrix
        return self._matrix

    def hamming(self, indices):
        """
        Hamming distance of the participants at the given positions
        """
        indices = list(indices)
        if not indices:
            raise ArgumentError('hamming_mean needs at least one matrix')
        return CondensedMatrix(self.m, self.co_classification_matrix()[indices].mean(axis=0))

    def subset(self, groups):
        return GroupedSample(self.label_set, [p for p in self.participants if p.group in groups])

    def __len__(self):
        return len(self.participants)

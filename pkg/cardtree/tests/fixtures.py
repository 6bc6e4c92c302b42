"""
Shared inputs for the test suite
"""
import os
import unittest

from cardtree.core import CondensedMatrix, GroupedSample, LabelSet, Participant, Partition, condensed_size
from cardtree.linkage import lance_williams, normalize
from cardtree.treespace import from_dendrogram

SLOW_TESTS_ENV = 'CARDTREE_SLOW_TESTS'

# the tie example: D1 and D2 differ only by which pair ties with (0,1)/(0,2)
D1 = CondensedMatrix(3, [2.0, 3.0, 2.0])
D2 = CondensedMatrix(3, [3.0, 2.0, 2.0])
D1_EPS = CondensedMatrix(3, [2.0, 3.0, 1.9])
D2_EPS = CondensedMatrix(3, [3.0, 2.0, 1.9])
T1 = (2.0, 2.5, 2.5)
T2 = (2.5, 2.0, 2.5)
T_EPS = (2.5, 2.5, 1.9)


def slow(test):
    """
    Skip unless full-scale checks were requested
    """
    return unittest.skipUnless(os.environ.get(SLOW_TESTS_ENV) == '1', 'set {}=1'.format(SLOW_TESTS_ENV))(test)


def scale(fast, full):
    return full if os.environ.get(SLOW_TESTS_ENV) == '1' else fast


def random_matrix(rng, m):
    return CondensedMatrix(m, rng.random(condensed_size(m)))


def random_tree(rng, p):
    dendrogram, _ = lance_williams(random_matrix(rng, p))
    return from_dendrogram(normalize(dendrogram))


def make_sample(groups, labels=None):
    """
    groups maps a group name to a list of block-id assignments, one per participant
    """
    participants = []
    m = None
    for group, assignments in groups.items():
        for k, assignment in enumerate(assignments):
            m = len(assignment)
            participants.append(Participant('{}{}'.format(group, k), group, Partition.from_assignment(assignment)))
    labels = labels or tuple('w{}'.format(k) for k in range(m))
    return GroupedSample(LabelSet(labels), participants)


def random_sample(rng, m, sizes):
    return make_sample({
        group: [list(rng.integers(0, 3, size=m)) for _ in range(size)]
        for group, size in sizes.items()
    })

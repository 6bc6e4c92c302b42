"""
Geodesic distance between rooted metric trees

The geodesic is computed in the ambient tree space, leaf edges included. Between two dendrograms
of one topology it is a straight segment and stays at leaf depth one; across topologies it may
not. The support of the path is refined pair by pair: a pair (A, B) is split whenever the
bipartite incompatibility graph between A and B has a vertex cover of weight < 1 under the
weights |e|^2/|A|^2 and |f|^2/|B|^2, found as a minimum s-t cut.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from math import sqrt

import networkx as nx
import numpy as np

from cardtree.core import EPSILON
from cardtree.exceptions import ArgumentError, OracleLimitError
from cardtree.treespace import SplitTree, split_key, splits_compatible

logger = logging.getLogger(__name__)

# a cover must weigh less than this to split a support pair
COVER_THRESHOLD = 1.0 - 1e-10
# integer capacities keep the max-flow exact
CAPACITY_SCALE = 10 ** 12
# largest incompatible split set per tree the exhaustive oracle accepts
ORACLE_LIMIT = 8


@dataclass(frozen=True)
class SupportSequence:
    """
    Ordered pairs (A_i, B_i): A_i are splits of the first tree, B_i of the second, dropped and
    added together on leg i of the geodesic
    """

    pairs: tuple = ()

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


@dataclass(frozen=True)
class GeodesicResult:
    distance: float
    support: SupportSequence
    common_contribution: float
    leaf_contribution: float
    common: tuple = ()


def _norm(splits, tree):
    return sqrt(sum(tree.length(split) ** 2 for split in splits))


class _Decomposition(object):
    """
    Coordinates shared by both trees versus the mutually incompatible splits
    """

    def __init__(self, t1, t2):
        if t1.p != t2.p:
            raise ArgumentError('trees have {} and {} leaves'.format(t1.p, t2.p))
        self.t1 = t1
        self.t2 = t2
        only1 = [split for split in t1.inner if split not in t2.inner]
        only2 = [split for split in t2.inner if split not in t1.inner]
        self.incompatible = {
            a: frozenset(b for b in only2 if not splits_compatible(a, b)) for a in only1
        }
        self.a_side = tuple(a for a in only1 if self.incompatible[a])
        self.b_side = tuple(
            sorted({b for partners in self.incompatible.values() for b in partners}, key=split_key)
        )
        incompatible = set(self.a_side) | set(self.b_side)
        self.common = tuple(
            sorted((set(t1.inner) | set(t2.inner)) - incompatible, key=split_key)
        )
        common_sq = sum((t1.length(split) - t2.length(split)) ** 2 for split in self.common)
        leaf_sq = float(np.sum((t1.leaf_lengths - t2.leaf_lengths) ** 2))
        self.common_contribution = sqrt(common_sq)
        self.leaf_contribution = sqrt(leaf_sq)

    def length(self, pairs):
        total = self.common_contribution ** 2 + self.leaf_contribution ** 2
        for a_block, b_block in pairs:
            total += (_norm(a_block, self.t1) + _norm(b_block, self.t2)) ** 2
        return sqrt(total)

    def result(self, pairs):
        pairs = tuple((tuple(a), tuple(b)) for a, b in pairs)
        return GeodesicResult(
            distance=self.length(pairs),
            support=SupportSequence(pairs),
            common_contribution=self.common_contribution,
            leaf_contribution=self.leaf_contribution,
            common=self.common,
        )


def _min_weight_cover(a_block, b_block, decomposition):
    """
    Minimum weight vertex cover of the incompatibility graph between a_block and b_block

    Returns (weight, covered A splits, covered B splits).
    """
    t1, t2 = decomposition.t1, decomposition.t2
    norm_a = _norm(a_block, t1)
    norm_b = _norm(b_block, t2)
    graph = nx.DiGraph()
    graph.add_node('source')
    graph.add_node('sink')
    for a in a_block:
        weight = (t1.length(a) / norm_a) ** 2
        graph.add_edge('source', ('a', a), capacity=max(1, int(round(weight * CAPACITY_SCALE))))
    for b in b_block:
        weight = (t2.length(b) / norm_b) ** 2
        graph.add_edge(('b', b), 'sink', capacity=max(1, int(round(weight * CAPACITY_SCALE))))
    b_members = set(b_block)
    for a in a_block:
        for b in decomposition.incompatible[a] & b_members:
            # no capacity attribute: infinite
            graph.add_edge(('a', a), ('b', b))
    cut_value, (source_side, sink_side) = nx.minimum_cut(graph, 'source', 'sink')
    covered_a = [a for a in a_block if ('a', a) in sink_side]
    covered_b = [b for b in b_block if ('b', b) in source_side]
    return cut_value / CAPACITY_SCALE, covered_a, covered_b


def _extend(a_block, b_block, decomposition):
    """
    Split one support pair in two, or return None when it is already final
    """
    if _norm(a_block, decomposition.t1) <= 0 or _norm(b_block, decomposition.t2) <= 0:
        return None
    if len(a_block) == 1 or len(b_block) == 1:
        # a cover lighter than 1 would have to leave one side empty
        return None
    weight, covered_a, covered_b = _min_weight_cover(a_block, b_block, decomposition)
    if weight >= COVER_THRESHOLD:
        return None
    covered_a = set(covered_a)
    covered_b = set(covered_b)
    first = (
        tuple(a for a in a_block if a in covered_a),
        tuple(b for b in b_block if b not in covered_b),
    )
    second = (
        tuple(a for a in a_block if a not in covered_a),
        tuple(b for b in b_block if b in covered_b),
    )
    if not all(first) or not all(second):
        return None
    return first, second


def geodesic_distance(t1: SplitTree, t2: SplitTree) -> GeodesicResult:
    """
    Length and support of the geodesic between two trees
    """
    decomposition = _Decomposition(t1, t2)
    pairs = []
    if decomposition.a_side:
        pairs.append((decomposition.a_side, decomposition.b_side))
    iterations = 0
    k = 0
    while k < len(pairs):
        iterations += 1
        extension = _extend(pairs[k][0], pairs[k][1], decomposition)
        if extension is None:
            k += 1
        else:
            pairs[k:k + 1] = list(extension)
    logger.debug(
        'geodesic: %d incompatible splits, %d support pairs after %d extension problems',
        len(decomposition.a_side) + len(decomposition.b_side), len(pairs), iterations,
    )
    return decomposition.result(pairs)


def cone_distance(t1, t2):
    """
    Length of the path that drops every incompatible split at once
    """
    decomposition = _Decomposition(t1, t2)
    if not decomposition.a_side:
        return decomposition.length([])
    return decomposition.length([(decomposition.a_side, decomposition.b_side)])


def _ordered_blocks(splits):
    for size in range(1, len(splits) + 1):
        for block in combinations(splits, size):
            yield block


def _supports(a_rest, b_rest, previous_ratio, decomposition):
    if not a_rest and not b_rest:
        yield ()
        return
    if not a_rest or not b_rest:
        return
    for a_block in _ordered_blocks(a_rest):
        a_left = tuple(a for a in a_rest if a not in a_block)
        norm_a = _norm(a_block, decomposition.t1)
        for b_block in _ordered_blocks(b_rest):
            if any(not splits_compatible(b, a) for b in b_block for a in a_left):
                continue
            ratio = norm_a / _norm(b_block, decomposition.t2)
            if ratio < previous_ratio - EPSILON * max(1.0, previous_ratio):
                continue
            b_left = tuple(b for b in b_rest if b not in b_block)
            for tail in _supports(a_left, b_left, ratio, decomposition):
                yield ((a_block, b_block),) + tail


def brute_force_geodesic(t1, t2):
    """
    Exhaustive minimum over every support sequence whose legs are compatible and whose ratios
    are nondecreasing; only for small incompatible sets
    """
    decomposition = _Decomposition(t1, t2)
    if len(decomposition.a_side) > ORACLE_LIMIT or len(decomposition.b_side) > ORACLE_LIMIT:
        raise OracleLimitError(
            'exhaustive geodesic limited to {} incompatible splits per tree, got {} and {}'.format(
                ORACLE_LIMIT, len(decomposition.a_side), len(decomposition.b_side)
            )
        )
    best = None
    best_length = np.inf
    for pairs in _supports(decomposition.a_side, decomposition.b_side, 0.0, decomposition):
        length = decomposition.length(pairs)
        if length < best_length:
            best, best_length = pairs, length
    return decomposition.result(best if best is not None else ())


def geodesic_point(t1, t2, s, result=None):
    """
    Point at fraction s of the geodesic from t1 to t2

    Shared coordinates move linearly; on support pair i the splits of A_i shrink to zero and
    those of B_i grow from zero, each pair switching over when s/(1-s) = |A_i|/|B_i|.
    """
    if not 0.0 <= s <= 1.0:
        raise ArgumentError('s must lie in [0, 1], got {}'.format(s))
    if result is None:
        result = geodesic_distance(t1, t2)
    leaves = (1.0 - s) * t1.leaf_lengths + s * t2.leaf_lengths
    inner = {}
    for split in result.common:
        inner[split] = (1.0 - s) * t1.length(split) + s * t2.length(split)
    for a_block, b_block in result.support:
        norm_a = _norm(a_block, t1)
        norm_b = _norm(b_block, t2)
        weight = (1.0 - s) * norm_a - s * norm_b
        if weight > 0:
            for a in a_block:
                inner[a] = t1.length(a) * weight / norm_a
        elif weight < 0:
            for b in b_block:
                inner[b] = t2.length(b) * -weight / norm_b
    return SplitTree(t1.p, inner, leaves)

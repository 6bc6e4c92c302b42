"""
Synthetic card-sort studies

Every participant of a group sorts the cards by cutting the group's ground-truth dendrogram at a
jittered height, then moving each card to another pile with the flip probability. The model only
exists to exercise the permutation test on data with a known answer.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Mapping, Optional

import numpy as np

from cardtree.core import CondensedMatrix, GroupedSample, LabelSet, Participant, Partition, condensed_size
from cardtree.exceptions import ArgumentError
from cardtree.linkage import GROUP_AVERAGE, Dendrogram, MergeStep, lance_williams, normalize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SynthSpec:
    """
    truths maps group name to its ground-truth dendrogram (normalized on construction); sizes maps
    group name to its participant count
    """

    truths: Mapping[str, Dendrogram]
    sizes: Mapping[str, int]
    cut_height: float = 0.5
    jitter: float = 0.0
    flip: float = 0.0
    seed: int = 0
    labels: Optional[tuple] = None

    def __post_init__(self):
        if not self.truths:
            raise ArgumentError('at least one group is required')
        if set(self.truths) != set(self.sizes):
            raise ArgumentError('truths and sizes must name the same groups')
        if any(size < 1 for size in self.sizes.values()):
            raise ArgumentError('every group needs at least one participant')
        if self.jitter < 0:
            raise ArgumentError('jitter must be non-negative, got {}'.format(self.jitter))
        if not 0.0 <= self.flip <= 1.0:
            raise ArgumentError('flip probability must lie in [0, 1], got {}'.format(self.flip))
        sizes = {dendrogram.m for dendrogram in self.truths.values()}
        if len(sizes) != 1:
            raise ArgumentError('all ground-truth dendrograms must have the same leaves')
        truths = {
            group: dendrogram if dendrogram.normalized else normalize(dendrogram)
            for group, dendrogram in self.truths.items()
        }
        object.__setattr__(self, 'truths', truths)
        labels = self.labels or tuple('w{}'.format(k) for k in range(self.m))
        object.__setattr__(self, 'labels', LabelSet(labels).labels)
        if len(self.labels) != self.m:
            raise ArgumentError('{} labels given for {} leaves'.format(len(self.labels), self.m))

    @property
    def m(self):
        return next(iter(self.truths.values())).m

    def groups(self):
        return list(self.truths)

    def with_seed(self, seed):
        return replace(self, seed=seed)


def cut(dendrogram, height):
    """
    Partition into the clusters of all merges at or below `height`
    """
    block = list(range(dendrogram.m))
    for step, merge_height in zip(dendrogram.merges, dendrogram.heights):
        if merge_height <= height:
            for leaf in dendrogram.members(step.new_id):
                block[leaf] = step.new_id
    return Partition.from_assignment(block)


def flip_blocks(assignment, probability, rng):
    """
    Move every element, with the given probability, to a uniformly chosen pile among the other
    original piles and one new singleton pile
    """
    assignment = np.asarray(assignment)
    flipped = assignment.copy()
    next_id = int(assignment.max()) + 1
    piles = np.unique(assignment)
    for index in np.flatnonzero(rng.random(assignment.size) < probability):
        others = piles[piles != assignment[index]]
        choice = int(rng.integers(others.size + 1))
        if choice < others.size:
            flipped[index] = others[choice]
        else:
            flipped[index] = next_id
            next_id += 1
    return flipped


def synth_generate(spec: SynthSpec) -> GroupedSample:
    rng = np.random.default_rng(spec.seed)
    participants = []
    for group in spec.groups():
        truth = spec.truths[group]
        for k in range(spec.sizes[group]):
            height = spec.cut_height + spec.jitter * rng.standard_normal()
            base = cut(truth, height).assignment()
            assignment = flip_blocks(base, spec.flip, rng) if spec.flip > 0 else base
            participants.append(
                Participant('{}-{:03d}'.format(group, k + 1), group, Partition.from_assignment(assignment))
            )
    logger.debug('generated %d participants in %d groups (seed %d)', len(participants), len(spec.truths), spec.seed)
    return GroupedSample(LabelSet(spec.labels), participants)


def random_dendrogram(m, rng, method=GROUP_AVERAGE):
    """
    Normalized dendrogram of a uniformly random dissimilarity matrix
    """
    dendrogram, _ = lance_williams(CondensedMatrix(m, rng.random(condensed_size(m))), method)
    return normalize(dendrogram)


def relabel(dendrogram, permutation):
    """
    Same shape and heights with leaf k renamed permutation[k]
    """
    m = dendrogram.m
    if sorted(permutation) != list(range(m)):
        raise ArgumentError('not a permutation of 0..{}'.format(m - 1))

    def rename(node):
        return int(permutation[node]) if node < m else node

    merges = [
        MergeStep(rename(step.left), rename(step.right), step.distance, step.new_id)
        for step in dendrogram.merges
    ]
    return replace(dendrogram, merges=tuple(merges))


def distinct_truth(dendrogram, rng):
    """
    A different dendrogram of the same shape: two leaves from opposite sides of the root trade
    places
    """
    if dendrogram.m < 3:
        raise ArgumentError('every dendrogram on two leaves has the same shape')
    root = dendrogram.merges[-1]
    left = sorted(dendrogram.members(root.left))
    right = sorted(dendrogram.members(root.right))
    a = left[int(rng.integers(len(left)))]
    b = right[int(rng.integers(len(right)))]
    permutation = list(range(dendrogram.m))
    permutation[a], permutation[b] = b, a
    return relabel(dendrogram, permutation)

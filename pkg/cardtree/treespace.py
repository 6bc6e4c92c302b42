"""
Split-based (metric tree) representation of dendrograms

A rooted tree on p leaves is stored sparsely: one length per inner split A (the leaves below the
edge, 2 <= |A| <= p-1) plus one length per leaf edge. An absent split has length 0.
"""
from __future__ import annotations

import numpy as np

from cardtree.core import EPSILON, CondensedMatrix
from cardtree.exceptions import ArgumentError, DegenerateInputError
from cardtree.linkage import normalize

# tolerance for the leaf-depth-one condition
DEPTH_TOLERANCE = 1e-9


def splits_compatible(a, b):
    """
    Two splits can live in one tree iff nested or disjoint
    """
    return a <= b or b <= a or a.isdisjoint(b)


def split_key(split):
    return (len(split), sorted(split))


class SplitTree(object):
    """
    Rooted metric tree on p labeled leaves
    """

    def __init__(self, p, inner, leaf_lengths):
        leaf_lengths = np.array(leaf_lengths, dtype=np.float64)
        if p < 2 or leaf_lengths.shape != (p,):
            raise ArgumentError('expected {} leaf lengths, got {}'.format(p, leaf_lengths.shape))
        if np.any(leaf_lengths < -EPSILON):
            raise ArgumentError('leaf lengths must be non-negative')
        leaf_lengths = np.maximum(leaf_lengths, 0.0)
        leaf_lengths.setflags(write=False)

        splits = {}
        for split, length in inner.items():
            split = frozenset(split)
            if not 2 <= len(split) <= p - 1 or any(not 0 <= leaf < p for leaf in split):
                raise ArgumentError('{} is not an inner split over {} leaves'.format(sorted(split), p))
            if length < -EPSILON:
                raise ArgumentError('split {} has negative length {}'.format(sorted(split), length))
            if length > EPSILON:
                splits[split] = float(length)
        ordered = sorted(splits, key=split_key)
        for k, a in enumerate(ordered):
            for b in ordered[k + 1:]:
                if not splits_compatible(a, b):
                    raise ArgumentError(
                        'splits {} and {} cannot coexist in one tree'.format(sorted(a), sorted(b))
                    )

        self.p = p
        self.inner = {split: splits[split] for split in ordered}
        self.leaf_lengths = leaf_lengths

    def splits(self):
        return list(self.inner)

    def length(self, split):
        return self.inner.get(frozenset(split), 0.0)

    def depths(self):
        """
        Path length from every leaf to the root
        """
        depths = self.leaf_lengths.copy()
        for split, length in self.inner.items():
            depths[list(split)] += length
        return depths

    def satisfies_depth_one(self, tolerance=DEPTH_TOLERANCE):
        return bool(np.all(np.abs(self.depths() - 1.0) <= tolerance))

    def __eq__(self, other):
        return (
            isinstance(other, SplitTree)
            and self.p == other.p
            and self.inner == other.inner
            and np.array_equal(self.leaf_lengths, other.leaf_lengths)
        )

    def __repr__(self):
        inner = ', '.join('{}: {:.6g}'.format(sorted(split), length) for split, length in self.inner.items())
        return '{}(p={}, inner={{{}}}, leaves={})'.format(
            type(self).__name__, self.p, inner, self.leaf_lengths.tolist()
        )


class DendrogramTree(SplitTree):
    """
    A SplitTree whose every leaf sits at depth one (height-normalized dendrogram)
    """

    def __init__(self, p, inner, leaf_lengths):
        super().__init__(p, inner, leaf_lengths)
        if not self.satisfies_depth_one():
            worst = float(np.max(np.abs(self.depths() - 1.0)))
            raise ArgumentError('leaf depths deviate from 1 by up to {:.3g}'.format(worst))

    @classmethod
    def star(cls, p):
        return cls(p, {}, np.ones(p))


def from_dendrogram(dendrogram, require_normalized=True):
    """
    Metric tree of a dendrogram

    Every internal node below the root becomes the split of its leaf set, with length equal to
    the height gap to its parent; leaf edges reach up to the first merge. Zero-length edges are
    dropped. Normalized dendrograms yield a DendrogramTree; with require_normalized=False the
    raw heights give a plain SplitTree.
    """
    if require_normalized and not dendrogram.normalized:
        raise ArgumentError('from_dendrogram needs a normalized dendrogram')
    m = dendrogram.m
    parent = dendrogram.parents()
    root = 2 * m - 2
    inner = {}
    for node in range(m, root):
        length = dendrogram.node_height(parent[node]) - dendrogram.node_height(node)
        if length < -EPSILON:
            raise ArgumentError('dendrogram heights are not monotone at node {}'.format(node))
        if length > EPSILON:
            inner[dendrogram.members(node)] = length
    leaves = [dendrogram.node_height(parent[leaf]) for leaf in range(m)]
    if dendrogram.normalized:
        return DendrogramTree(m, inner, leaves)
    return SplitTree(m, inner, leaves)


def dendrogram_tree(dendrogram, normalized=True):
    """
    Tree of a dendrogram as the geodesic metric sees it

    With normalized=True the heights are rescaled first (DG0); a dendrogram whose merges all sit at
    height 0 maps to the star tree. Otherwise the raw heights are kept.
    """
    if not normalized:
        return from_dendrogram(dendrogram, require_normalized=False)
    try:
        return from_dendrogram(normalize(dendrogram))
    except DegenerateInputError:
        return DendrogramTree.star(dendrogram.m)


def to_cophenetic(tree):
    """
    Leaf-to-leaf path lengths of a tree
    """
    leaves = tree.leaf_lengths
    square = leaves[:, None] + leaves[None, :]
    for split, length in tree.inner.items():
        mask = np.zeros(tree.p, dtype=bool)
        mask[list(split)] = True
        square += length * (mask[:, None] != mask[None, :])
    np.fill_diagonal(square, 0.0)
    return CondensedMatrix.from_square(square)


def euclidean_norm_diff(t1, t2):
    """
    Distance between two trees in the ambient edge-length space (absent splits count as 0)
    """
    if t1.p != t2.p:
        raise ArgumentError('trees have {} and {} leaves'.format(t1.p, t2.p))
    total = float(np.sum((t1.leaf_lengths - t2.leaf_lengths) ** 2))
    for split in sorted(set(t1.inner) | set(t2.inner), key=split_key):
        total += (t1.length(split) - t2.length(split)) ** 2
    return float(np.sqrt(total))

"""
Lance-Williams agglomerative clustering and the dendrograms it produces.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from cardtree.core import EPSILON, CondensedMatrix
from cardtree.exceptions import ArgumentError, DegenerateInputError

logger = logging.getLogger(__name__)

LEXICOGRAPHIC = 'lexicographic'
RANDOM = 'random'
# label counts up to this run the merge loop on Python floats
SMALL_LABEL_COUNT = 40


def _rule(value):
    if callable(value):
        return value
    value = float(value)
    return lambda n_i, n_j, n_k: value


@dataclass(frozen=True)
class LinkageMethod:
    """
    One parameterization of the Lance-Williams update

        d(I+J, K) = a_I d(I,K) + a_J d(J,K) + b d(I,J) + g |d(I,K) - d(J,K)|

    Every coefficient is a rule (n_I, n_J, n_K) -> value, with n_K an array over the remaining
    clusters; a rule may return a scalar that holds for every K.
    """

    name: str
    alpha_i: Callable
    alpha_j: Callable
    beta: Callable
    gamma: Callable
    projection: bool = False
    gamma_free: bool = True

    def coefficients(self, n_i, n_j, n_k):
        shape = np.shape(n_k)
        return tuple(
            np.broadcast_to(np.asarray(rule(n_i, n_j, n_k), dtype=np.float64), shape)
            for rule in (self.alpha_i, self.alpha_j, self.beta, self.gamma)
        )

    def caveats(self):
        """
        Guarantees this method gives up, as log-ready sentences
        """
        notes = []
        if not self.projection:
            notes.append('linkage {} is not a projection; clustering d_T again may change it'.format(self.name))
        if not self.gamma_free:
            notes.append(
                'linkage {} has a non-zero gamma; d_T is not locally linear in the Hamming matrix'.format(self.name)
            )
        return notes

    @classmethod
    def custom(cls, alpha_i, alpha_j, beta, gamma, name='custom'):
        """
        User supplied coefficients; constants or callables (n_I, n_J, n_K) -> value

        Only a constant gamma of 0 keeps the method inside the locally linear class; anything else
        is accepted but flagged.
        """
        gamma_free = not callable(gamma) and float(gamma) == 0.0
        if not gamma_free:
            logger.warning(
                'linkage "%s" has a non-zero gamma; it is not locally linear on regular inputs', name
            )
        projection = (
            not callable(alpha_i) and not callable(alpha_j) and not callable(beta)
            and abs(float(alpha_i) + float(alpha_j) - 1.0) <= EPSILON and float(beta) == 0.0
        )
        return cls(
            name=name,
            alpha_i=_rule(alpha_i),
            alpha_j=_rule(alpha_j),
            beta=_rule(beta),
            gamma=_rule(gamma),
            projection=projection,
            gamma_free=gamma_free,
        )

    @classmethod
    def named(cls, name):
        try:
            return METHODS[ALIASES.get(name, name)]
        except KeyError:
            raise ArgumentError(
                'unknown linkage method "{}" (choose from {})'.format(name, ', '.join(sorted(METHODS)))
            )


GROUP_AVERAGE = LinkageMethod(
    name='group_average',
    alpha_i=lambda n_i, n_j, n_k: n_i / (n_i + n_j),
    alpha_j=lambda n_i, n_j, n_k: n_j / (n_i + n_j),
    beta=_rule(0.0),
    gamma=_rule(0.0),
    projection=True,
)

CENTROID = LinkageMethod(
    name='centroid',
    alpha_i=lambda n_i, n_j, n_k: n_i / (n_i + n_j),
    alpha_j=lambda n_i, n_j, n_k: n_j / (n_i + n_j),
    beta=lambda n_i, n_j, n_k: -n_i * n_j / (n_i + n_j) ** 2,
    gamma=_rule(0.0),
)

WARD = LinkageMethod(
    name='ward',
    alpha_i=lambda n_i, n_j, n_k: (n_i + n_k) / (n_i + n_j + n_k),
    alpha_j=lambda n_i, n_j, n_k: (n_j + n_k) / (n_i + n_j + n_k),
    beta=lambda n_i, n_j, n_k: n_k / (n_i + n_j + n_k),
    gamma=_rule(0.0),
)

NEAREST_NEIGHBOR = LinkageMethod(
    name='nearest_neighbor',
    alpha_i=_rule(0.5),
    alpha_j=_rule(0.5),
    beta=_rule(0.0),
    gamma=_rule(-0.5),
    projection=True,
    gamma_free=False,
)

FURTHEST_NEIGHBOR = LinkageMethod(
    name='furthest_neighbor',
    alpha_i=_rule(0.5),
    alpha_j=_rule(0.5),
    beta=_rule(0.0),
    gamma=_rule(0.5),
    projection=True,
    gamma_free=False,
)

METHODS = {
    method.name: method
    for method in (GROUP_AVERAGE, CENTROID, WARD, NEAREST_NEIGHBOR, FURTHEST_NEIGHBOR)
}

# command-line spellings
ALIASES = {
    'average': 'group_average',
    'single': 'nearest_neighbor',
    'complete': 'furthest_neighbor',
}


@dataclass(frozen=True)
class TiePolicy:
    """
    How STEP 1 chooses among pairs attaining the minimum

    lexicographic takes the pair whose (smallest leaf of I, smallest leaf of J) is least; random
    draws uniformly from a generator seeded with `seed` on every run.
    """

    kind: str = LEXICOGRAPHIC
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in (LEXICOGRAPHIC, RANDOM):
            raise ArgumentError('unknown tie policy "{}"'.format(self.kind))
        if self.kind == RANDOM and self.seed is None:
            object.__setattr__(self, 'seed', 0)

    @classmethod
    def named(cls, name, seed=None):
        kind = {'lex': LEXICOGRAPHIC, 'rand': RANDOM}.get(name, name)
        return cls(kind, seed if kind == RANDOM else None)

    def with_seed(self, seed):
        if self.kind == LEXICOGRAPHIC:
            return self
        return replace(self, seed=seed)

    def generator(self):
        if self.kind == RANDOM:
            return np.random.default_rng(self.seed)
        return None


@dataclass(frozen=True)
class MergeStep:
    left: int
    right: int
    distance: float
    new_id: int


@dataclass(frozen=True)
class Dendrogram:
    """
    Merge sequence of an agglomerative run

    Leaves are 0..m-1 and internal nodes m..2m-2 in merge order. heights[k] is the height of node
    m + k, d(I,J)/2 before normalization, clamped to the running maximum when the method inverts.
    """

    m: int
    merges: tuple
    heights: tuple
    normalized: bool = False
    monotone_violations: int = 0
    tie_steps: int = 0
    _clusters: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'merges', tuple(self.merges))
        object.__setattr__(self, 'heights', tuple(float(h) for h in self.heights))
        if self.m < 2:
            raise ArgumentError('a dendrogram needs at least two leaves')
        if len(self.merges) != self.m - 1 or len(self.heights) != self.m - 1:
            raise ArgumentError(
                'a dendrogram over {} leaves needs {} merges, got {}'.format(
                    self.m, self.m - 1, len(self.merges)
                )
            )
        members = [frozenset([leaf]) for leaf in range(self.m)]
        merged = set()
        for k, step in enumerate(self.merges):
            if step.new_id != self.m + k:
                raise ArgumentError('merge {} must create node {}'.format(k, self.m + k))
            if not (0 <= step.left < step.new_id and 0 <= step.right < step.new_id):
                raise ArgumentError('merge {} joins unknown nodes'.format(k))
            if step.left == step.right or {step.left, step.right} & merged:
                raise ArgumentError('merge {} reuses an already merged node'.format(k))
            merged.update((step.left, step.right))
            members.append(members[step.left] | members[step.right])
        object.__setattr__(self, '_clusters', tuple(members))

    def clusters(self):
        """
        Leaf set of every internal node, in node-id order
        """
        return list(self._clusters[self.m:])

    def members(self, node):
        return self._clusters[node]

    def parents(self):
        """
        Parent node id of every node except the root
        """
        parent = {}
        for step in self.merges:
            parent[step.left] = step.new_id
            parent[step.right] = step.new_id
        return parent

    def node_height(self, node):
        if node < self.m:
            return 0.0
        return self.heights[node - self.m]

    @property
    def root_height(self):
        return max(self.heights)


def _merge_order_dense(d0, method, rng):
    """
    Slot pairs (a, b, d(a,b)) in merge order, on numpy arrays

    Slot a keeps the merged cluster; slot b is retired.
    """
    m = d0.m
    dist = d0.to_square()
    np.fill_diagonal(dist, np.inf)
    # candidate pairs i < j; everything on or below the diagonal stays at inf
    upper = np.where(np.tril(np.ones((m, m), dtype=bool)), np.inf, dist)
    active = np.ones(m, dtype=bool)
    sizes = np.ones(m)
    order = []
    tie_steps = 0
    for _ in range(m - 1):
        d_min = float(upper.min())
        # row-major order over slots is lexicographic: a slot always holds its cluster's smallest leaf
        candidates = np.flatnonzero(upper <= d_min + EPSILON * max(1.0, d_min))
        if candidates.size > 1:
            tie_steps += 1
            chosen = candidates[rng.integers(candidates.size)] if rng is not None else candidates[0]
        else:
            chosen = candidates[0]
        a, b = divmod(int(chosen), m)
        d_ab = float(dist[a, b])
        order.append((a, b, d_ab))

        active[a] = active[b] = False
        others = np.flatnonzero(active)
        if others.size:
            alpha_i, alpha_j, beta, gamma = method.coefficients(sizes[a], sizes[b], sizes[others])
            d_ak = dist[a, others]
            d_bk = dist[b, others]
            updated = alpha_i * d_ak + alpha_j * d_bk + beta * d_ab + gamma * np.abs(d_ak - d_bk)
            if np.any(updated < 0):
                logger.debug('linkage %s produced negative distances; clamped to 0', method.name)
                updated = np.maximum(updated, 0.0)
            dist[a, others] = updated
            dist[others, a] = updated
            after = others > a
            upper[a, others[after]] = updated[after]
            upper[others[~after], a] = updated[~after]
        active[a] = True
        dist[b, :] = np.inf
        dist[:, b] = np.inf
        upper[b, :] = np.inf
        upper[:, b] = np.inf
        sizes[a] += sizes[b]
    return order, tie_steps


def _merge_order_small(d0, method, rng):
    """
    Same merge order as _merge_order_dense, on Python floats
    """
    m = d0.m
    dist = d0.to_square().tolist()
    active = list(range(m))
    sizes = [1.0] * m
    order = []
    tie_steps = 0
    for _ in range(m - 1):
        pairs = [(a, b) for k, a in enumerate(active) for b in active[k + 1:]]
        d_min = min(dist[a][b] for a, b in pairs)
        bound = d_min + EPSILON * max(1.0, d_min)
        candidates = [(a, b) for a, b in pairs if dist[a][b] <= bound]
        if len(candidates) > 1:
            tie_steps += 1
            a, b = candidates[rng.integers(len(candidates))] if rng is not None else candidates[0]
        else:
            a, b = candidates[0]
        d_ab = dist[a][b]
        order.append((a, b, d_ab))

        active.remove(b)
        others = [k for k in active if k != a]
        if others:
            n_k = np.array([sizes[k] for k in others])
            alpha_i, alpha_j, beta, gamma = (c.tolist() for c in method.coefficients(sizes[a], sizes[b], n_k))
            clamped = False
            for x, k in enumerate(others):
                d_ak = dist[a][k]
                d_bk = dist[b][k]
                updated = alpha_i[x] * d_ak + alpha_j[x] * d_bk + beta[x] * d_ab + gamma[x] * abs(d_ak - d_bk)
                if updated < 0:
                    clamped = True
                    updated = 0.0
                dist[a][k] = dist[k][a] = updated
            if clamped:
                logger.debug('linkage %s produced negative distances; clamped to 0', method.name)
        sizes[a] += sizes[b]
    return order, tie_steps


def lance_williams(d0, method=GROUP_AVERAGE, ties=TiePolicy()):
    """
    Run the Lance-Williams algorithm on d0

    Returns the dendrogram (unnormalized heights d/2) and d_T, where d_T(i,j) is the inter-cluster
    distance at the merge that first puts i and j together. d_T is never clamped.
    """
    m = d0.m
    if m < 2:
        raise ArgumentError('clustering needs at least two labels')
    if np.any(d0.values < 0):
        raise ArgumentError('input distances must be non-negative')

    merge_order = _merge_order_small if m <= SMALL_LABEL_COUNT else _merge_order_dense
    order, tie_steps = merge_order(d0, method, ties.generator())

    node = list(range(m))
    members = [[leaf] for leaf in range(m)]
    d_t = [[0.0] * m for _ in range(m)]
    merges = []
    heights = []
    running = 0.0
    violations = 0
    for step, (a, b, d_ab) in enumerate(order):
        for i in members[a]:
            row = d_t[i]
            for j in members[b]:
                row[j] = d_ab
                d_t[j][i] = d_ab
        members[a] = members[a] + members[b]

        new_id = m + step
        merges.append(MergeStep(node[a], node[b], d_ab, new_id))
        node[a] = new_id

        height = d_ab / 2.0
        if height < running - EPSILON * max(1.0, running):
            violations += 1
            height = running
        running = max(running, height)
        heights.append(height)

    if violations:
        logger.warning(
            'linkage %s inverted %d merge(s); dendrogram heights clamped', method.name, violations
        )
    if tie_steps:
        logger.debug('%d of %d merge steps resolved a tie (%s)', tie_steps, m - 1, ties.kind)

    dendrogram = Dendrogram(
        m=m,
        merges=merges,
        heights=heights,
        monotone_violations=violations,
        tie_steps=tie_steps,
    )
    values = [d_t[i][j] for i in range(m) for j in range(i + 1, m)]
    return dendrogram, CondensedMatrix(m, values)


def normalize(dendrogram):
    """
    Rescale all heights so the root sits at height 1
    """
    top = dendrogram.root_height
    if top <= 0:
        raise DegenerateInputError('all merge heights are zero; every leaf is identical')
    heights = tuple(height / top for height in dendrogram.heights)
    return replace(dendrogram, heights=heights, normalized=True)


def cophenetic(dendrogram):
    """
    Leaf-to-leaf path length: twice the height of the merge that first joins the two leaves
    """
    m = dendrogram.m
    square = np.zeros((m, m))
    for step, height in zip(dendrogram.merges, dendrogram.heights):
        left = list(dendrogram.members(step.left))
        right = list(dendrogram.members(step.right))
        square[np.ix_(left, right)] = 2.0 * height
        square[np.ix_(right, left)] = 2.0 * height
    return CondensedMatrix.from_square(square)


def projection_check(d_t, method=GROUP_AVERAGE, ties=TiePolicy()):
    """
    True when clustering d_t again reproduces d_t
    """
    _, again = lance_williams(d_t, method, ties)
    scale = max(1.0, float(d_t.values.max(initial=0.0)))
    return again.allclose(d_t, atol=EPSILON * scale)

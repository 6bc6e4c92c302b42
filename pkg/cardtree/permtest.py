"""
Two-sample permutation test for dendrogram equality

The observed distance between the two groups' dendrograms is compared with the distances
obtained after swapping half of each group with the other. S is the fraction of swaps whose
distance strictly exceeds the observed one.
"""
from __future__ import annotations

import logging
import time
from bisect import bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import combinations, product
from math import comb, sqrt

import numpy as np
from scipy.stats import norm

from cardtree.config import DEFAULTS
from cardtree.core import CondensedMatrix, frobenius
from cardtree.exceptions import ArgumentError, DegenerateInputError, OracleLimitError
from cardtree.geodesic import geodesic_distance
from cardtree.linkage import LinkageMethod, TiePolicy, cophenetic, lance_williams, normalize
from cardtree.treespace import dendrogram_tree, euclidean_norm_diff

logger = logging.getLogger(__name__)

FROBENIUS = 'frobenius'
GEODESIC = 'geodesic'
BOTH = 'both'
METRICS = (FROBENIUS, GEODESIC)
# edge-vector distance recorded next to the geodesic, not a test metric
EDGE = 'edge'

# largest number of balanced plans exact enumeration will visit
EXACT_LIMIT = 10 ** 6


@dataclass(frozen=True)
class PermutationPlan:
    """
    Group tag (1 or 2) for every pooled participant, group 1 first

    Tag 1 marks GP_sigma: the members of group 1 that stay plus the members of group 2 swapped in.
    """

    n1: int
    n2: int
    tags: tuple

    def sigma(self):
        return [k for k, tag in enumerate(self.tags) if tag == 1]

    def sigma_bar(self):
        return [k for k, tag in enumerate(self.tags) if tag == 2]

    @classmethod
    def from_swaps(cls, n1, n2, out_of_first, out_of_second):
        tags = [1] * n1 + [2] * n2
        for k in out_of_first:
            tags[k] = 2
        for k in out_of_second:
            tags[n1 + k] = 1
        return cls(n1, n2, tuple(tags))


def swap_count(n1, n2):
    """
    Members exchanged between the groups; half of each group when both are the same even size
    """
    return min(n1, n2) // 2


def _check_sizes(n1, n2):
    if n1 < 2 or n2 < 2:
        raise ArgumentError('each group needs at least 2 participants, got {} and {}'.format(n1, n2))


def draw_plan(rng, n1, n2):
    """
    Uniformly random balanced plan
    """
    _check_sizes(n1, n2)
    k = swap_count(n1, n2)
    out_of_first = rng.choice(n1, size=k, replace=False)
    out_of_second = rng.choice(n2, size=k, replace=False)
    return PermutationPlan.from_swaps(n1, n2, out_of_first, out_of_second)


def plan_count(n1, n2):
    k = swap_count(n1, n2)
    return comb(n1, k) * comb(n2, k)


def enumerate_plans(n1, n2):
    _check_sizes(n1, n2)
    k = swap_count(n1, n2)
    for out_of_first, out_of_second in product(combinations(range(n1), k), combinations(range(n2), k)):
        yield PermutationPlan.from_swaps(n1, n2, out_of_first, out_of_second)


@dataclass(frozen=True)
class TestConfig:
    """
    Everything that determines a permutation test besides the data
    """

    __test__ = False

    method: LinkageMethod = field(default_factory=lambda: LinkageMethod.named(DEFAULTS['method']))
    ties: TiePolicy = field(default_factory=TiePolicy)
    metric: str = DEFAULTS['metric']
    permutations: int = DEFAULTS['permutations']
    seed: int = DEFAULTS['seed']
    alpha: float = DEFAULTS['alpha']
    normalize_for_frobenius: bool = DEFAULTS['normalize']
    normalize_for_geodesic: bool = DEFAULTS['normalize_geodesic']
    threads: int = DEFAULTS['threads']

    def __post_init__(self):
        if self.metric not in METRICS + (BOTH,):
            raise ArgumentError('unknown metric "{}"'.format(self.metric))
        if self.permutations < 1:
            raise ArgumentError('the number of permutations must be at least 1')
        if not 0.0 < self.alpha < 1.0:
            raise ArgumentError('alpha must lie strictly between 0 and 1')
        if self.threads < 1:
            raise ArgumentError('thread count must be at least 1')

    @classmethod
    def from_mapping(cls, config):
        """
        Build from a loaded configuration mapping (see cardtree.config.load_config)
        """
        return cls(
            method=LinkageMethod.named(config['method']),
            ties=TiePolicy.named(config['ties'], seed=config['seed']),
            metric=config['metric'],
            permutations=int(config['permutations']),
            seed=int(config['seed']),
            alpha=float(config['alpha']),
            normalize_for_frobenius=bool(config['normalize']),
            normalize_for_geodesic=bool(config['normalize_geodesic']),
            threads=int(config['threads']),
        )

    def metrics(self):
        return list(METRICS) if self.metric == BOTH else [self.metric]

    def to_dict(self):
        return {
            'method': self.method.name,
            'ties': self.ties.kind,
            'metric': self.metric,
            'permutations': self.permutations,
            'seed': self.seed,
            'alpha': self.alpha,
            'normalize': self.normalize_for_frobenius,
            'normalize_geodesic': self.normalize_for_geodesic,
        }


@dataclass(frozen=True)
class MetricSummary:
    """
    Outcome of the test under one metric
    """

    metric: str
    observed: float
    replicates: tuple
    s_hat: float
    interval_normal: tuple
    interval_wilson: tuple
    tie_count: int
    degenerate: bool

    def sorted_replicates(self):
        """
        Replicate distances in ascending order; `replicates` keeps plan-index order
        """
        return tuple(sorted(self.replicates))

    def survival(self, value):
        """
        Fraction of replicates strictly above value, i.e. 1 - empirical CDF at value
        """
        ordered = self.sorted_replicates()
        return (len(ordered) - bisect_right(ordered, value)) / len(ordered)


@dataclass(frozen=True)
class TestResult:
    __test__ = False

    group1: str
    group2: str
    n1: int
    n2: int
    config: TestConfig
    metrics: dict
    dendrograms: tuple
    runtime: float = 0.0
    # observed value first, then one per replicate; empty unless the geodesic metric ran
    edge_distances: tuple = ()

    def __getitem__(self, metric):
        try:
            return self.metrics[metric]
        except KeyError:
            raise ArgumentError('metric "{}" was not computed'.format(metric))

    @property
    def degenerate(self):
        return any(summary.degenerate for summary in self.metrics.values())


def _frobenius_matrix(dendrogram, d_t, normalized):
    if not normalized:
        return d_t
    try:
        return cophenetic(normalize(dendrogram))
    except DegenerateInputError:
        return CondensedMatrix(d_t.m, np.zeros(len(d_t)))


def _distances(d1, d2, config, ties):
    """
    Per-metric distance between the dendrograms of two Hamming matrices
    """
    dendrogram1, t1 = lance_williams(d1, config.method, ties)
    dendrogram2, t2 = lance_williams(d2, config.method, ties)
    distances = {}
    if config.metric in (FROBENIUS, BOTH):
        distances[FROBENIUS] = frobenius(
            _frobenius_matrix(dendrogram1, t1, config.normalize_for_frobenius),
            _frobenius_matrix(dendrogram2, t2, config.normalize_for_frobenius),
        )
    if config.metric in (GEODESIC, BOTH):
        tree1 = dendrogram_tree(dendrogram1, config.normalize_for_geodesic)
        tree2 = dendrogram_tree(dendrogram2, config.normalize_for_geodesic)
        distances[GEODESIC] = geodesic_distance(tree1, tree2).distance
        distances[EDGE] = euclidean_norm_diff(tree1, tree2)
    return distances, (dendrogram1, dendrogram2)


def statistic(gp1, gp2, config):
    """
    Distance between the dendrograms of two participant groups under each configured metric

    gp1 and gp2 are GroupedSamples (typically one group each) over the same labels. With the geodesic
    metric the edge-vector distance of the two trees is included under EDGE.
    """
    if not len(gp1) or not len(gp2):
        raise ArgumentError('both groups need participants')
    d1 = gp1.hamming(range(len(gp1)))
    d2 = gp2.hamming(range(len(gp2)))
    distances, _ = _distances(d1, d2, config, config.ties)
    return distances


def _group_indices(sample, g1, g2):
    if g1 == g2:
        raise ArgumentError('cannot test group "{}" against itself'.format(g1))
    return sample.indices(g1), sample.indices(g2)


def _replicate_seed(seed, index):
    return np.random.SeedSequence([seed, index])


class _Replicates(object):
    """
    Evaluates the statistic under plan j; replicate j only depends on (seed, j)
    """

    def __init__(self, sample, pooled, n1, n2, config):
        self.sample = sample
        self.pooled = pooled
        self.n1 = n1
        self.n2 = n2
        self.config = config

    def distances(self, plan, ties):
        members = [self.pooled[k] for k in plan.sigma()]
        others = [self.pooled[k] for k in plan.sigma_bar()]
        distances, _ = _distances(
            self.sample.hamming(members), self.sample.hamming(others), self.config, ties
        )
        return distances

    def __call__(self, index):
        rng = np.random.default_rng(_replicate_seed(self.config.seed, index))
        plan = draw_plan(rng, self.n1, self.n2)
        ties = self.config.ties.with_seed(int(rng.integers(2 ** 62)))
        return self.distances(plan, ties)


def _run(function, items, threads):
    if threads == 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(function, items))


def perm_test(sample, g1, g2, config=None):
    """
    Monte Carlo permutation test of H0: the two groups share one dendrogram
    """
    config = config or TestConfig()
    started = time.perf_counter()
    idx1, idx2 = _group_indices(sample, g1, g2)
    n1, n2 = len(idx1), len(idx2)
    _check_sizes(n1, n2)

    observed, dendrograms = _distances(sample.hamming(idx1), sample.hamming(idx2), config, config.ties)
    logger.info(
        'testing "%s" (%d) against "%s" (%d): %d permutations, metric %s',
        g1, n1, g2, n2, config.permutations, config.metric,
    )
    for caveat in config.method.caveats():
        logger.info(caveat)
    replicates = _run(
        _Replicates(sample, idx1 + idx2, n1, n2, config), range(config.permutations), config.threads
    )

    edge_distances = ()
    if EDGE in observed:
        edge_distances = (observed[EDGE],) + tuple(replicate[EDGE] for replicate in replicates)

    summaries = {}
    for metric in config.metrics():
        values = np.array([replicate[metric] for replicate in replicates])
        summaries[metric] = summarize(metric, observed[metric], values, config.alpha)
        if summaries[metric].degenerate:
            logger.warning('%s: observed and every replicate distance are 0; result is degenerate', metric)
    return TestResult(
        group1=g1,
        group2=g2,
        n1=n1,
        n2=n2,
        config=config,
        metrics=summaries,
        dendrograms=dendrograms,
        runtime=time.perf_counter() - started,
        edge_distances=edge_distances,
    )


def summarize(metric, observed, replicates, alpha):
    replicates = np.asarray(replicates, dtype=np.float64)
    k = replicates.size
    ordered = np.sort(replicates)
    s_hat = (k - np.searchsorted(ordered, observed, side='right')) / k
    return MetricSummary(
        metric=metric,
        observed=float(observed),
        replicates=tuple(replicates.tolist()),
        s_hat=float(s_hat),
        interval_normal=normal_interval(s_hat, k, alpha),
        interval_wilson=wilson_interval(s_hat, k, alpha),
        tie_count=int(np.count_nonzero(replicates == observed)),
        degenerate=bool(observed == 0 and np.all(replicates == 0)),
    )


def exact_perm_test(sample, g1, g2, config=None):
    """
    S evaluated over every balanced plan instead of a random sample of them

    Returns {metric: S}.
    """
    config = config or TestConfig()
    idx1, idx2 = _group_indices(sample, g1, g2)
    n1, n2 = len(idx1), len(idx2)
    _check_sizes(n1, n2)
    total = plan_count(n1, n2)
    if total > EXACT_LIMIT:
        raise OracleLimitError('{} balanced plans exceed the enumeration limit {}'.format(total, EXACT_LIMIT))

    observed, _ = _distances(sample.hamming(idx1), sample.hamming(idx2), config, config.ties)
    replicates = _Replicates(sample, idx1 + idx2, n1, n2, config)
    exceed = dict.fromkeys(config.metrics(), 0)
    for plan in enumerate_plans(n1, n2):
        distances = replicates.distances(plan, config.ties)
        for metric in exceed:
            if distances[metric] > observed[metric]:
                exceed[metric] += 1
    return {metric: count / total for metric, count in exceed.items()}


def compare_groups(sample, config=None, groups=None):
    """
    Permutation test for every unordered pair of groups, each pair with its own derived seed
    """
    config = config or TestConfig()
    groups = list(groups or sample.groups())
    if len(groups) < 2:
        raise ArgumentError('at least two groups are needed for a comparison')
    results = []
    for index, (g1, g2) in enumerate(combinations(groups, 2)):
        seed = int(np.random.SeedSequence([config.seed, index]).generate_state(1)[0])
        results.append(perm_test(sample, g1, g2, replace(config, seed=seed)))
    return results


def _z(alpha):
    if not 0.0 < alpha < 1.0:
        raise ArgumentError('alpha must lie strictly between 0 and 1, got {}'.format(alpha))
    return float(norm.ppf(1.0 - alpha / 2.0))


def _check_estimate(s_hat, k):
    if not 0.0 <= s_hat <= 1.0:
        raise ArgumentError('estimate must lie in [0, 1], got {}'.format(s_hat))
    if k < 1:
        raise ArgumentError('K must be at least 1')


def wilson_interval(s_hat, k, alpha):
    """
    Wilson score interval for a Monte Carlo proportion from k replicates
    """
    z = _z(alpha)
    _check_estimate(s_hat, k)
    z2 = z * z
    centre = 2.0 * k * s_hat + z2
    spread = z * sqrt(4.0 * k * s_hat * (1.0 - s_hat) + z2)
    denominator = 2.0 * (k + z2)
    return (max(0.0, (centre - spread) / denominator), min(1.0, (centre + spread) / denominator))


def normal_interval(s_hat, k, alpha):
    """
    Normal-approximation interval, clipped to [0, 1]
    """
    z = _z(alpha)
    _check_estimate(s_hat, k)
    half_width = z * sqrt(s_hat * (1.0 - s_hat) / k)
    return (max(0.0, s_hat - half_width), min(1.0, s_hat + half_width))

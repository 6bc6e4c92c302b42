"""
CardTree

Dendrogram-based comparison of card-sorting groups: Lance-Williams clustering of Hamming
distances, Frobenius and tree-space geodesic distances between dendrograms, and a permutation
test of dendrogram equality.
"""
import logging

__version__ = '0.1.0'

from cardtree.core import (  # noqa: E402
    CondensedMatrix, GroupedSample, LabelSet, Participant, Partition, co_classification, frobenius,
    hamming_mean,
)
from cardtree.exceptions import (  # noqa: E402
    ArgumentError, CardTreeError, DegenerateInputError, OracleLimitError, ParseError, UsageError,
)
from cardtree.geodesic import brute_force_geodesic, geodesic_distance, geodesic_point  # noqa: E402
from cardtree.linkage import (  # noqa: E402
    CENTROID, FURTHEST_NEIGHBOR, GROUP_AVERAGE, NEAREST_NEIGHBOR, WARD, Dendrogram, LinkageMethod,
    TiePolicy, cophenetic, lance_williams, normalize, projection_check,
)
from cardtree.permtest import (  # noqa: E402
    TestConfig, TestResult, compare_groups, exact_perm_test, normal_interval, perm_test, statistic,
    wilson_interval,
)
from cardtree.treespace import (  # noqa: E402
    DendrogramTree, SplitTree, euclidean_norm_diff, from_dendrogram, to_cophenetic,
)

logging.getLogger(__name__).addHandler(logging.NullHandler())

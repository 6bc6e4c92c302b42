"""
In-memory forms of the files cardtree reads and writes
"""
from __future__ import annotations

from dataclasses import dataclass, field

from cardtree.core import CondensedMatrix, GroupedSample, LabelSet
from cardtree.linkage import Dendrogram

FORMAT_VERSION = 1


@dataclass(frozen=True)
class DistanceFile:
    """
    A labeled dissimilarity matrix, the input of `cardtree cluster` besides card-sort files
    """

    label_set: LabelSet
    distances: CondensedMatrix


@dataclass(frozen=True)
class DendrogramFile:
    """
    Output of `cardtree cluster`, input of `cardtree geodesic`
    """

    label_set: LabelSet
    method: str
    dendrogram: Dendrogram
    cophenetic: CondensedMatrix

    @property
    def labels(self):
        return self.label_set.labels


@dataclass(frozen=True)
class ReportFile:
    """
    A run of one or more permutation tests together with everything needed to repeat it

    `generated` holds the wall-clock timestamp and runtime; nothing else in the file depends on
    when or how fast the run happened.
    """

    config: dict
    sample: GroupedSample
    comparisons: tuple
    generated: dict = field(default_factory=dict)

    @property
    def labels(self):
        return self.sample.label_set.labels


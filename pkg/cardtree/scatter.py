"""
Per-replicate distance table: Frobenius against geodesic, plus the edge-vector distance
"""
from dataclasses import dataclass

from cardtree.content_types import TabSeparated
from cardtree.exceptions import ArgumentError
from cardtree.permtest import FROBENIUS, GEODESIC
from cardtree.serializers import ScatterRowSerializer

OBSERVED = 'observed'
REPLICATE = 'replicate'


@dataclass(frozen=True)
class ScatterRow:
    row: str
    index: int
    frobenius: float
    geodesic: float
    edge_euclidean: float


def scatter_rows(result):
    """
    One row per replicate (index 1..K) followed by the observed pair (index 0)
    """
    if FROBENIUS not in result.metrics or GEODESIC not in result.metrics:
        raise ArgumentError('a scatter needs both the frobenius and the geodesic metric')
    frobenius = result.metrics[FROBENIUS]
    geodesic = result.metrics[GEODESIC]
    if len(result.edge_distances) != len(geodesic.replicates) + 1:
        raise ArgumentError('the result carries no edge-vector distances')
    rows = [
        ScatterRow(REPLICATE, k, f, g, e)
        for k, (f, g, e) in enumerate(
            zip(frobenius.replicates, geodesic.replicates, result.edge_distances[1:]), 1
        )
    ]
    rows.append(ScatterRow(OBSERVED, 0, frobenius.observed, geodesic.observed, result.edge_distances[0]))
    return rows


def emit_scatter(result, path=None, stream=None):
    """
    Write the scatter table of a metric=both TestResult as tab-separated text

    Returns the text that was written.
    """
    content_type = TabSeparated(ScatterRowSerializer)
    return content_type.make_response(content_type.serialize(scatter_rows(result)), path=path, stream=stream)

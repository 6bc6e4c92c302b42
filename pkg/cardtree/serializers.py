from copy import copy

from cardtree.documents import FORMAT_VERSION
from cardtree.fields import (
    BooleanField, ConstantField, Field, FloatField, IntegerField, ListField, MethodField, NestedField,
    StringField, declared_fields,
)


def _fmt(value):
    return '{:.6g}'.format(value)


def _names(labels, split):
    return [labels[index] for index in sorted(split)]


class Serializer(object):
    """
    Serializer Base class

    For defining the output document of a command
    """

    def __init__(self, raw_data=None, context=None, **kwargs):
        """
        Initialize the Serializer

        Collect all the declared Field's, bound to this instance, for easy access
        """
        super(Serializer, self).__init__(**kwargs)
        self.raw_data = raw_data
        self.context = context if context is not None else {}
        self.fields = []
        for field_name, field in declared_fields(type(self)):
            field = copy(field)
            field.bind(self, field_name, raw_data)
            self.fields.append(field)

    def to_dict(self):
        return {field.field_name: field.serialize_value() for field in self.fields}

    def to_text(self):
        """
        Human-readable rendering; defaults to one "name: value" line per field
        """
        return '\n'.join('{}: {}'.format(name, value) for name, value in self.to_dict().items())


class MergeSerializer(Serializer):
    left = IntegerField()
    right = IntegerField()
    distance = FloatField()
    new_id = IntegerField()


class DendrogramSerializer(Serializer):
    m = IntegerField()
    merges = NestedField(MergeSerializer, many=True)
    heights = ListField(FloatField())
    normalized = BooleanField()
    monotone_violations = IntegerField()
    tie_steps = IntegerField()
    clusters = MethodField()

    def get_clusters(self, dendrogram):
        return [sorted(cluster) for cluster in dendrogram.clusters()]


class ParticipantSerializer(Serializer):
    id = StringField(source='participant_id')
    group = StringField()
    blocks = MethodField()

    def get_blocks(self, participant):
        return [_names(self.context['labels'], block) for block in participant.partition.blocks]


class CardSortSerializer(Serializer):
    version = ConstantField(FORMAT_VERSION)
    labels = MethodField()
    participants = MethodField()

    def get_labels(self, sample):
        return list(sample.label_set.labels)

    def get_participants(self, sample):
        context = {'labels': sample.label_set.labels}
        return [ParticipantSerializer(participant, context=context).to_dict() for participant in sample.participants]


class DendrogramFileSerializer(Serializer):
    """
    `cardtree cluster` output: the merge sequence plus its cophenetic matrix
    """

    version = ConstantField(FORMAT_VERSION)
    labels = MethodField()
    method = StringField()
    dendrogram = NestedField(DendrogramSerializer)
    cophenetic = MethodField()

    def get_labels(self, document):
        return list(document.labels)

    def get_cophenetic(self, document):
        return document.cophenetic.to_square().tolist()

    def to_text(self):
        document = self.raw_data
        labels = document.labels
        dendrogram = document.dendrogram
        lines = ['method: {}'.format(document.method), 'merges:']
        rows = [('node', 'left', 'right', 'distance', 'height', 'members')]
        for step, height in zip(dendrogram.merges, dendrogram.heights):
            rows.append((
                str(step.new_id), str(step.left), str(step.right), _fmt(step.distance), _fmt(height),
                ', '.join(_names(labels, dendrogram.members(step.new_id))),
            ))
        lines.extend(_table(rows, indent='  '))
        lines.append('tie steps: {}'.format(dendrogram.tie_steps))
        lines.append('monotone violations: {}'.format(dendrogram.monotone_violations))
        lines.append('cophenetic:')
        square = document.cophenetic.to_square()
        rows = [('',) + tuple(labels)]
        for label, row in zip(labels, square):
            rows.append((label,) + tuple(_fmt(value) for value in row))
        lines.extend(_table(rows, indent='  '))
        return '\n'.join(lines)


class MetricSerializer(Serializer):
    metric = StringField()
    observed = FloatField()
    s_hat = FloatField()
    interval_normal = ListField(FloatField())
    interval_wilson = ListField(FloatField())
    tie_count = IntegerField()
    degenerate = BooleanField()
    replicates = ListField(FloatField())


class ComparisonSerializer(Serializer):
    group1 = StringField()
    group2 = StringField()
    n1 = IntegerField()
    n2 = IntegerField()
    dendrograms = NestedField(DendrogramSerializer, many=True)
    metrics = MethodField()
    edge_distances = ListField(FloatField())

    def get_metrics(self, result):
        return {name: MetricSerializer(summary).to_dict() for name, summary in result.metrics.items()}


class ReportSerializer(Serializer):
    version = ConstantField(FORMAT_VERSION)
    generated = Field(required=False, default={})
    config = Field()
    input = NestedField(CardSortSerializer, source='sample')
    comparisons = NestedField(ComparisonSerializer, many=True)

    def to_text(self):
        report = self.raw_data
        config = report.config
        lines = [
            'permutation test: method {method}, ties {ties}, K={permutations}, seed {seed}, '
            'alpha {alpha}'.format(**config),
        ]
        rows = [('group 1', 'group 2', 'n1', 'n2', 'metric', 'observed', 'S', 'normal interval',
                 'Wilson interval', 'ties', 'degenerate')]
        for result in report.comparisons:
            for name, summary in result.metrics.items():
                rows.append((
                    result.group1, result.group2, str(result.n1), str(result.n2), name,
                    _fmt(summary.observed), '{:.4f}'.format(summary.s_hat),
                    '[{:.4f}, {:.4f}]'.format(*summary.interval_normal),
                    '[{:.4f}, {:.4f}]'.format(*summary.interval_wilson),
                    str(summary.tie_count), 'yes' if summary.degenerate else 'no',
                ))
        lines.extend(_table(rows))
        if report.generated:
            lines.append('generated {timestamp} in {runtime:.2f}s'.format(**report.generated))
        return '\n'.join(lines)


class GeodesicSerializer(Serializer):
    """
    A GeodesicResult; splits are written as label names taken from context['labels']
    """

    distance = FloatField()
    common_contribution = FloatField()
    leaf_contribution = FloatField()
    common = MethodField()
    support = MethodField()

    def get_common(self, result):
        return [_names(self.context['labels'], split) for split in result.common]

    def get_support(self, result):
        labels = self.context['labels']
        return [
            {'a': [_names(labels, split) for split in a_block], 'b': [_names(labels, split) for split in b_block]}
            for a_block, b_block in result.support
        ]

    def to_text(self):
        data = self.to_dict()
        lines = [
            'geodesic distance: {:.12g}'.format(data['distance']),
            'shared splits: {:.12g}'.format(data['common_contribution']),
            'leaf edges: {:.12g}'.format(data['leaf_contribution']),
            'support ({} legs):'.format(len(data['support'])),
        ]
        for k, leg in enumerate(data['support'], 1):
            lines.append('  {}. drop {}  add {}'.format(
                k, ' '.join('{' + ','.join(s) + '}' for s in leg['a']),
                ' '.join('{' + ','.join(s) + '}' for s in leg['b']),
            ))
        return '\n'.join(lines)


class ScatterRowSerializer(Serializer):
    row = StringField()
    index = IntegerField()
    frobenius = FloatField()
    geodesic = FloatField()
    edge_euclidean = FloatField()


class SimulationRowSerializer(Serializer):
    n = IntegerField()
    runs = IntegerField()
    metric = StringField()
    mean_s = FloatField()
    median_s = FloatField()
    rejected = FloatField()

    def to_text(self):
        return 'N={n:<5d} runs={runs:<4d} {metric:<10s} mean S {mean_s:.4f}  median S {median_s:.4f}  ' \
            'rejected {rejected:.3f}'.format(**self.to_dict())


def _table(rows, indent=''):
    widths = [max(len(row[k]) for row in rows) for k in range(len(rows[0]))]
    return [
        indent + '  '.join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in rows
    ]

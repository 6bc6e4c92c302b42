"""
Readers for the versioned JSON documents

Every Deserializer binds its declared fields against one decoded JSON object. `deserialize()`
converts the fields in declaration order (running `validate_<field>` hooks as it goes), then
`validate()` for cross-field checks, then `build()` for the domain object.
"""
from copy import copy

import numpy as np

from cardtree.config import load_config
from cardtree.core import CondensedMatrix, GroupedSample, LabelSet, Participant, Partition
from cardtree.documents import FORMAT_VERSION, DendrogramFile, DistanceFile, ReportFile
from cardtree.exceptions import ArgumentError, ParseError
from cardtree.fields import (
    BooleanField, ConstantField, Field, FloatField, IntegerField, ListField, NestedField, StringField,
    declared_fields,
)
from cardtree.linkage import Dendrogram, MergeStep
from cardtree.permtest import MetricSummary, TestConfig, TestResult


class Deserializer(object):
    """
    Deserializer Base class

    For defining the input document of a command
    """

    def __init__(self, raw_data=None, context=None, **kwargs):
        super(Deserializer, self).__init__(**kwargs)
        if not isinstance(raw_data, dict):
            raise ParseError('Expected an object for {}, got {}'.format(
                type(self).__name__.replace('Deserializer', '').lower() or 'document',
                type(raw_data).__name__,
            ))
        self.raw_data = raw_data
        self.context = context if context is not None else {}
        self.values = {}
        self.fields = []
        for field_name, field in declared_fields(type(self)):
            field = copy(field)
            field.bind(self, field_name, raw_data)
            self.fields.append(field)

    def deserialize(self):
        for field in self.fields:
            value = field.deserialize_value()
            hook = getattr(self, 'validate_{}'.format(field.field_name), None)
            if hook is not None:
                hook(value)
            self.values[field.field_name] = value
        self.validate()
        return self.build()

    def validate(self):
        pass

    def build(self):
        return dict(self.values)


def _label_set(labels):
    if len(labels) < 2:
        raise ParseError('At least two labels are required')
    seen = set()
    for label in labels:
        if label in seen:
            raise ParseError('Duplicate label', label=label)
        seen.add(label)
    return LabelSet(labels)


def _square(rows, m, name):
    try:
        square = np.array(rows, dtype=np.float64)
    except ValueError:
        square = None
    if square is None or square.shape != (m, m):
        raise ParseError('Field "{}" must be a {}x{} matrix'.format(name, m, m))
    try:
        return CondensedMatrix.from_square(square)
    except ArgumentError as exc:
        raise ParseError('Field "{}": {}'.format(name, exc))


class ParticipantDeserializer(Deserializer):
    """
    One participant; blocks hold label names or 0-based label indices
    """

    id = StringField()
    group = StringField()
    blocks = ListField(ListField())

    def validate_id(self, value):
        if not value:
            raise ParseError('Participant id must be a nonempty string')

    def validate_group(self, value):
        if not value:
            raise ParseError('Group must be a nonempty string', participant=self.values['id'])

    def _resolve(self, item):
        labels = self.context['labels']
        participant = self.values['id']
        if isinstance(item, str):
            if item not in self.context['index']:
                raise ParseError('Unknown label in block', participant=participant, label=item)
            return self.context['index'][item]
        if isinstance(item, int) and not isinstance(item, bool):
            if not 0 <= item < len(labels):
                raise ParseError('Label index out of range', participant=participant, label=item)
            return item
        raise ParseError('Blocks must hold label names or indices', participant=participant, label=item)

    def build(self):
        labels = self.context['labels']
        participant = self.values['id']
        blocks = []
        placed = set()
        for block in self.values['blocks']:
            if not block:
                raise ParseError('Empty block', participant=participant)
            indices = []
            for item in block:
                index = self._resolve(item)
                if index in placed:
                    raise ParseError('Label appears in more than one block', participant=participant, label=labels[index])
                placed.add(index)
                indices.append(index)
            blocks.append(indices)
        for index, label in enumerate(labels):
            if index not in placed:
                raise ParseError('Label is not in any block', participant=participant, label=label)
        return Participant(participant, self.values['group'], Partition(len(labels), blocks))


class CardSortDeserializer(Deserializer):
    version = ConstantField(FORMAT_VERSION)
    labels = ListField(StringField())
    participants = NestedField(deserializer=ParticipantDeserializer, many=True)

    def validate_labels(self, value):
        self.context['label_set'] = _label_set(value)
        self.context['labels'] = value
        self.context['index'] = {label: index for index, label in enumerate(value)}

    def validate(self):
        participants = self.values['participants']
        if not participants:
            raise ParseError('At least one participant is required')
        seen = set()
        for participant in participants:
            if participant.participant_id in seen:
                raise ParseError('Duplicate participant id', participant=participant.participant_id)
            seen.add(participant.participant_id)

    def build(self):
        return GroupedSample(self.context['label_set'], self.values['participants'])


class DistanceDeserializer(Deserializer):
    """
    A square dissimilarity matrix over named labels
    """

    version = ConstantField(FORMAT_VERSION)
    labels = ListField(StringField())
    distances = ListField(ListField(FloatField()))

    def build(self):
        label_set = _label_set(self.values['labels'])
        return DistanceFile(label_set, _square(self.values['distances'], label_set.m, 'distances'))


class MergeDeserializer(Deserializer):
    left = IntegerField()
    right = IntegerField()
    distance = FloatField()
    new_id = IntegerField()

    def build(self):
        return MergeStep(**self.values)


class DendrogramDeserializer(Deserializer):
    m = IntegerField()
    merges = NestedField(deserializer=MergeDeserializer, many=True)
    heights = ListField(FloatField())
    normalized = BooleanField(required=False, default=False)
    monotone_violations = IntegerField(required=False, default=0)
    tie_steps = IntegerField(required=False, default=0)

    def build(self):
        try:
            return Dendrogram(**self.values)
        except ArgumentError as exc:
            raise ParseError('Invalid dendrogram: {}'.format(exc))


class DendrogramFileDeserializer(Deserializer):
    version = ConstantField(FORMAT_VERSION)
    labels = ListField(StringField())
    method = StringField()
    dendrogram = NestedField(deserializer=DendrogramDeserializer)
    cophenetic = ListField(ListField(FloatField()))

    def validate(self):
        if self.values['dendrogram'].m != len(self.values['labels']):
            raise ParseError('Dendrogram has {} leaves but {} labels are listed'.format(
                self.values['dendrogram'].m, len(self.values['labels'])
            ))

    def build(self):
        label_set = _label_set(self.values['labels'])
        return DendrogramFile(
            label_set=label_set,
            method=self.values['method'],
            dendrogram=self.values['dendrogram'],
            cophenetic=_square(self.values['cophenetic'], label_set.m, 'cophenetic'),
        )


class MetricDeserializer(Deserializer):
    metric = StringField()
    observed = FloatField()
    s_hat = FloatField()
    interval_normal = ListField(FloatField())
    interval_wilson = ListField(FloatField())
    tie_count = IntegerField()
    degenerate = BooleanField()
    replicates = ListField(FloatField())

    def validate(self):
        for name in ('interval_normal', 'interval_wilson'):
            if len(self.values[name]) != 2:
                raise ParseError('Field "{}" must hold two numbers'.format(name))

    def build(self):
        return MetricSummary(**self.values)


class ComparisonDeserializer(Deserializer):
    group1 = StringField()
    group2 = StringField()
    n1 = IntegerField()
    n2 = IntegerField()
    dendrograms = NestedField(deserializer=DendrogramDeserializer, many=True)
    metrics = Field()
    edge_distances = ListField(FloatField(), required=False, default=())

    def validate_dendrograms(self, value):
        if len(value) != 2:
            raise ParseError('A comparison holds exactly two dendrograms')

    def validate_metrics(self, value):
        if not isinstance(value, dict) or not value:
            raise ParseError('Field "metrics" must map metric names to results')

    def build(self):
        metrics = {
            name: MetricDeserializer(raw, context=self.context).deserialize()
            for name, raw in self.values['metrics'].items()
        }
        return TestResult(
            group1=self.values['group1'],
            group2=self.values['group2'],
            n1=self.values['n1'],
            n2=self.values['n2'],
            config=self.context['config'],
            metrics=metrics,
            dendrograms=self.values['dendrograms'],
            edge_distances=self.values['edge_distances'],
        )


class ReportDeserializer(Deserializer):
    version = ConstantField(FORMAT_VERSION)
    generated = Field(required=False, default={})
    config = Field()
    input = NestedField(deserializer=CardSortDeserializer)
    comparisons = NestedField(deserializer=ComparisonDeserializer, many=True)

    def validate_config(self, value):
        if not isinstance(value, dict):
            raise ParseError('Field "config" must be an object')
        try:
            # the environment must not leak into a stored run
            self.context['config'] = TestConfig.from_mapping(load_config(value, environ={}))
        except (ArgumentError, KeyError, TypeError) as exc:
            raise ParseError('Invalid config: {}'.format(exc))

    def build(self):
        return ReportFile(
            config=self.values['config'],
            sample=self.values['input'],
            comparisons=self.values['comparisons'],
            generated=self.values['generated'],
        )

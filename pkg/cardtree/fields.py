from copy import copy
from numbers import Integral, Real

from cardtree.exceptions import ParseError


class Field(object):
    """
    Base Field Serializer/deserializer

    Used for defining fields on Serializers and Deserializers

    The Field object has 2 purposes:
        1. Serialize/Deserialize field values based on type
        2. Locate its value in the raw data (a dict key or an attribute named by `source`)
    """

    def __init__(self, source=None, required=True, default=None):
        self._source = source
        self.required = required
        self.default = default
        self.field_name = None
        self.parent = None

    def serialize_value(self):
        return self.raw_value

    def deserialize_value(self):
        return self.raw_value

    def _populate_raw_value(self):
        if isinstance(self.raw_data, dict):
            self.raw_value = self.raw_data.get(self.source)
        else:
            self.raw_value = getattr(self.raw_data, self.source, None)
        if self.raw_value is None:
            if self.required:
                raise ParseError('Missing required field "{}"'.format(self.source))
            self.raw_value = self.default

    def bind(self, parent, field_name, raw_data):
        self.parent = parent
        self.field_name = field_name
        self.raw_data = raw_data
        self._populate_raw_value()

    def child(self, value):
        """
        Unbound copy of this field holding `value`, for list items
        """
        field = copy(self)
        field.raw_value = value
        return field

    def invalid(self, expected):
        return ParseError(
            'Field "{}" must be {}, got {!r}'.format(self.field_name or self.source, expected, self.raw_value)
        )

    @property
    def source(self):
        return self._source if self._source is not None else self.field_name


class StringField(Field):

    def serialize_value(self):
        return str(self.raw_value)

    def deserialize_value(self):
        if self.raw_value is None:
            return None
        if not isinstance(self.raw_value, str):
            raise self.invalid('a string')
        return self.raw_value


class IntegerField(Field):

    def serialize_value(self):
        return int(self.raw_value)

    def deserialize_value(self):
        if self.raw_value is None:
            return None
        if isinstance(self.raw_value, bool) or not isinstance(self.raw_value, Integral):
            raise self.invalid('an integer')
        return int(self.raw_value)


class FloatField(Field):

    def serialize_value(self):
        return float(self.raw_value)

    def deserialize_value(self):
        if self.raw_value is None:
            return None
        if isinstance(self.raw_value, bool) or not isinstance(self.raw_value, Real):
            raise self.invalid('a number')
        return float(self.raw_value)


class BooleanField(Field):

    def serialize_value(self):
        return bool(self.raw_value)

    def deserialize_value(self):
        if self.raw_value is None:
            return None
        if not isinstance(self.raw_value, bool):
            raise self.invalid('true or false')
        return self.raw_value


class ListField(Field):
    """
    Homogeneous list; every item goes through the `item` field
    """

    def __init__(self, item=None, **kwargs):
        self.item = item or Field()
        super(ListField, self).__init__(**kwargs)

    def _items(self):
        if isinstance(self.raw_value, (str, bytes, dict)):
            raise self.invalid('a list')
        try:
            return list(self.raw_value)
        except TypeError:
            raise self.invalid('a list')

    def _item(self, value):
        item = self.item.child(value)
        item.parent = self.parent
        item.field_name = self.field_name
        return item

    def serialize_value(self):
        return [self._item(value).serialize_value() for value in self._items()]

    def deserialize_value(self):
        if self.raw_value is None:
            return None
        return tuple(self._item(value).deserialize_value() for value in self._items())


class NestedField(Field):
    """
    A whole object handled by its own Serializer or Deserializer

    The parent's context is handed down so nested objects can resolve labels.
    """

    def __init__(self, serializer=None, deserializer=None, many=False, **kwargs):
        self.serializer = serializer
        self.deserializer = deserializer
        self.many = many
        super(NestedField, self).__init__(**kwargs)

    def _context(self):
        return getattr(self.parent, 'context', None)

    def _values(self):
        if not self.many:
            return [self.raw_value]
        if isinstance(self.raw_value, (str, bytes, dict)):
            raise self.invalid('a list')
        return list(self.raw_value)

    def serialize_value(self):
        items = [self.serializer(value, context=self._context()).to_dict() for value in self._values()]
        return items if self.many else items[0]

    def deserialize_value(self):
        if self.raw_value is None:
            return None
        items = [self.deserializer(value, context=self._context()).deserialize() for value in self._values()]
        return tuple(items) if self.many else items[0]


class ConstantField(Field):
    """
    Always emits the same value; on input the value must match
    """

    def __init__(self, value, **kwargs):
        self.value = value
        super(ConstantField, self).__init__(**kwargs)

    def _populate_raw_value(self):
        """
        Override to look up the raw value only when reading a document
        """
        if isinstance(self.raw_data, dict):
            super(ConstantField, self)._populate_raw_value()
        else:
            self.raw_value = self.value

    def deserialize_value(self):
        if self.raw_value != self.value:
            raise ParseError(
                'Unsupported {} {!r} (expected {!r})'.format(self.field_name, self.raw_value, self.value)
            )
        return self.raw_value


class MethodField(Field):
    """
    Value produced by a method of the parent Serializer, called with the raw data
    """

    def __init__(self, method_name=None, **kwargs):
        self.method_name = method_name
        super(MethodField, self).__init__(**kwargs)

    def _populate_raw_value(self):
        """
        Override to avoid looking for the raw_value since we generate it
        """
        return

    def serialize_value(self):
        method = getattr(self.parent, self.method_name or 'get_{}'.format(self.field_name))
        return method(self.raw_data)


def declared_fields(cls):
    """
    (name, field) pairs declared on cls and its bases, in declaration order
    """
    fields = {}
    for klass in reversed(cls.__mro__):
        for field_name, field in vars(klass).items():
            if isinstance(field, Field):
                fields[field_name] = field
    return list(fields.items())

from collections import namedtuple
from unittest import TestCase

from cardtree.deserializers import MergeDeserializer
from cardtree.exceptions import ParseError
from cardtree.fields import (
    BooleanField, ConstantField, Field, FloatField, IntegerField, ListField, MethodField, NestedField, StringField,
    declared_fields,
)
from cardtree.linkage import MergeStep
from cardtree.serializers import MergeSerializer

Item = namedtuple('Item', ['field_name', 'source'])


class TestField(TestCase):

    def test_field_default(self):
        """
        Test a Field with default configuration
        """
        field = Field()
        value = 'field_name'
        field.bind(self, 'field_name', {'field_name': value})
        self.assertEqual(value, field.serialize_value())
        self.assertEqual(value, field.deserialize_value())
        self.assertEqual('field_name', field.source)

    def test_field_source_override(self):
        """
        Test a Field with source overriden
        """
        field = Field(source='source')
        value = 'field_name'
        field.bind(self, 'field_name', {'source': value})
        self.assertEqual(value, field.serialize_value())

    def test_field_object(self):
        """
        Test a Field reading an attribute of an object
        """
        field = Field(source='source')
        field.bind(self, 'field_name', Item('a', 'b'))
        self.assertEqual('b', field.serialize_value())

    def test_field_missing_required(self):
        """
        Test a missing required Field names its key
        """
        field = Field()
        with self.assertRaisesRegex(ParseError, 'Missing required field "field_name"'):
            field.bind(self, 'field_name', {})

    def test_field_missing_optional(self):
        """
        Test a missing optional Field takes its default
        """
        field = Field(required=False, default=3)
        field.bind(self, 'field_name', {})
        self.assertEqual(3, field.serialize_value())


class TestStringField(TestCase):

    def test_field_default(self):
        """
        Test a StringField with default configuration
        """
        field = StringField()
        field.bind(self, 'field_name', {'field_name': 'value'})
        self.assertIsInstance(field.serialize_value(), str)
        self.assertEqual('value', field.deserialize_value())

    def test_field_serialize_converts(self):
        """
        Test a StringField serializes any value as text
        """
        field = StringField()
        field.bind(self, 'field_name', {'field_name': 7})
        self.assertEqual('7', field.serialize_value())

    def test_field_deserialize_rejects(self):
        """
        Test a StringField refuses non-string input
        """
        field = StringField()
        field.bind(self, 'field_name', {'field_name': 7})
        with self.assertRaisesRegex(ParseError, 'Field "field_name" must be a string'):
            field.deserialize_value()


class TestIntegerField(TestCase):

    def test_field_default(self):
        """
        Test an IntegerField with default configuration
        """
        field = IntegerField()
        field.bind(self, 'field_name', {'field_name': 4})
        self.assertEqual(4, field.deserialize_value())
        self.assertEqual(4, field.serialize_value())

    def test_field_rejects_bool_and_float(self):
        """
        Test an IntegerField refuses booleans and fractions
        """
        for value in (True, 1.5, '3'):
            field = IntegerField()
            field.bind(self, 'field_name', {'field_name': value})
            with self.assertRaises(ParseError):
                field.deserialize_value()


class TestFloatField(TestCase):

    def test_field_accepts_int(self):
        """
        Test a FloatField widens integers
        """
        field = FloatField()
        field.bind(self, 'field_name', {'field_name': 2})
        self.assertIsInstance(field.deserialize_value(), float)
        self.assertEqual(2.0, field.deserialize_value())

    def test_field_rejects(self):
        """
        Test a FloatField refuses text and booleans
        """
        for value in ('0.5', False):
            field = FloatField()
            field.bind(self, 'field_name', {'field_name': value})
            with self.assertRaises(ParseError):
                field.deserialize_value()


class TestBooleanField(TestCase):

    def test_field_default(self):
        """
        Test a BooleanField with default configuration
        """
        field = BooleanField()
        field.bind(self, 'field_name', {'field_name': False})
        self.assertIs(False, field.deserialize_value())

    def test_field_rejects_int(self):
        """
        Test a BooleanField refuses 0 and 1
        """
        field = BooleanField()
        field.bind(self, 'field_name', {'field_name': 1})
        with self.assertRaisesRegex(ParseError, 'true or false'):
            field.deserialize_value()


class TestListField(TestCase):

    def test_field_items(self):
        """
        Test a ListField converts every item
        """
        field = ListField(FloatField())
        field.bind(self, 'field_name', {'field_name': [1, 2.5]})
        self.assertEqual((1.0, 2.5), field.deserialize_value())
        self.assertEqual([1.0, 2.5], field.serialize_value())

    def test_field_nested_lists(self):
        """
        Test a ListField of ListFields
        """
        field = ListField(ListField(IntegerField()))
        field.bind(self, 'field_name', {'field_name': [[0, 1], [2]]})
        self.assertEqual(((0, 1), (2,)), field.deserialize_value())

    def test_field_bad_item(self):
        """
        Test one bad item fails the whole list
        """
        field = ListField(IntegerField())
        field.bind(self, 'field_name', {'field_name': [0, 'x']})
        with self.assertRaisesRegex(ParseError, 'Field "field_name" must be an integer'):
            field.deserialize_value()

    def test_field_not_a_list(self):
        """
        Test strings and objects are not lists
        """
        for value in ('abc', {'a': 1}, 5):
            field = ListField()
            field.bind(self, 'field_name', {'field_name': value})
            with self.assertRaisesRegex(ParseError, 'must be a list'):
                field.deserialize_value()


class TestConstantField(TestCase):

    def test_field_object(self):
        """
        Test a ConstantField emits its value for objects
        """
        field = ConstantField(1)
        field.bind(self, 'version', Item('a', 'b'))
        self.assertEqual(1, field.serialize_value())

    def test_field_document(self):
        """
        Test a ConstantField checks the value of a document
        """
        field = ConstantField(1)
        field.bind(self, 'version', {'version': 1})
        self.assertEqual(1, field.deserialize_value())
        field = ConstantField(1)
        field.bind(self, 'version', {'version': 2})
        with self.assertRaisesRegex(ParseError, 'Unsupported version 2'):
            field.deserialize_value()


class TestMethodField(TestCase):

    def get_field_name(self, raw_data):
        return raw_data['a'] * 2

    def get_other(self, raw_data):
        return 'other'

    def test_field_default(self):
        """
        Test a MethodField calls get_<field name> on its parent
        """
        field = MethodField()
        field.bind(self, 'field_name', {'a': 2})
        self.assertEqual(4, field.serialize_value())

    def test_field_method_override(self):
        """
        Test a MethodField with method_name overriden
        """
        field = MethodField('get_other')
        field.bind(self, 'field_name', {})
        self.assertEqual('other', field.serialize_value())


class TestNestedField(TestCase):

    context = None

    def test_field_serialize(self):
        """
        Test a NestedField hands each item to its Serializer
        """
        field = NestedField(MergeSerializer, many=True)
        field.bind(self, 'merges', {'merges': [MergeStep(0, 1, 0.5, 3)]})
        self.assertEqual([{'left': 0, 'right': 1, 'distance': 0.5, 'new_id': 3}], field.serialize_value())

    def test_field_deserialize(self):
        """
        Test a NestedField hands its object to its Deserializer
        """
        field = NestedField(deserializer=MergeDeserializer)
        field.bind(self, 'merge', {'merge': {'left': 0, 'right': 1, 'distance': 0.5, 'new_id': 3}})
        self.assertEqual(MergeStep(0, 1, 0.5, 3), field.deserialize_value())

    def test_field_many_needs_list(self):
        """
        Test a NestedField with many=True refuses a single object
        """
        field = NestedField(deserializer=MergeDeserializer, many=True)
        field.bind(self, 'merges', {'merges': {'left': 0}})
        with self.assertRaisesRegex(ParseError, 'must be a list'):
            field.deserialize_value()


class TestDeclaredFields(TestCase):

    def test_inheritance(self):
        """
        Test fields of base classes come first and subclasses can override them
        """

        class Base(object):
            a = Field()
            b = Field()

        class Child(Base):
            b = StringField()
            c = Field()

        fields = declared_fields(Child)
        self.assertEqual(['a', 'b', 'c'], [name for name, _ in fields])
        self.assertIsInstance(dict(fields)['b'], StringField)

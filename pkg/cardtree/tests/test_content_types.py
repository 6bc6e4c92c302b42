import io
import json
import os
import sys
import tempfile
from unittest import TestCase

from mock import patch

from cardtree.content_types import CONTENT_TYPES, JSON, PlainText, TabSeparated
from cardtree.exceptions import ParseError
from cardtree.linkage import MergeStep
from cardtree.serializers import MergeSerializer

MERGES = [MergeStep(0, 1, 0.5, 3), MergeStep(3, 2, 1.25, 4)]


def raised(exc):
    try:
        raise exc
    except type(exc):
        return sys.exc_info()


class TestJSON(TestCase):
    """
    Test Content-Type: JSON handler
    """

    def test_json_free_form(self):
        """
        Test Content-Type: JSON without a serializer dumps the object as is
        """
        self.assertEqual({'hello': 'world'}, json.loads(JSON().serialize({'hello': 'world'})))

    def test_json_single_object(self):
        """
        Test Content-Type: JSON on a single object writes one document
        """
        data = json.loads(JSON(MergeSerializer).serialize(MERGES[0]))
        self.assertEqual({'left': 0, 'right': 1, 'distance': 0.5, 'new_id': 3}, data)

    def test_json_list(self):
        """
        Test Content-Type: JSON on a list writes an array in field order
        """
        text = JSON(MergeSerializer).serialize(MERGES)
        data = json.loads(text)
        self.assertIsInstance(data, list)
        self.assertEqual(2, len(data))
        self.assertEqual(['left', 'right', 'distance', 'new_id'], list(data[1]))
        self.assertTrue(text.endswith('\n'))

    def test_json_error(self):
        """
        Test Content-Type: JSON formats errors as an object
        """
        error = json.loads(JSON().format_error(*raised(ParseError('bad file', participant='p1'))))
        self.assertEqual('ParseError', error['error'])
        self.assertEqual('bad file (participant "p1")', error['message'])
        self.assertNotIn('stacktrace', error)

    def test_json_error_stacktrace(self):
        """
        Test Content-Type: JSON adds the traceback when debugging
        """
        with patch('cardtree.content_types.logger') as logger:
            logger.isEnabledFor.return_value = True
            error = json.loads(JSON().format_error(*raised(ValueError('boom'))))
        self.assertIsInstance(error['stacktrace'], list)


class TestTabSeparated(TestCase):
    """
    Test Content-Type: TSV handler
    """

    def test_tsv_rows(self):
        """
        Test Content-Type: TSV writes a header and one row per item
        """
        lines = TabSeparated(MergeSerializer).serialize(MERGES).splitlines()
        self.assertEqual('left\tright\tdistance\tnew_id', lines[0])
        self.assertEqual('3\t2\t1.25\t4', lines[2])
        self.assertEqual(3, len(lines))

    def test_tsv_empty(self):
        """
        Test Content-Type: TSV on no items writes nothing
        """
        self.assertEqual('', TabSeparated(MergeSerializer).serialize([]))


class TestPlainText(TestCase):
    """
    Test Content-Type: text handler
    """

    def test_text_default(self):
        """
        Test Content-Type: text falls back to name: value lines
        """
        text = PlainText(MergeSerializer).serialize(MERGES[0])
        self.assertEqual('left: 0\nright: 1\ndistance: 0.5\nnew_id: 3\n', text)

    def test_text_error(self):
        """
        Test Content-Type: text formats errors on one line
        """
        self.assertEqual('error: boom\n', PlainText().format_error(*raised(ValueError('boom'))))


class TestMakeResponse(TestCase):

    def test_stream(self):
        """
        Test output goes to the stream when no path is given
        """
        stream = io.StringIO()
        returned = PlainText().make_response('hello\n', stream=stream)
        self.assertEqual('hello\n', stream.getvalue())
        self.assertEqual('hello\n', returned)

    def test_path(self):
        """
        Test output goes to the file instead of the stream
        """
        stream = io.StringIO()
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'out.json')
            JSON().make_response('{}\n', path=path, stream=stream)
            with open(path, encoding='utf-8') as written:
                self.assertEqual('{}\n', written.read())
        self.assertEqual('', stream.getvalue())

    def test_registry(self):
        """
        Test every format is registered under its --format name
        """
        self.assertEqual({'json': JSON, 'tsv': TabSeparated, 'text': PlainText}, CONTENT_TYPES)

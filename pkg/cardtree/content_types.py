import json
import logging
from traceback import format_tb

logger = logging.getLogger(__name__)


class ContentType(object):
    """
    ContentType Base class

    For defining an output format. Manages the data format of a command's result.
    """

    CONTENT_TYPE = None
    # --format spelling
    NAME = None

    def __init__(self, serializer=None, context=None):
        self.serializer = serializer
        self.context = context

    def serialize(self, obj):
        """
        Serialize the result of a command into the correct format for this ContentType
        """
        if not isinstance(obj, list):
            item_list = [obj]
        else:
            item_list = obj
        items = self.serialize_item_list(item_list)
        return self.serialize_response(items)

    def serialize_item(self, item):
        """
        Serialize a single item
        """
        return self.serializer(raw_data=item, context=self.context).to_dict()

    def serialize_item_list(self, item_list):
        """
        Serialize a list of items according to the ContentType format
        """
        items = [self.serialize_item(item) for item in item_list]
        return items

    def serialize_response(self, items):
        raise NotImplementedError

    def make_response(self, return_format, path=None, stream=None):
        """
        Write the formatted output to `path`, or to `stream` when no path is given
        """
        if path is None:
            if stream is not None:
                stream.write(return_format)
            return return_format
        with open(path, 'w', encoding='utf-8') as out:
            out.write(return_format)
        logger.info('wrote %s (%s)', path, self.CONTENT_TYPE)
        return return_format

    def format_error(self, exc_type, exc_value, exc_traceback):
        return 'error: {}\n'.format(exc_value)


class JSON(ContentType):
    """
    Content-Type: application/json
    """

    CONTENT_TYPE = 'application/json'
    NAME = 'json'

    def serialize(self, obj):
        """
        Override serialization to allow for free-form JSON output
        """
        if self.serializer is None:
            return json.dumps(obj, indent=2) + '\n'
        else:
            return super(JSON, self).serialize(obj)

    def serialize_response(self, items):
        document = items[0] if len(items) == 1 else items
        return json.dumps(document, indent=2) + '\n'

    def format_error(self, exc_type, exc_value, exc_traceback):
        error = {'error': exc_type.__name__, 'message': str(exc_value)}
        if exc_traceback is not None and logger.isEnabledFor(logging.DEBUG):
            error['stacktrace'] = format_tb(exc_traceback)
        return json.dumps(error, indent=2) + '\n'


class TabSeparated(ContentType):
    """
    Content-Type: text/tab-separated-values

    One header row with the serializer's field names, one row per item.
    """

    CONTENT_TYPE = 'text/tab-separated-values'
    NAME = 'tsv'

    def serialize_response(self, items):
        if not items:
            return ''
        header = list(items[0])
        lines = ['\t'.join(header)]
        for item in items:
            lines.append('\t'.join(_cell(item[name]) for name in header))
        return '\n'.join(lines) + '\n'


class PlainText(ContentType):
    """
    Content-Type: text/plain
    """

    CONTENT_TYPE = 'text/plain'
    NAME = 'text'

    def serialize_item(self, item):
        return self.serializer(raw_data=item, context=self.context).to_text()

    def serialize_response(self, items):
        return '\n\n'.join(items) + '\n'


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    return str(value)


CONTENT_TYPES = {content_type.NAME: content_type for content_type in (JSON, TabSeparated, PlainText)}

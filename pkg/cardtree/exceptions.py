class CardTreeError(Exception):
    """
    Base class for every error raised by cardtree
    """


class ArgumentError(CardTreeError, ValueError):
    """
    A precondition of an operation was violated
    """


class DegenerateInputError(ArgumentError):
    """
    The input carries no information the operation can work with (e.g. all leaves identical)
    """


class OracleLimitError(ArgumentError):
    """
    An exhaustive oracle was asked to enumerate more than it is allowed to
    """


class ParseError(CardTreeError, ValueError):
    """
    A card-sort or report file does not follow the documented schema
    """

    def __init__(self, message, participant=None, label=None):
        self.participant = participant
        self.label = label
        details = []
        if participant is not None:
            details.append('participant "{}"'.format(participant))
        if label is not None:
            details.append('label "{}"'.format(label))
        if details:
            message = '{} ({})'.format(message, ', '.join(details))
        super().__init__(message)


class UsageError(CardTreeError):
    """
    The command line could not be understood
    """

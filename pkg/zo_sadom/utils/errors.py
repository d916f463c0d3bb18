class BadSpec(ValueError):
    """ A specification (graph sequence, problem) is invalid. """


class Disconnected(ValueError):
    """ No connected graph could be generated within the retry budget. """


class SingularTopology(ValueError):
    """ A Laplacian has no usable positive spectrum. """


class DimensionMismatch(ValueError):
    """ Array shapes do not agree. """


class Empty(ValueError):
    """ A non-empty sequence was required. """


class ParseError(ValueError):
    """ Malformed LIBSVM input. """

    def __init__(self, message: str, line: int = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IndexOutOfRange(ParseError):
    """ A LIBSVM feature index exceeds the declared dimension. """


class TooFewSamples(ValueError):
    """ Fewer samples than nodes. """


class DegenerateData(ValueError):
    """ The data Gram matrix has no positive spectrum. """


class NoConvergence(RuntimeError):
    """ An iterative solver hit its iteration cap. """


class SchemeMismatch(ValueError):
    """ The oracle scheme is not valid for the requested operation. """


class MissingConstant(ValueError):
    """ A problem constant needed by a bound is not available. """


class BadConstants(ValueError):
    """ Problem constants violate 0 < mu <= L, chi >= 1 or beta <= 1/(2L). """


class NoReference(ValueError):
    """ A reference solution is required but missing. """


class ConfigError(ValueError):
    """ Invalid experiment configuration. """

    def __init__(self, message: str, key: str = None, location: str = None):
        self.key = key
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class UsageError(ValueError):
    """ Invalid command line. """

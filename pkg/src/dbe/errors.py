"""Exception hierarchy shared by every module of the toolkit."""


class DBEError(Exception):
    """Base class for all toolkit errors."""


class InvalidBits(DBEError, ValueError):
    pass


class SearchExhausted(DBEError, RuntimeError):
    pass


class BackendMismatch(DBEError, TypeError):
    pass


class MalformedEncoding(DBEError, ValueError):
    pass


class NotInSubgroup(MalformedEncoding):
    pass


class IndexOutOfRange(DBEError, ValueError):
    pass


class MalformedKey(DBEError, ValueError):
    """A public key does not have the index structure its position requires."""


class MalformedHeader(DBEError, ValueError):
    pass


class MissingKey(DBEError, LookupError):
    pass


class InvalidKey(DBEError, ValueError):
    """A supplied public key failed the pairing validity checks."""


class EmptySet(DBEError, ValueError):
    pass


class NonDistinctInputs(DBEError, ValueError):
    pass


class ProtocolViolation(DBEError):
    """An adversary broke a query or challenge constraint of a security game."""


class DirectoryError(DBEError):
    pass


class AlreadyExists(DirectoryError, FileExistsError):
    pass


class BindingError(DirectoryError):
    pass


class DuplicateIndex(DirectoryError):
    pass


class StrictModeInvalid(DirectoryError):
    pass


class MissingIndex(DirectoryError, LookupError):
    pass


class UnvalidatedKey(DirectoryError):
    pass

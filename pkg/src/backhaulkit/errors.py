"""Exception hierarchy shared by all modules."""


class BackhaulKitError(Exception):
    """Base class for every error raised by this package."""


class InputError(BackhaulKitError, ValueError):
    """An argument or record violates a documented precondition."""


class DomainError(InputError):
    """A value lies outside the domain on which a function is defined."""


class CatalogLookupError(BackhaulKitError, KeyError):
    """An identifier is not present in a bundled registry or catalog."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class ConfigurationError(BackhaulKitError):
    """A bundled data file is missing or malformed."""

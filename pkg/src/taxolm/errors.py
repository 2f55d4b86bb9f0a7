"""Exception types shared across the toolkit."""


class TaxoLMError(Exception):
    """Base class for all toolkit errors."""


class DataFormatError(TaxoLMError):
    """A file, row or table does not match its declared format."""


class CapabilityError(TaxoLMError):
    """A backend was asked for a capability its kind does not provide."""

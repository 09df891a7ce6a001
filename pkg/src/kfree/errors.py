"""Exception types shared across the library, mapped to CLI exit codes."""


class InvalidArgumentError(ValueError):
    """A precondition on user-supplied arguments was violated (CLI exit 2)."""


class ResourceLimitError(RuntimeError):
    """A scan or enumeration would exceed the configured cap (CLI exit 3)."""


class UnsupportedWindowError(ValueError):
    """The operation has a closed form only for the k-free window family."""

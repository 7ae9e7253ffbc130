"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: configuration problems exit
with 2, numerical blow-ups with 3, and I/O failures (plain OSError) with 4.
"""


class ConfigurationError(ValueError):
    """Inconsistent dimensions, invalid gains, or a bad scenario config."""


class GainDesignError(ConfigurationError):
    """Closed-form observer gain design is not applicable; supply L1 directly."""


class BlowUpError(RuntimeError):
    """A simulated state became non-finite; message names the field and time."""

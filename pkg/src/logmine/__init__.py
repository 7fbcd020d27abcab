"""Log-to-logic compiler: event logs to process trees, pattern expressions,
temporal specifications and monadic first-order verification problems."""

__version__ = "0.1.0"

"""Exception types shared across the package.

Each class maps to one CLI exit code so failures stay distinguishable
from the shell: InfeasibleError -> 1, InputFormatError -> 2,
SizeGuardError -> 3, SynthesisExhaustedError -> 4.
"""

from __future__ import annotations


class InputFormatError(ValueError):
    """Malformed or inconsistent input data (files, parameters)."""


class SizeGuardError(RuntimeError):
    """Instance exceeds a hard size guard; refuse rather than degrade."""


class InfeasibleError(RuntimeError):
    """The requested object provably does not exist for this instance."""


class SynthesisExhaustedError(RuntimeError):
    """Coefficient search gave up after the retry budget."""

"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: contract violations exit with 2,
numeric aborts with 3.
"""


class ContractViolationError(ValueError):
    """An input or configuration violates a documented precondition."""


class UnknownBandError(ContractViolationError):
    """A frequency band is not registered with the model.

    Unknown bands must go through explicit zero-shot evaluation
    (``allow_unknown_band=True``) or few-shot registration; silent
    clamping to a known band is never performed.
    """


class StaleCheckpointError(ContractViolationError):
    """A mapper checkpoint references codec checkpoints with different hashes."""


class NumericAbortError(RuntimeError):
    """Training hit a non-finite loss; the last good checkpoint is retained."""

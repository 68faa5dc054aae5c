"""
Exception hierarchy for marginal-pgm.

Every error raised by the library derives from :class:`PGMError` and names the
component it comes from, so the command line can report module-qualified
messages.
"""
from typing import Optional


class PGMError(Exception):
    """Base class for all library errors."""

    component = "core"

    def qualified(self) -> str:
        """Return the message prefixed with the originating component."""
        return f"[{self.component}] {self}"


# tensor-core

class TensorCoreError(PGMError):
    component = "tensor-core"


class DomainMismatchError(TensorCoreError):
    """Raised when two factors are defined over different domains."""
    pass


class CliqueError(TensorCoreError):
    """Raised for attribute sets that are not valid for an operation."""
    pass


class FactorSpaceError(TensorCoreError):
    """Raised when a factor is in the wrong (linear/log) space."""
    pass


class DegenerateFactorError(TensorCoreError):
    """Raised when a log-space factor has no finite mass."""
    pass


class InconsistentMarginalsError(TensorCoreError):
    """Raised when clique marginals disagree on a shared separator."""
    pass


# junction-tree

class JunctionTreeError(PGMError):
    component = "junction-tree"


class ParameterMismatchError(JunctionTreeError):
    """Raised when parameters are not keyed by the tree's cliques."""
    pass


class ModelTooLargeError(JunctionTreeError):
    """Raised when a junction tree exceeds the configured parameter cap."""

    def __init__(self, message: str, model_size=None):
        super().__init__(message)
        self.model_size = model_size


# estimation

class EstimationError(PGMError):
    component = "estimation"


class MeasurementError(EstimationError):
    """Raised for malformed linear measurements."""
    pass


class CliqueCoverageError(EstimationError):
    """Raised when a measurement clique is not covered by the marginals."""
    pass


class TotalUnidentifiableError(EstimationError):
    """Raised when no measurement identifies the record total."""
    pass


class UnsupportedLossError(EstimationError):
    """Raised when an algorithm cannot handle the requested loss."""
    pass


class NumericFailureError(EstimationError):
    """Raised when the loss or its gradient stops being finite."""

    def __init__(self, message: str, iteration: Optional[int] = None):
        super().__init__(message)
        self.iteration = iteration


# inference

class InferenceError(PGMError):
    component = "inference"


class BlockParameterError(InferenceError):
    """Raised for out-of-range query building-block parameters."""
    pass


class FeasibilityError(InferenceError):
    """Raised when an elimination step would exceed the working-set cap."""

    def __init__(self, message: str, clique=None):
        super().__init__(message)
        self.clique = clique


# mechanisms

class MechanismError(PGMError):
    component = "mechanisms"


class BudgetExceededError(MechanismError):
    """Raised when a debit would exceed the privacy budget."""
    pass


class DegenerateWorkloadError(MechanismError):
    """Raised when a workload clique has zero true answer mass."""
    pass


# cli

class CLIError(PGMError):
    component = "cli"


class ConfigError(CLIError):
    """Raised for invalid run configurations."""
    pass


class DatasetError(CLIError):
    """Raised when a dataset cannot be read or coded."""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message)
        self.line = line

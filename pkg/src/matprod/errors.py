"""Error taxonomy shared across the package.

Every error carries a stable machine-readable ``code`` so the CLI can emit
structured error objects. Mathematical side conditions of the bounds are NOT
errors; they are reported on the result objects themselves.
"""


class MatprodError(Exception):
    """Base class; ``code`` is the stable identifier."""

    code = "error"


class InvalidInputError(MatprodError):
    """Malformed data: bad shapes, non-finite entries, bad serialized form."""

    code = "invalid-input"


class InvalidParameterError(MatprodError):
    """Out-of-range knobs: p < 1, q outside [2, p], nonpositive trials, ..."""

    code = "invalid-parameter"


class MissingUniformBoundsError(MatprodError):
    """A bound requiring almost-sure factor statistics got stats without them."""

    code = "missing-uniform-bounds"


class UnsupportedEnsembleError(MatprodError):
    """An operation needs ensemble features (mean, finite support) that are absent."""

    code = "unsupported-ensemble"


class EnumerationInfeasibleError(MatprodError):
    """Exact enumeration would exceed the outcome budget."""

    code = "enumeration-infeasible"

    def __init__(self, message, required, budget):
        super().__init__(message)
        self.required = required
        self.budget = budget


class InvalidConstructionError(MatprodError):
    """A verification construction violated its own contract."""

    code = "invalid-construction"


class NothingToCheckError(MatprodError):
    """A dominance check was invoked with no applicable bound/quantity pairs."""

    code = "nothing-to-check"

"""Exception hierarchy shared across the toolkit."""


class FaircauseError(Exception):
    """Base class for all toolkit errors."""


# --- graph construction and queries ---------------------------------------

class CycleError(FaircauseError):
    """The edge set admits a directed cycle."""

    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__("cycle detected: " + " -> ".join(self.cycle))


class UnknownNodeError(FaircauseError):
    """A variable name does not belong to the graph."""


class DuplicateEdgeError(FaircauseError):
    """The same directed edge was given more than once."""


class OverlapError(FaircauseError):
    """Node sets required to be disjoint overlap."""


class PathExplosionError(FaircauseError):
    """Path enumeration exceeded the hard cap."""


# --- structural causal models ----------------------------------------------

class ModelError(FaircauseError):
    """A structural model fails validation (totality, probabilities, domains)."""


class BudgetExceededError(FaircauseError):
    """Exact enumeration would exceed the configuration budget."""


class DomainError(FaircauseError):
    """A value lies outside the declared domain of its variable."""


class UnsupportedModelError(FaircauseError):
    """The model representation cannot answer this query class."""


class ImpossibleObservationError(FaircauseError):
    """Evidence has probability zero under the model."""


class InvalidPathSelectionError(FaircauseError):
    """An edge selection is not part of any directed path of interest."""


class ParameterRangeError(FaircauseError):
    """A scenario parameter lies outside its admissible range."""


# --- estimation -------------------------------------------------------------

class EmptyStratumError(FaircauseError):
    """A conditioning stratum required by an estimator contains no rows."""


class NotIdentifiableError(FaircauseError):
    """The requested causal quantity is not identifiable from the given inputs."""


class PositivityError(FaircauseError):
    """A covariate stratum lacks support for some sensitive-attribute value."""


class TooManyDegenerateReplicatesError(FaircauseError):
    """More than the tolerated share of bootstrap replicates failed."""


# --- assumption checking ----------------------------------------------------

class MixedTypeError(FaircauseError):
    """A test requires all-categorical or all-numeric columns."""


class InsufficientDataError(FaircauseError):
    """Too few usable rows to form the test statistic."""


class UnknownColumnError(FaircauseError):
    """A named column is not present in the dataset."""


class ColumnGraphMismatchError(FaircauseError):
    """Graph variables and dataset columns do not line up."""


# --- spec files and datasets --------------------------------------------------

class SpecSyntaxError(FaircauseError):
    """Graph-spec text that does not lex or parse; carries line and column."""

    def __init__(self, message, line, column):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class SpecSemanticError(FaircauseError):
    """Well-formed graph-spec text with inconsistent content."""


class SchemaMismatchError(FaircauseError):
    """CSV columns do not match the declared variables."""


class EmptyFileError(FaircauseError):
    """A dataset file contains no data rows."""

"""Exception taxonomy shared across the package.

Every error raised by spacesteer derives from SpacesteerError so callers can
catch one base. The CLI maps the three broad families onto exit codes:
usage problems are handled by the CLI itself (1), anything under
ValidationError exits 2, anything under GatewayError exits 3.
"""

from __future__ import annotations


class SpacesteerError(Exception):
    """Base class for all package errors."""


class ValidationError(SpacesteerError):
    """Input or state failed a structural or semantic check."""


# --- workspace ---------------------------------------------------------------

class WorkspaceError(ValidationError):
    pass


class UnresolvedReference(WorkspaceError):
    """An edit or layer entry points at an id or index that does not exist."""


class DuplicateId(WorkspaceError):
    pass


class DuplicateMembership(WorkspaceError):
    """A document was assigned to more than one cluster."""


class SpanOutOfRange(WorkspaceError):
    """A highlight span falls outside its document body or mismatches it."""


class InvalidEdit(WorkspaceError):
    """An edit payload is malformed (empty text, self-connection, ...)."""


class MalformedFile(WorkspaceError):
    """A workspace file could not be parsed against the schema."""


class UnsupportedVersion(WorkspaceError):
    pass


# --- board ingest ------------------------------------------------------------

class BoardError(ValidationError):
    pass


class MalformedExport(BoardError):
    pass


class AmbiguousParent(BoardError):
    """A floating sticky overlaps more than one candidate parent."""


# --- conditions / compiler ---------------------------------------------------

class InvalidCondition(ValidationError):
    """Condition flags violate an implication (clustering needs filtering...)."""


class UnknownCondition(ValidationError):
    pass


class CompileError(ValidationError):
    pass


class NoClusters(CompileError):
    """Clustering was requested but the workspace has no clusters."""


class MissingLayer(CompileError):
    """A flag is enabled but the corresponding workspace layer is empty."""


# --- gateway -----------------------------------------------------------------

class GatewayError(SpacesteerError):
    pass


class AuthError(GatewayError):
    """Credentials rejected; never retried."""


class RateLimited(GatewayError):
    pass


class ProviderError(GatewayError):
    """The provider answered with a retryable server-side failure."""


class ProviderTimeout(GatewayError):
    pass


class InvalidRequest(ValidationError):
    """A completion request failed local validation before any network use."""


# --- rubric ------------------------------------------------------------------

class RubricError(ValidationError):
    pass


class MalformedRubric(RubricError):
    pass


class TotalMismatch(RubricError):
    """Declared rubric total does not equal the sum of item points."""


class GradingError(ValidationError):
    pass


class MalformedGrading(GradingError):
    """The judge's grading response contained no parseable JSON object."""


class OffRubricValue(GradingError):
    """A graded value is not in the item's allowed score set."""


class MissingItem(GradingError):
    """The grading response left out one or more rubric items."""


# --- harness / analytics / service -------------------------------------------

class PlanError(ValidationError):
    pass


class UnknownRun(ValidationError):
    pass


class NoData(ValidationError):
    """Statistics were requested for a condition with no successful runs."""


class UnknownWorkspace(ValidationError):
    pass

"""Compile sensemaking workspaces into steered LLM summarization prompts.

The package turns a visual analysis workspace (documents, highlights,
annotations, clusters, connections) into role-structured chat prompts,
runs condition matrices against an LLM, grades the resulting reports with
a two-stage rubric judge, and summarizes scores per condition.
"""

from .analytics import (
    HUMAN_BASELINE,
    REFERENCE_MEANS,
    ConditionSummary,
    HumanBaseline,
    condition_summary,
    export_summaries,
    five_numbers,
    parse_summaries_csv,
    subitem_breakdown,
    summarize_all,
)
from .board import (
    BoardElement,
    BoardExport,
    Disposition,
    MappingReport,
    export_board,
    import_board,
    parse_board,
)
from .canonical import canonical_json, digest_of, sha256_hex
from .compiler import (
    Message,
    PromptBundle,
    PromptTemplate,
    assemble_prompt,
    compile_connections,
    compile_insight_level,
    compile_structure_level,
    compile_text_level,
    load_default_template,
    load_template,
)
from .conditions import FLAG_NAMES, PRESETS, Condition, condition_from_dict, get_condition
from .edits import (
    AddAnnotation,
    AddConnection,
    AddDocument,
    AddHighlight,
    AssignToCluster,
    CreateCluster,
    RemoveAnnotation,
    RemoveConnection,
    RemoveFromCluster,
    RemoveHighlight,
    RenameCluster,
    SetRelevance,
    WorkspaceEdit,
    apply_edit,
    edit_to_dict,
    parse_edit,
)
from .errors import (
    GatewayError,
    GradingError,
    SpacesteerError,
    ValidationError,
)
from .gateway import (
    CompletionRequest,
    CompletionResult,
    EchoProvider,
    Gateway,
    MockProvider,
    OpenAICompatProvider,
    gateway_from_env,
)
from .harness import (
    ExperimentPlan,
    RunRecord,
    RunStore,
    default_temperature_schedule,
    load_plan,
    make_plan,
    regrade,
    run_matrix,
    run_single,
)
from .rubric import (
    GradeBreakdown,
    GradeResult,
    Rubric,
    RubricItem,
    grade_report,
    load_default_rubric,
    load_rubric,
    percentage_of,
    round1,
)
from .workspace import (
    Annotation,
    Cluster,
    Connection,
    Document,
    Highlight,
    Ref,
    Violation,
    Workspace,
    deserialize,
    serialize,
    validate,
    workspace_from_dict,
    workspace_to_dict,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # workspace
    "Document", "Highlight", "Annotation", "Cluster", "Ref", "Connection",
    "Workspace", "Violation", "validate", "serialize", "deserialize",
    "workspace_to_dict", "workspace_from_dict",
    # edits
    "WorkspaceEdit", "AddDocument", "SetRelevance",
    "AddHighlight", "RemoveHighlight", "AddAnnotation", "RemoveAnnotation",
    "CreateCluster", "RenameCluster", "AssignToCluster", "RemoveFromCluster",
    "AddConnection", "RemoveConnection", "apply_edit", "parse_edit",
    "edit_to_dict",
    # conditions
    "Condition", "FLAG_NAMES", "PRESETS", "get_condition",
    "condition_from_dict",
    # compiler
    "PromptTemplate", "Message", "PromptBundle", "assemble_prompt",
    "compile_text_level", "compile_insight_level", "compile_structure_level",
    "compile_connections", "load_template", "load_default_template",
    # gateway
    "Gateway", "CompletionRequest", "CompletionResult",
    "OpenAICompatProvider", "MockProvider", "EchoProvider",
    "gateway_from_env",
    # rubric
    "Rubric", "RubricItem", "GradeBreakdown", "GradeResult", "grade_report",
    "load_rubric", "load_default_rubric", "round1", "percentage_of",
    # harness
    "ExperimentPlan", "RunRecord", "RunStore", "make_plan", "load_plan",
    "run_single", "run_matrix", "regrade", "default_temperature_schedule",
    # analytics
    "HumanBaseline", "HUMAN_BASELINE", "REFERENCE_MEANS", "ConditionSummary",
    "five_numbers",
    "condition_summary", "summarize_all", "subitem_breakdown",
    "export_summaries", "parse_summaries_csv",
    # board
    "BoardElement", "BoardExport", "Disposition", "MappingReport",
    "parse_board", "import_board", "export_board",
    # canonical + errors
    "canonical_json", "sha256_hex", "digest_of",
    "SpacesteerError", "ValidationError", "GatewayError", "GradingError",
]

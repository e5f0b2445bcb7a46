from .entities import EntityRef, entity_totals
from .graph import (
    DependencyGraph,
    PipelineNode,
    ancestors,
    build_graph,
    graph_from_dict,
    load_default_graph,
    load_graph,
)
from .verdicts import (
    CATEGORY_ORDER,
    OutcomeCategory,
    QcVerdict,
    VerdictStatus,
    latest_verdicts,
    parse_timestamp,
    utc_now,
)

__all__ = [
    "EntityRef",
    "entity_totals",
    "DependencyGraph",
    "PipelineNode",
    "ancestors",
    "build_graph",
    "graph_from_dict",
    "load_graph",
    "load_default_graph",
    "CATEGORY_ORDER",
    "OutcomeCategory",
    "QcVerdict",
    "VerdictStatus",
    "latest_verdicts",
    "parse_timestamp",
    "utc_now",
]

from .app import QcService, ServiceConfig, create_app
from .bundle import (
    diagnostics_json_bytes,
    list_assets,
    load_diagnostics,
    render_assets,
    run_node_diagnostics,
    write_diagnostics,
)
from .queue import ItemKey, LeaseTable, build_items, dependency_statuses, parse_item_id

__all__ = [
    "ItemKey",
    "LeaseTable",
    "QcService",
    "ServiceConfig",
    "build_items",
    "create_app",
    "dependency_statuses",
    "diagnostics_json_bytes",
    "list_assets",
    "load_diagnostics",
    "parse_item_id",
    "render_assets",
    "run_node_diagnostics",
    "write_diagnostics",
]

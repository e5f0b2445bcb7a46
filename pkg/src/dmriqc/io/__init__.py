from .gradients_io import read_gradients, write_gradients
from .ledger import VerdictLedger, append_verdict, load_ledger, verdict_line
from .manifest import DatasetManifest, load_manifest, validate_manifest
from .nifti import Volume, read_nifti, write_nifti
from .tables import (
    read_matrix_csv,
    read_motion_params,
    read_outlier_map,
    write_matrix_csv,
    write_motion_params,
    write_outlier_map,
)
from .tck import read_tck, write_tck

__all__ = [
    "DatasetManifest",
    "VerdictLedger",
    "Volume",
    "append_verdict",
    "load_ledger",
    "load_manifest",
    "read_gradients",
    "read_matrix_csv",
    "read_motion_params",
    "read_nifti",
    "read_outlier_map",
    "read_tck",
    "validate_manifest",
    "verdict_line",
    "write_gradients",
    "write_matrix_csv",
    "write_motion_params",
    "write_nifti",
    "write_outlier_map",
    "write_tck",
]

from .chisq import SliceChiSquare, chi_square_slices
from .directions import load_directions, repulsion_directions
from .kernels import BACKEND
from .mask import auto_mask
from .phantom import PhantomData, PhantomSpec, generate_phantom
from .scalars import ScalarMaps, fa_md_from_eigenvalues, scalar_maps, sym3_eigenvalues
from .signal import (
    TENSOR_COMPONENTS,
    isotropic_tensor,
    matrix_to_tensor,
    predict_signal,
    quadratic_form,
    tensor_from_eigen,
    tensor_to_matrix,
)
from .tensor import DEFAULT_B_MAX, TensorFit, design_matrix, fit_tensor
from .tracking import Streamline, mean_length_mm, seed_lattice, track_streamlines
from .types import B0_MAX, DwiSeries, GradientTable

__all__ = [
    "BACKEND",
    "B0_MAX",
    "DEFAULT_B_MAX",
    "TENSOR_COMPONENTS",
    "DwiSeries",
    "GradientTable",
    "PhantomData",
    "PhantomSpec",
    "ScalarMaps",
    "SliceChiSquare",
    "Streamline",
    "TensorFit",
    "auto_mask",
    "chi_square_slices",
    "design_matrix",
    "fa_md_from_eigenvalues",
    "fit_tensor",
    "generate_phantom",
    "isotropic_tensor",
    "load_directions",
    "matrix_to_tensor",
    "mean_length_mm",
    "predict_signal",
    "quadratic_form",
    "repulsion_directions",
    "scalar_maps",
    "seed_lattice",
    "sym3_eigenvalues",
    "tensor_from_eigen",
    "tensor_to_matrix",
    "track_streamlines",
]

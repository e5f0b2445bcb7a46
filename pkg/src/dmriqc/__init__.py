"""dmriqc: hierarchy-aware quality control for diffusion MRI pipelines."""

__version__ = "0.1.0"

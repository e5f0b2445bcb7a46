from .image import decode_png, draw_text, heat_colormap, label_color, png_bytes, write_png
from .panels import (
    RenderSpec,
    glyph_params,
    render_comparison,
    render_connectome,
    render_label_overlay,
    render_montage,
    render_tensor_glyphs,
)

__all__ = [
    "RenderSpec",
    "decode_png",
    "draw_text",
    "glyph_params",
    "heat_colormap",
    "label_color",
    "png_bytes",
    "render_comparison",
    "render_connectome",
    "render_label_overlay",
    "render_montage",
    "render_tensor_glyphs",
    "write_png",
]

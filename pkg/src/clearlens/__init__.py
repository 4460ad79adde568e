"""clearlens: accessibility transcoding proxy.

Fetches any web page, strips the author presentation (stylesheets, inline
styles, presentational attributes, scripts), installs a high-contrast
Clear Print skin, and rewrites links so continued browsing flows back
through the service. Includes a batch evaluator for text-preservation and
load-time reports.
"""

__version__ = "0.1.0"

from .errors import ClearlensError
from .fetcher import FetchOptions, SourceUrl, fetch, parse_url
from .html_model import Document, parse_html, serialize, text_content
from .pipeline import AccessiblePage, TransformConfig, transform_bytes, transform_url
from .style_engine import ClearPrintPreset, apply_clearprint, contrast_ratio, load_presets

__all__ = [
    "AccessiblePage",
    "ClearPrintPreset",
    "ClearlensError",
    "Document",
    "FetchOptions",
    "SourceUrl",
    "TransformConfig",
    "apply_clearprint",
    "contrast_ratio",
    "fetch",
    "load_presets",
    "parse_html",
    "parse_url",
    "serialize",
    "text_content",
    "transform_bytes",
    "transform_url",
    "__version__",
]

"""End-to-end transformation: fetch, parse, style pass, link pass, serialize."""

import time
from dataclasses import dataclass, field

from .errors import MalformedUrl
from .fetcher import FetchedPage, FetchOptions, SourceUrl, fetch, parse_url
from .html_model import ensure_utf8_meta, parse_html, serialize
from .link_engine import drop_base_elements, rewrite_links, rewrite_resources
from .style_engine import ClearPrintPreset, style_pass


@dataclass(frozen=True)
class TransformConfig:
    preset: ClearPrintPreset
    service_base: str
    fetch: FetchOptions = FetchOptions()
    extra_query: str = ""  # e.g. "preset=yellow-on-black&scale=1.5"

    def __post_init__(self):
        base = parse_url(self.service_base)
        if base.serialized.rstrip("/") != self.service_base or self.service_base.endswith("/"):
            raise MalformedUrl(
                f"service_base must be a bare absolute URL without trailing slash: {self.service_base!r}"
            )


@dataclass
class TransformStats:
    styles_removed: int = 0
    scripts_removed: int = 0
    links_rewritten: int = 0


@dataclass
class AccessiblePage:
    source_url: SourceUrl
    html: bytes
    transform_duration: float  # milliseconds
    stats: TransformStats = field(default_factory=TransformStats)


def transform_fetched(page: FetchedPage, cfg: TransformConfig) -> AccessiblePage:
    """Run the style and link passes over one fetched page."""
    start = time.monotonic()
    doc = parse_html(page.body, page.charset, page.final_url)
    ensure_utf8_meta(doc)
    sweep = style_pass(doc, cfg.preset)
    links = rewrite_links(doc, cfg.service_base, cfg.extra_query)
    rewrite_resources(doc, doc.base_url)
    drop_base_elements(doc)
    html = serialize(doc)
    duration_ms = (time.monotonic() - start) * 1000.0
    return AccessiblePage(
        source_url=page.final_url,
        html=html,
        transform_duration=duration_ms,
        stats=TransformStats(
            styles_removed=sweep.styles_removed,
            scripts_removed=sweep.scripts_removed,
            links_rewritten=links,
        ),
    )


def transform_url(url: SourceUrl, cfg: TransformConfig) -> AccessiblePage:
    """Fetch a live page and transform it."""
    page = fetch(url, cfg.fetch)
    return transform_fetched(page, cfg)


LOCAL_BASE = "http://local.invalid/"


def transform_bytes(
    body: bytes,
    cfg: TransformConfig,
    charset: str = "utf-8",
    base_url: SourceUrl | None = None,
) -> AccessiblePage:
    """Transform raw markup that did not come from a fetch (files, tests)."""
    base = base_url if base_url is not None else parse_url(LOCAL_BASE)
    page = FetchedPage(
        requested_url=base,
        final_url=base,
        status=200,
        content_type="text/html",
        charset=charset,
        body=body,
        fetch_duration=0.0,
    )
    return transform_fetched(page, cfg)

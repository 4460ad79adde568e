"""Link pass: classify every anchor and point navigation back at the service.

Relative and absolute http(s) targets are resolved and rewritten to the
service's /render endpoint so that every page reached from a transformed
page is itself transformed. Fragments and mailto/tel links pass through;
javascript:, data:, and other non-navigable schemes neutralize to "#".
Image/poster URLs are absolutized (not proxied) so media keeps rendering
from the origin.
"""

import re
from dataclasses import dataclass
from urllib.parse import quote, urljoin

from .errors import MalformedUrl, UnsupportedScheme
from .fetcher import SourceUrl, parse_url
from .html_model import Document

RELATIVE = "relative"
ABSOLUTE = "absolute"
FRAGMENT = "fragment"
NON_HTTP = "non_http"

# schemes that remain meaningful once scripts are gone
_PASSTHROUGH_SCHEMES = frozenset(("mailto", "tel"))

_SCHEME_RE = re.compile(r"^([A-Za-z][A-Za-z0-9+.\-]*):")


@dataclass(frozen=True)
class Classification:
    kind: str
    scheme: str = ""


@dataclass(frozen=True)
class LinkComponent:
    node: int
    attr: str
    original: str
    classification: Classification
    resolved: SourceUrl | None = None


@dataclass(frozen=True)
class UrlParts:
    base: str            # scheme://host[:port]
    path_and_query: str  # everything after the authority (incl. #fragment)


def classify(href: str) -> Classification:
    """Relative / absolute / fragment / non-http split for one href."""
    if href.startswith("#"):
        return Classification(FRAGMENT)
    if href.startswith("//"):
        # protocol-relative: absolute in all but scheme
        return Classification(ABSOLUTE)
    m = _SCHEME_RE.match(href)
    if m:
        scheme = m.group(1).lower()
        if scheme in ("http", "https"):
            return Classification(ABSOLUTE, scheme)
        return Classification(NON_HTTP, scheme)
    return Classification(RELATIVE)


def _remove_dot_segments(path: str) -> str:
    # RFC 3986 section 5.2.4; urljoin skips this for network-path references
    inp = path
    out: list = []
    while inp:
        if inp.startswith("../"):
            inp = inp[3:]
        elif inp.startswith("./"):
            inp = inp[2:]
        elif inp.startswith("/./") or inp == "/.":
            inp = "/" + inp[3:]
        elif inp.startswith("/../") or inp == "/..":
            inp = "/" + inp[4:]
            if out:
                out.pop()
        elif inp in (".", ".."):
            inp = ""
        else:
            cut = inp.find("/", 1)
            if cut == -1:
                out.append(inp)
                inp = ""
            else:
                out.append(inp[:cut])
                inp = inp[cut:]
    return "".join(out)


def resolve(base: SourceUrl, href: str) -> SourceUrl:
    """Resolve a relative or absolute reference against a base URL."""
    from dataclasses import replace

    try:
        url = parse_url(urljoin(base.serialized, href))
    except UnsupportedScheme as exc:
        raise MalformedUrl(str(exc)) from None
    normalized = _remove_dot_segments(url.path)
    if normalized != url.path:
        url = replace(url, path=normalized or "/")
    return url


def split_base(url: SourceUrl) -> UrlParts:
    """Split an absolute URL into its base (authority) and the remainder."""
    rest = url.path
    if url.query is not None:
        rest += "?" + url.query
    if url.fragment is not None:
        rest += "#" + url.fragment
    return UrlParts(base=url.origin, path_and_query=rest)


def extract_links(doc: Document) -> list:
    """One component per href-bearing anchor, in document order."""
    components = []
    for node in doc.iter_elements("a"):
        href = node.attrs.get("href")
        if href is None:
            continue
        cls = classify(href)
        resolved = None
        if cls.kind in (RELATIVE, ABSOLUTE):
            try:
                resolved = resolve(doc.base_url, href)
            except MalformedUrl:
                cls = Classification(NON_HTTP, "invalid")
        components.append(
            LinkComponent(
                node=node.id,
                attr="href",
                original=href,
                classification=cls,
                resolved=resolved,
            )
        )
    return components


def proxy_href(target: SourceUrl, service_base: str, extra_query: str = "") -> str:
    """Build the /render href for an absolute target (uppercase-hex encoding)."""
    href = f"{service_base}/render?url={quote(target.serialized, safe='')}"
    if extra_query:
        href += "&" + extra_query
    return href


def rewrite_link(link: LinkComponent, service_base: str, extra_query: str = "") -> str:
    """New href for one link component; unchanged values mean 'leave as is'."""
    kind = link.classification.kind
    if kind == FRAGMENT:
        return link.original
    if kind == NON_HTTP:
        if link.classification.scheme in _PASSTHROUGH_SCHEMES:
            return link.original
        return "#"
    if link.resolved is None:
        return "#"
    prefix = service_base + "/render?"
    if link.original.startswith(prefix) or link.resolved.serialized.startswith(prefix):
        return link.original  # already proxied
    return proxy_href(link.resolved, service_base, extra_query)


def rewrite_links(doc: Document, service_base: str, extra_query: str = "") -> int:
    """Rewrite every anchor href in place; returns how many changed."""
    changed = 0
    for link in extract_links(doc):
        new_href = rewrite_link(link, service_base, extra_query)
        if new_href != link.original:
            doc.nodes[link.node].attrs["href"] = new_href
            changed += 1
    return changed


def _absolutize(value: str, page_url: SourceUrl) -> str:
    if not value or classify(value).kind != RELATIVE:
        return value
    try:
        return resolve(page_url, value).serialized
    except MalformedUrl:
        return value


def _absolutize_srcset(value: str, page_url: SourceUrl) -> str:
    candidates = []
    for candidate in value.split(","):
        candidate = candidate.strip()
        if not candidate:
            continue
        parts = candidate.split(None, 1)
        parts[0] = _absolutize(parts[0], page_url)
        candidates.append(" ".join(parts))
    return ", ".join(candidates)


def rewrite_resources(doc: Document, page_url: SourceUrl) -> None:
    """Absolutize img src/srcset and video poster against the page URL."""
    for node in doc.iter_elements("img"):
        if "src" in node.attrs:
            node.attrs["src"] = _absolutize(node.attrs["src"], page_url)
        if "srcset" in node.attrs:
            node.attrs["srcset"] = _absolutize_srcset(node.attrs["srcset"], page_url)
    for node in doc.iter_elements("video"):
        if "poster" in node.attrs:
            node.attrs["poster"] = _absolutize(node.attrs["poster"], page_url)


def drop_base_elements(doc: Document) -> None:
    """Remove <base> elements: after rewriting, every URL is absolute and a
    stale base would hijack fragment navigation."""
    for node in list(doc.iter_elements("base")):
        doc.detach(node.id)

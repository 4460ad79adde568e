"""Page retrieval: URL parsing and HTTP fetching.

Fetches are stateless (no cookie jar, no cache); redirects are followed
manually so the hop limit, the final URL, and the overall deadline are
enforced exactly. Only http/https URLs are accepted anywhere.
"""

import codecs
import re
import time
from dataclasses import dataclass, field
from urllib.parse import urljoin, urlsplit

import requests

from .errors import (
    BodyTooLarge,
    FetchError,
    HttpError,
    MalformedUrl,
    NotHtml,
    Timeout,
    TooManyRedirects,
    UnsupportedScheme,
)

DEFAULT_PORTS = {"http": 80, "https": 443}
HTML_CONTENT_TYPES = ("text/html", "application/xhtml+xml")

_SCHEME_RE = re.compile(r"^([A-Za-z][A-Za-z0-9+.\-]*):")


@dataclass(frozen=True)
class SourceUrl:
    """A decomposed absolute http(s) URL."""

    raw: str
    scheme: str
    host: str
    port: int
    path: str
    query: str | None = None
    fragment: str | None = None

    @property
    def origin(self) -> str:
        """scheme://host[:port], default port omitted."""
        hostpart = f"[{self.host}]" if ":" in self.host else self.host
        if self.port == DEFAULT_PORTS[self.scheme]:
            return f"{self.scheme}://{hostpart}"
        return f"{self.scheme}://{hostpart}:{self.port}"

    @property
    def serialized(self) -> str:
        """Canonical string form; parses back to the same parts."""
        s = self.origin + self.path
        if self.query is not None:
            s += "?" + self.query
        if self.fragment is not None:
            s += "#" + self.fragment
        return s

    @property
    def request_target(self) -> str:
        """Serialized form without the fragment (what goes on the wire)."""
        s = self.origin + self.path
        if self.query is not None:
            s += "?" + self.query
        return s

    def parts(self):
        return (self.scheme, self.host, self.port, self.path, self.query, self.fragment)


@dataclass(frozen=True)
class FetchOptions:
    timeout: int = 15_000  # milliseconds
    max_redirects: int = 10
    max_body_bytes: int = 8 * 1024 * 1024
    user_agent: str = "clearlens/1.0"

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_redirects < 0:
            raise ValueError("max_redirects must be >= 0")
        if self.max_body_bytes <= 0:
            raise ValueError("max_body_bytes must be positive")


@dataclass
class FetchedPage:
    requested_url: SourceUrl
    final_url: SourceUrl
    status: int
    content_type: str
    charset: str
    body: bytes
    fetch_duration: float  # milliseconds


# Schemes we recognise as schemes even without "//" so that e.g.
# "localhost:8080/x" still reads as host:port rather than scheme "localhost".
_KNOWN_NON_HTTP = {
    "javascript", "mailto", "data", "tel", "file", "ftp", "ftps", "sftp",
    "ws", "wss", "gopher", "irc", "magnet", "news", "nntp", "sms", "ssh",
    "about", "blob", "chrome", "view-source",
}


def parse_url(raw: str) -> SourceUrl:
    """Decompose user-supplied text into a SourceUrl.

    Scheme-less input ("example.com", "localhost:8080/x") is given an http
    scheme; anything with an explicit non-http(s) scheme is rejected.
    """
    if not raw or not raw.strip():
        raise MalformedUrl("empty URL")
    text = raw.strip()

    m = _SCHEME_RE.match(text)
    if m:
        scheme = m.group(1).lower()
        rest = text[m.end():]
        if scheme in ("http", "https"):
            pass
        elif rest.startswith("//") or scheme in _KNOWN_NON_HTTP or not rest[:1].isdigit():
            raise UnsupportedScheme(f"unsupported scheme {scheme!r} in {raw!r}")
        else:
            # host:port shorthand such as "localhost:8080/x"
            text = "http://" + text
    else:
        text = "http://" + text

    try:
        parts = urlsplit(text)
        port = parts.port  # raises ValueError on junk ports
        host = parts.hostname
    except ValueError as exc:
        raise MalformedUrl(f"cannot parse {raw!r}: {exc}") from None

    if not host:
        raise MalformedUrl(f"no host in {raw!r}")
    scheme = parts.scheme.lower()
    if scheme not in DEFAULT_PORTS:
        raise UnsupportedScheme(f"unsupported scheme {scheme!r} in {raw!r}")
    if port is None:
        port = DEFAULT_PORTS[scheme]
    if not 1 <= port <= 65535:
        raise MalformedUrl(f"port out of range in {raw!r}")

    return SourceUrl(
        raw=raw,
        scheme=scheme,
        host=host,
        port=port,
        path=parts.path or "/",
        query=parts.query if parts.query else None,
        fragment=parts.fragment if parts.fragment else None,
    )


_REDIRECT_STATUSES = (301, 302, 303, 307, 308)


def fetch(url: SourceUrl, opts: FetchOptions = FetchOptions()) -> FetchedPage:
    """Retrieve an HTML page, following up to opts.max_redirects redirects.

    The whole operation shares one wall-clock budget of opts.timeout
    milliseconds. Oversized bodies are an error, never truncated.
    """
    start = time.monotonic()
    deadline = start + opts.timeout / 1000.0
    current = url
    hops = 0
    headers = {
        "User-Agent": opts.user_agent,
        "Accept": "text/html,application/xhtml+xml;q=0.9,*/*;q=0.1",
    }

    with requests.Session() as session:
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise Timeout(url.serialized)
            try:
                resp = session.get(
                    current.request_target,
                    headers=headers,
                    stream=True,
                    allow_redirects=False,
                    timeout=remaining,
                )
            except requests.Timeout:
                raise Timeout(url.serialized) from None
            except requests.RequestException as exc:
                raise FetchError(current.serialized, f"request failed: {exc}") from None

            if resp.status_code in _REDIRECT_STATUSES and "location" in resp.headers:
                resp.close()
                hops += 1
                if hops > opts.max_redirects:
                    raise TooManyRedirects(url.serialized, opts.max_redirects)
                target = urljoin(current.serialized, resp.headers["location"])
                current = parse_url(target)
                continue

            status = resp.status_code
            if not 200 <= status < 300:
                resp.close()
                raise HttpError(current.serialized, status)

            header_ct = resp.headers.get("Content-Type", "")
            media_type = header_ct.split(";", 1)[0].strip().lower()
            if media_type not in HTML_CONTENT_TYPES:
                resp.close()
                raise NotHtml(current.serialized, media_type)

            chunks = []
            size = 0
            try:
                for chunk in resp.iter_content(chunk_size=65536):
                    size += len(chunk)
                    if size > opts.max_body_bytes:
                        raise BodyTooLarge(current.serialized, opts.max_body_bytes)
                    chunks.append(chunk)
                    if time.monotonic() > deadline:
                        raise Timeout(url.serialized)
            except requests.Timeout:
                raise Timeout(url.serialized) from None
            except requests.RequestException as exc:
                raise FetchError(current.serialized, f"body read failed: {exc}") from None
            finally:
                resp.close()
            body = b"".join(chunks)
            break

    duration_ms = (time.monotonic() - start) * 1000.0
    charset = resolve_charset(header_ct, body)
    return FetchedPage(
        requested_url=url,
        final_url=current,
        status=status,
        content_type=media_type,
        charset=charset,
        body=body,
        fetch_duration=duration_ms,
    )


_HEADER_CHARSET_RE = re.compile(r"charset\s*=\s*\"?([A-Za-z0-9_.:\-]+)", re.IGNORECASE)
_META_CHARSET_RE = re.compile(rb"<meta[^>]{0,512}?charset\s*=\s*[\"']?([A-Za-z0-9_.:\-]+)", re.IGNORECASE)


def resolve_charset(content_type_header: str, body: bytes) -> str:
    """Charset resolution order: header parameter, then a meta sniff over the
    first 1024 body bytes, then UTF-8. Unknown names fall back to UTF-8."""
    candidate = None
    if content_type_header:
        m = _HEADER_CHARSET_RE.search(content_type_header)
        if m:
            candidate = m.group(1)
    if candidate is None:
        m = _META_CHARSET_RE.search(body[:1024])
        if m:
            candidate = m.group(1).decode("ascii", "replace")
    if candidate is None:
        return "utf-8"
    try:
        return codecs.lookup(candidate).name
    except LookupError:
        return "utf-8"

"""Exception hierarchy shared across the package."""


class ClearlensError(Exception):
    """Base class for every error raised by this package."""


class MalformedUrl(ClearlensError):
    pass


class UnsupportedScheme(ClearlensError):
    pass


class FetchError(ClearlensError):
    """Base class for failures while retrieving a page."""

    def __init__(self, url: str, message: str):
        super().__init__(f"{message} ({url})")
        self.url = url


class Timeout(FetchError):
    def __init__(self, url: str):
        super().__init__(url, "fetch timed out")


class TooManyRedirects(FetchError):
    def __init__(self, url: str, hops: int):
        super().__init__(url, f"redirect chain exceeded {hops} hops")
        self.hops = hops


class HttpError(FetchError):
    def __init__(self, url: str, status: int):
        super().__init__(url, f"upstream returned HTTP {status}")
        self.status = status


class NotHtml(FetchError):
    def __init__(self, url: str, content_type: str):
        super().__init__(url, f"not an HTML document: {content_type or 'no content type'}")
        self.content_type = content_type


class BodyTooLarge(FetchError):
    def __init__(self, url: str, limit: int):
        super().__init__(url, f"body exceeds {limit} bytes")
        self.limit = limit


class UnsupportedCharset(ClearlensError):
    pass


class MalformedColor(ClearlensError):
    pass


class AllUrlsFailed(ClearlensError):
    pass


class ConfigError(ClearlensError):
    pass

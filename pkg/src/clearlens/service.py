"""HTTP service: landing page, /render transcoding endpoint, report API.

Requests are handled synchronously (the pipeline is blocking I/O) in the
framework's worker pool; a bounded semaphore caps concurrent transforms so
excess requests queue instead of failing. Error responses are themselves
Clear Print pages: an inaccessible error page would defeat the point.
"""

import html as html_escaping
import os
import threading
from dataclasses import dataclass, field
from importlib import resources
from urllib.parse import quote

from fastapi import FastAPI, Request, Response
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import toml_lite
from .errors import (
    BodyTooLarge,
    ClearlensError,
    ConfigError,
    MalformedUrl,
    Timeout,
    UnsupportedScheme,
)
from .evaluator import evaluate_url_with_page
from .fetcher import FetchOptions, parse_url
from .pipeline import TransformConfig, transform_url
from .style_engine import ClearPrintPreset, load_presets, render_stylesheet

ENV_LISTEN = "CLEARLENS_LISTEN"
ENV_PUBLIC_BASE = "CLEARLENS_PUBLIC_BASE"

SCALE_MIN, SCALE_MAX = 0.75, 2.0


@dataclass(frozen=True)
class ServiceConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8710
    public_base: str = "http://127.0.0.1:8710"
    default_preset: str = "default"
    fetch: FetchOptions = FetchOptions()
    max_concurrent_transforms: int = 8
    presets_path: str | None = None

    def __post_init__(self):
        parse_url(self.public_base)  # must be a valid absolute http(s) URL
        if self.max_concurrent_transforms < 1:
            raise ConfigError("max_concurrent_transforms must be >= 1")


def load_config(path=None, env=None) -> ServiceConfig:
    """Build config with precedence: environment > file > defaults."""
    env = os.environ if env is None else env
    values: dict = {}
    fetch_kwargs: dict = {}
    if path is not None:
        data = toml_lite.load(path)
        service = data.get("service", {})
        for key in ("public_base", "default_preset", "max_concurrent_transforms", "presets_path"):
            if key in service:
                values[key] = service[key]
        if "listen" in service:
            values["listen_host"], values["listen_port"] = _split_listen(service["listen"])
        fetch_table = data.get("fetch", {})
        for key in ("timeout", "max_redirects", "max_body_bytes", "user_agent"):
            if key in fetch_table:
                fetch_kwargs[key] = fetch_table[key]
    if env.get(ENV_LISTEN):
        values["listen_host"], values["listen_port"] = _split_listen(env[ENV_LISTEN])
    if env.get(ENV_PUBLIC_BASE):
        values["public_base"] = env[ENV_PUBLIC_BASE]
    if fetch_kwargs:
        values["fetch"] = FetchOptions(**fetch_kwargs)
    return ServiceConfig(**values)


def _split_listen(listen: str) -> tuple:
    host, _, port = listen.rpartition(":")
    if not host or not port.isdigit():
        raise ConfigError(f"listen address must be host:port, got {listen!r}")
    return host, int(port)


def _landing_html(presets: dict, default_name: str) -> str:
    template = (
        resources.files(__package__).joinpath("web/landing.html").read_text("utf-8")
    )
    options = "\n".join(
        f'          <option value="{name}"{" selected" if name == default_name else ""}>{name}</option>'
        for name in presets
    )
    css = render_stylesheet(presets[default_name])
    return template.replace("/*CLEARPRINT*/", css).replace("<!--PRESET_OPTIONS-->", options)


def _error_page(status: int, title: str, detail: str, preset: ClearPrintPreset) -> HTMLResponse:
    body = (
        "<!DOCTYPE html><html><head><meta charset=\"utf-8\">"
        f"<title>{html_escaping.escape(title)}</title>"
        f"<style data-clearlens=\"1\">{render_stylesheet(preset)}</style></head>"
        f"<body><h1>{html_escaping.escape(title)}</h1>"
        f"<p>{html_escaping.escape(detail)}</p>"
        "<p><a href=\"/\">Back to the start page</a></p></body></html>"
    )
    return HTMLResponse(content=body, status_code=status)


def _clamp_scale(value: float) -> float:
    return min(SCALE_MAX, max(SCALE_MIN, value))


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    presets = load_presets(config.presets_path)
    if config.default_preset not in presets:
        raise ConfigError(f"default preset {config.default_preset!r} not in catalog")
    public = parse_url(config.public_base)
    limiter = threading.BoundedSemaphore(config.max_concurrent_transforms)

    app = FastAPI(openapi_url=None, docs_url=None, redoc_url=None)
    app.state.config = config
    app.state.presets = presets

    assets_dir = resources.files(__package__).joinpath("web/assets")
    app.mount("/assets", StaticFiles(directory=str(assets_dir)), name="assets")

    class RequestProblem(Exception):
        def __init__(self, status: int, title: str, detail: str, preset: ClearPrintPreset):
            super().__init__(detail)
            self.status = status
            self.title = title
            self.detail = detail
            self.preset = preset

    def build_transform_config(request: Request) -> tuple:
        """(target SourceUrl, TransformConfig) from the query parameters."""
        params = request.query_params
        raw_url = params.get("url")
        default = presets[config.default_preset]
        if raw_url is None or not raw_url.strip():
            raise RequestProblem(400, "Missing URL", "Provide a url query parameter.", default)
        preset_name = params.get("preset")
        if preset_name is not None and preset_name not in presets:
            raise RequestProblem(400, "Unknown preset", f"No preset named {preset_name!r}.", default)
        preset = presets[preset_name] if preset_name else default
        scale_raw = params.get("scale")
        scale = None
        if scale_raw is not None:
            try:
                scale = _clamp_scale(float(scale_raw))
            except ValueError:
                raise RequestProblem(
                    400, "Bad scale", f"scale must be a number, got {scale_raw!r}.", preset
                ) from None
            preset = preset.scaled(scale)
        try:
            target = parse_url(raw_url)
        except (MalformedUrl, UnsupportedScheme) as exc:
            raise RequestProblem(400, "Unusable URL", str(exc), preset) from None
        if (target.host, target.port) == (public.host, public.port):
            raise RequestProblem(
                400, "Refusing to transform own output",
                "The target points back at this service.", preset,
            )
        extra = []
        if preset_name is not None:
            extra.append(f"preset={quote(preset_name, safe='')}")
        if scale is not None:
            extra.append(f"scale={scale:g}")
        cfg = TransformConfig(
            preset=preset,
            service_base=config.public_base,
            fetch=config.fetch,
            extra_query="&".join(extra),
        )
        return target, cfg

    def as_problem(exc: ClearlensError, preset: ClearPrintPreset) -> RequestProblem:
        if isinstance(exc, Timeout):
            return RequestProblem(504, "Page timed out", str(exc), preset)
        if isinstance(exc, BodyTooLarge):
            return RequestProblem(413, "Page too large", str(exc), preset)
        return RequestProblem(502, "Page could not be transformed", str(exc), preset)

    @app.get("/healthz")
    def healthz() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.api_route("/", methods=["GET", "HEAD"])
    def home() -> HTMLResponse:
        return HTMLResponse(_landing_html(presets, config.default_preset))

    @app.get("/api/presets")
    def preset_catalog() -> JSONResponse:
        return JSONResponse(
            {"default": config.default_preset, "presets": sorted(presets)}
        )

    @app.get("/render")
    def render(request: Request) -> Response:
        try:
            target, cfg = build_transform_config(request)
        except RequestProblem as problem:
            return _error_page(problem.status, problem.title, problem.detail, problem.preset)
        try:
            with limiter:
                page = transform_url(target, cfg)
        except ClearlensError as exc:
            problem = as_problem(exc, cfg.preset)
            return _error_page(problem.status, problem.title, problem.detail, problem.preset)
        stats = page.stats
        return Response(
            content=page.html,
            media_type="text/html",
            headers={
                "X-Clearlens-Stats": (
                    f"styles_removed={stats.styles_removed};"
                    f"scripts_removed={stats.scripts_removed};"
                    f"links_rewritten={stats.links_rewritten}"
                )
            },
        )

    @app.get("/api/report")
    def report(request: Request) -> Response:
        try:
            target, cfg = build_transform_config(request)
        except RequestProblem as problem:
            return JSONResponse({"error": problem.detail}, status_code=problem.status)
        try:
            with limiter:
                row, page = evaluate_url_with_page("adhoc", target, cfg)
        except ClearlensError as exc:
            problem = as_problem(exc, cfg.preset)
            return JSONResponse({"error": problem.detail}, status_code=problem.status)
        return JSONResponse(
            {
                "url": row.url,
                "nlt_ms": row.nlt_ms,
                "wlt_ms": row.wlt_ms,
                "conversion_rate": row.conversion_rate,
                "stats": {
                    "styles_removed": page.stats.styles_removed,
                    "scripts_removed": page.stats.scripts_removed,
                    "links_rewritten": page.stats.links_rewritten,
                },
            }
        )

    return app


def run(config: ServiceConfig | None = None):
    """Blocking server entry point used by the CLI."""
    import uvicorn

    config = config or ServiceConfig()
    uvicorn.run(
        create_app(config),
        host=config.listen_host,
        port=config.listen_port,
        log_level="info",
    )

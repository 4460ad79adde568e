"""Acceptance gate: one test per release criterion, strictest stated bounds.

Run with `pytest tests/test_acceptance.py -s` to see one line per criterion.
"""

import random
import time
from urllib.parse import unquote

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from invariants import assert_output_invariants
from oracles import contrast_oracle, percent_encode, rfc3986_resolve
from origin import CORPUS_SIZE

from clearlens.cli import main as cli_main
from clearlens.evaluator import batch_evaluate
from clearlens.fetcher import FetchOptions, parse_url
from clearlens.html_model import parse_html, text_content
from clearlens.link_engine import extract_links, resolve, rewrite_link
from clearlens.pipeline import transform_bytes, transform_url
from clearlens.service import ServiceConfig, create_app
from clearlens.style_engine import contrast_ratio, load_presets

PUBLIC = "http://127.0.0.1:8710"

TABLE_ROWS = [
    ("B1", 3.85, 1.71, 79), ("B2", 6.7, 3.4, 63), ("B3", 7.91, 4.97, 86),
    ("B4", 10.81, 4.68, 84), ("B5", 15.88, 10.75, 96), ("B6", 7.42, 3.82, 85),
    ("B7", 9.48, 7.91, 86), ("B8", 13.08, 5.07, 78), ("B9", 17.6, 6.37, 81),
    ("B10", 10.16, 2.78, 79),
]


def ok(name: str):
    print(f"\n[acceptance] {name}: PASS")


@pytest.fixture(scope="module")
def batch(origin, default_cfg):
    start = time.perf_counter()
    summary = batch_evaluate(origin.page_urls(), default_cfg, parallelism=4)
    elapsed = time.perf_counter() - start
    return summary, elapsed


@pytest.fixture(scope="module")
def transformed_pages(origin, default_cfg):
    pages = []
    for label, url in origin.page_urls():
        pages.append(transform_url(parse_url(url), default_cfg))
    return pages


def test_published_batch_replay_means(tmp_path):
    """Replay of the published ten-batch table: mean 81.7, shown as 82%."""
    table = tmp_path / "batches.csv"
    table.write_text(
        "batch,url,nlt_ms,wlt_ms,conversion_rate\n"
        + "".join(f"{b},,{n},{w},{r}\n" for b, n, w, r in TABLE_ROWS)
    )
    out = tmp_path / "summary.csv"
    start = time.perf_counter()
    result = CliRunner().invoke(
        cli_main, ["eval", "--urls", str(table), "--out", str(out), "--replay"]
    )
    elapsed = time.perf_counter() - start
    assert result.exit_code == 0
    assert "mean_conversion_rate 81.7" in result.output
    assert "effective_conversion_rate 82%" in result.output
    assert elapsed < 1.0, f"replay took {elapsed:.2f}s"
    ok("published-batch replay reports 81.7 mean, rendered 82%")


def test_load_time_direction_on_fixture_corpus(batch):
    """Measured transcoded load beats modeled normal load on every page."""
    summary, elapsed = batch
    assert len(summary.rows) == CORPUS_SIZE
    assert summary.failed_count == 0
    for row in summary.rows:
        assert row.wlt_ms < row.nlt_ms, (
            f"{row.batch_label}: wlt {row.wlt_ms:.1f} !< nlt {row.nlt_ms:.1f}"
        )
    assert elapsed < 30.0, f"batch took {elapsed:.1f}s"
    ok(f"wlt < nlt for all {CORPUS_SIZE} fixture pages in {elapsed:.1f}s")


def test_text_preservation_is_exact(batch):
    """Conversion rate is exactly 100.0 for every fixture page."""
    summary, _ = batch
    for row in summary.rows:
        assert row.conversion_rate == 100.0, (
            f"{row.batch_label}: {row.conversion_rate}"
        )
    ok(f"conversion_rate == 100.0 exactly for all {CORPUS_SIZE} fixture pages")


def test_output_invariant_suite(transformed_pages):
    """Transformed output carries no author presentation and only safe hrefs."""
    for page in transformed_pages:
        assert_output_invariants(page.html, PUBLIC)
    ok(f"output invariants hold for all {CORPUS_SIZE} fixture pages")


def test_url_oracle_equivalence():
    """resolve() matches the RFC oracle; rewrites round-trip bit-exactly."""
    rng = random.Random(2024)

    def segment():
        return "".join(rng.choice("abcdef012-._~") for _ in range(rng.randrange(1, 5)))

    def random_href():
        kind = rng.randrange(6)
        if kind == 0:
            return f"http://{segment()}.org/{segment()}"
        if kind == 1:
            return "//" + segment() + ".net/" + segment()
        if kind == 2:
            return "/" + "/".join(segment() for _ in range(rng.randrange(1, 4)))
        parts = [rng.choice([segment(), ".", ".."]) for _ in range(rng.randrange(1, 4))]
        href = "/".join(parts)
        if rng.random() < 0.4:
            href += "?x=" + segment()
        return href

    bases = [
        "http://e.com/a/b/c", "http://e.com/a/b/", "https://h.org:8443/x/y?q=1",
        "http://plain.net/", "http://site.io/one",
    ]
    for _ in range(200):
        base_raw = rng.choice(bases)
        href = random_href()
        got = resolve(parse_url(base_raw), href)
        want = parse_url(rfc3986_resolve(base_raw, href))
        assert got.parts() == want.parts(), f"{base_raw} + {href}"

    prefix = PUBLIC + "/render?url="
    for _ in range(1000):
        href = random_href()
        doc = parse_html(
            f'<a href="{href}">x</a>'.encode(), "utf-8", parse_url(rng.choice(bases))
        )
        link = extract_links(doc)[0]
        new = rewrite_link(link, PUBLIC)
        assert new.startswith(prefix)
        encoded = new[len(prefix):]
        assert unquote(encoded) == link.resolved.serialized
        assert encoded == percent_encode(link.resolved.serialized)
    ok("resolve matches RFC oracle on 200 pairs; 1000 rewrites round-trip")


def test_idempotence_is_byte_exact(transformed_pages, default_cfg):
    """Transforming a transformed page changes nothing."""
    for page in transformed_pages:
        again = transform_bytes(page.html, default_cfg, base_url=page.source_url)
        assert again.html == page.html, f"{page.source_url.serialized} not idempotent"
        assert again.stats.styles_removed == 0
        assert again.stats.scripts_removed == 0
        assert again.stats.links_rewritten == 0
    ok(f"transform is byte-idempotent on all {CORPUS_SIZE} fixture pages")


def test_preset_contrast_floors():
    """Every shipped preset meets Clear Print contrast; formula is exact."""
    assert contrast_ratio("#000000", "#FFFFFF") == 21.0
    yellow = contrast_ratio("#FFFF00", "#000000")
    assert abs(yellow - 19.56) <= 0.01
    assert abs(yellow - contrast_oracle("#FFFF00", "#000000")) < 1e-9
    catalog = load_presets()
    for preset in catalog.values():
        assert contrast_ratio(preset.text_color, preset.background_color) >= 7.0
        assert contrast_ratio(preset.link_color, preset.background_color) >= 4.5
    ok(f"all {len(catalog)} shipped presets pass contrast; extremes exact")


def test_service_integration(origin):
    """/render transcodes live pages; hostile schemes are refused."""
    config = ServiceConfig(public_base=PUBLIC, fetch=FetchOptions(timeout=5_000))
    with TestClient(create_app(config)) as client:
        resp = client.get("/render", params={"url": origin.url("/page/5")})
        assert resp.status_code == 200
        assert_output_invariants(resp.content, PUBLIC)
        for hostile in ("file:///etc/passwd", "javascript:alert(1)"):
            assert client.get("/render", params={"url": hostile}).status_code == 400
        # the primary suite must not depend on the frontend build
        home = client.get("/")
        assert home.status_code == 200
        assert '<form action="/render" method="get"' in home.text
    ok("/render passes invariants; file:/javascript: refused; no frontend needed")


def test_secondary_landing_page_contract(origin, presets):
    """Landing page works scriptless and meets its own presentation bar."""
    config = ServiceConfig(public_base=PUBLIC, fetch=FetchOptions(timeout=5_000))
    with TestClient(create_app(config)) as client:
        body = client.get("/").text
    doc = parse_html(body.encode(), "utf-8", parse_url(PUBLIC))
    forms = [n for n in doc.iter_elements("form")]
    assert len(forms) == 1
    assert forms[0].attrs["action"] == "/render"
    assert forms[0].attrs["method"] == "get"
    inputs = {n.attrs.get("name") for n in doc.iter_elements("input")}
    assert "url" in inputs and "scale" in inputs
    default = presets["default"]
    assert contrast_ratio(default.text_color, default.background_color) >= 7.0
    assert default.base_font_size >= 16
    assert f"font-size: {default.base_font_size:g}px" in body
    ok("landing page is a plain GET form styled to the Clear Print bar")

"""Batch measurement: text conversion rate and load-time comparison.

conversion_rate is the multiset overlap of visible-text tokens between the
original and the transformed page, as a percentage of the original's
tokens. Load times compare a modeled "normal" load (base fetch plus a
serial per-subresource estimate, since external stylesheets and scripts
would each cost a round trip) against the transcoder's cost (base fetch
plus transform time; the output references no blocking subresources).
"""

import csv
import logging
import statistics
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import requests

from .errors import AllUrlsFailed, ClearlensError
from .fetcher import SourceUrl, fetch, parse_url
from .html_model import Document, parse_html, text_content
from .link_engine import resolve
from .pipeline import TransformConfig, transform_fetched
from .style_engine import is_stylesheet_link

logger = logging.getLogger(__name__)

NLT_MODEL_NOTE = (
    "nlt_ms = base fetch + n_subresources x one measured same-origin fetch; "
    "wlt_ms = base fetch + transform time"
)


@dataclass
class ConversionReport:
    batch_label: str
    url: str
    nlt_ms: float
    wlt_ms: float
    conversion_rate: float


@dataclass
class BatchSummary:
    rows: list
    mean_conversion_rate: float
    mean_nlt_ms: float
    mean_wlt_ms: float
    failed_count: int = 0


def conversion_rate(original: Document, transformed: Document) -> float:
    """Percent of the original's text tokens still present after transform."""
    orig = Counter(text_content(original))
    total = sum(orig.values())
    if total == 0:
        return 100.0  # a page with no text loses nothing
    kept = sum((orig & Counter(text_content(transformed))).values())
    return 100.0 * kept / total


def _subresource_refs(doc: Document) -> list:
    refs = []
    for node in doc.iter_elements():
        if is_stylesheet_link(node):
            refs.append(node.attrs["href"])
        elif node.tag == "script" and node.attrs.get("src"):
            refs.append(node.attrs["src"])
    return refs


def _probe_resource_ms(page_url: SourceUrl, ref: str, timeout_ms: int) -> float:
    """Time one same-origin subresource fetch (any content type)."""
    try:
        target = resolve(page_url, ref)
    except ClearlensError:
        return 0.0
    start = time.monotonic()
    try:
        resp = requests.get(target.request_target, timeout=timeout_ms / 1000.0)
        resp.close()
    except requests.RequestException:
        return 0.0
    return (time.monotonic() - start) * 1000.0


def evaluate_url_with_page(label: str, url: SourceUrl, cfg: TransformConfig) -> tuple:
    """One fetch, one transform; returns (report row, accessible page)."""
    page = fetch(url, cfg.fetch)
    original = parse_html(page.body, page.charset, page.final_url)
    refs = _subresource_refs(original)
    per_resource_ms = (
        _probe_resource_ms(page.final_url, refs[0], cfg.fetch.timeout) if refs else 0.0
    )
    accessible = transform_fetched(page, cfg)
    transformed = parse_html(accessible.html, "utf-8", page.final_url)
    report = ConversionReport(
        batch_label=label,
        url=url.serialized,
        nlt_ms=page.fetch_duration + len(refs) * per_resource_ms,
        wlt_ms=page.fetch_duration + accessible.transform_duration,
        conversion_rate=conversion_rate(original, transformed),
    )
    return report, accessible


def evaluate_url(label: str, url: SourceUrl, cfg: TransformConfig) -> ConversionReport:
    """One fetch, one transform, one report row."""
    return evaluate_url_with_page(label, url, cfg)[0]


def measure_load(url: SourceUrl, cfg: TransformConfig) -> tuple:
    """(nlt_ms, wlt_ms) for one URL."""
    report = evaluate_url("", url, cfg)
    return report.nlt_ms, report.wlt_ms


def summarize(rows: list, failed_count: int = 0) -> BatchSummary:
    return BatchSummary(
        rows=rows,
        mean_conversion_rate=statistics.mean(r.conversion_rate for r in rows),
        mean_nlt_ms=statistics.mean(r.nlt_ms for r in rows),
        mean_wlt_ms=statistics.mean(r.wlt_ms for r in rows),
        failed_count=failed_count,
    )


def batch_evaluate(urls: list, cfg: TransformConfig, parallelism: int = 4) -> BatchSummary:
    """Evaluate labeled (label, url-string) pairs; failures are logged,
    excluded, and counted. Row order follows input order."""
    if not urls:
        raise ValueError("url list is empty")

    def run(item):
        label, raw = item
        try:
            return evaluate_url(label, parse_url(raw), cfg)
        except ClearlensError as exc:
            logger.warning("skipping %s (%s): %s", raw, label, exc)
            return None

    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        results = list(pool.map(run, urls))

    rows = [r for r in results if r is not None]
    failed = len(results) - len(rows)
    if not rows:
        raise AllUrlsFailed(f"all {failed} URLs failed")
    return summarize(rows, failed)


# --- report files ------------------------------------------------------------

CSV_COLUMNS = ("batch", "url", "nlt_ms", "wlt_ms", "conversion_rate")
SUMMARY_LABEL = "summary"


def _fmt(value: float) -> str:
    return f"{value:.3f}".rstrip("0").rstrip(".")


def write_csv(summary: BatchSummary, path) -> None:
    """D-style report: fixed columns, one comment line documenting the load
    model, then rows in input order and a trailing summary row."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {NLT_MODEL_NOTE}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in summary.rows:
            writer.writerow(
                (
                    row.batch_label,
                    row.url,
                    _fmt(row.nlt_ms),
                    _fmt(row.wlt_ms),
                    _fmt(row.conversion_rate),
                )
            )
        writer.writerow(
            (
                SUMMARY_LABEL,
                "",
                _fmt(summary.mean_nlt_ms),
                _fmt(summary.mean_wlt_ms),
                _fmt(summary.mean_conversion_rate),
            )
        )


_NLT_NAMES = ("nlt_ms", "nlt")
_WLT_NAMES = ("wlt_ms", "wlt")
_RATE_NAMES = ("conversion_rate", "conversion rate", "conversion")


def _pick(row: dict, names) -> float | None:
    for name in names:
        if name in row and row[name] not in (None, ""):
            return float(row[name])
    return None


def read_report_rows(path) -> list:
    """Read a report CSV back into rows; header names are matched leniently
    so externally produced batch tables can be replayed."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(lines)
    if reader.fieldnames is None:
        return rows
    lower = {name: name.strip().lower() for name in reader.fieldnames}
    for raw in reader:
        row = {lower[k]: v for k, v in raw.items() if k is not None}
        label = row.get("batch", "") or row.get("label", "")
        if label == SUMMARY_LABEL:
            continue
        rate = _pick(row, _RATE_NAMES)
        if rate is None:
            continue
        rows.append(
            ConversionReport(
                batch_label=label,
                url=row.get("url", "") or "",
                nlt_ms=_pick(row, _NLT_NAMES) or 0.0,
                wlt_ms=_pick(row, _WLT_NAMES) or 0.0,
                conversion_rate=rate,
            )
        )
    return rows


def replay_summary(path) -> BatchSummary:
    """Summarize an existing report CSV without fetching anything."""
    rows = read_report_rows(path)
    if not rows:
        raise AllUrlsFailed(f"no data rows in {path}")
    return summarize(rows)


def effective_rate_percent(summary: BatchSummary) -> int:
    """Half-up integer rendering of the mean conversion rate."""
    return int(summary.mean_conversion_rate + 0.5)


def write_plot_data(summary: BatchSummary, directory) -> list:
    """Two-column TSVs (label, value), one file per chart series."""
    import os

    os.makedirs(directory, exist_ok=True)
    series = (
        ("nlt.tsv", lambda r: r.nlt_ms),
        ("wlt.tsv", lambda r: r.wlt_ms),
        ("conversion_rate.tsv", lambda r: r.conversion_rate),
    )
    written = []
    for filename, getter in series:
        path = os.path.join(directory, filename)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for row in summary.rows:
                fh.write(f"{row.batch_label}\t{_fmt(getter(row))}\n")
        written.append(path)
    return written

"""Minimal TOML-subset reader.

Python 3.10 has no stdlib tomllib, so this covers the slice of TOML the
preset catalog and service config actually use: ``[table]`` headers, bare
keys, basic strings, integers, floats, booleans, and single-line arrays.
Nested tables, dates, and multi-line strings are out of scope.
"""

import re

from .errors import ConfigError

_TABLE_RE = re.compile(r"^\[([A-Za-z0-9_.\- ]+)\]$")
_KEY_RE = re.compile(r"^([A-Za-z0-9_\-]+)\s*=\s*(.+)$")


def _strip_comment(line: str) -> str:
    out = []
    in_string = False
    for ch in line:
        if ch == '"':
            in_string = not in_string
        if ch == "#" and not in_string:
            break
        out.append(ch)
    return "".join(out).strip()


def _parse_value(raw: str, where: str):
    raw = raw.strip()
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        body = raw[1:-1]
        return body.replace('\\"', '"').replace("\\\\", "\\")
    if raw.startswith("[") and raw.endswith("]"):
        inner = raw[1:-1].strip()
        if not inner:
            return []
        parts = re.findall(r'"((?:[^"\\]|\\.)*)"|([^,\s]+)', inner)
        return [
            _parse_value(f'"{quoted}"' if quoted else bare, where)
            for quoted, bare in parts
        ]
    if raw == "true":
        return True
    if raw == "false":
        return False
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    raise ConfigError(f"unsupported TOML value {raw!r} at {where}")


def loads(text: str) -> dict:
    """Parse TOML-subset text into a dict of tables and top-level keys."""
    root: dict = {}
    current = root
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(line)
        if not line:
            continue
        m = _TABLE_RE.match(line)
        if m:
            name = m.group(1).strip()
            if name in root and not isinstance(root[name], dict):
                raise ConfigError(f"table {name!r} collides with a key (line {lineno})")
            current = root.setdefault(name, {})
            continue
        m = _KEY_RE.match(line)
        if m:
            key, raw = m.group(1), m.group(2)
            current[key] = _parse_value(raw, f"line {lineno}")
            continue
        raise ConfigError(f"unparseable TOML line {lineno}: {line!r}")
    return root


def load(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())

"""Independent oracles used by the test suite.

Everything in this module is written from primary definitions (RFC 3986,
WCAG relative luminance) and deliberately shares no code with the package
under test. The resolver transcribes the RFC 3986 section 5 pseudocode;
self-checks against the RFC's own worked examples live in
test_link_engine.py.
"""

import re

# --- RFC 3986 reference resolution -----------------------------------------

_URI_RE = re.compile(
    r"^(?:(?P<scheme>[A-Za-z][A-Za-z0-9+.-]*):)?"
    r"(?://(?P<authority>[^/?#]*))?"
    r"(?P<path>[^?#]*)"
    r"(?:\?(?P<query>[^#]*))?"
    r"(?:#(?P<fragment>.*))?$"
)


def split_uri(uri):
    m = _URI_RE.match(uri)
    d = m.groupdict()
    return d["scheme"], d["authority"], d["path"], d["query"], d["fragment"]


def merge_paths(base_authority, base_path, ref_path):
    if base_authority is not None and base_path == "":
        return "/" + ref_path
    if "/" in base_path:
        return base_path[: base_path.rfind("/") + 1] + ref_path
    return ref_path


def remove_dot_segments(path):
    inp = path
    out = []
    while inp:
        if inp.startswith("../"):
            inp = inp[3:]
        elif inp.startswith("./"):
            inp = inp[2:]
        elif inp.startswith("/./"):
            inp = "/" + inp[3:]
        elif inp == "/.":
            inp = "/"
        elif inp.startswith("/../"):
            inp = "/" + inp[4:]
            if out:
                out.pop()
        elif inp == "/..":
            inp = "/"
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


def rfc3986_resolve(base, ref, strict=True):
    """Transform a reference into a target URI per RFC 3986 section 5.2.2."""
    b_scheme, b_auth, b_path, b_query, _ = split_uri(base)
    r_scheme, r_auth, r_path, r_query, r_frag = split_uri(ref)

    if not strict and r_scheme == b_scheme:
        r_scheme = None

    if r_scheme is not None:
        t = (r_scheme, r_auth, remove_dot_segments(r_path), r_query)
    elif r_auth is not None:
        t = (b_scheme, r_auth, remove_dot_segments(r_path), r_query)
    elif r_path == "":
        t = (b_scheme, b_auth, b_path, r_query if r_query is not None else b_query)
    elif r_path.startswith("/"):
        t = (b_scheme, b_auth, remove_dot_segments(r_path), r_query)
    else:
        merged = merge_paths(b_auth, b_path, r_path)
        t = (b_scheme, b_auth, remove_dot_segments(merged), r_query)

    scheme, authority, path, query = t
    result = []
    if scheme is not None:
        result += [scheme, ":"]
    if authority is not None:
        result += ["//", authority]
    result.append(path)
    if query is not None:
        result += ["?", query]
    if r_frag is not None:
        result += ["#", r_frag]
    return "".join(result)


# RFC 3986 section 5.4 worked examples (base http://a/b/c/d;p?q).
RFC3986_NORMAL_EXAMPLES = {
    "g:h": "g:h",
    "g": "http://a/b/c/g",
    "./g": "http://a/b/c/g",
    "g/": "http://a/b/c/g/",
    "/g": "http://a/g",
    "//g": "http://g",
    "?y": "http://a/b/c/d;p?y",
    "g?y": "http://a/b/c/g?y",
    "#s": "http://a/b/c/d;p?q#s",
    "g#s": "http://a/b/c/g#s",
    "g?y#s": "http://a/b/c/g?y#s",
    ";x": "http://a/b/c/;x",
    "g;x": "http://a/b/c/g;x",
    "g;x?y#s": "http://a/b/c/g;x?y#s",
    "": "http://a/b/c/d;p?q",
    ".": "http://a/b/c/",
    "./": "http://a/b/c/",
    "..": "http://a/b/",
    "../": "http://a/b/",
    "../g": "http://a/b/g",
    "../..": "http://a/",
    "../../": "http://a/",
    "../../g": "http://a/g",
}

RFC3986_ABNORMAL_EXAMPLES = {
    "../../../g": "http://a/g",
    "../../../../g": "http://a/g",
    "/./g": "http://a/g",
    "/../g": "http://a/g",
    "g.": "http://a/b/c/g.",
    ".g": "http://a/b/c/.g",
    "g..": "http://a/b/c/g..",
    "..g": "http://a/b/c/..g",
    "./../g": "http://a/b/g",
    "./g/.": "http://a/b/c/g/",
    "g/./h": "http://a/b/c/g/h",
    "g/../h": "http://a/b/c/h",
    "g;x=1/./y": "http://a/b/c/g;x=1/y",
    "g;x=1/../y": "http://a/b/c/y",
}


# --- RFC 3986 percent-encoding ----------------------------------------------

_UNRESERVED = frozenset(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-._~"
)


def percent_encode(text):
    """Encode every non-unreserved octet of the UTF-8 form, uppercase hex."""
    out = []
    for byte in text.encode("utf-8"):
        ch = chr(byte)
        if ch in _UNRESERVED:
            out.append(ch)
        else:
            out.append("%%%02X" % byte)
    return "".join(out)


def percent_decode(text):
    out = bytearray()
    i = 0
    while i < len(text):
        if text[i] == "%" and i + 2 < len(text) + 1:
            out.append(int(text[i + 1 : i + 3], 16))
            i += 3
        else:
            out += text[i].encode("utf-8")
            i += 1
    return out.decode("utf-8")


# --- WCAG relative luminance / contrast -------------------------------------


def channel_linear(value_8bit):
    c = value_8bit / 255.0
    if c <= 0.03928:
        return c / 12.92
    return ((c + 0.055) / 1.055) ** 2.4


def relative_luminance(hex_color):
    h = hex_color.lstrip("#")
    r, g, b = (int(h[i : i + 2], 16) for i in (0, 2, 4))
    return (
        0.2126 * channel_linear(r)
        + 0.7152 * channel_linear(g)
        + 0.0722 * channel_linear(b)
    )


def contrast_oracle(fg, bg):
    lf = relative_luminance(fg)
    lb = relative_luminance(bg)
    lighter, darker = max(lf, lb), min(lf, lb)
    return (lighter + 0.05) / (darker + 0.05)

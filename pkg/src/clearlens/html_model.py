"""Error-tolerant HTML tree: parse, serialize, visible-text extraction.

Tokenization is stdlib html.parser; tree construction and recovery live
here. The recovery model (deliberately a subset of full HTML5 tree
construction) is:

- html/head/body are always present, synthesized when absent; explicit
  tags merge their attributes onto the synthesized nodes (first wins).
- Metadata start tags (base, link, meta, noscript, script, style, title,
  template, ...) before any body content go into head; any other start
  tag or non-whitespace text starts the body.
- Whitespace-only text before the body starts is dropped; all text after
  that is kept, adjacent text nodes merged.
- Start tags auto-close per a fixed table (p by block starters, li by li,
  td/th/tr chains, dt/dd, option/optgroup, headings by headings, a by a).
- An end tag closes the nearest matching open element, implying ends for
  anything above it; unmatched end tags are ignored (including stray
  </p>, which full HTML5 would turn into an empty paragraph).
- script/style content is verbatim raw text; comments attach at the
  current insertion point (head before body content starts).
- No active-formatting reconstruction, no adoption agency, no tbody
  synthesis, no foster parenting. Doctypes and processing instructions
  are dropped; serialization always emits <!DOCTYPE html> and UTF-8.
"""

import codecs
from dataclasses import dataclass, field
from html.parser import HTMLParser
from urllib.parse import urljoin

from .errors import MalformedUrl, UnsupportedCharset, UnsupportedScheme
from .fetcher import SourceUrl, parse_url

ELEMENT = "element"
TEXT = "text"
COMMENT = "comment"

VOID_ELEMENTS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)
RAWTEXT_ELEMENTS = frozenset(("script", "style"))

HEAD_CONTENT = frozenset(
    "base basefont bgsound link meta noframes noscript script style template title".split()
)

_P_CLOSERS = frozenset(
    (
        "address article aside blockquote center details dialog dir div dl "
        "fieldset figcaption figure footer form h1 h2 h3 h4 h5 h6 header "
        "hgroup hr listing main menu nav ol p plaintext pre section summary "
        "table ul li dd dt"
    ).split()
)

# incoming start tag -> set of currently-open tags it implicitly closes
CLOSED_BY: dict[str, frozenset] = {}
for _t in _P_CLOSERS:
    CLOSED_BY[_t] = frozenset(("p",))
CLOSED_BY["li"] = frozenset(("li", "p"))
CLOSED_BY["dd"] = frozenset(("dd", "dt", "p"))
CLOSED_BY["dt"] = frozenset(("dd", "dt", "p"))
CLOSED_BY["option"] = frozenset(("option",))
CLOSED_BY["optgroup"] = frozenset(("option", "optgroup"))
CLOSED_BY["tr"] = frozenset(("tr", "td", "th"))
CLOSED_BY["td"] = frozenset(("td", "th"))
CLOSED_BY["th"] = frozenset(("td", "th"))
for _t in ("thead", "tbody", "tfoot"):
    CLOSED_BY[_t] = frozenset(("td", "th", "tr", "thead", "tbody", "tfoot"))
for _t in ("h1", "h2", "h3", "h4", "h5", "h6"):
    CLOSED_BY[_t] = frozenset(("h1", "h2", "h3", "h4", "h5", "h6", "p"))
CLOSED_BY["a"] = frozenset(("a",))


@dataclass
class Node:
    id: int
    kind: str
    tag: str = ""
    attrs: dict = field(default_factory=dict)
    content: str = ""
    children: list = field(default_factory=list)
    parent: int | None = None

    @property
    def is_element(self) -> bool:
        return self.kind == ELEMENT


class Document:
    """Arena-backed tree; root is the html element, head/body always exist."""

    def __init__(self, base_url: SourceUrl):
        self.nodes: dict[int, Node] = {}
        self._next_id = 0
        self.base_url = base_url
        self.root = self._new(ELEMENT, tag="html").id
        self.head_id = self.new_element("head")
        self.body_id = self.new_element("body")
        self.append(self.root, self.head_id)
        self.append(self.root, self.body_id)

    # -- construction --------------------------------------------------

    def _new(self, kind, **kw) -> Node:
        node = Node(id=self._next_id, kind=kind, **kw)
        self.nodes[node.id] = node
        self._next_id += 1
        return node

    def new_element(self, tag: str, attrs: dict | None = None) -> int:
        return self._new(ELEMENT, tag=tag, attrs=dict(attrs or {})).id

    def new_text(self, content: str) -> int:
        return self._new(TEXT, content=content).id

    def new_comment(self, content: str) -> int:
        return self._new(COMMENT, content=content).id

    # -- mutation -------------------------------------------------------

    def append(self, parent_id: int, child_id: int):
        parent = self.nodes[parent_id]
        if parent.is_element and parent.tag in VOID_ELEMENTS:
            raise ValueError(f"void element <{parent.tag}> cannot have children")
        parent.children.append(child_id)
        self.nodes[child_id].parent = parent_id

    def insert(self, parent_id: int, index: int, child_id: int):
        parent = self.nodes[parent_id]
        if parent.is_element and parent.tag in VOID_ELEMENTS:
            raise ValueError(f"void element <{parent.tag}> cannot have children")
        parent.children.insert(index, child_id)
        self.nodes[child_id].parent = parent_id

    def detach(self, node_id: int):
        """Remove a node (and its subtree) from its parent; arena entry stays."""
        node = self.nodes[node_id]
        if node.parent is not None:
            self.nodes[node.parent].children.remove(node_id)
            node.parent = None

    def unwrap(self, node_id: int):
        """Replace a node with its children, preserving order."""
        node = self.nodes[node_id]
        parent_id = node.parent
        if parent_id is None:
            return
        parent = self.nodes[parent_id]
        idx = parent.children.index(node_id)
        parent.children[idx : idx + 1] = node.children
        for child in node.children:
            self.nodes[child].parent = parent_id
        node.children = []
        node.parent = None

    # -- traversal ------------------------------------------------------

    @property
    def head(self) -> Node:
        return self.nodes[self.head_id]

    @property
    def body(self) -> Node:
        return self.nodes[self.body_id]

    def iter_subtree(self, node_id: int | None = None):
        """Pre-order walk yielding Node objects."""
        stack = [self.root if node_id is None else node_id]
        while stack:
            node = self.nodes[stack.pop()]
            yield node
            stack.extend(reversed(node.children))

    def iter_elements(self, tag: str | None = None):
        for node in self.iter_subtree():
            if node.is_element and (tag is None or node.tag == tag):
                yield node


class _TreeBuilder(HTMLParser):
    def __init__(self, doc: Document):
        super().__init__(convert_charrefs=True)
        self.doc = doc
        self.stack: list[int] = []
        self.body_started = False

    # insertion target: innermost open element, else head or body by phase
    def _target(self) -> int:
        if self.stack:
            return self.stack[-1]
        return self.doc.body_id if self.body_started else self.doc.head_id

    def _start_body(self):
        if not self.body_started:
            self.body_started = True
            self.stack.clear()

    def _merge_attrs(self, node_id: int, attrs):
        node = self.doc.nodes[node_id]
        for name, value in attrs:
            node.attrs.setdefault(name, value if value is not None else "")

    @staticmethod
    def _attr_dict(attrs) -> dict:
        d: dict = {}
        for name, value in attrs:
            d.setdefault(name, value if value is not None else "")
        return d

    def _append_text(self, target: int, data: str):
        children = self.doc.nodes[target].children
        if children:
            last = self.doc.nodes[children[-1]]
            if last.kind == TEXT:
                last.content += data
                return
        self.doc.append(target, self.doc.new_text(data))

    # -- tokenizer callbacks ---------------------------------------------

    def handle_starttag(self, tag, attrs):
        if tag == "html":
            self._merge_attrs(self.doc.root, attrs)
            return
        if tag == "head":
            self._merge_attrs(self.doc.head_id, attrs)
            return
        if tag == "body":
            self._merge_attrs(self.doc.body_id, attrs)
            self._start_body()
            return
        if not self.body_started and tag not in HEAD_CONTENT:
            self._start_body()
        closers = CLOSED_BY.get(tag)
        if closers:
            while self.stack and self.doc.nodes[self.stack[-1]].tag in closers:
                self.stack.pop()
        el = self.doc.new_element(tag, self._attr_dict(attrs))
        self.doc.append(self._target(), el)
        if tag not in VOID_ELEMENTS:
            self.stack.append(el)

    def handle_startendtag(self, tag, attrs):
        # the self-closing slash is meaningless on HTML elements
        self.handle_starttag(tag, attrs)

    def handle_endtag(self, tag):
        if tag in ("html", "body"):
            self._start_body()
            self.stack.clear()
            return
        if tag == "head":
            if not self.body_started:
                self.stack.clear()
            return
        if tag in VOID_ELEMENTS:
            return
        for i in range(len(self.stack) - 1, -1, -1):
            if self.doc.nodes[self.stack[i]].tag == tag:
                del self.stack[i:]
                return
        # unmatched end tag: ignored

    def handle_data(self, data):
        if not data:
            return
        if self.stack:
            self._append_text(self.stack[-1], data)
            return
        if self.body_started:
            self._append_text(self.doc.body_id, data)
        elif data.strip():
            self._start_body()
            self._append_text(self.doc.body_id, data)
        # whitespace before body content: dropped

    def handle_comment(self, data):
        self.doc.append(self._target(), self.doc.new_comment(data))

    # doctypes, processing instructions, bogus declarations: dropped
    def handle_decl(self, decl):
        pass

    def handle_pi(self, data):
        pass

    def unknown_decl(self, data):
        pass


def parse_html(body: bytes, charset: str, base_url: SourceUrl) -> Document:
    """Build a Document from raw bytes; never fails on malformed markup."""
    try:
        codec = codecs.lookup(charset)
    except LookupError:
        raise UnsupportedCharset(f"unknown charset {charset!r}") from None
    text = body.decode(codec.name, errors="replace")
    doc = Document(base_url)
    builder = _TreeBuilder(doc)
    builder.feed(text)
    builder.close()
    _apply_base_element(doc)
    return doc


def _apply_base_element(doc: Document):
    # an author <base href> shifts the document's resolution base
    for el in doc.iter_elements("base"):
        href = el.attrs.get("href")
        if href:
            try:
                doc.base_url = parse_url(urljoin(doc.base_url.serialized, href))
            except (MalformedUrl, UnsupportedScheme):
                pass
        break


def _escape_text(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _escape_attr(value: str) -> str:
    return value.replace("&", "&amp;").replace('"', "&quot;").replace("<", "&lt;")


def _render(doc: Document, node_id: int, out: list):
    node = doc.nodes[node_id]
    if node.kind == TEXT:
        out.append(_escape_text(node.content))
    elif node.kind == COMMENT:
        out.append(f"<!--{node.content}-->")
    else:
        attrs = "".join(f' {n}="{_escape_attr(v)}"' for n, v in node.attrs.items())
        out.append(f"<{node.tag}{attrs}>")
        if node.tag in VOID_ELEMENTS:
            return
        if node.tag in RAWTEXT_ELEMENTS:
            for child in node.children:
                c = doc.nodes[child]
                if c.kind == TEXT:
                    out.append(c.content)  # verbatim; must not contain the end tag
                else:
                    _render(doc, child, out)
        else:
            for child in node.children:
                _render(doc, child, out)
        out.append(f"</{node.tag}>")


def serialize(doc: Document) -> bytes:
    """Emit UTF-8 markup that reparses to a structurally equal tree."""
    out: list = ["<!DOCTYPE html>"]
    _render(doc, doc.root, out)
    return "".join(out).encode("utf-8")


TEXT_EXCLUDED = frozenset(("script", "style", "noscript", "template"))


def text_content(doc: Document) -> list:
    """Visible text tokens: document order, whitespace-split, case-folded.

    Text under script/style/noscript/template and comment content do not
    count as visible text.
    """
    tokens: list = []

    def walk(node_id):
        node = doc.nodes[node_id]
        if node.is_element and node.tag in TEXT_EXCLUDED:
            return
        if node.kind == TEXT:
            tokens.extend(t.casefold() for t in node.content.split())
        for child in node.children:
            walk(child)

    walk(doc.root)
    return tokens


def ensure_utf8_meta(doc: Document):
    """Drop stale charset declarations and pin one utf-8 meta first in head."""
    for el in list(doc.iter_elements("meta")):
        if "charset" in el.attrs or el.attrs.get("http-equiv", "").lower() == "content-type":
            doc.detach(el.id)
    doc.insert(doc.head_id, 0, doc.new_element("meta", {"charset": "utf-8"}))


def structural_equal(a: Document, b: Document) -> bool:
    def eq(na: Node, nb: Node) -> bool:
        if na.kind != nb.kind:
            return False
        if na.kind == ELEMENT:
            if na.tag != nb.tag or list(na.attrs.items()) != list(nb.attrs.items()):
                return False
        elif na.content != nb.content:
            return False
        if len(na.children) != len(nb.children):
            return False
        return all(
            eq(a.nodes[ca], b.nodes[cb]) for ca, cb in zip(na.children, nb.children)
        )

    return eq(a.nodes[a.root], b.nodes[b.root])


def node_count(doc: Document) -> int:
    return sum(1 for _ in doc.iter_subtree())


def dump(doc: Document) -> str:
    """Canonical indented dump used by the recovery-corpus tests."""
    lines: list = []

    def walk(node_id, depth):
        node = doc.nodes[node_id]
        pad = "  " * depth
        if node.kind == TEXT:
            body = node.content.replace("\\", "\\\\").replace("\n", "\\n")
            lines.append(f'{pad}"{body}"')
        elif node.kind == COMMENT:
            lines.append(f"{pad}<!--{node.content}-->")
        else:
            attrs = "".join(f' {n}="{v}"' for n, v in node.attrs.items())
            lines.append(f"{pad}<{node.tag}{attrs}>")
            for child in node.children:
                walk(child, depth + 1)

    walk(doc.root, 0)
    return "\n".join(lines)

"""Style pass: find author presentation carriers and install the Clear Print skin.

Every carrier of author presentation (style elements, external stylesheet
links, inline style attributes, presentational attributes, scripts, and
deprecated wrapper elements) maps to a removal action; the accessible
replacement is one injected stylesheet rendered from a ClearPrintPreset.
The injected sheet carries data-clearlens="1" so a second pass recognizes
it and the whole transform stays idempotent.
"""

import enum
from dataclasses import dataclass, replace
from importlib import resources

from . import toml_lite
from .errors import ConfigError, MalformedColor
from .html_model import Document

MARKER_ATTR = "data-clearlens"

# element kinds
STYLE_ELEMENT = "style_element"
STYLESHEET_LINK = "stylesheet_link"
INLINE_STYLE = "inline_style"
PRESENTATIONAL_ATTR = "presentational_attr"
SCRIPT_ELEMENT = "script_element"
WRAPPER_ELEMENT = "wrapper_element"

# closed list of presentational attributes swept from every element
PRESENTATIONAL_ATTRS = frozenset(
    "font bgcolor color align text link vlink alink background border "
    "cellpadding cellspacing valign".split()
)
# width/height are presentational except on replaced/media content
SIZE_ATTRS = frozenset(("width", "height"))
MEDIA_TAGS = frozenset(
    "img video audio canvas embed object iframe picture source svg".split()
)

# deprecated pure-presentation wrappers: removing the element would drop
# user text, so they unwrap instead
WRAPPER_TAGS = frozenset(("font", "center", "big", "small", "marquee", "blink"))


@dataclass(frozen=True)
class StyleComponent:
    node: int
    kind: str
    name: str = ""   # presentational attr name
    value: str = ""  # attr value / link href / wrapper tag


class Action(enum.Enum):
    REMOVE = "remove"
    UNWRAP = "unwrap"  # remove element, keep children
    KEEP = "keep"      # already part of the injected skin


@dataclass(frozen=True)
class ClearPrintPreset:
    name: str
    font_family_stack: tuple = ("Arial", "Helvetica", "Verdana", "sans-serif")
    base_font_size: float = 18.0  # CSS px
    line_height: float = 1.5
    text_color: str = "#000000"
    background_color: str = "#FFFFFF"
    link_color: str = "#0000EE"
    max_line_width: int = 70  # character units
    alignment: str = "left"
    underline_links: bool = True
    italics_allowed: bool = False

    def __post_init__(self):
        # colors must always be sane, even on scaled variants
        if contrast_ratio(self.text_color, self.background_color) < 7.0:
            raise ConfigError(
                f"preset {self.name!r}: text/background contrast below 7.0"
            )
        if contrast_ratio(self.link_color, self.background_color) < 4.5:
            raise ConfigError(f"preset {self.name!r}: link contrast below 4.5")

    def validate_shipped(self):
        """Extra floor checks applied to catalog presets (not scaled variants)."""
        if self.base_font_size < 16:
            raise ConfigError(f"preset {self.name!r}: base_font_size below 16px")
        if self.line_height < 1.5:
            raise ConfigError(f"preset {self.name!r}: line_height below 1.5")
        return self

    def scaled(self, factor: float) -> "ClearPrintPreset":
        """Render-time font scaling; colors and layout rules stay put."""
        return replace(self, base_font_size=self.base_font_size * factor)


def _channel_linear(value: int) -> float:
    c = value / 255.0
    return c / 12.92 if c <= 0.03928 else ((c + 0.055) / 1.055) ** 2.4


def _luminance(color: str) -> float:
    h = color[1:] if color.startswith("#") else color
    if len(h) != 6:
        raise MalformedColor(f"expected 6-digit hex color, got {color!r}")
    try:
        r, g, b = (int(h[i : i + 2], 16) for i in (0, 2, 4))
    except ValueError:
        raise MalformedColor(f"invalid hex color {color!r}") from None
    return 0.2126 * _channel_linear(r) + 0.7152 * _channel_linear(g) + 0.0722 * _channel_linear(b)


def contrast_ratio(fg: str, bg: str) -> float:
    """WCAG contrast ratio between two 6-digit sRGB hex colors (1.0-21.0)."""
    lf, lb = _luminance(fg), _luminance(bg)
    lighter, darker = (lf, lb) if lf >= lb else (lb, lf)
    return (lighter + 0.05) / (darker + 0.05)


def is_stylesheet_link(node) -> bool:
    if node.tag != "link":
        return False
    rel = node.attrs.get("rel", "")
    return "stylesheet" in rel.lower().split() and "href" in node.attrs


def extract_style_components(doc: Document) -> list:
    """Every presentation carrier in document order; does not mutate doc."""
    components = []
    for node in doc.iter_subtree():
        if not node.is_element:
            continue
        if node.tag == "style":
            components.append(StyleComponent(node.id, STYLE_ELEMENT))
        elif node.tag == "script":
            components.append(StyleComponent(node.id, SCRIPT_ELEMENT))
        elif is_stylesheet_link(node):
            components.append(
                StyleComponent(node.id, STYLESHEET_LINK, value=node.attrs["href"])
            )
        elif node.tag in WRAPPER_TAGS:
            components.append(StyleComponent(node.id, WRAPPER_ELEMENT, value=node.tag))
        if node.tag in ("style", "script"):
            continue
        if "style" in node.attrs:
            components.append(
                StyleComponent(node.id, INLINE_STYLE, value=node.attrs["style"])
            )
        for name, value in node.attrs.items():
            if name in PRESENTATIONAL_ATTRS or (
                name in SIZE_ATTRS and node.tag not in MEDIA_TAGS
            ):
                components.append(
                    StyleComponent(node.id, PRESENTATIONAL_ATTR, name=name, value=value)
                )
    return components


def equivalent_style(component: StyleComponent, preset: ClearPrintPreset, doc: Document) -> Action:
    """Map one carrier to its replacement action under the given preset."""
    if component.kind == STYLE_ELEMENT:
        node = doc.nodes[component.node]
        if node.attrs.get(MARKER_ATTR) == "1":
            return Action.KEEP
        return Action.REMOVE
    if component.kind == WRAPPER_ELEMENT:
        return Action.UNWRAP
    return Action.REMOVE


@dataclass
class StylePassStats:
    styles_removed: int = 0
    scripts_removed: int = 0


def style_pass(doc: Document, preset: ClearPrintPreset) -> StylePassStats:
    """Sweep every carrier and install the rendered Clear Print sheet."""
    stats = StylePassStats()
    for component in extract_style_components(doc):
        action = equivalent_style(component, preset, doc)
        if action is Action.KEEP:
            continue
        node = doc.nodes[component.node]
        if component.kind in (STYLE_ELEMENT, SCRIPT_ELEMENT, STYLESHEET_LINK):
            doc.detach(component.node)
        elif component.kind == WRAPPER_ELEMENT:
            doc.unwrap(component.node)
        elif component.kind == INLINE_STYLE:
            node.attrs.pop("style", None)
        else:
            node.attrs.pop(component.name, None)
        if component.kind == SCRIPT_ELEMENT:
            stats.scripts_removed += 1
        else:
            stats.styles_removed += 1
    _install_sheet(doc, preset)
    return stats


def apply_clearprint(doc: Document, preset: ClearPrintPreset) -> Document:
    """Replace all author presentation with the Clear Print skin (in place)."""
    style_pass(doc, preset)
    return doc


def _install_sheet(doc: Document, preset: ClearPrintPreset):
    css = render_stylesheet(preset)
    head = doc.head
    marked = [
        n for n in doc.iter_elements("style") if n.attrs.get(MARKER_ATTR) == "1"
    ]
    if len(marked) == 1 and head.children and head.children[-1] == marked[0].id:
        existing = marked[0]
        texts = [doc.nodes[c] for c in existing.children]
        if len(texts) == 1 and texts[0].kind == "text" and texts[0].content == css:
            return  # sheet already current
    for node in marked:
        doc.detach(node.id)
    sheet = doc.new_element("style", {MARKER_ATTR: "1"})
    doc.append(sheet, doc.new_text(css))
    doc.append(doc.head_id, sheet)


def render_stylesheet(preset: ClearPrintPreset) -> str:
    """Emit the replacement skin for one preset."""
    fonts = ", ".join(preset.font_family_stack)
    size = f"{preset.base_font_size:g}px"
    return (
        "* {"
        f" font-family: {fonts} !important;"
        f" line-height: {preset.line_height:g} !important;"
        " font-style: normal !important;"
        f" text-align: {preset.alignment} !important;"
        " }\n"
        "body {"
        f" color: {preset.text_color} !important;"
        f" background-color: {preset.background_color} !important;"
        f" font-size: {size} !important;"
        f" max-width: {preset.max_line_width}ch;"
        " margin: 0 auto; padding: 1em;"
        " }\n"
        "h1, h2, h3, h4, h5, h6 { line-height: 1.3 !important; }\n"
        "a, a:visited {"
        f" color: {preset.link_color} !important;"
        f" text-decoration: {'underline' if preset.underline_links else 'none'} !important;"
        " }\n"
        "a:focus, a:hover {"
        f" outline: 3px solid {preset.link_color}; outline-offset: 2px;"
        " }\n"
        "img, video { max-width: 100%; height: auto; }\n"
        f"table, td, th {{ border-color: {preset.text_color}; }}\n"
    )


def load_presets(path=None) -> dict:
    """Load the preset catalog from a TOML file (shipped catalog by default)."""
    if path is None:
        with resources.files(__package__).joinpath("presets.toml").open(
            "r", encoding="utf-8"
        ) as fh:
            data = toml_lite.loads(fh.read())
    else:
        data = toml_lite.load(path)
    presets = {}
    for name, table in data.items():
        if not isinstance(table, dict):
            raise ConfigError(f"preset {name!r} is not a table")
        kwargs = {"name": name}
        for key in (
            "base_font_size",
            "line_height",
            "text_color",
            "background_color",
            "link_color",
            "max_line_width",
        ):
            if key in table:
                kwargs[key] = table[key]
        if "font_family_stack" in table:
            kwargs["font_family_stack"] = tuple(table["font_family_stack"])
        try:
            presets[name] = ClearPrintPreset(**kwargs).validate_shipped()
        except TypeError as exc:
            raise ConfigError(f"preset {name!r}: {exc}") from None
    if not presets:
        raise ConfigError("preset catalog is empty")
    return presets

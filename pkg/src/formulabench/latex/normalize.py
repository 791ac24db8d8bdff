"""Token normalization: synonyms, spacing removal, TeX-primitive rewrites.

Normalization is total on valid token lists and idempotent. The synonym and
strip tables ship as data files so new equivalences can be added without code
changes; see ``data/synonyms.txt`` and ``data/strip.txt``.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

from .tokens import (
    COMMAND,
    DIGITS,
    GROUP_CLOSE,
    GROUP_OPEN,
    OPERATOR,
    LatexToken,
)

_SYNONYM_LINE = re.compile(r'"([^"]+)"\s*->\s*"([^"]+)"')

# Rewritten structurally: everything before the command in its group becomes
# the first argument, everything after the second.
_INFIX_REWRITES = {"over": "frac", "choose": "binom"}

# Stripped regardless of the strip file: the non-breaking space glyph and the
# escaped-space control symbol are pure spacing.
_SPACING_GLYPHS = frozenset("~")


def _data_text(name: str) -> str:
    return (resources.files("formulabench") / "data" / name).read_text("utf-8")


def _parse_synonyms(text: str) -> dict[str, str]:
    table = {}
    for line_no, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        m = _SYNONYM_LINE.fullmatch(line)
        if not m:
            raise ValueError(f"bad synonym line {line_no}: {line!r}")
        table[m.group(1)] = m.group(2)
    return table


def _parse_strip_list(text: str) -> frozenset[str]:
    names = set()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        names.add(line)
    return frozenset(names)


def load_synonyms(path=None) -> dict[str, str]:
    """Synonym table, from `path` or the shipped default."""
    if path is None:
        return dict(_default_synonyms())
    with open(path, encoding="utf-8") as fh:
        return _parse_synonyms(fh.read())


def load_strip_list(path=None) -> frozenset[str]:
    """Strip list (formatting-only command names), from `path` or the default."""
    if path is None:
        return _default_strip_list()
    with open(path, encoding="utf-8") as fh:
        return _parse_strip_list(fh.read())


@lru_cache(maxsize=1)
def _default_synonyms() -> dict[str, str]:
    return _parse_synonyms(_data_text("synonyms.txt"))


@lru_cache(maxsize=1)
def _default_strip_list() -> frozenset[str]:
    return _parse_strip_list(_data_text("strip.txt"))


def normalize_tokens(
    toks: list[LatexToken],
    synonyms: dict[str, str] | None = None,
    strip: frozenset[str] | None = None,
) -> list[LatexToken]:
    """Map synonym commands to canonical form, drop formatting-only tokens,
    rewrite \\over / \\choose to \\frac / \\binom, and unwrap redundant
    single-token groups."""
    syn = _default_synonyms() if synonyms is None else synonyms
    strip_set = _default_strip_list() if strip is None else strip

    flat = _strip_and_rename(toks, syn, strip_set)
    tree = _nest(flat)
    tree = _rewrite_infix_commands(tree)
    tree = _unwrap_groups(tree)
    return _flatten(tree)


def _strip_and_rename(toks, syn, strip_set):
    out = []
    i = 0
    n = len(toks)
    while i < n:
        t = toks[i]
        if t.kind == COMMAND and (t.text in strip_set or t.text == " "):
            i += 1
            continue
        if t.kind == OPERATOR and t.text in _SPACING_GLYPHS:
            i += 1
            continue
        if t.kind == COMMAND and i + 1 < n and toks[i + 1].kind == OPERATOR:
            fused = syn.get(t.text + toks[i + 1].text)
            if fused is not None:
                out.append(LatexToken(COMMAND, fused))
                i += 2
                continue
        if t.kind == COMMAND:
            canon = syn.get(t.text)
            if canon is not None and canon != t.text:
                out.append(LatexToken(COMMAND, canon))
                i += 1
                continue
        out.append(t)
        i += 1
    return out


def _nest(flat):
    """Group-open/close tokens to nested lists. Input is brace balanced."""
    stack = [[]]
    for t in flat:
        if t.kind == GROUP_OPEN:
            stack.append([])
        elif t.kind == GROUP_CLOSE:
            group = stack.pop()
            stack[-1].append(group)
        else:
            stack[-1].append(t)
    assert len(stack) == 1, "tokenizer guarantees balanced braces"
    return stack[0]


def _rewrite_infix_commands(elems):
    elems = [
        _rewrite_infix_commands(e) if isinstance(e, list) else e for e in elems
    ]
    for i, e in enumerate(elems):
        if isinstance(e, LatexToken) and e.kind == COMMAND and e.text in _INFIX_REWRITES:
            head = elems[:i]
            tail = _rewrite_infix_commands(elems[i + 1:])
            return [LatexToken(COMMAND, _INFIX_REWRITES[e.text]), head, tail]
    return elems


def _unwrap_groups(elems):
    out = []
    for e in elems:
        if isinstance(e, list):
            inner = _unwrap_groups(e)
            if not inner:
                continue
            if len(inner) == 1 and isinstance(inner[0], LatexToken):
                t = inner[0]
                # {12} after a script marker is not the same as bare 12.
                if not (t.kind == DIGITS and len(t.text) > 1):
                    out.append(t)
                    continue
            out.append(inner)
        else:
            out.append(e)
    return out


def _flatten(elems):
    out = []
    for e in elems:
        if isinstance(e, list):
            out.append(LatexToken(GROUP_OPEN, "{"))
            out.extend(_flatten(e))
            out.append(LatexToken(GROUP_CLOSE, "}"))
        else:
            out.append(e)
    return out


def render_tokens(toks: list[LatexToken]) -> str:
    """Deterministic textual rendering of a token list.

    Commands carry one trailing space so adjacent names never merge; all other
    tokens are juxtaposed. Whitespace in the original source cannot influence
    the result.
    """
    parts = []
    for t in toks:
        if t.kind == COMMAND:
            parts.append("\\" + t.text + " ")
        else:
            parts.append(t.text)
    return "".join(parts).rstrip()

"""Tokenizer for the supported LaTeX math subset.

Every non-whitespace character of the input belongs to exactly one token.
Contiguous digits merge into a single digit-run token, and ``*n*`` sequences
become wildcard tokens carrying their slot number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import UnbalancedBracesError, UnknownEscapeError

COMMAND = "command"
LETTER = "letter"
DIGITS = "digit-run"
OPERATOR = "operator-glyph"
GROUP_OPEN = "group-open"
GROUP_CLOSE = "group-close"
SUB_MARKER = "subscript-marker"
SUP_MARKER = "superscript-marker"
WILDCARD = "wildcard"

# Control symbols: a backslash followed by one of these is a one-character
# command (e.g. "\\" line break, "\," thin space, "\{" literal brace).
ESCAPABLE = frozenset("\\{}%&#_,;:! |")

_WILDCARD_RE = re.compile(r"\*([1-9][0-9]*)\*")
_COMMAND_RE = re.compile(r"\\([a-zA-Z]+)")
_DIGITS_RE = re.compile(r"[0-9]+")


@dataclass(frozen=True)
class LatexToken:
    kind: str
    text: str
    slot: int | None = None

    def __repr__(self):  # compact, for test failure readability
        if self.kind == WILDCARD:
            return f"<*{self.slot}*>"
        return f"<{self.kind}:{self.text}>"


def tokenize_latex(src: str) -> list[LatexToken]:
    """Split a LaTeX string into tokens.

    Raises:
        UnbalancedBracesError: group braces do not balance.
        UnknownEscapeError: backslash followed by a non-letter, non-escapable
            character (or nothing at all).
    """
    tokens: list[LatexToken] = []
    depth = 0
    i = 0
    n = len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "*":
            m = _WILDCARD_RE.match(src, i)
            if m:
                tokens.append(LatexToken(WILDCARD, m.group(0), slot=int(m.group(1))))
                i = m.end()
                continue
            tokens.append(LatexToken(OPERATOR, "*"))
            i += 1
            continue
        if ch == "\\":
            m = _COMMAND_RE.match(src, i)
            if m:
                tokens.append(LatexToken(COMMAND, m.group(1)))
                i = m.end()
                continue
            if i + 1 < n and src[i + 1] in ESCAPABLE:
                tokens.append(LatexToken(COMMAND, src[i + 1]))
                i += 2
                continue
            tail = src[i + 1] if i + 1 < n else "<end of input>"
            raise UnknownEscapeError(f"unknown escape '\\{tail}' at position {i}")
        if ch == "{":
            depth += 1
            tokens.append(LatexToken(GROUP_OPEN, "{"))
            i += 1
            continue
        if ch == "}":
            if depth == 0:
                raise UnbalancedBracesError(f"unmatched '}}' at position {i}")
            depth -= 1
            tokens.append(LatexToken(GROUP_CLOSE, "}"))
            i += 1
            continue
        if ch == "^":
            tokens.append(LatexToken(SUP_MARKER, "^"))
            i += 1
            continue
        if ch == "_":
            tokens.append(LatexToken(SUB_MARKER, "_"))
            i += 1
            continue
        m = _DIGITS_RE.match(src, i)
        if m:
            tokens.append(LatexToken(DIGITS, m.group(0)))
            i = m.end()
            continue
        if ch.isalpha():
            tokens.append(LatexToken(LETTER, ch))
            i += 1
            continue
        tokens.append(LatexToken(OPERATOR, ch))
        i += 1
    if depth != 0:
        raise UnbalancedBracesError(f"{depth} unclosed '{{' in input")
    return tokens

"""Canonical keys: one digest per visually-identical formula.

A formula that parses gets a key from its layout tree serialization; one that
does not is keyed by its normalized LaTeX text, so equality degrades to
whitespace-insensitive string identity instead of failing.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

from ..errors import ParseFailureError, TokenizeError
from .normalize import normalize_tokens, render_tokens
from .slt import parse_slt, serialize_slt
from .tokens import tokenize_latex

KIND_SLT = "slt"
KIND_FALLBACK = "latex-fallback"

_WHITESPACE_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class CanonicalKey:
    kind: str
    digest: str
    serialized: str


def _digest(serialized: str) -> str:
    return hashlib.sha256(serialized.encode("utf-8")).hexdigest()


def canonical_key(src: str) -> CanonicalKey:
    """Compute the canonical key for a LaTeX formula. Total: never raises."""
    try:
        toks = tokenize_latex(src)
    except TokenizeError:
        serialized = _WHITESPACE_RE.sub("", src)
        return CanonicalKey(KIND_FALLBACK, _digest(serialized), serialized)
    toks = normalize_tokens(toks)
    try:
        tree = parse_slt(toks)
    except ParseFailureError:
        serialized = render_tokens(toks)
        return CanonicalKey(KIND_FALLBACK, _digest(serialized), serialized)
    serialized = serialize_slt(tree)
    return CanonicalKey(KIND_SLT, _digest(serialized), serialized)

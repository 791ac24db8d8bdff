"""LaTeX formula model: tokens, layout trees, operator trees, canonical keys."""

from .tokens import (
    LatexToken,
    tokenize_latex,
    COMMAND,
    LETTER,
    DIGITS,
    OPERATOR,
    GROUP_OPEN,
    GROUP_CLOSE,
    SUB_MARKER,
    SUP_MARKER,
    WILDCARD,
)
from .normalize import normalize_tokens, load_synonyms, load_strip_list, render_tokens
from .slt import (
    SltNode,
    SymbolLayoutTree,
    parse_slt,
    serialize_slt,
    validate_slt,
    EDGE_ORDER,
)
from .opt import OptNode, OperatorTree, slt_to_opt, serialize_opt
from .canon import CanonicalKey, canonical_key

__all__ = [
    "LatexToken",
    "tokenize_latex",
    "normalize_tokens",
    "load_synonyms",
    "load_strip_list",
    "render_tokens",
    "SltNode",
    "SymbolLayoutTree",
    "parse_slt",
    "serialize_slt",
    "validate_slt",
    "EDGE_ORDER",
    "OptNode",
    "OperatorTree",
    "slt_to_opt",
    "serialize_opt",
    "CanonicalKey",
    "canonical_key",
    "COMMAND",
    "LETTER",
    "DIGITS",
    "OPERATOR",
    "GROUP_OPEN",
    "GROUP_CLOSE",
    "SUB_MARKER",
    "SUP_MARKER",
    "WILDCARD",
]

"""Operator trees: mathematical syntax as operators over their arguments.

Built from symbol layout trees by resolving the writing line with a fixed
precedence table: relations bind loosest, then additive operators, then
multiplication (explicit or implicit), then scripts. Operators at the same
level associate left.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import OptFailureError
from .slt import (
    FRACTION,
    FUNCTION_COMMANDS,
    GROUP_ROW,
    LARGE_OPERATOR_COMMANDS,
    NUMBER,
    OPERATOR_NODE,
    PREFIX_COMMANDS,
    RADICAL,
    SYMBOL,
    WILDCARD_NODE,
    SymbolLayoutTree,
)
from .slt import (
    ADDITIVE_COMMANDS as _ADD_CMDS,
)
from .slt import (
    MULTIPLICATIVE_COMMANDS as _MUL_CMDS,
)
from .slt import (
    RELATION_COMMANDS as _REL_CMDS,
)

OPT_OPERATOR = "Operator"
OPT_OPERAND = "Operand"
OPT_APPLY = "Apply"
OPT_WILDCARD = "Wildcard"

_PREC_SEQUENCE = 5
_PREC_RELATION = 10
_PREC_BIG_OP = 15
_PREC_ADDITIVE = 20
_PREC_PREFIX = 25
_PREC_MULTIPLICATIVE = 30
_PREC_POSTFIX = 40

_RELATION_GLYPHS = frozenset("=<>:≤≥≠∈⊂⊆≡∼≈→←↔")
_ADDITIVE_GLYPHS = frozenset("+-−±∓∪∨⊕")
_MULTIPLICATIVE_GLYPHS = frozenset("*/×⋅∗÷∩∧⊗")
_SEQUENCE_GLYPHS = frozenset(",;")
_POSTFIX_GLYPHS = frozenset("!'")


@dataclass
class OptNode:
    kind: str
    value: str = ""
    children: list[int] = field(default_factory=list)


@dataclass
class OperatorTree:
    nodes: list[OptNode]
    root: int

    def node(self, idx: int) -> OptNode:
        return self.nodes[idx]


def slt_to_opt(slt: SymbolLayoutTree) -> OperatorTree:
    """Resolve the layout tree's writing lines into an operator tree."""
    conv = _Converter(slt)
    root = conv.convert_row(slt.root)
    return OperatorTree(conv.nodes, root)


def _infix_prec(node) -> int | None:
    if node.kind != OPERATOR_NODE:
        return None
    v = node.value
    if v in _SEQUENCE_GLYPHS:
        return _PREC_SEQUENCE
    if v in _RELATION_GLYPHS or v in _REL_CMDS:
        return _PREC_RELATION
    if v in _ADDITIVE_GLYPHS or v in _ADD_CMDS:
        return _PREC_ADDITIVE
    if v in _MULTIPLICATIVE_GLYPHS or v in _MUL_CMDS:
        return _PREC_MULTIPLICATIVE
    return None


class _Converter:
    def __init__(self, slt: SymbolLayoutTree):
        self.slt = slt
        self.nodes: list[OptNode] = []

    def _new(self, kind, value="", children=()) -> int:
        self.nodes.append(OptNode(kind, value, list(children)))
        return len(self.nodes) - 1

    def convert_row(self, first: int) -> int:
        """Convert one NEXT chain starting at `first` into a subtree root."""
        items = []
        idx = first
        while idx is not None:
            items.append(idx)
            idx = self.slt.node(idx).child("NEXT")
        result, pos = self._expr(items, 0, 0)
        if pos != len(items):
            left = self.slt.node(items[pos])
            raise OptFailureError(f"unexpected {left.kind} '{left.value}'")
        return result

    # --- precedence-climbing expression parser ---------------------------

    def _expr(self, items, pos, min_prec):
        left, pos = self._prefix(items, pos)
        while pos < len(items):
            node = self.slt.node(items[pos])
            if node.kind == OPERATOR_NODE and node.value in _POSTFIX_GLYPHS:
                if _PREC_POSTFIX < min_prec:
                    break
                left = self._new(OPT_OPERATOR, node.value, [left])
                pos += 1
                continue
            prec = _infix_prec(node)
            if prec is not None:
                if prec < min_prec:
                    break
                right, pos = self._expr(items, pos + 1, prec + 1)
                left = self._new(OPT_OPERATOR, node.value, [left, right])
                continue
            if self._starts_operand(node) and _PREC_MULTIPLICATIVE >= min_prec:
                right, pos = self._expr(items, pos, _PREC_MULTIPLICATIVE + 1)
                left = self._new(OPT_OPERATOR, "times", [left, right])
                continue
            break
        return left, pos

    def _starts_operand(self, node) -> bool:
        if node.kind in (SYMBOL, NUMBER, FRACTION, RADICAL, GROUP_ROW, WILDCARD_NODE):
            return True
        return node.kind == OPERATOR_NODE and node.value in PREFIX_COMMANDS

    def _prefix(self, items, pos):
        if pos >= len(items):
            raise OptFailureError("dangling operator: missing operand")
        idx = items[pos]
        node = self.slt.node(idx)
        if node.kind == OPERATOR_NODE:
            v = node.value
            if v in _ADDITIVE_GLYPHS or v in _ADD_CMDS or v in PREFIX_COMMANDS:
                arg, pos = self._expr(items, pos + 1, _PREC_PREFIX + 1)
                return self._new(OPT_OPERATOR, v, [arg]), pos
            if v in LARGE_OPERATOR_COMMANDS:
                return self._big_operator(items, pos)
            raise OptFailureError(f"operator '{v}' has no left operand")
        if node.kind == SYMBOL and node.value in FUNCTION_COMMANDS:
            return self._function(items, pos)
        return self._operand(idx), pos + 1

    def _big_operator(self, items, pos):
        node = self.slt.node(items[pos])
        under = node.child("UNDER")
        over = node.child("OVER")
        pos += 1
        if pos >= len(items) or not self._can_start(items, pos):
            if under is None and over is None:
                return self._new(OPT_OPERAND, node.value), pos
            raise OptFailureError(f"{node.value} limits with no body")
        # Fixed arity: [lower limit, upper limit, body]; absent limits become
        # empty operands so differently-placed limits never collide.
        limits = [
            self.convert_row(c) if c is not None else self._new(OPT_OPERAND, "")
            for c in (under, over)
        ]
        body, pos = self._expr(items, pos, _PREC_BIG_OP + 1)
        return self._new(OPT_OPERATOR, node.value, limits + [body]), pos

    def _function(self, items, pos):
        node = self.slt.node(items[pos])
        pos += 1
        if pos < len(items) and self._can_start(items, pos):
            arg, pos = self._expr(items, pos, _PREC_MULTIPLICATIVE + 1)
            result = self._new(OPT_APPLY, node.value, [arg])
        else:
            result = self._new(OPT_OPERAND, node.value)
        return self._wrap_scripts(result, node), pos

    def _can_start(self, items, pos) -> bool:
        node = self.slt.node(items[pos])
        if self._starts_operand(node):
            return True
        if node.kind == OPERATOR_NODE:
            v = node.value
            return v in _ADDITIVE_GLYPHS or v in _ADD_CMDS or v in LARGE_OPERATOR_COMMANDS
        return False

    # --- single operands --------------------------------------------------

    def _operand(self, idx: int) -> int:
        node = self.slt.node(idx)
        if node.kind == SYMBOL or node.kind == NUMBER:
            base = self._new(OPT_OPERAND, node.value)
        elif node.kind == WILDCARD_NODE:
            base = self._new(OPT_WILDCARD, node.value)
        elif node.kind == FRACTION:
            above = self.convert_row(node.child("ABOVE"))
            below = self.convert_row(node.child("BELOW"))
            name = "binom" if node.value == "binom" else "/"
            base = self._new(OPT_OPERATOR, name, [above, below])
        elif node.kind == RADICAL:
            radicand = self.convert_row(node.child("WITHIN"))
            over = node.child("OVER")
            if over is not None:
                base = self._new(
                    OPT_OPERATOR, "root", [self.convert_row(over), radicand]
                )
            else:
                base = self._new(OPT_OPERATOR, "sqrt", [radicand])
        elif node.kind == GROUP_ROW:
            within = node.child("WITHIN")
            if within is None:
                raise OptFailureError("empty fenced group")
            base = self.convert_row(within)
        else:
            raise OptFailureError(f"cannot use {node.kind} '{node.value}' as operand")
        return self._wrap_scripts(base, node)

    def _wrap_scripts(self, base: int, node) -> int:
        sub = node.child("SUB")
        if sub is not None:
            base = self._new(OPT_OPERATOR, "_", [base, self.convert_row(sub)])
        sup = node.child("SUP")
        if sup is not None:
            base = self._new(OPT_OPERATOR, "^", [base, self.convert_row(sup)])
        return base


# --- serialization --------------------------------------------------------

_ESCAPES = str.maketrans({"\\": "\\\\", "(": "\\(", ")": "\\)", ",": "\\,"})

_KIND_TAGS = {
    OPT_OPERATOR: "O",
    OPT_OPERAND: "D",
    OPT_APPLY: "A",
    OPT_WILDCARD: "W",
}


def serialize_opt(tree: OperatorTree) -> str:
    """Deterministic preorder serialization; byte-equal iff trees are equal."""

    def ser(idx: int) -> str:
        node = tree.nodes[idx]
        label = f"{_KIND_TAGS[node.kind]}!{node.value.translate(_ESCAPES)}"
        if not node.children:
            return label
        return f"{label}({','.join(ser(c) for c in node.children)})"

    return ser(tree.root)

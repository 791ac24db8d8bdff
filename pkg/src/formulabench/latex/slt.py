"""Symbol layout trees: how symbols sit on writing lines.

Nodes are symbols, numbers, operators, fractions, radicals, fenced groups and
wildcard slots. Edges express placement: NEXT along the writing line, SUP/SUB
for scripts, ABOVE/BELOW for fraction parts, UNDER/OVER for big-operator
limits, WITHIN for fenced or radical content.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ParseFailureError
from .tokens import (
    COMMAND,
    DIGITS,
    LETTER,
    OPERATOR,
    SUB_MARKER,
    SUP_MARKER,
    WILDCARD,
    LatexToken,
)
from .normalize import _nest  # groups are re-nested for recursive descent

EDGE_ORDER = ("NEXT", "SUP", "SUB", "ABOVE", "BELOW", "UNDER", "OVER", "WITHIN")

SYMBOL = "Symbol"
NUMBER = "Number"
OPERATOR_NODE = "Operator"
FRACTION = "Fraction"
RADICAL = "Radical"
GROUP_ROW = "GroupRow"
WILDCARD_NODE = "Wildcard"

GREEK = frozenset(
    """alpha beta gamma delta epsilon varepsilon zeta eta theta vartheta iota
    kappa lambda mu nu xi omicron pi varpi rho varrho sigma varsigma tau
    upsilon phi varphi chi psi omega Gamma Delta Theta Lambda Xi Pi Sigma
    Upsilon Phi Psi Omega""".split()
)

SYMBOL_COMMANDS = GREEK | frozenset(
    """infty partial nabla hbar ell aleph varnothing Re Im imath jmath wp
    prime angle triangle bot top ldots cdots vdots ddots forall exists
    star bullet circ diamond dagger S P""".split()
)

FUNCTION_COMMANDS = frozenset(
    """sin cos tan cot sec csc arcsin arccos arctan sinh cosh tanh coth
    ln log lg exp det dim ker deg gcd hom arg min max sup inf Pr""".split()
)

RELATION_COMMANDS = frozenset(
    """le ge ne ll gg equiv sim simeq approx cong propto prec succ preceq
    succeq subset supset subseteq supseteq in ni notin mid nmid parallel
    perp rightarrow leftarrow leftrightarrow Rightarrow Leftarrow
    Leftrightarrow mapsto longrightarrow longleftarrow Longrightarrow
    Longleftarrow models vdash dashv asymp doteq""".split()
)

ADDITIVE_COMMANDS = frozenset("pm mp oplus ominus cup vee sqcup uplus".split())

MULTIPLICATIVE_COMMANDS = frozenset(
    "times cdot div ast otimes odot oslash cap wedge setminus sqcap amalg".split()
)

PREFIX_COMMANDS = frozenset(("neg",))

LARGE_OPERATOR_COMMANDS = frozenset(
    """sum prod coprod int iint iiint oint bigcup bigcap bigvee bigwedge
    bigoplus bigotimes bigodot biguplus bigsqcup lim limsup liminf""".split()
)

OPERATOR_COMMANDS = (
    RELATION_COMMANDS
    | ADDITIVE_COMMANDS
    | MULTIPLICATIVE_COMMANDS
    | PREFIX_COMMANDS
    | LARGE_OPERATOR_COMMANDS
)

# Escaped punctuation commands that render as a literal glyph on the line.
GLYPH_COMMANDS = {
    "{": "{",
    "}": "}",
    "|": "‖",  # \| renders a double bar, distinct from |
    "%": "%",
    "&": "&",
    "#": "#",
    "_": "_",
}

_FENCE_OPEN = frozenset("([")
_FENCE_CLOSE = frozenset(")]")


@dataclass
class SltNode:
    kind: str
    value: str = ""
    edges: dict[str, int] = field(default_factory=dict)

    def child(self, label: str) -> int | None:
        return self.edges.get(label)


@dataclass
class SymbolLayoutTree:
    nodes: list[SltNode]
    root: int

    def node(self, idx: int) -> SltNode:
        return self.nodes[idx]


def parse_slt(toks: list[LatexToken]) -> SymbolLayoutTree:
    """Parse normalized tokens into a symbol layout tree.

    Raises ParseFailureError for constructs outside the supported grammar;
    callers fall back to the latex string key.
    """
    parser = _Parser()
    first, _last = parser.parse_row(_nest(list(toks)))
    if first is None:
        raise ParseFailureError("empty formula")
    return SymbolLayoutTree(parser.nodes, first)


class _Parser:
    def __init__(self):
        self.nodes: list[SltNode] = []

    def _new(self, kind, value="") -> int:
        self.nodes.append(SltNode(kind, value))
        return len(self.nodes) - 1

    def _attach(self, parent: int, label: str, child: int | None):
        if child is None:
            raise ParseFailureError(f"missing {label} argument")
        node = self.nodes[parent]
        if label in node.edges:
            raise ParseFailureError(f"duplicate {label} on {node.kind}")
        node.edges[label] = child

    # --- rows -------------------------------------------------------------

    def parse_row(self, elems) -> tuple[int | None, int | None]:
        """A writing line: atoms chained with NEXT edges.

        Returns (first, last) node indices, or (None, None) for an empty row.
        """
        first = last = None
        i = 0
        while i < len(elems):
            span, i = self._parse_scripted_atom(elems, i)
            if span is None:
                continue
            if last is None:
                first, last = span
            else:
                self._attach(last, "NEXT", span[0])
                last = span[1]
        return first, last

    # --- atoms ------------------------------------------------------------

    def _parse_scripted_atom(self, elems, i):
        """One atom plus any ^ / _ scripts. Returns ((first, last), next_i)."""
        span, i = self._parse_atom(elems, i)
        if span is None:
            return None, i
        base = span[1]
        node = self.nodes[base]
        large = node.kind == OPERATOR_NODE and node.value in LARGE_OPERATOR_COMMANDS
        while i < len(elems) and self._is_marker(elems[i]):
            marker = elems[i]
            i += 1
            if marker.kind == SUP_MARKER:
                label = "OVER" if large else "SUP"
            else:
                label = "UNDER" if large else "SUB"
            arg, i = self._parse_argument(elems, i, label)
            self._attach(base, label, arg)
        return span, i

    @staticmethod
    def _is_marker(e):
        return isinstance(e, LatexToken) and e.kind in (SUP_MARKER, SUB_MARKER)

    def _parse_argument(self, elems, i, label):
        """A script / fraction / radicand argument: a braced row or one atom.

        A bare multi-digit run yields only its first digit (TeX behavior);
        the remainder stays on the writing line.
        """
        if i >= len(elems):
            raise ParseFailureError(f"missing {label} argument")
        e = elems[i]
        if isinstance(e, list):
            inner_first, _ = self.parse_row(e)
            if inner_first is None:
                raise ParseFailureError(f"empty {label} argument")
            return inner_first, i + 1
        if isinstance(e, LatexToken) and e.kind == DIGITS and len(e.text) > 1:
            elems[i] = LatexToken(DIGITS, e.text[1:])
            return self._new(NUMBER, e.text[0]), i
        span, i = self._parse_atom(elems, i)
        if span is None:
            raise ParseFailureError(f"missing {label} argument")
        if span[0] != span[1]:
            raise ParseFailureError(f"{label} argument is not a single atom")
        return span[0], i

    def _parse_atom(self, elems, i):
        """Returns ((first, last) span or None, next_i)."""
        e = elems[i]
        if isinstance(e, list):
            # Brace group: contents splice into the surrounding line.
            inner = self.parse_row(e)
            if inner[0] is None:
                return None, i + 1
            return inner, i + 1

        if e.kind == LETTER:
            n = self._new(SYMBOL, e.text)
            return (n, n), i + 1
        if e.kind == DIGITS:
            n = self._new(NUMBER, e.text)
            return (n, n), i + 1
        if e.kind == WILDCARD:
            n = self._new(WILDCARD_NODE, str(e.slot))
            return (n, n), i + 1
        if e.kind in (SUP_MARKER, SUB_MARKER):
            raise ParseFailureError(f"script marker '{e.text}' with no base")
        if e.kind == OPERATOR:
            if e.text in _FENCE_OPEN:
                return self._parse_fenced(elems, i)
            if e.text in _FENCE_CLOSE:
                raise ParseFailureError(f"unmatched closing fence '{e.text}'")
            n = self._new(OPERATOR_NODE, e.text)
            return (n, n), i + 1
        if e.kind == COMMAND:
            return self._parse_command(elems, i)
        raise ParseFailureError(f"unsupported token {e!r}")

    def _parse_fenced(self, elems, i):
        opener = elems[i]
        depth = 1
        j = i + 1
        while j < len(elems):
            t = elems[j]
            if isinstance(t, LatexToken) and t.kind == OPERATOR:
                if t.text in _FENCE_OPEN:
                    depth += 1
                elif t.text in _FENCE_CLOSE:
                    depth -= 1
                    if depth == 0:
                        break
            j += 1
        else:
            raise ParseFailureError(f"unclosed fence '{opener.text}'")
        closer = elems[j]
        node = self._new(GROUP_ROW, opener.text + closer.text)
        inner_first, _ = self.parse_row(elems[i + 1 : j])
        if inner_first is not None:
            self._attach(node, "WITHIN", inner_first)
        return (node, node), j + 1

    def _parse_command(self, elems, i):
        name = elems[i].text
        if name == "frac" or name == "binom":
            node = self._new(FRACTION, "binom" if name == "binom" else "")
            num, i = self._parse_argument(elems, i + 1, "ABOVE")
            den, i = self._parse_argument(elems, i, "BELOW")
            self._attach(node, "ABOVE", num)
            self._attach(node, "BELOW", den)
            return (node, node), i
        if name == "sqrt":
            node = self._new(RADICAL)
            i += 1
            if (
                i < len(elems)
                and isinstance(elems[i], LatexToken)
                and elems[i].kind == OPERATOR
                and elems[i].text == "["
            ):
                j = i + 1
                while j < len(elems):
                    t = elems[j]
                    if isinstance(t, LatexToken) and t.kind == OPERATOR and t.text == "]":
                        break
                    j += 1
                else:
                    raise ParseFailureError("unclosed radical index")
                idx_first, _ = self.parse_row(elems[i + 1 : j])
                if idx_first is None:
                    raise ParseFailureError("empty radical index")
                self._attach(node, "OVER", idx_first)
                i = j + 1
            arg, i = self._parse_argument(elems, i, "WITHIN")
            self._attach(node, "WITHIN", arg)
            return (node, node), i
        if name in OPERATOR_COMMANDS:
            n = self._new(OPERATOR_NODE, name)
            return (n, n), i + 1
        if name in FUNCTION_COMMANDS or name in SYMBOL_COMMANDS:
            n = self._new(SYMBOL, name)
            return (n, n), i + 1
        if name in GLYPH_COMMANDS:
            n = self._new(OPERATOR_NODE, GLYPH_COMMANDS[name])
            return (n, n), i + 1
        raise ParseFailureError(f"unsupported command \\{name}")


# --- serialization and validation ----------------------------------------

_ESCAPES = str.maketrans(
    {"\\": "\\\\", "(": "\\(", ")": "\\)", ",": "\\,", "=": "\\="}
)


def _escape(text: str) -> str:
    return text.translate(_ESCAPES)


def node_label(node: SltNode) -> str:
    if node.kind == SYMBOL:
        return "S!" + _escape(node.value)
    if node.kind == NUMBER:
        return "N!" + _escape(node.value)
    if node.kind == OPERATOR_NODE:
        return "O!" + _escape(node.value)
    if node.kind == FRACTION:
        return "F!binom" if node.value == "binom" else "F"
    if node.kind == RADICAL:
        return "R"
    if node.kind == GROUP_ROW:
        return "G!" + _escape(node.value)
    if node.kind == WILDCARD_NODE:
        return "W!" + node.value
    raise ValueError(f"unknown node kind {node.kind}")


def serialize_slt(tree: SymbolLayoutTree, root: int | None = None) -> str:
    """Deterministic preorder serialization; byte-equal iff trees are equal.

    With `root` given, serializes the subtree below that node instead.
    """

    def ser(idx: int) -> str:
        node = tree.nodes[idx]
        parts = [
            f"{edge}={ser(node.edges[edge])}"
            for edge in EDGE_ORDER
            if edge in node.edges
        ]
        if not parts:
            return node_label(node)
        return f"{node_label(node)}({','.join(parts)})"

    return ser(tree.root if root is None else root)


def validate_slt(tree: SymbolLayoutTree) -> None:
    """Raise ValueError if the structure breaks the layout-tree invariants."""
    seen: set[int] = set()

    def walk(idx: int):
        if idx in seen:
            raise ValueError(f"node {idx} has two parents or a cycle")
        seen.add(idx)
        node = tree.nodes[idx]
        if len(node.edges) != len(set(node.edges)):
            raise ValueError("duplicate edge label")
        for edge in node.edges:
            if edge not in EDGE_ORDER:
                raise ValueError(f"unknown edge label {edge}")
        if node.kind == FRACTION:
            if "ABOVE" not in node.edges or "BELOW" not in node.edges:
                raise ValueError("fraction without both parts")
        for edge in node.edges.values():
            walk(edge)

    walk(tree.root)

"""Baseline structural retriever over visual clusters.

Ranks clusters by Dice overlap of layout-tree features (node labels plus
ancestor/descendant pairs within two edges). Queries may contain wildcard
slots; a wildcard binds a non-empty run of consecutive atoms on a writing
line, and repeated slots must bind structurally identical segments.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .collection import FormulaInstance, RankedRun, RunEntry
from .errors import EmptyQueryError, ParseFailureError, TokenizeError
from .latex import canonical_key, normalize_tokens, parse_slt, tokenize_latex
from .latex.slt import (
    EDGE_ORDER,
    WILDCARD_NODE,
    SymbolLayoutTree,
    node_label,
    serialize_slt,
)

RUN_TAG = "baseline-dice"


def slt_features(slt: SymbolLayoutTree) -> Counter:
    """Multiset of unary node labels and (ancestor, descendant, path) tuples.

    Paths cover one and two edges; edge labels are dot-joined.
    """
    features: Counter = Counter()

    def children(idx):
        node = slt.node(idx)
        return [(edge, node.edges[edge]) for edge in EDGE_ORDER if edge in node.edges]

    def walk(idx):
        label = node_label(slt.node(idx))
        features[(label,)] += 1
        for edge1, child1 in children(idx):
            features[(label, node_label(slt.node(child1)), edge1)] += 1
            for edge2, child2 in children(child1):
                features[(label, node_label(slt.node(child2)), f"{edge1}.{edge2}")] += 1
            walk(child1)

    walk(slt.root)
    return features


def score_dice(q: Counter, c: Counter) -> float:
    """Dice coefficient over feature multisets: 2|q n c| / (|q| + |c|)."""
    q_size = sum(q.values())
    if q_size == 0:
        raise EmptyQueryError("query has no features")
    c_size = sum(c.values())
    if c_size == 0:
        return 0.0
    overlap = sum(min(count, c[feat]) for feat, count in q.items())
    return 2.0 * overlap / (q_size + c_size)


# --- wildcard unification -------------------------------------------------


def _chain(tree: SymbolLayoutTree, first: int | None) -> list[int]:
    out = []
    idx = first
    while idx is not None:
        out.append(idx)
        idx = tree.node(idx).child("NEXT")
    return out


def _atom_sig(tree: SymbolLayoutTree, idx: int) -> str:
    """Serialization of one atom: the node and everything below it except
    its own continuation along the writing line."""
    node = tree.node(idx)
    parts = [
        f"{edge}={serialize_slt(tree, node.edges[edge])}"
        for edge in EDGE_ORDER
        if edge != "NEXT" and edge in node.edges
    ]
    label = node_label(node)
    return f"{label}({','.join(parts)})" if parts else label


def has_wildcards(slt: SymbolLayoutTree) -> bool:
    return any(node.kind == WILDCARD_NODE for node in slt.nodes)


def wildcard_match(query: SymbolLayoutTree, candidate: SymbolLayoutTree) -> bool:
    """True iff wildcard slots can bind candidate segments making the trees equal."""
    return _match_chain(query, query.root, candidate, candidate.root, {}) is not None


def _match_chain(q, q_idx, c, c_idx, bindings):
    if q_idx is None:
        return bindings if c_idx is None else None
    q_node = q.node(q_idx)
    if q_node.kind == WILDCARD_NODE:
        if any(edge != "NEXT" for edge in q_node.edges):
            return None
        slot = q_node.value
        q_rest = q_node.child("NEXT")
        atoms = _chain(c, c_idx)
        if not atoms:
            return None
        bound = bindings.get(slot)
        if q_rest is None:
            sig = tuple(_atom_sig(c, a) for a in atoms)
            if bound is not None and bound != sig:
                return None
            return {**bindings, slot: sig}
        for take in range(1, len(atoms) + 1):
            sig = tuple(_atom_sig(c, a) for a in atoms[:take])
            if bound is not None and bound != sig:
                continue
            rest_c = c.node(atoms[take - 1]).child("NEXT")
            result = _match_chain(q, q_rest, c, rest_c, {**bindings, slot: sig})
            if result is not None:
                return result
        return None
    if c_idx is None:
        return None
    after_atom = _match_atom(q, q_idx, c, c_idx, bindings)
    if after_atom is None:
        return None
    return _match_chain(
        q, q.node(q_idx).child("NEXT"), c, c.node(c_idx).child("NEXT"), after_atom
    )


def _match_atom(q, q_idx, c, c_idx, bindings):
    q_node, c_node = q.node(q_idx), c.node(c_idx)
    if q_node.kind != c_node.kind or q_node.value != c_node.value:
        return None
    q_edges = {e for e in q_node.edges if e != "NEXT"}
    c_edges = {e for e in c_node.edges if e != "NEXT"}
    if q_edges != c_edges:
        return None
    for edge in sorted(q_edges):
        bindings = _match_chain(q, q_node.edges[edge], c, c_node.edges[edge], bindings)
        if bindings is None:
            return None
    return bindings


# --- retrieval ------------------------------------------------------------


@dataclass
class _Candidate:
    visual_id: str
    key_kind: str
    key_serialized: str
    slt: SymbolLayoutTree | None
    features: Counter


def _try_parse(latex: str) -> SymbolLayoutTree | None:
    try:
        return parse_slt(normalize_tokens(tokenize_latex(latex)))
    except (TokenizeError, ParseFailureError):
        return None


class BaselineRetriever:
    """Exhaustive Dice scorer over one cluster per visually distinct formula."""

    def __init__(self, cluster_index, corpus: list[FormulaInstance]):
        latex_of = {inst.instance_id: inst.latex for inst in corpus}
        self.candidates: list[_Candidate] = []
        for cluster in cluster_index.clusters:
            rep = next((m for m in cluster.members if m in latex_of), None)
            key = cluster.key
            slt = None
            if rep is not None:
                if key.kind == "unknown":
                    key = canonical_key(latex_of[rep])
                slt = _try_parse(latex_of[rep])
            features = slt_features(slt) if slt is not None else Counter()
            self.candidates.append(
                _Candidate(cluster.visual_id, key.kind, key.serialized, slt, features)
            )

    def retrieve(self, query_latex: str, limit: int = 1000) -> list[RunEntry]:
        """Rank clusters for one query; entries are in visual-id space."""
        key = canonical_key(query_latex)
        if not key.serialized:
            raise EmptyQueryError("empty query")
        query_slt = _try_parse(query_latex)
        wildcard = query_slt is not None and has_wildcards(query_slt)
        features = slt_features(query_slt) if query_slt is not None else Counter()
        if query_slt is not None and not features:
            raise EmptyQueryError("query has no features")

        scored: list[tuple[int, float, str]] = []
        for cand in self.candidates:
            exact = (
                cand.key_kind == key.kind and cand.key_serialized == key.serialized
            )
            if wildcard:
                matched = cand.slt is not None and wildcard_match(query_slt, cand.slt)
                if matched or exact:
                    scored.append((0, 1.0, cand.visual_id))
                    continue
            elif exact:
                scored.append((0, 1.0, cand.visual_id))
                continue
            if features:
                score = score_dice(features, cand.features) if cand.features else 0.0
            else:
                score = 0.0
            scored.append((1, score, cand.visual_id))
        scored.sort(key=lambda t: (t[0], -t[1], t[2]))
        return [
            RunEntry(visual_id, rank, score)
            for rank, (_tier, score, visual_id) in enumerate(scored[:limit], start=1)
        ]

    def build_run(self, topics, limit: int = 1000, run_tag: str = RUN_TAG) -> RankedRun:
        run = RankedRun(run_tag)
        for topic in topics:
            run.topics[topic.topic_id] = self.retrieve(topic.query_latex, limit)
        return run

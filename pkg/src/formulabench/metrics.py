"""Run scoring under instance-based and visually-distinct conventions.

The instance convention binarizes judgments and treats unjudged items as
non-relevant. The visually-distinct convention maps items to visual ids,
deduplicates top-down, removes unjudged entries (the prime measures), and
scores graded gains for nDCG' alongside binarized MAP'/P'@k.
"""

from __future__ import annotations

import json
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .collection import RankedRun
from .errors import (
    FormulaBenchError,
    UnknownInstanceError,
    UnknownMeasureError,
    ZeroRelevantError,
)
from .judgments import JudgmentSet, binarize

CONVENTIONS = ("ntcir-instance", "arqmath-visual")

_MEASURE_AT_RE = re.compile(r"^(p|p-prime)@(hit|[1-9][0-9]*)$")
_PLAIN_MEASURES = {"map", "map-prime", "mrr", "ndcg", "ndcg-prime"}


def parse_measure(name: str) -> tuple[str, str, int | None]:
    """Return (display_name, family, k) for a measure spec like "p-prime@10"."""
    norm = name.strip().lower().replace("′", "'")
    norm = norm.replace("ndcg'", "ndcg-prime").replace("map'", "map-prime")
    norm = norm.replace("p'", "p-prime")
    if norm in _PLAIN_MEASURES:
        return norm, norm, None
    m = _MEASURE_AT_RE.match(norm)
    if m:
        family = m.group(1)
        if m.group(2) == "hit":
            if family != "p":
                raise UnknownMeasureError(f"unknown measure {name!r}")
            return "p@hit", "p-hit", None
        return f"{family}@{m.group(2)}", family, int(m.group(2))
    raise UnknownMeasureError(f"unknown measure {name!r}")


# --- primitive measures ---------------------------------------------------


def dedup_visual(ranked: list[str], cluster_index) -> list[str]:
    """Map instance ids to visual ids; keep each visual id's first occurrence."""
    seen: set[str] = set()
    out = []
    for item in ranked:
        visual = cluster_index.visual_id_of(item)
        if visual not in seen:
            seen.add(visual)
            out.append(visual)
    return out


def prime_filter(ranked: list[str], judged: set[str]) -> list[str]:
    """Drop unjudged entries; survivors keep their relative order."""
    return [item for item in ranked if item in judged]


def precision_at_k(grades: list[int], k: int) -> float:
    """Fraction of the top k that is relevant; short lists pad non-relevant."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return sum(1 for g in grades[:k] if g > 0) / k


def precision_at_hit(grades: list[int]) -> float:
    """Precision at the list's own length; 0 for an empty list."""
    if not grades:
        return 0.0
    return precision_at_k(grades, len(grades))


def average_precision(grades: list[int], total_relevant: int) -> float:
    """Mean of precision at each relevant rank, over all relevant items."""
    if total_relevant == 0:
        raise ZeroRelevantError("average precision undefined with zero relevant items")
    hits = 0
    total = 0.0
    for i, g in enumerate(grades, start=1):
        if g > 0:
            hits += 1
            total += hits / i
    return total / total_relevant


def reciprocal_rank(grades: list[int]) -> float:
    for i, g in enumerate(grades, start=1):
        if g > 0:
            return 1.0 / i
    return 0.0


def dcg(gains: list[float]) -> float:
    return sum(g / math.log2(i + 1) for i, g in enumerate(gains, start=1))


def ndcg(gains: list[float], ideal_pool_gains: list[float]) -> float:
    """DCG over the list divided by DCG of the pool's ideal ordering."""
    ideal = dcg(sorted(ideal_pool_gains, reverse=True))
    if ideal == 0.0:
        return 0.0
    return dcg(gains) / ideal


# --- full pipeline --------------------------------------------------------


@dataclass
class EvalResult:
    run_tag: str
    convention: str
    values: dict[str, dict[str, float]] = field(default_factory=dict)
    means: dict[str, float] = field(default_factory=dict)
    evaluable: dict[str, list[str]] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


def _gain_fn(gain: str):
    if gain == "linear":
        return float
    if gain == "exp":
        return lambda code: float(2**code - 1)
    raise FormulaBenchError(f"unknown gain function {gain!r} (expected linear or exp)")


def _ranked_items(run: RankedRun, topic_id: str) -> list[str]:
    entries = sorted(run.entries(topic_id), key=lambda e: e.rank)
    return [e.item_id for e in entries]


def evaluate_run(
    run: RankedRun,
    judgments: JudgmentSet,
    convention: str,
    measures: list[str],
    cluster_index=None,
    gain: str = "linear",
    cutoff: int | None = None,
    item_space: str = "instance",
    threads: int | None = None,
) -> EvalResult:
    """Score one run over every judged topic.

    Topics are the topics of the judgment set; topics the run skips score as
    empty lists. Zero-relevant topics are excluded from MAP means and noted.
    """
    if convention not in CONVENTIONS:
        raise FormulaBenchError(f"unknown convention {convention!r} (expected one of {CONVENTIONS})")
    parsed = [parse_measure(m) for m in measures]
    gain_of = _gain_fn(gain)

    if convention == "ntcir-instance":
        judged_by_topic = binarize(judgments).by_topic()
    else:
        if judgments.space != "visual":
            raise FormulaBenchError(
                "arqmath-visual scoring needs visual-space judgments (#space=visual)"
            )
        if item_space == "instance" and cluster_index is None:
            raise FormulaBenchError("arqmath-visual scoring of instance runs needs a cluster index")
        judged_by_topic = judgments.by_topic()
    threshold = 1 if convention == "ntcir-instance" else judgments.scale.threshold
    if threshold is None:
        threshold = 1

    topic_ids = sorted(judged_by_topic)
    result = EvalResult(run.run_tag, convention)
    for display, _family, _k in parsed:
        result.values[display] = {}
        result.evaluable[display] = []

    def score_topic(topic_id: str) -> dict[str, float | None]:
        judged = judged_by_topic[topic_id]
        items = _ranked_items(run, topic_id)
        if convention == "arqmath-visual":
            if item_space == "instance":
                full = dedup_visual(items, cluster_index)
            else:
                if cluster_index is not None:
                    for item in items:
                        if not cluster_index.has_visual(item):
                            raise UnknownInstanceError(f"unknown visual id {item!r}")
                seen: set[str] = set()
                full = [v for v in items if not (v in seen or seen.add(v))]
        else:
            full = items
        filtered = prime_filter(full, set(judged))
        if cutoff is not None:
            full = full[:cutoff]
            filtered = filtered[:cutoff]
        grades_full = [judged.get(i, 0) for i in full]
        grades_prime = [judged[i] for i in filtered]
        binary_full = [1 if g >= threshold else 0 for g in grades_full]
        binary_prime = [1 if g >= threshold else 0 for g in grades_prime]
        gains_full = [gain_of(g) for g in grades_full]
        gains_prime = [gain_of(g) for g in grades_prime]
        pool_gains = [gain_of(g) for g in judged.values()]
        total_relevant = sum(1 for g in judged.values() if g >= threshold)

        out: dict[str, float | None] = {}
        for display, family, k in parsed:
            if family == "p":
                out[display] = precision_at_k(binary_full, k)
            elif family == "p-hit":
                out[display] = precision_at_hit(binary_full)
            elif family == "p-prime":
                out[display] = precision_at_k(binary_prime, k)
            elif family == "map":
                out[display] = (
                    average_precision(binary_full, total_relevant) if total_relevant else None
                )
            elif family == "map-prime":
                out[display] = (
                    average_precision(binary_prime, total_relevant) if total_relevant else None
                )
            elif family == "mrr":
                out[display] = reciprocal_rank(binary_full)
            elif family == "ndcg":
                out[display] = ndcg(gains_full, pool_gains)
            elif family == "ndcg-prime":
                out[display] = ndcg(gains_prime, pool_gains)
        return out

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scored = list(pool.map(score_topic, topic_ids))
    else:
        scored = [score_topic(t) for t in topic_ids]

    skipped_map: list[str] = []
    for topic_id, per_topic in zip(topic_ids, scored):
        for display, value in per_topic.items():
            if value is None:
                if topic_id not in skipped_map:
                    skipped_map.append(topic_id)
                continue
            result.values[display][topic_id] = value
            result.evaluable[display].append(topic_id)
    for display, _family, _k in parsed:
        topics = result.evaluable[display]
        result.means[display] = (
            sum(result.values[display][t] for t in topics) / len(topics) if topics else 0.0
        )
        if not topics:
            result.notes.append(f"{display}: no evaluable topics")
    if skipped_map:
        result.notes.append(
            f"excluded {len(skipped_map)} zero-relevant topic(s) from MAP means: "
            + ",".join(skipped_map)
        )
    result.notes.append(f"gain={gain}; cutoff={'none' if cutoff is None else cutoff}")
    return result


# --- report output --------------------------------------------------------


def write_eval_tsv(results: list[EvalResult], fh) -> None:
    for result in results:
        for measure in result.values:
            for topic_id in sorted(result.values[measure]):
                fh.write(
                    f"{result.run_tag}\t{measure}\t{topic_id}\t{result.values[measure][topic_id]:.4f}\n"
                )
            fh.write(f"{result.run_tag}\t{measure}\tALL\t{result.means[measure]:.4f}\n")


def eval_to_dict(result: EvalResult) -> dict:
    return {
        "run_tag": result.run_tag,
        "convention": result.convention,
        "measures": {
            measure: {
                "mean": result.means[measure],
                "topics": dict(sorted(result.values[measure].items())),
                "evaluable": sorted(result.evaluable[measure]),
            }
            for measure in result.values
        },
        "notes": list(result.notes),
    }


def write_eval_json(results: list[EvalResult], fh) -> None:
    json.dump({"results": [eval_to_dict(r) for r in results]}, fh, indent=2, sort_keys=False)
    fh.write("\n")

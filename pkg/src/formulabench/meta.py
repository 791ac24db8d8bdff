"""Cross-collection and cross-stratum comparison of system orderings.

Systems are ranked by a mean measure value; orderings are compared with
tie-corrected Kendall's tau, discordant-pair counts, and the mean gap
between adjacent systems.
"""

from __future__ import annotations

import math

from .errors import (
    MismatchedSystemsError,
    MissingMeasureError,
    TooFewSystemsError,
    UnknownComplexityError,
)
from .judgments import JudgmentSet
from .metrics import EvalResult, evaluate_run

STRATA = ("L", "M", "H")


def stratify_topics(topics) -> dict[str, list[str]]:
    """Split topic ids into complexity strata L, M, H."""
    out: dict[str, list[str]] = {s: [] for s in STRATA}
    for t in topics:
        if t.complexity not in out:
            raise UnknownComplexityError(
                f"topic {t.topic_id!r} has complexity {t.complexity!r}, expected one of {STRATA}"
            )
        out[t.complexity].append(t.topic_id)
    return out


def restrict_judgments(judgments: JudgmentSet, topic_ids) -> JudgmentSet:
    wanted = set(topic_ids)
    records = [r for r in judgments.records if r.topic_id in wanted]
    return JudgmentSet(judgments.scale, records, space=judgments.space)


def stratify_by_complexity(
    run,
    judgments: JudgmentSet,
    topics,
    convention: str,
    measures: list[str],
    cluster_index=None,
    **eval_kwargs,
) -> dict[str, EvalResult]:
    """Evaluate a run separately on each complexity stratum.

    Strata without judged topics are omitted; callers report them as
    not-evaluable.
    """
    strata = stratify_topics(topics)
    results: dict[str, EvalResult] = {}
    for stratum in STRATA:
        restricted = restrict_judgments(judgments, strata[stratum])
        if not restricted.records:
            continue
        results[stratum] = evaluate_run(
            run, restricted, convention, measures, cluster_index, **eval_kwargs
        )
    return results


def _paired_values(order_a, order_b):
    va = dict(order_a)
    vb = dict(order_b)
    if len(va) != len(order_a) or len(vb) != len(order_b):
        raise MismatchedSystemsError("duplicate system in an ordering")
    if set(va) != set(vb):
        raise MismatchedSystemsError("orderings cover different system sets")
    systems = sorted(va)
    return [(va[s], vb[s]) for s in systems]


def kendall_tau_b(order_a, order_b) -> float:
    """Tie-corrected Kendall's tau between two (system, value) orderings."""
    pairs = _paired_values(order_a, order_b)
    n = len(pairs)
    if n < 2:
        raise TooFewSystemsError("need at least 2 systems for tau")
    concordant = discordant = ties_a = ties_b = 0
    for i in range(n):
        for j in range(i + 1, n):
            da = pairs[i][0] - pairs[j][0]
            db = pairs[i][1] - pairs[j][1]
            if da == 0 and db == 0:
                continue
            if da == 0:
                ties_a += 1
            elif db == 0:
                ties_b += 1
            elif (da > 0) == (db > 0):
                concordant += 1
            else:
                discordant += 1
    denom = math.sqrt(
        (concordant + discordant + ties_a) * (concordant + discordant + ties_b)
    )
    if denom == 0.0:
        # Every pair tied in at least one ranking; degenerate. Constant-both
        # means trivially identical orderings.
        return 1.0 if ties_a == 0 and ties_b == 0 else 0.0
    return (concordant - discordant) / denom


def count_swaps(order_a, order_b) -> int:
    """Number of system pairs ordered oppositely by the two value vectors."""
    pairs = _paired_values(order_a, order_b)
    swaps = 0
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            da = pairs[i][0] - pairs[j][0]
            db = pairs[i][1] - pairs[j][1]
            if da * db < 0:
                swaps += 1
    return swaps


def mean_gap(values: list[float]) -> float:
    """Average difference between adjacent values when sorted descending."""
    if len(values) < 2:
        raise TooFewSystemsError("need at least 2 systems for mean gap")
    ordered = sorted(values, reverse=True)
    return (ordered[0] - ordered[-1]) / (len(ordered) - 1)


def rank_systems(eval_results: list[EvalResult], measure: str) -> list[tuple[str, float]]:
    """Order systems by mean measure value, descending; ties by run tag."""
    ranking = []
    for result in eval_results:
        if measure not in result.means:
            raise MissingMeasureError(f"run {result.run_tag!r} has no measure {measure!r}")
        ranking.append((result.run_tag, result.means[measure]))
    ranking.sort(key=lambda rv: (-rv[1], rv[0]))
    return ranking


def compare_strata(
    stratum_results: dict[str, list[EvalResult]], measure: str
) -> dict:
    """Pairwise tau / swap comparison of system rankings across strata.

    stratum_results maps stratum name to one EvalResult per system. Returns
    rankings, pairwise statistics for L:M, L:H, M:H, and per-stratum mean gap.
    """
    rankings = {
        stratum: rank_systems(results, measure)
        for stratum, results in stratum_results.items()
        if results
    }
    gaps = {}
    for stratum, ranking in rankings.items():
        values = [v for _, v in ranking]
        gaps[stratum] = mean_gap(values) if len(values) >= 2 else 0.0
    pairwise = []
    order = [s for s in STRATA if s in rankings]
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            a, b = order[i], order[j]
            pairwise.append(
                {
                    "pair": f"{a}:{b}",
                    "tau_b": kendall_tau_b(rankings[a], rankings[b]),
                    "swaps": count_swaps(rankings[a], rankings[b]),
                }
            )
    return {"measure": measure, "rankings": rankings, "mean_gap": gaps, "pairwise": pairwise}


def write_comparison_tsv(report: dict, fh) -> None:
    fh.write(f"# measure={report['measure']}\n")
    for stratum, ranking in report["rankings"].items():
        for rank, (tag, value) in enumerate(ranking, start=1):
            fh.write(f"ranking\t{stratum}\t{rank}\t{tag}\t{value:.4f}\n")
    for stratum, gap in report["mean_gap"].items():
        fh.write(f"mean-gap\t{stratum}\t{gap:.4f}\n")
    for row in report["pairwise"]:
        fh.write(f"tau-b\t{row['pair']}\t{row['tau_b']:.4f}\n")
        fh.write(f"swaps\t{row['pair']}\t{row['swaps']}\n")


def plot_data(report: dict) -> list[dict]:
    """Rank trajectories across strata, for external plotting tools."""
    strata = [s for s in STRATA if s in report["rankings"]]
    systems = sorted({tag for s in strata for tag, _ in report["rankings"][s]})
    rows = []
    for system in systems:
        row = {"system": system}
        for stratum in strata:
            ranking = report["rankings"][stratum]
            row[stratum] = next(
                (rank for rank, (tag, _) in enumerate(ranking, start=1) if tag == system),
                None,
            )
        rows.append(row)
    return rows

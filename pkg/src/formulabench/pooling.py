"""Judgment pool construction from submitted runs.

Three procedures: round-robin until a minimum number of unique items, plain
top-k union, and depth pooling that counts visually distinct formulas rather
than raw ranks. A per-cluster instance cap picks which instances of a visual
cluster actually get assessed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .collection import RankedRun
from .errors import EmptyRunsError, MalformedLineError


@dataclass
class PoolItem:
    item_id: str
    provenance: set[tuple[str, int]] = field(default_factory=set)


@dataclass
class Pool:
    topic_id: str
    items: list[PoolItem] = field(default_factory=list)

    def item_ids(self) -> list[str]:
        return [item.item_id for item in self.items]


class _PoolBuilder:
    def __init__(self, topic_id: str):
        self.pool = Pool(topic_id)
        self._index: dict[str, PoolItem] = {}

    def add(self, item_id: str, run_tag: str, rank: int) -> None:
        item = self._index.get(item_id)
        if item is None:
            item = PoolItem(item_id)
            self._index[item_id] = item
            self.pool.items.append(item)
        item.provenance.add((run_tag, rank))

    def unique(self) -> int:
        return len(self._index)


def _topic_lists(runs: list[RankedRun], topic_id: str):
    """Per-run entry lists for one topic, in run-tag order for determinism."""
    if not runs:
        raise EmptyRunsError("no runs to pool")
    ordered = sorted(runs, key=lambda r: r.run_tag)
    return [(run.run_tag, run.entries(topic_id)) for run in ordered]


def pool_round_robin_min_unique(
    runs: list[RankedRun], topic_id: str, min_unique: int = 100
) -> Pool:
    """Take rank 1 from every run, then rank 2, ... until unique >= min_unique.

    The round that reaches the target is kept whole, so pools may slightly
    overshoot the minimum.
    """
    lists = _topic_lists(runs, topic_id)
    builder = _PoolBuilder(topic_id)
    depth = max((len(entries) for _, entries in lists), default=0)
    for round_no in range(depth):
        for tag, entries in lists:
            if round_no < len(entries):
                e = entries[round_no]
                builder.add(e.item_id, tag, e.rank)
        if builder.unique() >= min_unique:
            break
    return builder.pool


def pool_top_k(runs: list[RankedRun], topic_id: str, k: int = 20) -> Pool:
    """Union of each run's top-k entries."""
    lists = _topic_lists(runs, topic_id)
    builder = _PoolBuilder(topic_id)
    for tag, entries in lists:
        for e in entries[:k]:
            builder.add(e.item_id, tag, e.rank)
    return builder.pool


def pool_visually_distinct(
    runs: list[RankedRun],
    topic_id: str,
    cluster_index,
    primary_depth: int = 25,
    other_depth: int = 10,
    primary_tags: set[str] | frozenset[str] = frozenset(),
) -> Pool:
    """Pool each run to the rank where its d-th distinct visual id first appears.

    d is primary_depth for runs whose tag is in primary_tags, other_depth for
    the rest. Instances ranked above the cut are all kept, including visual
    duplicates.
    """
    lists = _topic_lists(runs, topic_id)
    builder = _PoolBuilder(topic_id)
    for tag, entries in lists:
        depth = primary_depth if tag in primary_tags else other_depth
        seen_visual: set[str] = set()
        for e in entries:
            visual = cluster_index.visual_id_of(e.item_id)
            seen_visual.add(visual)
            builder.add(e.item_id, tag, e.rank)
            if len(seen_visual) >= depth:
                break
    return builder.pool


def select_instances(
    cluster_items: list[tuple[str, set[tuple[str, int]]]],
    cap: int = 5,
    strategy: str = "frequency",
    rrf_k: float = 60.0,
) -> list[str]:
    """Pick at most `cap` instances of one visual cluster for assessment.

    frequency scores by the number of distinct runs that returned the
    instance; rrf scores by reciprocal rank fusion, sum of 1/(rrf_k + rank)
    over runs. Ties break by instance id ascending.
    """
    if strategy == "frequency":
        def score(provenance):
            return float(len({tag for tag, _ in provenance}))
    elif strategy == "rrf":
        def score(provenance):
            return sum(1.0 / (rrf_k + rank) for _, rank in provenance)
    else:
        raise ValueError(f"unknown selection strategy {strategy!r}")
    ranked = sorted(cluster_items, key=lambda it: (-score(it[1]), it[0]))
    return [instance_id for instance_id, _ in ranked[:cap]]


def select_pool_instances(
    pool: Pool,
    cluster_index,
    cap: int = 5,
    strategy: str = "frequency",
    rrf_k: float = 60.0,
) -> tuple[Pool, dict]:
    """Apply the per-cluster cap to a pooled topic.

    Returns the reduced pool (original item order) and a report with the
    fraction of clusters whose pooled instances exceeded the cap.
    """
    by_cluster: dict[str, list[PoolItem]] = {}
    for item in pool.items:
        visual = cluster_index.visual_id_of(item.item_id)
        by_cluster.setdefault(visual, []).append(item)
    keep: set[str] = set()
    over_cap = 0
    for members in by_cluster.values():
        if len(members) > cap:
            over_cap += 1
        chosen = select_instances(
            [(m.item_id, m.provenance) for m in members], cap, strategy, rrf_k
        )
        keep.update(chosen)
    reduced = Pool(pool.topic_id, [item for item in pool.items if item.item_id in keep])
    n_clusters = len(by_cluster)
    report = {
        "clusters": n_clusters,
        "over_cap": over_cap,
        "fraction_over_cap": over_cap / n_clusters if n_clusters else 0.0,
    }
    return reduced, report


def write_pools(pools: list[Pool], path) -> None:
    """Write `topic_id \\t item_id \\t run:rank,run:rank` lines in pool order."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for pool in pools:
            for item in pool.items:
                cells = ",".join(
                    f"{tag}:{rank}" for tag, rank in sorted(item.provenance)
                )
                fh.write(f"{pool.topic_id}\t{item.item_id}\t{cells}\n")


def read_pools(path) -> list[Pool]:
    pools: dict[str, Pool] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise MalformedLineError(path, line_no, f"expected 3 tab-separated fields, got {len(fields)}")
            topic_id, item_id, cells = fields
            provenance = set()
            for cell in cells.split(","):
                if not cell:
                    continue
                tag, _, rank_s = cell.rpartition(":")
                try:
                    rank = int(rank_s)
                except ValueError:
                    raise MalformedLineError(path, line_no, f"bad provenance cell {cell!r}") from None
                if not tag:
                    raise MalformedLineError(path, line_no, f"bad provenance cell {cell!r}")
                provenance.add((tag, rank))
            if not provenance:
                raise MalformedLineError(path, line_no, "empty provenance")
            pool = pools.setdefault(topic_id, Pool(topic_id))
            pool.items.append(PoolItem(item_id, provenance))
    return list(pools.values())

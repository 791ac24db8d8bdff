"""Visual clustering: one visual id per set of visually identical formulas.

Instances are grouped by canonical key, so two instances share a visual id
exactly when their layout trees (or, for unparseable LaTeX, their normalized
strings) are identical.
"""

from __future__ import annotations

from dataclasses import dataclass

from .collection import FormulaInstance
from .errors import (
    DuplicateInstanceIdError,
    MalformedLineError,
    UnknownInstanceError,
)
from .latex import CanonicalKey, canonical_key


@dataclass
class VisualCluster:
    visual_id: str
    key: CanonicalKey
    members: list[str]


def _visual_label(index: int, width: int) -> str:
    return "V" + str(index).zfill(width)


def cluster_corpus(instances: list[FormulaInstance]) -> list[VisualCluster]:
    """Group instances by canonical key, labeling clusters in first-appearance order."""
    seen_ids = set()
    groups: dict[tuple[str, str], tuple[CanonicalKey, list[str]]] = {}
    for inst in instances:
        if inst.instance_id in seen_ids:
            raise DuplicateInstanceIdError(f"duplicate instance id {inst.instance_id!r}")
        seen_ids.add(inst.instance_id)
        key = canonical_key(inst.latex)
        group_key = (key.kind, key.serialized)
        if group_key not in groups:
            groups[group_key] = (key, [])
        groups[group_key][1].append(inst.instance_id)
    width = max(4, len(str(max(len(groups) - 1, 0))))
    return [
        VisualCluster(_visual_label(i, width), key, members)
        for i, (key, members) in enumerate(groups.values())
    ]


class ClusterIndex:
    """Immutable lookup over a clustering: instance -> cluster -> visual id."""

    def __init__(self, clusters: list[VisualCluster]):
        self.clusters = list(clusters)
        self._by_visual: dict[str, VisualCluster] = {}
        self._by_instance: dict[str, VisualCluster] = {}
        for cluster in self.clusters:
            if cluster.visual_id in self._by_visual:
                raise DuplicateInstanceIdError(f"duplicate visual id {cluster.visual_id!r}")
            self._by_visual[cluster.visual_id] = cluster
            for member in cluster.members:
                if member in self._by_instance:
                    raise DuplicateInstanceIdError(f"instance {member!r} in two clusters")
                self._by_instance[member] = cluster

    def __len__(self) -> int:
        return len(self.clusters)

    def __contains__(self, instance_id: str) -> bool:
        return instance_id in self._by_instance

    def visual_id_of(self, instance_id: str) -> str:
        try:
            return self._by_instance[instance_id].visual_id
        except KeyError:
            raise UnknownInstanceError(f"unknown instance id {instance_id!r}") from None

    def has_visual(self, visual_id: str) -> bool:
        return visual_id in self._by_visual

    def cluster_of_visual(self, visual_id: str) -> VisualCluster:
        try:
            return self._by_visual[visual_id]
        except KeyError:
            raise UnknownInstanceError(f"unknown visual id {visual_id!r}") from None

    def members(self, visual_id: str) -> list[str]:
        return list(self.cluster_of_visual(visual_id).members)


def visual_id_of(cluster_index: ClusterIndex, instance_id: str) -> str:
    return cluster_index.visual_id_of(instance_id)


def write_cluster_map(clusters: list[VisualCluster], path) -> None:
    """Write `visual_id \\t digest \\t instance_id` lines, one per member."""
    rows = []
    for cluster in clusters:
        for member in cluster.members:
            rows.append((cluster.visual_id, cluster.key.digest, member))
    rows.sort(key=lambda r: (r[0], r[2]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for visual_id, digest, member in rows:
            fh.write(f"{visual_id}\t{digest}\t{member}\n")


def read_cluster_map(path, corpus: list[FormulaInstance] | None = None) -> ClusterIndex:
    """Rebuild a cluster index from a map file.

    When the corpus is supplied, each cluster's key is recomputed from its
    first member and checked against the recorded digest.
    """
    grouped: dict[str, tuple[str, list[str]]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise MalformedLineError(path, line_no, f"expected 3 tab-separated fields, got {len(fields)}")
            visual_id, digest, member = fields
            if visual_id in grouped and grouped[visual_id][0] != digest:
                raise MalformedLineError(path, line_no, f"visual id {visual_id} maps to two digests")
            grouped.setdefault(visual_id, (digest, []))[1].append(member)
    latex_of = {inst.instance_id: inst.latex for inst in corpus} if corpus else {}
    clusters = []
    for visual_id in sorted(grouped):
        digest, members = grouped[visual_id]
        key = CanonicalKey("unknown", digest, "")
        if latex_of:
            first = members[0]
            if first in latex_of:
                key = canonical_key(latex_of[first])
                if key.digest != digest:
                    raise MalformedLineError(
                        path, 0, f"{visual_id}: digest does not match member {first!r}"
                    )
        clusters.append(VisualCluster(visual_id, key, members))
    return ClusterIndex(clusters)

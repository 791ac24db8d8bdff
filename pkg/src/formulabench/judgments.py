"""Grade scales, judgment aggregation and inter-annotator agreement.

Scales order grades worst to best with integer codes. Aggregation covers the
two conventions used by the supported collections: summing two assessors'
3-level grades into a 0..4 scale, and taking the maximum grade over the
instances of a visual cluster.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    DuplicateIdError,
    EmptyIntersectionError,
    GradeOutOfRangeError,
    MissingCounterpartError,
    NoThresholdError,
    UnknownScaleError,
    UnpairedRecordsError,
)


@dataclass(frozen=True)
class GradeScale:
    """An ordered relevance scale with a binarization threshold."""

    name: str
    levels: tuple[tuple[str, int], ...]
    threshold: int | None

    def codes(self) -> list[int]:
        return [code for _, code in self.levels]

    def label_of(self, code: int) -> str:
        for label, c in self.levels:
            if c == code:
                return label
        raise GradeOutOfRangeError(f"code {code} not on scale {self.name}")

    def code_of(self, label: str) -> int:
        for lbl, c in self.levels:
            if lbl == label:
                return c
        raise GradeOutOfRangeError(f"label {label!r} not on scale {self.name}")

    def check(self, grade: int) -> None:
        if grade not in set(self.codes()):
            raise GradeOutOfRangeError(
                f"grade {grade} out of range for scale {self.name} ({self.codes()})"
            )


SCALES = {
    "ntcir3": GradeScale("ntcir3", (("N", 0), ("P", 1), ("R", 2)), threshold=2),
    "ntcir-agg": GradeScale(
        "ntcir-agg", tuple((str(c), c) for c in range(5)), threshold=3
    ),
    "arqmath": GradeScale(
        "arqmath", (("N", 0), ("P-", 1), ("P+", 2), ("R", 3)), threshold=2
    ),
    "binary": GradeScale("binary", (("0", 0), ("1", 1)), threshold=1),
}


def get_scale(name: str) -> GradeScale:
    try:
        return SCALES[name]
    except KeyError:
        raise UnknownScaleError(f"unknown grade scale {name!r}") from None


@dataclass(frozen=True)
class QrelRecord:
    topic_id: str
    item_id: str
    grade: int
    assessor: str | None = None


@dataclass
class JudgmentSet:
    scale: GradeScale
    records: list[QrelRecord] = field(default_factory=list)
    space: str = "instance"

    def __post_init__(self):
        seen = set()
        for r in self.records:
            self.scale.check(r.grade)
            key = (r.topic_id, r.item_id, r.assessor)
            if key in seen:
                raise DuplicateIdError(f"duplicate judgment for {key}")
            seen.add(key)

    def by_topic(self) -> dict[str, dict[str, int]]:
        """topic_id -> {item_id: grade}, ignoring assessor distinctions."""
        out: dict[str, dict[str, int]] = {}
        for r in self.records:
            out.setdefault(r.topic_id, {})[r.item_id] = r.grade
        return out

    def pairs(self) -> dict[tuple[str, str], int]:
        return {(r.topic_id, r.item_id): r.grade for r in self.records}


def aggregate_sum_ntcir(a: JudgmentSet, b: JudgmentSet) -> JudgmentSet:
    """Combine two assessors' 3-level sets into the summed 0..4 scale."""
    for js in (a, b):
        if js.scale.name != "ntcir3":
            raise UnknownScaleError(f"sum aggregation needs ntcir3 sets, got {js.scale.name}")
        if len({(r.topic_id, r.item_id) for r in js.records}) != len(js.records):
            raise DuplicateIdError("a set holds two judgments for one (topic, item)")
    pa, pb = a.pairs(), b.pairs()
    if set(pa) != set(pb):
        odd = sorted(set(pa).symmetric_difference(pb))
        raise MissingCounterpartError(f"items judged by only one assessor: {odd[:5]}{'...' if len(odd) > 5 else ''}")
    records = [
        QrelRecord(topic_id, item_id, pa[(topic_id, item_id)] + pb[(topic_id, item_id)])
        for topic_id, item_id in sorted(pa)
    ]
    return JudgmentSet(get_scale("ntcir-agg"), records, space=a.space)


def binarize(judgments: JudgmentSet) -> JudgmentSet:
    """Map grades to 1 (code >= scale threshold) or 0."""
    if judgments.scale.name == "binary":
        return JudgmentSet(judgments.scale, list(judgments.records), space=judgments.space)
    threshold = judgments.scale.threshold
    if threshold is None:
        raise NoThresholdError(f"scale {judgments.scale.name} declares no threshold")
    records = [
        QrelRecord(r.topic_id, r.item_id, 1 if r.grade >= threshold else 0, r.assessor)
        for r in judgments.records
    ]
    return JudgmentSet(get_scale("binary"), records, space=judgments.space)


def aggregate_max_visual(judgments: JudgmentSet, cluster_index) -> JudgmentSet:
    """Lift instance judgments to visual clusters, keeping the maximum grade."""
    best: dict[tuple[str, str], int] = {}
    for r in judgments.records:
        visual = cluster_index.visual_id_of(r.item_id)
        key = (r.topic_id, visual)
        if key not in best or r.grade > best[key]:
            best[key] = r.grade
    records = [
        QrelRecord(topic_id, visual, grade)
        for (topic_id, visual), grade in sorted(best.items())
    ]
    return JudgmentSet(judgments.scale, records, space="visual")


def cohen_kappa(a: JudgmentSet, b: JudgmentSet) -> float:
    """Unweighted Cohen's kappa over identically paired (topic, item) sets."""
    if a.scale.name != b.scale.name:
        raise UnknownScaleError(f"scales differ: {a.scale.name} vs {b.scale.name}")
    pa, pb = a.pairs(), b.pairs()
    if set(pa) != set(pb):
        raise UnpairedRecordsError("the two sets judge different (topic, item) pairs")
    if not pa:
        raise EmptyIntersectionError("no paired judgments")
    n = len(pa)
    agree = sum(1 for key in pa if pa[key] == pb[key])
    p_o = agree / n
    counts_a: dict[int, int] = {}
    counts_b: dict[int, int] = {}
    for key in pa:
        counts_a[pa[key]] = counts_a.get(pa[key], 0) + 1
        counts_b[pb[key]] = counts_b.get(pb[key], 0) + 1
    p_e = sum(
        (counts_a.get(code, 0) / n) * (counts_b.get(code, 0) / n)
        for code in set(counts_a) | set(counts_b)
    )
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


__all__ = [
    "GradeScale",
    "SCALES",
    "get_scale",
    "QrelRecord",
    "JudgmentSet",
    "aggregate_sum_ntcir",
    "binarize",
    "aggregate_max_visual",
    "cohen_kappa",
]

"""Text formats for corpora, topics, runs and qrels.

All files are UTF-8 with LF line endings and `#` comment lines. Corpus and
topic files are tab-separated; run and qrels files are whitespace-separated
in the conventional 6- and 4-column layouts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    DuplicateIdError,
    MalformedLineError,
    MixedRunTagsError,
)
from .judgments import GradeScale, JudgmentSet, QrelRecord, get_scale

COMPLEXITY_LEVELS = ("L", "M", "H", "unknown")


@dataclass(frozen=True)
class FormulaInstance:
    instance_id: str
    doc_id: str
    latex: str


@dataclass(frozen=True)
class Topic:
    topic_id: str
    query_latex: str
    complexity: str = "unknown"
    context_doc_id: str | None = None


@dataclass(frozen=True)
class RunEntry:
    item_id: str
    rank: int
    score: float


@dataclass
class RankedRun:
    run_tag: str
    topics: dict[str, list[RunEntry]] = field(default_factory=dict)

    def entries(self, topic_id: str) -> list[RunEntry]:
        return self.topics.get(topic_id, [])


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield line_no, line


def read_corpus(path) -> list[FormulaInstance]:
    """Read `instance_id \\t doc_id \\t latex` lines."""
    instances = []
    seen = set()
    for line_no, line in _data_lines(path):
        fields = line.split("\t")
        if len(fields) != 3:
            raise MalformedLineError(path, line_no, f"expected 3 tab-separated fields, got {len(fields)}")
        instance_id, doc_id, latex = fields
        if not instance_id or not doc_id or not latex:
            raise MalformedLineError(path, line_no, "empty field")
        if instance_id in seen:
            raise DuplicateIdError(f"duplicate instance id {instance_id!r}")
        seen.add(instance_id)
        instances.append(FormulaInstance(instance_id, doc_id, latex))
    return instances


def write_corpus(instances, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for inst in instances:
            fh.write(f"{inst.instance_id}\t{inst.doc_id}\t{inst.latex}\n")


def read_topics(path) -> list[Topic]:
    """Read `topic_id \\t complexity \\t latex [\\t context_doc_id]` lines."""
    topics = []
    seen = set()
    for line_no, line in _data_lines(path):
        fields = line.split("\t")
        if len(fields) not in (3, 4):
            raise MalformedLineError(path, line_no, f"expected 3 or 4 tab-separated fields, got {len(fields)}")
        topic_id, complexity, latex = fields[0], fields[1], fields[2]
        context = fields[3] if len(fields) == 4 and fields[3] else None
        if not topic_id or not latex:
            raise MalformedLineError(path, line_no, "empty field")
        if complexity not in COMPLEXITY_LEVELS:
            raise MalformedLineError(path, line_no, f"complexity must be one of {COMPLEXITY_LEVELS}, got {complexity!r}")
        if topic_id in seen:
            raise DuplicateIdError(f"duplicate topic id {topic_id!r}")
        seen.add(topic_id)
        topics.append(Topic(topic_id, latex, complexity, context))
    return topics


def write_topics(topics, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for t in topics:
            line = f"{t.topic_id}\t{t.complexity}\t{t.query_latex}"
            if t.context_doc_id is not None:
                line += f"\t{t.context_doc_id}"
            fh.write(line + "\n")


def _canonical_order(entries) -> list[RunEntry]:
    """Re-sort by score descending, item id descending; reassign ranks 1..n.

    This makes tie handling explicit: with equal scores, the lexicographically
    larger item id gets the better rank.
    """
    ordered = sorted(entries, key=lambda e: (-e.score, _desc_key(e.item_id)))
    return [RunEntry(e.item_id, rank, e.score) for rank, e in enumerate(ordered, start=1)]


class _desc_key(str):
    """Sort key that inverts string comparison, for descending id order."""

    def __lt__(self, other):
        return str.__gt__(self, other)


def read_run(path) -> RankedRun:
    """Read a 6-column `topic Q0 item rank score tag` run file."""
    tag = None
    per_topic: dict[str, list[RunEntry]] = {}
    seen_pairs = set()
    for line_no, line in _data_lines(path):
        fields = line.split()
        if len(fields) != 6:
            raise MalformedLineError(path, line_no, f"expected 6 whitespace-separated fields, got {len(fields)}")
        topic_id, _q0, item_id, rank_s, score_s, line_tag = fields
        try:
            rank = int(rank_s)
            score = float(score_s)
        except ValueError:
            raise MalformedLineError(path, line_no, f"bad rank or score: {rank_s!r} {score_s!r}") from None
        if rank < 1:
            raise MalformedLineError(path, line_no, f"rank must be positive, got {rank}")
        if tag is None:
            tag = line_tag
        elif line_tag != tag:
            raise MixedRunTagsError(f"{path}: run tags {tag!r} and {line_tag!r} in one file")
        if (topic_id, item_id) in seen_pairs:
            raise MalformedLineError(path, line_no, f"duplicate entry for ({topic_id}, {item_id})")
        seen_pairs.add((topic_id, item_id))
        per_topic.setdefault(topic_id, []).append(RunEntry(item_id, rank, score))
    run = RankedRun(tag if tag is not None else "")
    for topic_id, entries in per_topic.items():
        run.topics[topic_id] = _canonical_order(entries)
    return run


def write_run(run: RankedRun, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for topic_id in run.topics:
            for e in _canonical_order(run.topics[topic_id]):
                fh.write(f"{topic_id}\tQ0\t{e.item_id}\t{e.rank}\t{e.score!r}\t{run.run_tag}\n")


def read_qrels(path) -> JudgmentSet:
    """Read a `topic 0 item grade [assessor]` file with a `#scale=` header."""
    scale: GradeScale | None = None
    space = "instance"
    records = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            stripped = line.lstrip()
            if stripped.startswith("#"):
                body = stripped[1:].strip()
                if body.startswith("scale="):
                    scale = get_scale(body[len("scale="):].strip())
                elif body.startswith("space="):
                    space = body[len("space="):].strip()
                continue
            if scale is None:
                raise MalformedLineError(path, line_no, "data line before #scale= header")
            fields = line.split()
            if len(fields) not in (4, 5):
                raise MalformedLineError(path, line_no, f"expected 4 or 5 whitespace-separated fields, got {len(fields)}")
            topic_id, _zero, item_id, grade_s = fields[:4]
            assessor = fields[4] if len(fields) == 5 else None
            try:
                grade = int(grade_s)
            except ValueError:
                raise MalformedLineError(path, line_no, f"bad grade {grade_s!r}") from None
            scale.check(grade)
            key = (topic_id, item_id, assessor)
            if key in seen:
                raise DuplicateIdError(f"{path}:{line_no}: duplicate judgment for {key}")
            seen.add(key)
            records.append(QrelRecord(topic_id, item_id, grade, assessor))
    if scale is None:
        raise MalformedLineError(path, 0, "missing #scale= header")
    return JudgmentSet(scale, records, space=space)


def qrels_text(judgments: JudgmentSet) -> str:
    lines = [f"#scale={judgments.scale.name}"]
    if judgments.space != "instance":
        lines.append(f"#space={judgments.space}")
    for r in judgments.records:
        line = f"{r.topic_id}\t0\t{r.item_id}\t{r.grade}"
        if r.assessor is not None:
            line += f"\t{r.assessor}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def write_qrels(judgments: JudgmentSet, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(qrels_text(judgments))


def validate_references(item_ids, known_ids) -> list[str]:
    """Return the sorted list of item ids not present in known_ids."""
    known = set(known_ids)
    return sorted({i for i in item_ids if i not in known})

"""HTTP assessment service: serves pooled items, persists judgments.

Judgments go to an append-only JSONL journal that is flushed and fsynced
before the request is acknowledged, so an acknowledged grade survives a
crash. State is rebuilt by replaying the journal with latest-wins semantics.
"""

from __future__ import annotations

import json
import os
import threading
import time
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .collection import FormulaInstance, Topic, qrels_text
from .errors import (
    GradeOutOfRangeError,
    UnknownItemError,
    UnknownTopicError,
)
from .judgments import JudgmentSet, QrelRecord, get_scale
from .pooling import Pool

SERVICE_SCALE = get_scale("arqmath")
DEFAULT_PORT = 8391


class AssessmentService:
    """In-memory queue over a loaded pool, backed by a judgment journal."""

    def __init__(
        self,
        pools: list[Pool],
        corpus: list[FormulaInstance],
        topics: list[Topic],
        journal_path,
        cluster_index=None,
        item_space: str = "instance",
    ):
        self.pools = pools
        self.topics = {t.topic_id: t for t in topics}
        self.cluster_index = cluster_index
        self.item_space = item_space
        self._instances = {inst.instance_id: inst for inst in corpus}
        self._pool_items = {
            (pool.topic_id, item.item_id) for pool in pools for item in pool.items
        }
        self.journal_path = Path(journal_path)
        self._lock = threading.Lock()
        self._latest: dict[tuple[str, str, str], int] = {}
        self._seq = 0
        self._replay()
        self._journal = open(self.journal_path, "a", encoding="utf-8")

    def _replay(self) -> None:
        if not self.journal_path.exists():
            return
        with open(self.journal_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                key = (event["topic_id"], event["item_id"], event["assessor"])
                self._latest[key] = int(event["grade"])
                self._seq += 1

    def close(self) -> None:
        self._journal.close()

    # --- queue ------------------------------------------------------------

    def _resolve_latex(self, item_id: str) -> tuple[str, str | None]:
        """(latex, source doc id) for a pool item in either id space."""
        inst = self._instances.get(item_id)
        if inst is not None:
            return inst.latex, inst.doc_id
        if self.cluster_index is not None and self.cluster_index.has_visual(item_id):
            for member in self.cluster_index.members(item_id):
                inst = self._instances.get(member)
                if inst is not None:
                    return inst.latex, inst.doc_id
        return "", None

    def _cluster_size(self, item_id: str) -> int:
        index = self.cluster_index
        if index is None:
            return 1
        if index.has_visual(item_id):
            return len(index.members(item_id))
        if item_id in index:
            return len(index.members(index.visual_id_of(item_id)))
        return 1

    def next_item(self, assessor: str, topic_id: str | None = None) -> dict:
        if topic_id is not None and not any(p.topic_id == topic_id for p in self.pools):
            raise UnknownTopicError(f"topic {topic_id!r} is not in the loaded pool")
        judged = 0
        total = 0
        first_open = None
        for pool in self.pools:
            if topic_id is not None and pool.topic_id != topic_id:
                continue
            for item in pool.items:
                total += 1
                if (pool.topic_id, item.item_id, assessor) in self._latest:
                    judged += 1
                elif first_open is None:
                    first_open = (pool.topic_id, item.item_id)
        if first_open is None:
            return {"done": True, "judged": judged, "total": total}
        task_topic, item_id = first_open
        topic = self.topics.get(task_topic)
        latex, doc_id = self._resolve_latex(item_id)
        return {
            "done": False,
            "topic_id": task_topic,
            "query_latex": topic.query_latex if topic else "",
            "item_id": item_id,
            "item_latex": latex,
            "context_doc_id": doc_id,
            "context": None,
            "instances_in_cluster": self._cluster_size(item_id),
            "judged": judged,
            "total": total,
        }

    # --- judgments ---------------------------------------------------------

    def submit(self, topic_id: str, item_id: str, assessor: str, grade: int) -> int:
        SERVICE_SCALE.check(grade)
        if not any(p.topic_id == topic_id for p in self.pools):
            raise UnknownTopicError(f"topic {topic_id!r} is not in the loaded pool")
        if (topic_id, item_id) not in self._pool_items:
            raise UnknownItemError(f"item {item_id!r} is not pooled for topic {topic_id!r}")
        event = {
            "topic_id": topic_id,
            "item_id": item_id,
            "assessor": assessor,
            "grade": grade,
            "timestamp": time.time(),
        }
        with self._lock:
            self._journal.write(json.dumps(event, sort_keys=True) + "\n")
            self._journal.flush()
            os.fsync(self._journal.fileno())
            self._latest[(topic_id, item_id, assessor)] = grade
            self._seq += 1
            return self._seq

    def progress(self) -> dict:
        by_assessor: dict[str, int] = {}
        by_topic: dict[str, dict] = {}
        for pool in self.pools:
            by_topic[pool.topic_id] = {"total": len(pool.items), "by_assessor": {}}
        for (topic_id, _item, assessor), _grade in self._latest.items():
            by_assessor[assessor] = by_assessor.get(assessor, 0) + 1
            if topic_id in by_topic:
                t = by_topic[topic_id]["by_assessor"]
                t[assessor] = t.get(assessor, 0) + 1
        return {
            "total": sum(len(p.items) for p in self.pools),
            "by_assessor": by_assessor,
            "by_topic": by_topic,
        }

    def export_qrels(self, assessor: str | None = None) -> str:
        records = []
        for (topic_id, item_id, who), grade in sorted(self._latest.items()):
            if assessor is not None and who != assessor:
                continue
            records.append(
                QrelRecord(topic_id, item_id, grade, None if assessor is not None else who)
            )
        judgments = JudgmentSet(SERVICE_SCALE, records, space=self.item_space)
        return qrels_text(judgments)


class JudgmentIn(BaseModel):
    topic_id: str
    item_id: str
    assessor: str
    grade: int


def create_app(service: AssessmentService, ui_dir=None) -> FastAPI:
    app = FastAPI(title="formula assessment service")

    @app.get("/topics")
    def topics():
        pooled = {p.topic_id: len(p.items) for p in service.pools}
        out = []
        for topic_id, count in pooled.items():
            topic = service.topics.get(topic_id)
            out.append(
                {
                    "topic_id": topic_id,
                    "query_latex": topic.query_latex if topic else "",
                    "complexity": topic.complexity if topic else "unknown",
                    "items": count,
                }
            )
        return out

    @app.get("/next")
    def next_item(assessor: str, topic: str | None = None):
        try:
            return service.next_item(assessor, topic)
        except UnknownTopicError as e:
            raise HTTPException(status_code=404, detail=str(e)) from None

    @app.post("/judgments")
    def submit(event: JudgmentIn):
        try:
            seq = service.submit(event.topic_id, event.item_id, event.assessor, event.grade)
        except GradeOutOfRangeError as e:
            raise HTTPException(status_code=400, detail=str(e)) from None
        except (UnknownTopicError, UnknownItemError) as e:
            raise HTTPException(status_code=404, detail=str(e)) from None
        return {"status": "ok", "seq": seq}

    @app.get("/progress")
    def progress():
        return service.progress()

    @app.get("/export/qrels", response_class=PlainTextResponse)
    def export(assessor: str | None = None):
        return service.export_qrels(assessor)

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app

"""Corpus/topic/run/qrels file formats and canonical run ordering."""

import pytest

from formulabench.collection import (
    FormulaInstance,
    RankedRun,
    RunEntry,
    Topic,
    read_corpus,
    read_qrels,
    read_run,
    read_topics,
    write_qrels,
    write_run,
)
from formulabench.errors import (
    DuplicateIdError,
    MalformedLineError,
    MixedRunTagsError,
    UnknownScaleError,
)
from formulabench.judgments import SCALES, JudgmentSet, QrelRecord


# --- corpus ----------------------------------------------------------------

def test_read_corpus(tmp_path):
    p = tmp_path / "corpus.tsv"
    p.write_text(
        "# comment line\n"
        "F001\tD01\ta^2 + b^2 = c^2\n"
        "F002\tD01\t\\frac{x}{2}\n"
        "\n"
        "F003\tD02\tz\n",
        encoding="utf-8",
    )
    corpus = read_corpus(p)
    assert [i.instance_id for i in corpus] == ["F001", "F002", "F003"]
    assert corpus[0].doc_id == "D01"
    assert corpus[1].latex == "\\frac{x}{2}"


def test_corpus_wrong_field_count(tmp_path):
    p = tmp_path / "corpus.tsv"
    p.write_text("F001\tD01\n", encoding="utf-8")
    with pytest.raises(MalformedLineError):
        read_corpus(p)


def test_corpus_latex_may_contain_spaces_not_tabs(tmp_path):
    p = tmp_path / "corpus.tsv"
    p.write_text("F001\tD01\ta + b\tc\n", encoding="utf-8")
    with pytest.raises(MalformedLineError):
        read_corpus(p)


def test_corpus_duplicate_id(tmp_path):
    p = tmp_path / "corpus.tsv"
    p.write_text("F001\tD01\ta\nF001\tD02\tb\n", encoding="utf-8")
    with pytest.raises(DuplicateIdError):
        read_corpus(p)


# --- topics ----------------------------------------------------------------

def test_read_topics(tmp_path):
    p = tmp_path / "topics.tsv"
    p.write_text(
        "T1\tL\tx+y\n"
        "T2\tH\t\\frac{a}{b}\tDOC9\n"
        "T3\tunknown\tz\n",
        encoding="utf-8",
    )
    topics = read_topics(p)
    assert topics[0] == Topic("T1", "x+y", "L", None)
    assert topics[1] == Topic("T2", "\\frac{a}{b}", "H", "DOC9")
    assert topics[2].complexity == "unknown"


def test_topics_bad_complexity(tmp_path):
    p = tmp_path / "topics.tsv"
    p.write_text("T1\tXL\tx\n", encoding="utf-8")
    with pytest.raises(MalformedLineError):
        read_topics(p)


def test_topics_duplicate_id(tmp_path):
    p = tmp_path / "topics.tsv"
    p.write_text("T1\tL\tx\nT1\tM\ty\n", encoding="utf-8")
    with pytest.raises(DuplicateIdError):
        read_topics(p)


# --- runs ------------------------------------------------------------------

def run_text(rows):
    return "".join(" ".join(str(c) for c in row) + "\n" for row in rows)


def test_read_run_basic(tmp_path):
    p = tmp_path / "run.txt"
    p.write_text(run_text([
        ("T1", "Q0", "F01", 1, 3.5, "sysA"),
        ("T1", "Q0", "F02", 2, 2.5, "sysA"),
        ("T2", "Q0", "F03", 1, 9.0, "sysA"),
    ]), encoding="utf-8")
    run = read_run(p)
    assert run.run_tag == "sysA"
    assert [e.item_id for e in run.topics["T1"]] == ["F01", "F02"]
    assert run.topics["T1"][0].rank == 1
    assert run.topics["T1"][0].score == 3.5


def test_run_reordered_by_score_not_stated_rank(tmp_path):
    p = tmp_path / "run.txt"
    p.write_text(run_text([
        ("T1", "Q0", "F01", 1, 1.0, "sysA"),
        ("T1", "Q0", "F02", 2, 9.0, "sysA"),
    ]), encoding="utf-8")
    run = read_run(p)
    assert [e.item_id for e in run.topics["T1"]] == ["F02", "F01"]
    assert [e.rank for e in run.topics["T1"]] == [1, 2]


def test_run_score_ties_break_by_item_id_descending(tmp_path):
    p = tmp_path / "run.txt"
    p.write_text(run_text([
        ("T1", "Q0", "F01", 1, 5.0, "sysA"),
        ("T1", "Q0", "F03", 2, 5.0, "sysA"),
        ("T1", "Q0", "F02", 3, 5.0, "sysA"),
    ]), encoding="utf-8")
    run = read_run(p)
    assert [e.item_id for e in run.topics["T1"]] == ["F03", "F02", "F01"]


def test_run_any_second_column_accepted(tmp_path):
    p = tmp_path / "run.txt"
    p.write_text(run_text([("T1", "iter0", "F01", 1, 1.0, "s")]), encoding="utf-8")
    assert read_run(p).topics["T1"][0].item_id == "F01"


def test_run_field_count_enforced(tmp_path):
    p = tmp_path / "run.txt"
    p.write_text("T1 Q0 F01 1 1.0 sysA extra\n", encoding="utf-8")
    with pytest.raises(MalformedLineError):
        read_run(p)
    p.write_text("T1 Q0 F01 1 sysA\n", encoding="utf-8")
    with pytest.raises(MalformedLineError):
        read_run(p)


def test_run_mixed_tags_rejected(tmp_path):
    p = tmp_path / "run.txt"
    p.write_text(run_text([
        ("T1", "Q0", "F01", 1, 1.0, "sysA"),
        ("T1", "Q0", "F02", 2, 0.5, "sysB"),
    ]), encoding="utf-8")
    with pytest.raises(MixedRunTagsError):
        read_run(p)


def test_run_duplicate_topic_item_rejected(tmp_path):
    p = tmp_path / "run.txt"
    p.write_text(run_text([
        ("T1", "Q0", "F01", 1, 1.0, "sysA"),
        ("T1", "Q0", "F01", 2, 0.5, "sysA"),
    ]), encoding="utf-8")
    with pytest.raises(MalformedLineError):
        read_run(p)


def test_run_whitespace_separated_tabs_ok(tmp_path):
    p = tmp_path / "run.txt"
    p.write_text("T1\tQ0\tF01\t1\t1.0\tsysA\nT1  Q0   F02 2  0.5\tsysA\n",
                 encoding="utf-8")
    run = read_run(p)
    assert len(run.topics["T1"]) == 2


def test_write_read_round_trip(tmp_path):
    run = RankedRun(run_tag="sys", topics={
        "T1": [RunEntry("F02", 1, 2.0), RunEntry("F01", 2, 1.0)],
        "T2": [RunEntry("F09", 1, 0.5)],
    })
    p = tmp_path / "run.txt"
    write_run(run, p)
    back = read_run(p)
    assert back.run_tag == "sys"
    assert {t: [e.item_id for e in es] for t, es in back.topics.items()} == {
        "T1": ["F02", "F01"], "T2": ["F09"],
    }
    assert back.topics["T1"][0].score == 2.0


def test_entries_accessor():
    run = RankedRun(run_tag="sys", topics={
        "T1": [RunEntry("F01", 1, 1.0)],
    })
    assert [e.item_id for e in run.entries("T1")] == ["F01"]
    assert run.entries("T9") == []


# --- qrels -----------------------------------------------------------------

QRELS = (
    "#scale=arqmath\n"
    "T1\t0\tF01\t3\n"
    "T1\t0\tF02\t0\n"
    "T2\t0\tF01\t2\n"
)


def test_read_qrels(tmp_path):
    p = tmp_path / "qrels.tsv"
    p.write_text(QRELS, encoding="utf-8")
    js = read_qrels(p)
    assert js.scale.name == "arqmath"
    assert js.space == "instance"
    assert len(js.records) == 3
    assert js.records[0] == QrelRecord("T1", "F01", 3, None)


def test_qrels_missing_scale_header(tmp_path):
    p = tmp_path / "qrels.tsv"
    p.write_text("T1\t0\tF01\t3\n", encoding="utf-8")
    with pytest.raises(MalformedLineError):
        read_qrels(p)


def test_qrels_unknown_scale(tmp_path):
    p = tmp_path / "qrels.tsv"
    p.write_text("#scale=bogus\nT1\t0\tF01\t3\n", encoding="utf-8")
    with pytest.raises(UnknownScaleError):
        read_qrels(p)


def test_qrels_visual_space_and_assessor(tmp_path):
    p = tmp_path / "qrels.tsv"
    p.write_text(
        "#scale=ntcir3\n#space=visual\n"
        "T1\t0\tV0001\t2\talice\n"
        "T1\t0\tV0002\t0\tbob\n",
        encoding="utf-8",
    )
    js = read_qrels(p)
    assert js.space == "visual"
    assert js.records[0].assessor == "alice"


def test_qrels_grade_out_of_range(tmp_path):
    p = tmp_path / "qrels.tsv"
    p.write_text("#scale=binary\nT1\t0\tF01\t7\n", encoding="utf-8")
    with pytest.raises(Exception):
        read_qrels(p)


def test_qrels_write_read_byte_identity(tmp_path):
    p1 = tmp_path / "a.tsv"
    p1.write_text(QRELS, encoding="utf-8")
    js = read_qrels(p1)
    p2 = tmp_path / "b.tsv"
    write_qrels(js, p2)
    assert read_qrels(p2) == js
    p3 = tmp_path / "c.tsv"
    write_qrels(read_qrels(p2), p3)
    assert p3.read_bytes() == p2.read_bytes()


def test_qrels_label_column_rejected(tmp_path):
    p = tmp_path / "qrels.tsv"
    p.write_text("#scale=arqmath\nT1\t0\tF01\tR\n", encoding="utf-8")
    with pytest.raises(MalformedLineError):
        read_qrels(p)

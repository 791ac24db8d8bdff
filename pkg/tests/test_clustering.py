"""Visual clustering: grouping, id assignment, map round trips."""

import random

import pytest

from formulabench.clustering import (
    ClusterIndex,
    cluster_corpus,
    read_cluster_map,
    write_cluster_map,
)
from formulabench.collection import FormulaInstance
from formulabench.errors import DuplicateInstanceIdError, UnknownInstanceError


def corpus_of(latexes, prefix="F"):
    return [
        FormulaInstance(instance_id="%s%04d" % (prefix, i), doc_id="D%d" % (i % 3),
                        latex=s)
        for i, s in enumerate(latexes)
    ]


PYTHAGORAS_VARIANTS = [
    "a^2+b^2=c^2",
    "a^{2} + b^{2} = c^{2}",
    r"a^2 \, + b^2 = c^2",
]
SUM_VARIANTS = [
    r"\sum_{i=1}^{n} i^2",
    r"\sum _{i=1} ^{n} i^{2}",
    r"\sum\limits_{i=1}^{n} i^2",
]
FRAC_VARIANTS = [
    r"\frac{x+1}{2}",
    r"\dfrac{x+1}{2}",
    r"{x+1 \over 2}",
]


def test_three_families_three_clusters():
    corpus = corpus_of(PYTHAGORAS_VARIANTS + SUM_VARIANTS + FRAC_VARIANTS)
    clusters = cluster_corpus(corpus)
    assert len(clusters) == 3
    sizes = sorted(len(c.members) for c in clusters)
    assert sizes == [3, 3, 3]


def test_visual_ids_follow_first_appearance():
    corpus = corpus_of(["a+b", "x-y", "a + b", "z"])
    clusters = cluster_corpus(corpus)
    by_id = {c.visual_id: list(c.members) for c in clusters}
    assert by_id == {
        "V0000": ["F0000", "F0002"],
        "V0001": ["F0001"],
        "V0002": ["F0003"],
    }


def test_id_width_grows_with_cluster_count():
    corpus = corpus_of(["x_{%d}" % i for i in range(11000)])
    clusters = cluster_corpus(corpus)
    assert clusters[0].visual_id == "V00000"
    assert clusters[-1].visual_id == "V10999"


def test_identical_formulas_single_cluster():
    corpus = corpus_of([r"\beta"] * 1000)
    clusters = cluster_corpus(corpus)
    assert len(clusters) == 1
    assert len(clusters[0].members) == 1000
    assert clusters[0].visual_id == "V0000"


def test_unparseable_formulas_cluster_by_fallback():
    corpus = corpus_of([r"\weird{", r"\weird {", r"\weird[", "x^", "x ^"])
    clusters = cluster_corpus(corpus)
    ids = {c.visual_id: list(c.members) for c in clusters}
    assert ids == {
        "V0000": ["F0000", "F0001"],
        "V0001": ["F0002"],
        "V0002": ["F0003", "F0004"],
    }


def test_permuting_corpus_permutes_labels_not_membership():
    latexes = ["a+b", "x-y", "a + b", "z", "x - y", r"\frac{1}{2}"]
    corpus = corpus_of(latexes)
    rng = random.Random(5)
    base = {
        frozenset(c.members) for c in cluster_corpus(corpus)
    }
    for _ in range(10):
        shuffled = corpus[:]
        rng.shuffle(shuffled)
        got = {frozenset(c.members) for c in cluster_corpus(shuffled)}
        assert got == base


def test_duplicate_instance_ids_rejected():
    corpus = [
        FormulaInstance("F0", "D0", "a"),
        FormulaInstance("F0", "D1", "b"),
    ]
    with pytest.raises(DuplicateInstanceIdError):
        cluster_corpus(corpus)


def test_index_lookups():
    corpus = corpus_of(["a+b", "a + b", "c"])
    index = ClusterIndex(cluster_corpus(corpus))
    assert index.visual_id_of("F0000") == "V0000"
    assert index.visual_id_of("F0001") == "V0000"
    assert index.visual_id_of("F0002") == "V0001"
    assert index.has_visual("V0001")
    assert not index.has_visual("V9999")
    assert list(index.members("V0000")) == ["F0000", "F0001"]
    assert len(index) == 2
    with pytest.raises(UnknownInstanceError):
        index.visual_id_of("F9999")


def test_map_round_trip(tmp_path):
    corpus = corpus_of(PYTHAGORAS_VARIANTS + ["z"])
    clusters = cluster_corpus(corpus)
    path = tmp_path / "clusters.tsv"
    write_cluster_map(clusters, path)
    text = path.read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    assert all(len(ln.split("\t")) == 3 for ln in lines)
    # one row per instance, sorted
    assert lines == sorted(lines)
    assert len(lines) == 4

    index = read_cluster_map(path, corpus=corpus)
    for inst in corpus:
        direct = ClusterIndex(clusters)
        assert index.visual_id_of(inst.instance_id) == direct.visual_id_of(inst.instance_id)


def test_map_round_trip_without_corpus(tmp_path):
    corpus = corpus_of(["a", "b", "a"])
    clusters = cluster_corpus(corpus)
    path = tmp_path / "clusters.tsv"
    write_cluster_map(clusters, path)
    index = read_cluster_map(path)
    assert index.visual_id_of("F0000") == "V0000"
    assert index.visual_id_of("F0002") == "V0000"
    assert index.visual_id_of("F0001") == "V0001"


def test_clustering_is_idempotent_under_duplication():
    corpus = corpus_of(["a+b", "c"])
    doubled = corpus + corpus_of(["a+b", "c"], prefix="G")
    base = cluster_corpus(corpus)
    again = cluster_corpus(doubled)
    assert len(base) == len(again)
    for c1, c2 in zip(base, again):
        assert c1.key.digest == c2.key.digest

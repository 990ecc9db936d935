import pytest
from hypothesis import given, strategies as st

from taxograph.corpus import CorpusError, CorpusReader, Document, load_corpus, normalize, write_corpus

from conftest import write_jsonl


def test_normalize_examples():
    assert normalize("Machine Translation.") == ["machine", "translation"]
    assert normalize("") == []
    assert normalize("large-scale IR,") == ["large-scale", "ir"]


def test_normalize_drops_pure_punctuation_tokens():
    assert normalize("graphs -- and (trees)") == ["graphs", "and", "trees"]


@given(st.text())
def test_normalize_idempotent(text):
    once = normalize(text)
    assert normalize(" ".join(once)) == once
    assert all(tok and not any(c.isspace() for c in tok) for tok in once)


def test_load_three_valid(tmp_path):
    p = tmp_path / "c.jsonl"
    write_jsonl(p, [{"id": f"d{i}", "title": f"title {i}", "abstract": "x"} for i in range(3)])
    docs = list(load_corpus(p))
    assert [d.doc_id for d in docs] == ["d0", "d1", "d2"]


def test_skips_missing_title(tmp_path):
    p = tmp_path / "c.jsonl"
    write_jsonl(p, [{"id": "a", "title": "one"}, {"id": "b"}, {"id": "c", "title": "three"}])
    reader = CorpusReader(p)
    docs = list(reader)
    assert [d.doc_id for d in docs] == ["a", "c"]
    assert reader.skipped == 1
    assert docs[0].abstract == ""


def test_skips_malformed_and_duplicate_lines(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text('{"id": "a", "title": "t"}\nnot json\n[1, 2]\n{"id": "a", "title": "again"}\n'
                 '{"id": "b", "title": "u", "abstract": 5}\n{"id": "c", "title": "v", "extra": 1}\n')
    reader = CorpusReader(p)
    assert [d.doc_id for d in reader] == ["a", "c"]
    assert reader.skipped == 4


def test_empty_file(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text("")
    assert list(load_corpus(p)) == []


def test_missing_file_is_fatal(tmp_path):
    with pytest.raises(CorpusError, match="nope.jsonl"):
        load_corpus(tmp_path / "nope.jsonl")


def test_reader_is_reiterable_and_deterministic(corpus_path):
    reader = CorpusReader(corpus_path)
    assert list(reader) == list(reader)


def test_write_roundtrip(tmp_path):
    docs = [Document("x", "A title", "Some abstract"), Document("y", "Other", "")]
    write_corpus(tmp_path / "out.jsonl", docs)
    assert list(load_corpus(tmp_path / "out.jsonl")) == docs


def test_text_joins_title_and_abstract():
    assert Document("d", "Vertex cover", "is np complete").text == "Vertex cover is np complete"

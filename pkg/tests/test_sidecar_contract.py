"""Cross-component fixture test against the embedding sidecar.

Skipped entirely when the sidecar package is not installed; the rest of
the suite never touches it (the hash-embedding fallback keeps the core
self-sufficient).
"""

import json

import pytest

embed_sidecar = pytest.importorskip("embed_sidecar")

from embed_sidecar.core import SidecarConfig, doc_contexts, embed_corpus, read_simple_corpus

from softcoref.car import CarConfig, build_doc_context, coverage_gaps, read_embedding_table, resolve_car
from softcoref.lexical import normalize_form
from softcoref.model import read_corpus, write_corpus

from conftest import build_corpus


class StubEncoder:
    model_id = "stub-12d"
    dim = 12

    def encode(self, texts):
        out = []
        for text in texts:
            vector = [0.0] * self.dim
            for pos, ch in enumerate(text.encode("utf-8")):
                vector[pos % self.dim] += (ch % 29) - 14 + 0.25
            out.append(vector)
        return out


@pytest.fixture
def shared_fixture(tmp_path):
    corpus = build_corpus(
        [
            ("D1", "S1", "MATLAB", "C1"),
            ("D1", "S2", "matlab", "C1"),
            ("D1", "S3", "GraphPad   Prism", "C2"),
            ("D2", "S1", "SPSS", "C3"),
            ("D2", "S2", "spss 27", "C3"),
        ]
    )
    src = tmp_path / "corpus.jsonl"
    write_corpus(corpus, src)
    out = tmp_path / "vectors.jsonl"
    embed_corpus(SidecarConfig(src, out), encoder=StubEncoder())
    return corpus, src, out


def test_key_set_matches_resolver_demand(shared_fixture):
    corpus, _, vectors_path = shared_fixture
    table = read_embedding_table(vectors_path)
    assert coverage_gaps(corpus, table) == []
    demanded = {normalize_form(m.text) for m in corpus.mentions}
    demanded |= {f"doc:{m.doc_id}" for m in corpus.mentions}
    assert set(table.entries) == demanded


def test_dimension_constant_and_matches_header(shared_fixture):
    _, _, vectors_path = shared_fixture
    records = [json.loads(line) for line in vectors_path.read_text().splitlines()]
    dim = records[0]["dim"]
    assert all(len(r["vector"]) == dim for r in records[1:])
    assert read_embedding_table(vectors_path).dim == dim


def test_doc_context_byte_parity(shared_fixture):
    corpus, src, _ = shared_fixture
    sentences, mentions = read_simple_corpus(src)
    sidecar_contexts = doc_contexts(sentences, mentions)
    for doc_id in sorted({m.doc_id for m in corpus.mentions}):
        assert sidecar_contexts[doc_id] == build_doc_context(corpus, doc_id, 10)


def test_roundtrip_precision_within_interchange_bound(shared_fixture):
    corpus, _, vectors_path = shared_fixture
    table = read_embedding_table(vectors_path)
    stub = StubEncoder()
    for m in corpus.mentions:
        form = normalize_form(m.text)
        expected = stub.encode([form])[0]
        stored = table[form]
        for x, y in zip(expected, stored):
            assert x == y or abs(x - y) <= 1e-6 * max(abs(x), 1e-12)


def test_sidecar_table_drives_resolver(shared_fixture):
    corpus, _, vectors_path = shared_fixture
    table = read_embedding_table(vectors_path)
    partition = resolve_car(corpus, table, CarConfig())
    assert partition.assignment.keys() == {m.mention_id for m in corpus.mentions}
    # identical forms in the same document are trivially co-clustered
    assert partition.assignment["M0"] == partition.assignment["M1"]


def test_corpus_file_roundtrip_between_components(shared_fixture, tmp_path):
    _, src, _ = shared_fixture
    corpus = read_corpus(src)
    sentences, mentions = read_simple_corpus(src)
    assert len(sentences) == len(corpus.sentences)
    assert len(mentions) == len(corpus.mentions)

import json

import numpy as np
import pytest

from legaltopics.corpus import Vocabulary
from legaltopics.model import (
    ARTIFACT_FORMAT,
    Algorithm,
    TopicModel,
    load_model,
    save_model,
    top_words,
)

from conftest import make_vocab


def small_model(**overrides):
    kwargs = dict(
        topic_word=np.array([[0.7, 0.2, 0.1], [0.1, 0.3, 0.6]]),
        doc_topic=np.array([[0.25, 0.75], [1.0, 0.0]]),
        algorithm=Algorithm.LDA,
        vocab=make_vocab(3),
        doc_ids=("d1", "d2"),
        config={"k": 2, "alpha": 0.1},
        notes=("note one",),
    )
    kwargs.update(overrides)
    return TopicModel(**kwargs)


class TestTopicModel:
    def test_k_property(self):
        assert small_model().k == 2

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            small_model(doc_topic=np.array([[0.5, 0.25, 0.25]]))

    def test_negative_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            small_model(doc_topic=np.array([[1.5, -0.5], [1.0, 0.0]]))

    def test_row_sum_enforced(self):
        with pytest.raises(ValueError, match="sum to 1"):
            small_model(doc_topic=np.array([[0.4, 0.4], [0.5, 0.5]]))

    def test_doc_ids_length_checked(self):
        with pytest.raises(ValueError, match="doc_ids"):
            small_model(doc_ids=("only-one",))

    def test_vocab_width_checked(self):
        with pytest.raises(ValueError, match="vocabulary"):
            small_model(vocab=make_vocab(4))


class TestTopWords:
    def test_descending_by_probability(self):
        model = small_model()
        assert top_words(model, 0, n=3) == ["t000", "t001", "t002"]
        assert top_words(model, 1, n=2) == ["t002", "t001"]

    def test_ties_break_lexicographically(self):
        model = small_model(
            topic_word=np.array([[0.25, 0.5, 0.25], [0.4, 0.2, 0.4]]),
        )
        assert top_words(model, 0, n=3) == ["t001", "t000", "t002"]
        assert top_words(model, 1, n=3) == ["t000", "t002", "t001"]

    def test_n_clamped_to_vocab(self):
        assert len(top_words(small_model(), 0, n=50)) == 3

    def test_bad_topic_index(self):
        with pytest.raises(IndexError):
            top_words(small_model(), 2)
        with pytest.raises(IndexError):
            top_words(small_model(), -1)

    def test_bad_n(self):
        with pytest.raises(ValueError):
            top_words(small_model(), 0, n=0)

    def test_sort_oracle(self, rng):
        # compare against an independent stable sort on (-p, term)
        vocab = make_vocab(40)
        probs = rng.random(40)
        probs[5] = probs[17] = probs[31]  # force a three-way tie
        probs /= probs.sum()
        model = TopicModel(
            topic_word=probs[None, :],
            doc_topic=np.array([[1.0]]),
            algorithm=Algorithm.NMF,
            vocab=vocab,
        )
        expected = [t for _, t in sorted(zip(-probs, vocab.terms))]
        assert top_words(model, 0, n=40) == expected


class TestSaveLoad:
    def test_round_trip_lossless(self, tmp_path, rng):
        tw = rng.random((3, 7))
        tw /= tw.sum(axis=1, keepdims=True)
        dt = rng.random((5, 3))
        dt /= dt.sum(axis=1, keepdims=True)
        model = TopicModel(
            topic_word=tw,
            doc_topic=dt,
            algorithm=Algorithm.NMF,
            vocab=make_vocab(7, total_docs=5),
            doc_ids=tuple(f"doc{i}" for i in range(5)),
            config={"k": 3, "seed": 42, "alpha": "asymmetric"},
            notes=("a", "b"),
        )
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        np.testing.assert_array_equal(loaded.topic_word, model.topic_word)  # bitwise
        np.testing.assert_array_equal(loaded.doc_topic, model.doc_topic)
        assert loaded.algorithm is Algorithm.NMF
        assert loaded.vocab.terms == model.vocab.terms
        assert loaded.vocab.doc_freq == model.vocab.doc_freq
        assert loaded.doc_ids == model.doc_ids
        assert loaded.config == model.config
        assert loaded.notes == model.notes

    def test_resave_byte_identical(self, tmp_path):
        p1, p2 = tmp_path / "m1.json", tmp_path / "m2.json"
        save_model(small_model(), p1)
        save_model(load_model(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_format_tag_present(self, tmp_path):
        path = tmp_path / "model.json"
        save_model(small_model(), path)
        payload = json.loads(path.read_text())
        assert payload["format"] == ARTIFACT_FORMAT
        assert payload["algorithm"] == "LDA"

    def test_wrong_format_rejected(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text('{"format": "something-else/9"}')
        with pytest.raises(ValueError, match="artifact"):
            load_model(path)

    def test_vocab_hash_mismatch_rejected(self, tmp_path):
        path = tmp_path / "model.json"
        save_model(small_model(), path)
        payload = json.loads(path.read_text())
        payload["vocab_sha256"] = "0" * 64
        path.write_text(json.dumps(payload, sort_keys=True))
        with pytest.raises(ValueError, match="hash"):
            load_model(path)

    def test_tampered_terms_rejected(self, tmp_path):
        # swapping a term breaks either sortedness or the stored hash
        path = tmp_path / "model.json"
        save_model(small_model(), path)
        payload = json.loads(path.read_text())
        payload["terms"][0] = "tampered"
        path.write_text(json.dumps(payload, sort_keys=True))
        with pytest.raises(ValueError):
            load_model(path)

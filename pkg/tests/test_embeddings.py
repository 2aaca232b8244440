import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest
from hypothesis import given, settings

from ukta.embeddings import (
    HashEmbedder,
    RemoteEmbedder,
    cosine,
    embed_sentences,
    embed_text,
)
from ukta.errors import ProviderUnavailable
from ukta.textmodel import Sentence, parse_pretagged

from .strategies import essays


class TestHashEmbedder:
    def test_identical_sentences_identical_vectors(self, fixture_correct):
        provider = HashEmbedder()
        sent = fixture_correct.paragraphs[0].sentences[0]
        v1 = provider.embed_sentence(sent)
        v2 = HashEmbedder().embed_sentence(sent)
        np.testing.assert_array_equal(v1, v2)
        assert cosine(v1, v2) == pytest.approx(1.0)

    def test_unit_norm(self, fixture_correct):
        provider = HashEmbedder(dim=64)
        for sent in fixture_correct.sentences():
            assert np.linalg.norm(provider.embed_sentence(sent)) == pytest.approx(
                1.0, abs=1e-9
            )

    @settings(max_examples=100)
    @given(essays(max_paragraphs=1, max_sentences=1))
    def test_unit_norm_random(self, essay):
        provider = HashEmbedder()
        sent = next(essay.sentences())
        assert np.linalg.norm(provider.embed_sentence(sent)) == pytest.approx(1.0, abs=1e-9)

    @settings(max_examples=50)
    @given(essays(max_paragraphs=1, max_sentences=1, max_wordpieces=4))
    def test_bag_semantics_under_permutation(self, essay):
        provider = HashEmbedder()
        sent = next(essay.sentences())
        permuted = Sentence(index=0, wordpieces=tuple(reversed(sent.wordpieces)))
        np.testing.assert_allclose(
            provider.embed_sentence(sent), provider.embed_sentence(permuted), atol=1e-12
        )

    def test_known_platform_stable_prefix(self):
        # fixed hash key: these lanes must never change across versions
        vec = HashEmbedder(dim=8)._token_vector("하늘", "Noun")
        assert vec.shape == (8,)
        again = HashEmbedder(dim=8)._token_vector("하늘", "Noun")
        np.testing.assert_array_equal(vec, again)

    def test_dim_validation(self):
        with pytest.raises(ValueError):
            HashEmbedder(dim=4)

    def test_scale_invariance_of_cosine(self):
        rng = np.random.default_rng(0)
        a, b = rng.normal(size=16), rng.normal(size=16)
        assert cosine(a, b) == pytest.approx(cosine(3.5 * a, 3.5 * b), abs=1e-12)
        assert -1.0 <= cosine(a, b) <= 1.0


class TestEssayEmbedding:
    def test_single_sentence_equals_sentence_embedding(self):
        essay = parse_pretagged("하늘\t하늘/NNG\n", "tsv")
        provider = HashEmbedder()
        np.testing.assert_allclose(
            embed_text(essay, provider),
            provider.embed_sentence(next(essay.sentences())),
            atol=1e-12,
        )

    def test_orthogonal_pair_closed_form(self):
        class TwoVectors:
            dim = 8

            def embed_sentence(self, sentence):
                v = np.zeros(8)
                v[sentence.index] = 1.0
                return v

            def embed_tokens(self, tokens):
                raise NotImplementedError

        essay = parse_pretagged("가\t가/NNG\n\n나\t나/NP\n", "tsv")
        doc = embed_text(essay, TwoVectors())
        for sent in essay.sentences():
            assert cosine(doc, TwoVectors().embed_sentence(sent)) == pytest.approx(
                np.sqrt(2) / 2, abs=1e-12
            )


class _MockEmbedHandler(BaseHTTPRequestHandler):
    behavior = {"vectors": None}  # maps sentence count -> vector payload

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        n = len(body["sentences"])
        payload = {"vectors": self.behavior["vectors"](n)}
        data = json.dumps(payload).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def mock_embed_server():
    server = HTTPServer(("127.0.0.1", 0), _MockEmbedHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}", _MockEmbedHandler
    server.shutdown()


class TestRemoteEmbedder:
    def test_pass_through(self, mock_embed_server, fixture_correct):
        url, handler = mock_embed_server
        handler.behavior["vectors"] = lambda n: [[float(i) for i in range(12)]] * n
        provider = RemoteEmbedder(url)
        vec = provider.embed_sentence(next(fixture_correct.sentences()))
        np.testing.assert_array_equal(vec, np.arange(12, dtype=float))
        assert provider.dim == 12

    def test_dim_change_rejected(self, mock_embed_server):
        url, handler = mock_embed_server
        widths = iter([12, 8])
        handler.behavior["vectors"] = lambda n: [[1.0] * next(widths)] * n
        provider = RemoteEmbedder(url)
        essay = parse_pretagged("가\t가/NNG\n\n나\t나/NP\n", "tsv")
        with pytest.raises(ProviderUnavailable):
            embed_sentences(essay, provider)

    def test_unreachable(self):
        provider = RemoteEmbedder("http://127.0.0.1:9/none", timeout_ms=200)
        with pytest.raises(ProviderUnavailable):
            provider.embed_tokens([("가", "Noun")])

    def test_small_dim_rejected(self, mock_embed_server, fixture_correct):
        url, handler = mock_embed_server
        handler.behavior["vectors"] = lambda n: [[1.0, 2.0]] * n
        with pytest.raises(ProviderUnavailable):
            RemoteEmbedder(url).embed_sentence(next(fixture_correct.sentences()))

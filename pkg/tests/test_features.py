import numpy as np
import pytest
from hypothesis import given, settings

from ukta.errors import RegistryMismatch, UndefinedFeature
from ukta.features import (
    FeatureRegistry,
    FeatureSpec,
    assemble,
    compute_features,
    count_class,
    default_registry,
    default_registry_config,
    density,
    length_stats,
    occurrence_index,
)
from ukta.tagclasses import MAJOR_PARTITION, class_lemmas
from ukta.textmodel import parse_pretagged

from .strategies import essays


class TestCounts:
    def test_fixture_noun_count(self, fixture_correct):
        assert count_class(fixture_correct, "NNL") == 3

    def test_mistagged_noun_count(self, fixture_mistagged):
        assert count_class(fixture_mistagged, "NNL") == 4

    def test_empty_class_match(self, fixture_correct):
        assert count_class(fixture_correct, "IC") == 0

    def test_class_lemmas_order(self, fixture_correct):
        assert class_lemmas(fixture_correct, "NNL") == ["나", "하늘", "나비"]


class TestDensity:
    def test_fixture_nnl_over_all(self, fixture_correct):
        assert density(fixture_correct, "NNL", "all") == pytest.approx(3 / 11, abs=1e-12)

    def test_fixture_endings_over_function(self, fixture_correct):
        assert density(fixture_correct, "E", "function") == pytest.approx(0.5, abs=1e-12)

    def test_mistagged_variants(self, fixture_mistagged):
        assert density(fixture_mistagged, "NNL", "all") == pytest.approx(4 / 11, abs=1e-12)
        assert density(fixture_mistagged, "E", "function") == pytest.approx(2 / 6, abs=1e-12)

    def test_zero_basis_is_undefined(self):
        essay = parse_pretagged("하늘\t하늘/NNG\n", "tsv")
        with pytest.raises(UndefinedFeature):
            density(essay, "E", "function")

    def test_major_partition_densities_sum_to_one(self, fixture_correct):
        total = sum(density(fixture_correct, cls, "all") for cls in MAJOR_PARTITION)
        assert total == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=40)
    @given(essays())
    def test_partition_sums_on_random_essays(self, essay):
        total = sum(density(essay, cls, "all") for cls in MAJOR_PARTITION)
        assert total == pytest.approx(1.0, abs=1e-12)


class TestLengthStats:
    def test_fixture(self, fixture_correct):
        stats = length_stats(fixture_correct)
        assert stats.total_morphemes == 11
        assert stats.morphemes_per_sentence_mean == pytest.approx(11.0)
        assert stats.total_sentences == 1

    def test_single_morpheme_essay(self):
        stats = length_stats(parse_pretagged("가\t가/NNG\n", "tsv"))
        assert stats.morphemes_per_sentence_mean == 1.0
        assert stats.wordpieces_per_sentence_mean == 1.0
        assert stats.sentences_per_paragraph_mean == 1.0

    @settings(max_examples=40)
    @given(essays())
    def test_means_consistent_with_totals(self, essay):
        stats = length_stats(essay)
        assert stats.morphemes_per_sentence_mean * stats.total_sentences == pytest.approx(
            stats.total_morphemes
        )
        assert stats.sentences_per_paragraph_mean * stats.total_paragraphs == pytest.approx(
            stats.total_sentences
        )


class TestOccurrenceIndex:
    def test_fixture(self, fixture_correct):
        assert occurrence_index(fixture_correct, "나") == [0]

    def test_absent_lemma(self, fixture_correct):
        assert occurrence_index(fixture_correct, "없다") == []

    @settings(max_examples=30)
    @given(essays())
    def test_linear_scan_agreement(self, essay):
        lemma = next(essay.morphemes()).lemma
        hits = occurrence_index(essay, lemma)
        for sent in essay.sentences():
            contains = any(m.lemma == lemma for m in sent.morphemes())
            assert (sent.index in hits) == contains


class TestRegistry:
    def test_default_registry_well_formed(self):
        reg = default_registry()
        assert len(reg) == len(set(reg.names))
        assert len(reg) > 300
        assert {s.family for s in reg} == {"basic", "diversity", "cohesion"}

    def test_table_vocabulary_exists(self):
        names = set(default_registry().names)
        expected = {
            "TTR", "RTTR", "CTTR", "NDW", "MSTTR", "MATTR", "MTLD", "HDD", "VOCDD",
            "NNL_Den", "EFL_Den", "XFL_Den", "CL_Den", "FL_Den", "NNCL_Den", "VCL_Den",
            "VV_RTTR", "NNB_MSTTR", "FL_MSTTR", "NNP_NDW", "NNG_NDW", "E_NDW",
            "MM_VOCDD", "IC_RTTR", "ASO_ALN", "ASO_CLN", "ASO_FLN", "AvgSenSimilarity",
        }
        assert expected <= names

    def test_config_round_trip_and_fingerprint(self):
        config = default_registry_config()
        reg1 = FeatureRegistry.from_config(config)
        reg2 = FeatureRegistry.from_config(reg1.to_config())
        assert reg1.names == reg2.names
        assert reg1.fingerprint() == reg2.fingerprint()
        # order matters for the fingerprint
        reg3 = FeatureRegistry.from_config(list(reversed(config)))
        assert reg3.fingerprint() != reg1.fingerprint()

    def test_duplicate_names_rejected(self):
        spec = FeatureSpec(name="X", family="basic", metric="count", pos_filter="VV")
        with pytest.raises(ValueError):
            FeatureRegistry([spec, spec])

    def test_unknown_metric_rejected(self):
        with pytest.raises(ValueError):
            FeatureSpec(name="X", family="diversity", metric="nope")

    def test_unknown_class_rejected(self):
        with pytest.raises(ValueError):
            FeatureSpec(name="X", family="basic", metric="count", pos_filter="QQ")

    def test_registry_file_forms(self, tmp_path):
        import json

        from ukta.embeddings import HashEmbedder, make_provider
        from ukta.features import load_registry_file

        entries = [
            {"name": "TTR", "family": "diversity", "metric": "ttr", "pos_filter": "ALL",
             "params": {}},
        ]
        bare = tmp_path / "bare.json"
        bare.write_text(json.dumps(entries), encoding="utf-8")
        reg1, spec1 = load_registry_file(bare)
        assert len(reg1) == 1 and spec1 is None

        wrapped = tmp_path / "wrapped.json"
        wrapped.write_text(
            json.dumps({"provider": {"kind": "builtin-hash", "dim": 32},
                        "features": entries}),
            encoding="utf-8",
        )
        reg2, spec2 = load_registry_file(wrapped)
        provider = make_provider(spec2)
        assert isinstance(provider, HashEmbedder) and provider.dim == 32
        # provider choice never changes the feature fingerprint
        assert reg1.fingerprint() == reg2.fingerprint()

    def test_make_provider_remote_needs_endpoint(self, monkeypatch):
        from ukta.embeddings import RemoteEmbedder, make_provider
        from ukta.errors import ProviderUnavailable

        monkeypatch.delenv("UKTA_EMBED_ENDPOINT", raising=False)
        with pytest.raises(ProviderUnavailable):
            make_provider({"kind": "remote"})
        monkeypatch.setenv("UKTA_EMBED_ENDPOINT", "http://embed.example/v")
        provider = make_provider({"kind": "remote"})
        assert isinstance(provider, RemoteEmbedder)
        assert provider.endpoint == "http://embed.example/v"


def tiny_registry():
    return FeatureRegistry.from_config(
        [
            {"name": "TTR", "family": "diversity", "metric": "ttr", "pos_filter": "ALL"},
            {"name": "NNL_Den", "family": "basic", "metric": "density", "pos_filter": "NNL",
             "params": {"basis": "all"}},
            {"name": "HDD", "family": "diversity", "metric": "hdd", "pos_filter": "ALL",
             "params": {"sample": 42}},
        ]
    )


class TestAssemble:
    def test_vector_aligned_to_registry(self, fixture_correct):
        reg = tiny_registry()
        fv = compute_features(fixture_correct, reg)
        assert len(fv) == 3
        assert fv.values[reg.index("TTR")] == pytest.approx(10 / 11)
        assert fv.values[reg.index("NNL_Den")] == pytest.approx(3 / 11)

    def test_short_text_masks_hdd(self, fixture_correct):
        reg = tiny_registry()
        fv = compute_features(fixture_correct, reg)
        idx = reg.index("HDD")
        assert not fv.available[idx]
        assert np.isnan(fv.values[idx])

    def test_missing_family_entry_raises(self):
        reg = tiny_registry()
        with pytest.raises(RegistryMismatch):
            assemble(reg, {"basic": {}, "diversity": {}, "cohesion": {}})

    def test_determinism(self, fixture_correct):
        reg = default_registry()
        fv1 = compute_features(fixture_correct, reg)
        fv2 = compute_features(fixture_correct, reg)
        np.testing.assert_array_equal(fv1.available, fv2.available)
        np.testing.assert_array_equal(
            fv1.values[fv1.available], fv2.values[fv2.available]
        )

    def test_paragraph_rechunk_invariance(self):
        # same sentences, different paragraph split: only paragraph-level
        # basic stats and paragraph overlap may move
        doc_one = "가나\t가/NNG+나/NP\n\n다라\t다/VV+라/EF\n\n마\t마/NNG\n"
        doc_two = "가나\t가/NNG+나/NP\n\n다라\t다/VV+라/EF\n\n\n마\t마/NNG\n"
        reg = default_registry()
        fv1 = compute_features(parse_pretagged(doc_one, "tsv"), reg)
        fv2 = compute_features(parse_pretagged(doc_two, "tsv"), reg)
        for i, spec in enumerate(reg.specs):
            if spec.metric in ("total_paragraphs", "sentences_per_paragraph_mean"):
                continue
            if spec.params.get("scope") == "paragraph":
                continue
            if fv1.available[i] and fv2.available[i]:
                assert fv1.values[i] == pytest.approx(fv2.values[i], abs=1e-12), spec.name
            else:
                assert fv1.available[i] == fv2.available[i], spec.name

import pytest
from hypothesis import given, settings

from ukta.errors import EmptySentence, MalformedRecord, UnknownTag
from ukta.textmodel import (
    Essay,
    MajorClass,
    Morpheme,
    POS_TAGS,
    Paragraph,
    RubricScores,
    Sentence,
    Wordpiece,
    parse_pretagged,
    pos_category,
    serialize,
)

from .strategies import essays


class TestTagInventory:
    def test_inventory_is_closed(self):
        # every tag listed in the reference table, grouped by prefix
        assert "NNG" in POS_TAGS and "SN" in POS_TAGS and "ETM" in POS_TAGS
        assert len(POS_TAGS) == 44

    def test_category_of_every_tag(self):
        for tag in POS_TAGS:
            assert isinstance(pos_category(tag), MajorClass)

    @pytest.mark.parametrize(
        "tag,cls",
        [
            ("NNG", MajorClass.NOUN),
            ("NP", MajorClass.NOUN),
            ("VV", MajorClass.VERB),
            ("VCN", MajorClass.VERB),
            ("MMA", MajorClass.MODIFIER),
            ("MAJ", MajorClass.MODIFIER),
            ("IC", MajorClass.INTERJECTION),
            ("JX", MajorClass.JOSA),
            ("JKQ", MajorClass.JOSA),
            ("EP", MajorClass.ENDING),
            ("ETM", MajorClass.ENDING),
            ("XPN", MajorClass.AFFIX),
            ("XR", MajorClass.AFFIX),
            ("SN", MajorClass.SIGN),
            ("SL", MajorClass.SIGN),
        ],
    )
    def test_category_mapping(self, tag, cls):
        assert pos_category(tag) is cls

    def test_unknown_tag_rejected(self):
        with pytest.raises(UnknownTag):
            pos_category("ZZZ")

    @pytest.mark.parametrize("bad", ["NN", "nng", "VVX", "Q", "", "NNG "])
    def test_fuzzed_codes_always_raise(self, bad):
        with pytest.raises(UnknownTag):
            Morpheme(surface="x", lemma="x", tag=bad)


class TestParseTsv:
    def test_single_record(self):
        essay = parse_pretagged("나는\t나/NP+는/JX\n", "tsv")
        assert essay.n_sentences == 1
        wp = essay.paragraphs[0].sentences[0].wordpieces[0]
        assert wp.raw == "나는"
        assert [(m.lemma, m.tag) for m in wp.morphemes] == [("나", "NP"), ("는", "JX")]

    def test_fixture_counts(self, fixture_correct):
        assert fixture_correct.n_sentences == 1
        assert fixture_correct.n_wordpieces == 5
        assert fixture_correct.n_morphemes == 11

    def test_mistagged_counts_match(self, fixture_correct, fixture_mistagged):
        # mis-tagging changes types, never the token count
        assert fixture_mistagged.n_morphemes == fixture_correct.n_morphemes == 11

    def test_sentence_and_paragraph_boundaries(self):
        doc = "가\t가/NNG\n\n나\t나/NP\n\n\n다\t다/EF\n"
        essay = parse_pretagged(doc, "tsv")
        assert len(essay.paragraphs) == 2
        assert [len(p.sentences) for p in essay.paragraphs] == [2, 1]
        assert [s.index for s in essay.sentences()] == [0, 1, 2]

    def test_empty_document(self):
        with pytest.raises(EmptySentence):
            parse_pretagged("", "tsv")
        with pytest.raises(EmptySentence):
            parse_pretagged("\n\n\n", "tsv")

    def test_unknown_tag_names_line(self):
        with pytest.raises(UnknownTag) as exc:
            parse_pretagged("가\t가/NNG\n\n나\t나/ZZZ\n", "tsv")
        assert exc.value.code == "ZZZ"
        assert "line 3" in str(exc.value)

    @pytest.mark.parametrize(
        "doc",
        [
            "no-tab-here\n",
            "가\t\n",
            "가\t가NNG\n",
            "가\t가/NNG+\n",
            "\t가/NNG\n",
            "가\t가/NNG\textra\n",
        ],
    )
    def test_malformed_records(self, doc):
        with pytest.raises(MalformedRecord):
            parse_pretagged(doc, "tsv")


class TestRoundTrip:
    def test_fixture_tsv_canonical(self, fixture_correct):
        data = serialize(fixture_correct, "tsv")
        assert data.decode("utf-8").count("\t") == 5
        again = parse_pretagged(data, "tsv", essay_id="butterfly")
        assert again == fixture_correct

    def test_serialize_then_parse_is_canonical(self):
        # non-canonical spacing collapses to the canonical form
        doc = "\n\n가\t가/NNG\n\n\n\n\n나\t나/NP\n\n"
        canonical = serialize(parse_pretagged(doc, "tsv"), "tsv").decode()
        assert canonical == "가\t가/NNG\n\n\n나\t나/NP\n"
        assert serialize(parse_pretagged(canonical, "tsv"), "tsv").decode() == canonical

    @settings(max_examples=60)
    @given(essays())
    def test_tsv_round_trip(self, essay):
        assert parse_pretagged(serialize(essay, "tsv"), "tsv") == essay

    @settings(max_examples=60)
    @given(essays())
    def test_json_round_trip(self, essay):
        assert parse_pretagged(serialize(essay, "json"), "json") == essay

    def test_json_carries_meta_and_labels(self):
        essay = parse_pretagged("가\t가/NNG\n", "tsv")
        labeled = Essay(
            id="e1",
            paragraphs=essay.paragraphs,
            meta={"topic": "t3", "grade": "m2"},
            labels=RubricScores((1, 2, 3, 0, 1, 2, 3, 1, 2, 3)),
        )
        again = parse_pretagged(serialize(labeled, "json"), "json")
        assert again == labeled
        assert again.labels.as_dict()["Vocabulary"] == 2

    def test_json_rejects_unknown_tag(self):
        data = serialize(parse_pretagged("가\t가/NNG\n", "tsv"), "json")
        with pytest.raises(UnknownTag):
            parse_pretagged(data.replace(b"NNG", b"QQQ"), "json")


class TestEssayInvariants:
    def test_sentence_indices_must_be_contiguous(self):
        wp = Wordpiece(raw="가", morphemes=(Morpheme("가", "가", "NNG"),))
        with pytest.raises(ValueError):
            Essay(
                id="x",
                paragraphs=(
                    Paragraph(index=0, sentences=(Sentence(index=1, wordpieces=(wp,)),)),
                ),
            )

    def test_rubric_scores_validated(self):
        with pytest.raises(ValueError):
            RubricScores((1, 2, 3))
        with pytest.raises(ValueError):
            RubricScores((1, 2, 3, 4, 0, 0, 0, 0, 0, 0))

"""Tagged-text data model: POS inventory, essay structure, parsing and serialization.

The unit hierarchy is Essay > Paragraph > Sentence > Wordpiece > Morpheme.
A wordpiece (eojeol) is a whitespace-delimited writing unit; morpheme
analysis decomposes it into (surface, lemma, tag) triples.  Two exchange
formats are supported:

* TSV: one wordpiece per line, ``raw<TAB>lemma1/TAG1+lemma2/TAG2``.
  One blank line separates sentences, two blank lines separate paragraphs.
* JSON: a lossless structural encoding that also carries essay id,
  metadata and rubric labels.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Any, Iterator, Mapping

from .errors import EmptySentence, MalformedRecord, UnknownTag

# Closed tag inventory (Sejong-style).  Grouped by major class.
POS_TAGS: frozenset[str] = frozenset(
    {
        # nouns: general, proper, bound, pronoun, numeral
        "NNG", "NNP", "NNB", "NP", "NR",
        # verbs: verb, adjective, auxiliary, positive/negative copula
        "VV", "VA", "VX", "VCP", "VCN",
        # modifiers: adnominals and adverbs
        "MMA", "MMD", "MMN", "MAG", "MAJ",
        # interjection
        "IC",
        # josa (postpositions): case markers, auxiliary, conjunctive
        "JKS", "JKC", "JKG", "JKO", "JKB", "JKV", "JKQ", "JX", "JC",
        # endings: prefinal, final, connective, transformative
        "EP", "EF", "EC", "ETN", "ETM",
        # affixes: prefix, suffixes, root
        "XPN", "XSN", "XSV", "XSA", "XR",
        # signs: punctuation, foreign, hanja, number
        "SF", "SP", "SS", "SE", "SO", "SW", "SL", "SH", "SN",
    }
)


class MajorClass(enum.Enum):
    NOUN = "Noun"
    VERB = "Verb"
    MODIFIER = "Modifier"
    INTERJECTION = "Interjection"
    JOSA = "Josa"
    ENDING = "Ending"
    AFFIX = "Affix"
    SIGN = "Sign"


_PREFIX_TO_CLASS = {
    "N": MajorClass.NOUN,
    "V": MajorClass.VERB,
    "M": MajorClass.MODIFIER,
    "I": MajorClass.INTERJECTION,
    "J": MajorClass.JOSA,
    "E": MajorClass.ENDING,
    "X": MajorClass.AFFIX,
    "S": MajorClass.SIGN,
}


def validate_tag(code: str, location: object = None) -> str:
    if code not in POS_TAGS:
        raise UnknownTag(code, location)
    return code


def pos_category(tag: str) -> MajorClass:
    """Major class of a tag.  Total over the inventory; determined by prefix."""
    validate_tag(tag)
    return _PREFIX_TO_CLASS[tag[0]]


# Rubric names, in report order.  Scores are small integers in 0..3.
RUBRIC_NAMES: tuple[str, ...] = (
    "Grammar",
    "Vocabulary",
    "Sentence Expression",
    "Inter-paragraph Structure",
    "In-paragraph Structure",
    "Structure Consistency",
    "Length",
    "Topic Clarity",
    "Originality",
    "Narrative",
)

RUBRIC_MIN_SCORE = 0
RUBRIC_MAX_SCORE = 3


@dataclass(frozen=True)
class RubricScores:
    """Ten named integer scores, aligned with RUBRIC_NAMES."""

    scores: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.scores) != len(RUBRIC_NAMES):
            raise ValueError(f"expected {len(RUBRIC_NAMES)} scores, got {len(self.scores)}")
        for name, s in zip(RUBRIC_NAMES, self.scores):
            if not isinstance(s, int) or not RUBRIC_MIN_SCORE <= s <= RUBRIC_MAX_SCORE:
                raise ValueError(f"score for {name} must be an integer in 0..3, got {s!r}")

    def as_dict(self) -> dict[str, int]:
        return dict(zip(RUBRIC_NAMES, self.scores))

    @classmethod
    def from_dict(cls, d: Mapping[str, int]) -> "RubricScores":
        missing = [n for n in RUBRIC_NAMES if n not in d]
        if missing:
            raise ValueError(f"missing rubric scores: {missing}")
        return cls(tuple(int(d[n]) for n in RUBRIC_NAMES))

    def __getitem__(self, name: str) -> int:
        return self.scores[RUBRIC_NAMES.index(name)]


@dataclass(frozen=True)
class Morpheme:
    surface: str
    lemma: str
    tag: str

    def __post_init__(self) -> None:
        if not self.surface or not self.lemma:
            raise ValueError("morpheme surface and lemma must be non-empty")
        validate_tag(self.tag)

    @property
    def category(self) -> MajorClass:
        return pos_category(self.tag)


@dataclass(frozen=True)
class Wordpiece:
    raw: str
    morphemes: tuple[Morpheme, ...]

    def __post_init__(self) -> None:
        if not self.morphemes:
            raise ValueError(f"wordpiece {self.raw!r} has no morphemes")


@dataclass(frozen=True)
class Sentence:
    index: int
    wordpieces: tuple[Wordpiece, ...]

    def morphemes(self) -> Iterator[Morpheme]:
        for wp in self.wordpieces:
            yield from wp.morphemes

    @property
    def text(self) -> str:
        return " ".join(wp.raw for wp in self.wordpieces)


@dataclass(frozen=True)
class Paragraph:
    index: int
    sentences: tuple[Sentence, ...]


@dataclass(frozen=True)
class Essay:
    id: str
    paragraphs: tuple[Paragraph, ...]
    meta: Mapping[str, Any] | None = None
    labels: RubricScores | None = None

    def __post_init__(self) -> None:
        if not self.paragraphs:
            raise EmptySentence(0)
        expected = 0
        for p_i, para in enumerate(self.paragraphs):
            if para.index != p_i:
                raise ValueError(f"paragraph index {para.index} out of order (expected {p_i})")
            if not para.sentences:
                raise EmptySentence(expected)
            for sent in para.sentences:
                if sent.index != expected:
                    raise ValueError(
                        f"sentence index {sent.index} out of order (expected {expected})"
                    )
                if not sent.wordpieces:
                    raise EmptySentence(sent.index)
                expected += 1

    def sentences(self) -> Iterator[Sentence]:
        for para in self.paragraphs:
            yield from para.sentences

    def morphemes(self) -> Iterator[Morpheme]:
        for sent in self.sentences():
            yield from sent.morphemes()

    @property
    def n_sentences(self) -> int:
        return sum(len(p.sentences) for p in self.paragraphs)

    @property
    def n_wordpieces(self) -> int:
        return sum(len(s.wordpieces) for s in self.sentences())

    @property
    def n_morphemes(self) -> int:
        return sum(1 for _ in self.morphemes())


# ---------------------------------------------------------------------------
# TSV format
# ---------------------------------------------------------------------------

DEFAULT_ESSAY_ID = "essay"


def _parse_morpheme_token(token: str, line_no: int) -> Morpheme:
    if "/" not in token:
        raise MalformedRecord(f"line {line_no}", f"morpheme token {token!r} lacks '/TAG'")
    lemma, _, tag = token.rpartition("/")
    if not lemma:
        raise MalformedRecord(f"line {line_no}", f"morpheme token {token!r} has empty lemma")
    if tag not in POS_TAGS:
        raise UnknownTag(tag, f"line {line_no}")
    # TSV carries no separate surface form; the lemma stands in for it.
    return Morpheme(surface=lemma, lemma=lemma, tag=tag)


def _parse_tsv(text: str, essay_id: str) -> Essay:
    paragraphs: list[list[list[Wordpiece]]] = [[[]]]
    blank_run = 0
    saw_record = False
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            blank_run += 1
            continue
        if saw_record and blank_run >= 2:
            paragraphs.append([[]])
        elif saw_record and blank_run == 1:
            paragraphs[-1].append([])
        blank_run = 0
        saw_record = True
        fields = line.split("\t")
        if len(fields) != 2:
            raise MalformedRecord(f"line {line_no}", "expected 'raw<TAB>morphemes'")
        raw, morph_field = fields
        if not raw:
            raise MalformedRecord(f"line {line_no}", "empty wordpiece text")
        tokens = [t for t in morph_field.split("+")]
        if not morph_field or any(not t for t in tokens):
            raise MalformedRecord(f"line {line_no}", "empty morpheme token")
        morphemes = tuple(_parse_morpheme_token(t, line_no) for t in tokens)
        paragraphs[-1][-1].append(Wordpiece(raw=raw, morphemes=morphemes))

    if not saw_record:
        raise EmptySentence(0)

    built: list[Paragraph] = []
    sent_idx = 0
    for p_i, para in enumerate(paragraphs):
        sentences = []
        for wordpieces in para:
            sentences.append(Sentence(index=sent_idx, wordpieces=tuple(wordpieces)))
            sent_idx += 1
        built.append(Paragraph(index=p_i, sentences=tuple(sentences)))
    return Essay(id=essay_id, paragraphs=tuple(built))


def _serialize_tsv(essay: Essay) -> str:
    para_blocks = []
    for para in essay.paragraphs:
        sent_blocks = []
        for sent in para.sentences:
            lines = [
                wp.raw + "\t" + "+".join(f"{m.lemma}/{m.tag}" for m in wp.morphemes)
                for wp in sent.wordpieces
            ]
            sent_blocks.append("\n".join(lines))
        para_blocks.append("\n\n".join(sent_blocks))
    return "\n\n\n".join(para_blocks) + "\n"


# ---------------------------------------------------------------------------
# JSON format
# ---------------------------------------------------------------------------


def essay_to_dict(essay: Essay) -> dict[str, Any]:
    return {
        "id": essay.id,
        "meta": dict(essay.meta) if essay.meta is not None else None,
        "labels": essay.labels.as_dict() if essay.labels is not None else None,
        "paragraphs": [
            {
                "index": para.index,
                "sentences": [
                    {
                        "index": sent.index,
                        "wordpieces": [
                            {
                                "raw": wp.raw,
                                "morphemes": [
                                    {"surface": m.surface, "lemma": m.lemma, "tag": m.tag}
                                    for m in wp.morphemes
                                ],
                            }
                            for wp in sent.wordpieces
                        ],
                    }
                    for sent in para.sentences
                ],
            }
            for para in essay.paragraphs
        ],
    }


def essay_from_dict(doc: Mapping[str, Any], location: str = "document") -> Essay:
    try:
        paragraphs = []
        for para in doc["paragraphs"]:
            sentences = []
            for sent in para["sentences"]:
                wordpieces = []
                for wp in sent["wordpieces"]:
                    morphemes = tuple(
                        Morpheme(
                            surface=m["surface"],
                            lemma=m["lemma"],
                            tag=validate_tag(m["tag"], location),
                        )
                        for m in wp["morphemes"]
                    )
                    wordpieces.append(Wordpiece(raw=wp["raw"], morphemes=morphemes))
                sentences.append(Sentence(index=sent["index"], wordpieces=tuple(wordpieces)))
            paragraphs.append(Paragraph(index=para["index"], sentences=tuple(sentences)))
        labels = doc.get("labels")
        meta = doc.get("meta")
        return Essay(
            id=str(doc.get("id", DEFAULT_ESSAY_ID)),
            paragraphs=tuple(paragraphs),
            meta=dict(meta) if meta is not None else None,
            labels=RubricScores.from_dict(labels) if labels is not None else None,
        )
    except UnknownTag:
        raise
    except EmptySentence:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedRecord(location, str(exc)) from exc


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------


def parse_pretagged(
    document: bytes | str, format: str = "tsv", essay_id: str = DEFAULT_ESSAY_ID
) -> Essay:
    """Parse a pre-tagged document into an Essay.

    Raises UnknownTag, EmptySentence or MalformedRecord, each naming the
    offending location.
    """
    text = document.decode("utf-8") if isinstance(document, bytes) else document
    if format == "tsv":
        return _parse_tsv(text, essay_id)
    if format == "json":
        if not text.strip():
            raise EmptySentence(0)
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(f"offset {exc.pos}", exc.msg) from exc
        return essay_from_dict(doc)
    raise ValueError(f"unsupported format {format!r} (expected 'tsv' or 'json')")


def serialize(essay: Essay, format: str = "tsv") -> bytes:
    """Serialize an Essay so that it re-parses to a structurally equal Essay.

    The TSV form carries structure and lemma/tag content only; JSON is
    lossless (id, meta, labels, and surface forms distinct from lemmas).
    """
    if format == "tsv":
        return _serialize_tsv(essay).encode("utf-8")
    if format == "json":
        return (json.dumps(essay_to_dict(essay), ensure_ascii=False, indent=2) + "\n").encode(
            "utf-8"
        )
    raise ValueError(f"unsupported format {format!r} (expected 'tsv' or 'json')")

"""Named tag classes used by feature extraction.

A tag class is a named subset of the POS inventory.  Besides one singleton
class per tag, the table defines prefix groups (NN, MM, J, E, X, S, ...)
and the content/function split:

* CL (content lemmas): open-class, meaning-carrying morphemes — nouns,
  pronouns, numerals, verbal stems, modifiers, interjections and roots.
* FL (function lemmas): grammatical morphemes — josa, endings and affixes.

Sign tags belong to neither CL nor FL.
"""

from __future__ import annotations

from .textmodel import Essay, POS_TAGS

_NOUN = frozenset({"NNG", "NNP", "NNB", "NP", "NR"})
_VERB = frozenset({"VV", "VA", "VX", "VCP", "VCN"})
_ADNOMINAL = frozenset({"MMA", "MMD", "MMN"})
_ADVERB = frozenset({"MAG", "MAJ"})
_JOSA = frozenset({"JKS", "JKC", "JKG", "JKO", "JKB", "JKV", "JKQ", "JX", "JC"})
_CASE = frozenset({"JKS", "JKC", "JKG", "JKO", "JKB", "JKV", "JKQ"})
_ENDING = frozenset({"EP", "EF", "EC", "ETN", "ETM"})
_AFFIX = frozenset({"XPN", "XSN", "XSV", "XSA", "XR"})
_SIGN = frozenset({"SF", "SP", "SS", "SE", "SO", "SW", "SL", "SH", "SN"})

CONTENT_TAGS = _NOUN | _VERB | _ADNOMINAL | _ADVERB | frozenset({"IC", "XR"})
FUNCTION_TAGS = _JOSA | _ENDING | frozenset({"XPN", "XSN", "XSV", "XSA"})

TAG_CLASSES: dict[str, frozenset[str]] = {
    "ALL": POS_TAGS,
    "CL": CONTENT_TAGS,
    "FL": FUNCTION_TAGS,
    "NN": frozenset({"NNG", "NNP", "NNB"}),
    "NNL": _NOUN,
    "V": _VERB,
    "VC": frozenset({"VCP", "VCN"}),
    "MM": _ADNOMINAL,
    "MA": _ADVERB,
    "M": _ADNOMINAL | _ADVERB,
    "J": _JOSA,
    "JK": _CASE,
    "E": _ENDING,
    "ET": frozenset({"ETN", "ETM"}),
    "X": _AFFIX,
    "XS": frozenset({"XSN", "XSV", "XSA"}),
    "XFL": frozenset({"XPN", "XSN", "XSV", "XSA"}),
    "S": _SIGN,
}
TAG_CLASSES.update({tag: frozenset({tag}) for tag in POS_TAGS})

# Eight named classes that partition the inventory (density sanity checks).
MAJOR_PARTITION = ("NNL", "V", "M", "IC", "J", "E", "X", "S")


def resolve_class(name: str) -> frozenset[str]:
    try:
        return TAG_CLASSES[name]
    except KeyError:
        raise ValueError(f"unknown tag class {name!r}") from None


def class_lemmas(essay: Essay, name: str = "ALL") -> list[str]:
    """Lemma token sequence of the morphemes whose tag is in the class."""
    tags = resolve_class(name)
    return [m.lemma for m in essay.morphemes() if m.tag in tags]


def unit_lemma_set(wordpieces_or_sentences, tags: frozenset[str]) -> set[str]:
    out: set[str] = set()
    for item in wordpieces_or_sentences:
        for m in item.morphemes():
            if m.tag in tags:
                out.add(m.lemma)
    return out

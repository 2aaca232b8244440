"""Korean text analysis and automated writing evaluation toolkit."""

__version__ = "0.1.0"

from .textmodel import (  # noqa: F401
    Essay,
    MajorClass,
    Morpheme,
    POS_TAGS,
    Paragraph,
    RUBRIC_NAMES,
    RubricScores,
    Sentence,
    Wordpiece,
    parse_pretagged,
    pos_category,
    serialize,
)

"""Bundled fixture documents."""

from importlib import resources

from ..textmodel import Essay, parse_pretagged


def load_bytes(name: str) -> bytes:
    return resources.files(__name__).joinpath(name).read_bytes()


def butterfly_correct() -> Essay:
    """Single-sentence fixture with the reference morpheme analysis."""
    return parse_pretagged(load_bytes("butterfly_correct.tsv"), "tsv", essay_id="butterfly")


def butterfly_mistagged() -> Essay:
    """Same sentence with the third wordpiece mis-analyzed (error-propagation twin)."""
    return parse_pretagged(load_bytes("butterfly_mistagged.tsv"), "tsv", essay_id="butterfly")

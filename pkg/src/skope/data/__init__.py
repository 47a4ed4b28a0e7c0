"""Shipped sample data: a Korean inventory, morpheme dictionary,
connectivity matrices, syntactic lexicon, relaxation parameters, confusion
matrices, and a small command corpus."""

from importlib.resources import files
from pathlib import Path


def path(name: str) -> Path:
    """Filesystem path of a shipped data file, e.g. path("inventory.tsv")."""
    return Path(str(files(__package__).joinpath(name)))


INVENTORY = "inventory.tsv"
DICTIONARY = "dictionary.tsv"
MORPH_MATRIX = "morph_matrix.tsv"
PHON_MATRIX = "phon_matrix.tsv"
LEXICON = "lexicon.tsv"
PARAMS = "params.txt"
CONFUSION = "confusion.tsv"
IDENTITY = "identity.tsv"
EONJEOLS = "eonjeols.tsv"
SENTENCE = "sentence.txt"
WORKED_LATTICE = "lattice_removable.txt"

import pytest

from skope import data
from skope.grammar import Lexicon
from skope.lattice import ConfusionMatrix
from skope.morph import build_dictionary, load_dictionary_entries, load_pairs
from skope.phonology import Phoneme, PhonemeInventory, load_inventory
from skope.relax import load_params


@pytest.fixture(scope="session")
def inventory():
    return load_inventory(data.path(data.INVENTORY))


@pytest.fixture(scope="session")
def tiny_inventory():
    """One vowel plus one dual-role consonant."""
    return PhonemeInventory([
        Phoneme("a", "vowel"),
        Phoneme("k", "consonant", first=True, final=True),
    ])


@pytest.fixture(scope="session")
def vowel_inventory():
    return PhonemeInventory([Phoneme("a", "vowel"), Phoneme("e", "vowel")])


@pytest.fixture(scope="session")
def dictionary(inventory):
    entries = load_dictionary_entries(data.path(data.DICTIONARY), inventory)
    morph_pairs, eojeol = load_pairs(data.path(data.MORPH_MATRIX))
    phon_pairs, _ = load_pairs(data.path(data.PHON_MATRIX))
    return build_dictionary(entries, None, morph_pairs, phon_pairs, eojeol)


@pytest.fixture(scope="session")
def confusion():
    return ConfusionMatrix.read(data.path(data.CONFUSION))


@pytest.fixture(scope="session")
def lexicon():
    return Lexicon.read(data.path(data.LEXICON))


@pytest.fixture(scope="session")
def shipped_params():
    return load_params(data.path(data.PARAMS))


@pytest.fixture(scope="session")
def eonjeols():
    """(surface_yale, expected_rendering) pairs of the sample corpus."""
    rows = []
    for raw in data.path(data.EONJEOLS).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            surface, rendering = line.split("\t")
            rows.append((surface, rendering))
    return rows

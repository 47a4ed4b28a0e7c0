"""Phoneme inventory, syllable structure, and diphone classification.

Phonemes are written in Yale romanization. The inventory is configuration
data loaded from a small tab-separated file, and everything downstream
(decoding, lattices, dictionaries) refers to its symbols. Multi-letter
symbols such as "ss" or "ch" are resolved by longest match, so romanized
text can be written without separators inside a syllable; '-' marks
syllable boundaries and is ignored by the tokenizer.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import PhonologyError

CONSONANT = "consonant"
VOWEL = "vowel"

# Diphone types: syllable-first consonant + vowel, vowel + syllable-final
# consonant, vowel + vowel, and syllable-final + syllable-first consonant.
C1V = "C1V"
VC2 = "VC2"
VV = "VV"
C2C1 = "C2C1"

# Label of the consonant-only diphone group (the one group with no vowel).
CC_GROUP = "cc"


@dataclass(frozen=True)
class Phoneme:
    """One phoneme: a Yale symbol plus its syllabic roles.

    Vowels carry no role flags; a consonant must be usable syllable-first,
    syllable-final, or both.
    """

    symbol: str
    kind: str
    first: bool = False
    final: bool = False

    def __post_init__(self) -> None:
        if not self.symbol:
            raise PhonologyError("phoneme symbol must be non-empty")
        if self.kind not in (CONSONANT, VOWEL):
            raise PhonologyError(f"unknown phoneme kind {self.kind!r} for {self.symbol!r}")
        if self.kind == VOWEL and (self.first or self.final):
            raise PhonologyError(f"vowel {self.symbol!r} must not carry consonant roles")
        if self.kind == CONSONANT and not (self.first or self.final):
            raise PhonologyError(f"consonant {self.symbol!r} needs at least one syllable role")

    @property
    def is_vowel(self) -> bool:
        return self.kind == VOWEL

    @property
    def is_consonant(self) -> bool:
        return self.kind == CONSONANT

    def __str__(self) -> str:
        return self.symbol


class PhonemeInventory:
    """Ordered, immutable collection of phonemes with symbol lookup."""

    def __init__(self, phonemes: Iterable[Phoneme]):
        self.phonemes: tuple[Phoneme, ...] = tuple(phonemes)
        self.lookup: dict[str, Phoneme] = {}
        for ph in self.phonemes:
            if ph.symbol in self.lookup:
                raise PhonologyError(f"duplicate phoneme symbol {ph.symbol!r}")
            self.lookup[ph.symbol] = ph
        self._order = {ph.symbol: i for i, ph in enumerate(self.phonemes)}
        self._max_symbol_len = max((len(s) for s in self.lookup), default=0)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self.lookup

    def __len__(self) -> int:
        return len(self.phonemes)

    def __iter__(self) -> Iterator[Phoneme]:
        return iter(self.phonemes)

    def __getitem__(self, symbol: str) -> Phoneme:
        try:
            return self.lookup[symbol]
        except KeyError:
            raise PhonologyError(f"unknown phoneme symbol {symbol!r}") from None

    def index(self, symbol: str) -> int:
        """Stable ordinal of a symbol, used for deterministic tie-breaking."""
        try:
            return self._order[symbol]
        except KeyError:
            raise PhonologyError(f"unknown phoneme symbol {symbol!r}") from None

    @property
    def vowels(self) -> tuple[Phoneme, ...]:
        return tuple(ph for ph in self.phonemes if ph.is_vowel)

    @property
    def consonants(self) -> tuple[Phoneme, ...]:
        return tuple(ph for ph in self.phonemes if ph.is_consonant)


def parse_yale(inventory: PhonemeInventory, text: str) -> list[Phoneme]:
    """Tokenize Yale-romanized text into phonemes by longest match.

    '-' (syllable boundary) and whitespace are separators and carry no
    content. Raises PhonologyError naming the first offending position.
    """
    out: list[Phoneme] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "-" or ch.isspace():
            i += 1
            continue
        for length in range(min(inventory._max_symbol_len, n - i), 0, -1):
            candidate = text[i : i + length]
            if candidate in inventory.lookup:
                out.append(inventory.lookup[candidate])
                i += length
                break
        else:
            raise PhonologyError(f"unknown symbol at position {i}: {text[i:i + 3]!r}")
    return out


@dataclass(frozen=True)
class Syllable:
    """One syllable: optional onset, vowel nucleus, optional coda."""

    onset: Phoneme | None
    nucleus: Phoneme
    coda: Phoneme | None

    def __post_init__(self) -> None:
        if not self.nucleus.is_vowel:
            raise PhonologyError(f"syllable nucleus {self.nucleus.symbol!r} must be a vowel")
        if self.onset is not None and not self.onset.first:
            raise PhonologyError(f"{self.onset.symbol!r} cannot start a syllable")
        if self.coda is not None and not self.coda.final:
            raise PhonologyError(f"{self.coda.symbol!r} cannot end a syllable")

    @property
    def shape(self) -> str:
        return ("C" if self.onset else "") + "V" + ("C" if self.coda else "")

    @property
    def phonemes(self) -> tuple[Phoneme, ...]:
        parts = []
        if self.onset:
            parts.append(self.onset)
        parts.append(self.nucleus)
        if self.coda:
            parts.append(self.coda)
        return tuple(parts)

    def __str__(self) -> str:
        return "".join(ph.symbol for ph in self.phonemes)


def syllabify(phonemes: Sequence[Phoneme]) -> list[Syllable]:
    """Split a phoneme sequence into CV/VC/V/CVC syllables.

    A single consonant between two vowels attaches to the following
    syllable when it can start one (onset-maximal), otherwise to the
    preceding syllable as a coda. Raises PhonologyError when no valid
    split exists.
    """
    if not phonemes:
        raise PhonologyError("cannot syllabify an empty sequence")
    nuclei = [i for i, ph in enumerate(phonemes) if ph.is_vowel]
    if not nuclei:
        raise PhonologyError("sequence contains no vowel nucleus")

    leading = phonemes[: nuclei[0]]
    if len(leading) > 1:
        raise PhonologyError(f"{len(leading)} consonants before the first vowel")
    trailing = phonemes[nuclei[-1] + 1 :]
    if len(trailing) > 1:
        raise PhonologyError(f"{len(trailing)} consonants after the last vowel")

    onsets: list[Phoneme | None] = [leading[0] if leading else None]
    codas: list[Phoneme | None] = []
    for left, right in zip(nuclei, nuclei[1:]):
        between = phonemes[left + 1 : right]
        if len(between) == 0:
            codas.append(None)
            onsets.append(None)
        elif len(between) == 1:
            c = between[0]
            if c.first:
                codas.append(None)
                onsets.append(c)
            elif c.final:
                codas.append(c)
                onsets.append(None)
            else:  # unreachable with a valid inventory, kept for safety
                raise PhonologyError(f"{c.symbol!r} fits neither onset nor coda")
        elif len(between) == 2:
            codas.append(between[0])
            onsets.append(between[1])
        else:
            raise PhonologyError(f"{len(between)} consonants between vowels")
    codas.append(trailing[0] if trailing else None)

    return [
        Syllable(onset, phonemes[v], coda)
        for onset, v, coda in zip(onsets, nuclei, codas)
    ]


@dataclass(frozen=True)
class Diphone:
    """Two-phoneme recognition unit spanning a phoneme transition."""

    first: Phoneme
    second: Phoneme
    dtype: str

    @property
    def label(self) -> str:
        return self.first.symbol + "+" + self.second.symbol

    def __str__(self) -> str:
        return self.label


def classify_diphone(first: Phoneme, second: Phoneme) -> Diphone:
    """Assign a phoneme pair its diphone type, or reject the pair.

    C1V needs a syllable-first consonant, VC2 a syllable-final one, and
    C2C1 a final-capable consonant followed by a first-capable one.
    """
    if first.is_consonant and second.is_vowel:
        if first.first:
            return Diphone(first, second, C1V)
    elif first.is_vowel and second.is_consonant:
        if second.final:
            return Diphone(first, second, VC2)
    elif first.is_vowel and second.is_vowel:
        return Diphone(first, second, VV)
    else:
        if first.final and second.first:
            return Diphone(first, second, C2C1)
    raise PhonologyError(
        f"no diphone type admits {first.symbol!r} followed by {second.symbol!r}"
    )


@dataclass(frozen=True)
class DiphoneInventory:
    """All diphones of an inventory, partitioned into vowel groups.

    Each group except the consonant-only "cc" group is keyed by a vowel
    symbol; a VV diphone is filed under its first vowel.
    """

    diphones: frozenset[Diphone]
    groups: dict[str, frozenset[Diphone]]

    def __len__(self) -> int:
        return len(self.diphones)

    def group_of(self, diphone: Diphone) -> str:
        if diphone.dtype == C1V:
            return diphone.second.symbol
        if diphone.dtype in (VC2, VV):
            return diphone.first.symbol
        return CC_GROUP


def enumerate_diphones(inventory: PhonemeInventory) -> DiphoneInventory:
    """Enumerate every classifiable ordered phoneme pair, grouped by vowel."""
    diphones = []
    for first, second in itertools.product(inventory.phonemes, repeat=2):
        try:
            diphones.append(classify_diphone(first, second))
        except PhonologyError:
            continue
    groups: dict[str, set[Diphone]] = {}
    result = DiphoneInventory(frozenset(diphones), {})
    for d in diphones:
        groups.setdefault(result.group_of(d), set()).add(d)
    for label, members in groups.items():
        result.groups[label] = frozenset(members)
    return result


def load_inventory(path: str | Path) -> PhonemeInventory:
    """Read an inventory file: `symbol<TAB>kind<TAB>roles`, '#' comments.

    roles is a comma-separated subset of {first, final} and is omitted or
    empty for vowels.
    """
    phonemes = []
    path = Path(path)
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) not in (2, 3):
            raise PhonologyError(f"{path}:{lineno}: expected 2 or 3 tab-separated fields")
        symbol, kind = fields[0].strip(), fields[1].strip()
        roles = set()
        if len(fields) == 3 and fields[2].strip():
            roles = {r.strip() for r in fields[2].split(",")}
            unknown = roles - {"first", "final"}
            if unknown:
                raise PhonologyError(f"{path}:{lineno}: unknown role(s) {sorted(unknown)}")
        try:
            phonemes.append(
                Phoneme(symbol, kind, first="first" in roles, final="final" in roles)
            )
        except PhonologyError as exc:
            raise PhonologyError(f"{path}:{lineno}: {exc}") from None
    return PhonemeInventory(phonemes)

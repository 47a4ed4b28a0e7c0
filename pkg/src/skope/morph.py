"""Table-driven morphological and phonological analysis over phoneme lattices.

The dictionary stores one entry per phonetic transcription of a morpheme,
compiled into a trie keyed by surface phonemes. A breadth-first walk of the
lattice enrolls every matching morpheme into a triangular table; legal
tilings of the table are then assembled under two connectivity matrices:
one over POS tags (morphotactics) and one over surface phonemes or phoneme
classes (phonology, e.g. glotalization). Sound changes are never applied at
run time: conjugated and sound-changed surface forms are extra dictionary
entries that map back to the orthographic form.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DictionaryError
from .lattice import PhonemeLattice
from .phonology import PhonemeInventory, parse_yale
from .table import TriangularTable

logger = logging.getLogger(__name__)

BOS = "BOS"
EOS = "EOS"

MORPHOTACTIC = "morphotactic"
PHONOLOGICAL = "phonological"


@dataclass(frozen=True)
class PosTag:
    """POS tag with an optional parent in a hierarchical tagset."""

    name: str
    parent: str | None = None


@dataclass(frozen=True)
class MorphemeEntry:
    """One phonetic transcription of one morpheme.

    surface is the trie key (pronounced form); orthographic is the
    underlying form it maps back to. orth_text keeps the data author's
    '-' syllable marks and is what renderings show. A single morpheme has
    left_tag == right_tag; idiomatic multi-morpheme entries may differ.
    left_phon/right_phon are connectivity classes of the edge phonemes
    (None when the entry relies on concrete-phoneme matrix keys only).
    """

    surface: tuple[str, ...]
    orthographic: tuple[str, ...]
    orth_text: str
    gloss: str
    left_tag: str
    right_tag: str
    left_phon: str | None = None
    right_phon: str | None = None

    def __post_init__(self) -> None:
        if not self.surface:
            raise DictionaryError(f"entry {self.orth_text!r} has an empty surface")

    @property
    def syllable_count(self) -> int:
        return self.orth_text.count("-") + 1

    def __str__(self) -> str:
        return f"{self.orth_text}/{self.left_tag}"


@dataclass(frozen=True)
class Verdict:
    """Connectivity check outcome; reason names the failing matrix."""

    legal: bool
    reason: str | None = None


class _TrieNode:
    __slots__ = ("children", "entries")

    def __init__(self):
        self.children: dict[str, _TrieNode] = {}
        self.entries: list[MorphemeEntry] = []


class CompiledDictionary:
    """Trie over surface transcriptions plus the two connectivity matrices.

    Absent matrix pairs are illegal. morph_pairs may use the reserved BOS
    and EOS names for boundary rows; eojeol_pairs marks which legal POS
    pairs cross an orthographic-word boundary inside one pause unit.
    """

    def __init__(
        self,
        entries: Sequence[MorphemeEntry],
        morph_pairs: Iterable[tuple[str, str]],
        phon_pairs: Iterable[tuple[str, str]],
        eojeol_pairs: Iterable[tuple[str, str]] = (),
    ):
        self.entries = tuple(entries)
        self.morph_pairs = frozenset(morph_pairs)
        self.phon_pairs = frozenset(phon_pairs)
        self.eojeol_pairs = frozenset(eojeol_pairs)
        self._root = _TrieNode()
        for entry in self.entries:
            node = self._root
            for sym in entry.surface:
                node = node.children.setdefault(sym, _TrieNode())
            node.entries.append(entry)

    @property
    def root(self) -> _TrieNode:
        return self._root

    def lookup(self, surface: Sequence[str]) -> tuple[MorphemeEntry, ...]:
        node = self._root
        for sym in surface:
            node = node.children.get(sym)
            if node is None:
                return ()
        return tuple(node.entries)

    def leaf_count(self) -> int:
        """Number of distinct surface paths carrying at least one entry."""

        def walk(node: _TrieNode) -> int:
            return (1 if node.entries else 0) + sum(
                walk(child) for child in node.children.values()
            )

        return walk(self._root)


def build_dictionary(
    entries: Sequence[MorphemeEntry],
    tagset: Sequence[PosTag] | None = None,
    morph_pairs: Iterable[tuple[str, str]] = (),
    phon_pairs: Iterable[tuple[str, str]] = (),
    eojeol_pairs: Iterable[tuple[str, str]] = (),
) -> CompiledDictionary:
    """Compile entries and connectivity pairs, validating tag references.

    With an explicit tagset, every tag used by an entry or a morph pair
    must be declared (BOS/EOS are implicit) and the tag hierarchy must be
    a forest. Without one, the tagset is taken to be whatever the data
    mentions. Duplicate (surface, left_tag, right_tag) entries are dropped
    with a warning.
    """
    if tagset is not None:
        names = [t.name for t in tagset]
        if len(set(names)) != len(names):
            raise DictionaryError("duplicate tag names in tagset")
        declared = set(names) | {BOS, EOS}
        by_name = {t.name: t for t in tagset}
        for tag in tagset:
            seen = {tag.name}
            cur = tag
            while cur.parent is not None:
                if cur.parent not in by_name:
                    raise DictionaryError(
                        f"tag {cur.name!r} references undeclared parent {cur.parent!r}"
                    )
                if cur.parent in seen:
                    raise DictionaryError(f"tag hierarchy cycle through {cur.parent!r}")
                seen.add(cur.parent)
                cur = by_name[cur.parent]
        for entry in entries:
            for tag in (entry.left_tag, entry.right_tag):
                if tag not in declared:
                    raise DictionaryError(
                        f"entry {entry.orth_text!r} uses undeclared tag {tag!r}"
                    )
        for left, right in morph_pairs:
            for tag in (left, right):
                if tag not in declared:
                    raise DictionaryError(f"morph pair uses undeclared tag {tag!r}")

    unique: list[MorphemeEntry] = []
    seen_keys = set()
    for entry in entries:
        key = (entry.surface, entry.left_tag, entry.right_tag)
        if key in seen_keys:
            logger.warning("dropping duplicate dictionary entry %s", entry)
            continue
        seen_keys.add(key)
        unique.append(entry)
    return CompiledDictionary(unique, morph_pairs, phon_pairs, eojeol_pairs)


def connect(
    left: MorphemeEntry, right: MorphemeEntry, dictionary: CompiledDictionary
) -> Verdict:
    """Check whether two morphemes may be adjacent.

    The POS pair must be a declared morph pair AND the junction phonemes a
    declared phon pair. Phon lookup tries concrete edge phonemes before
    the entries' declared classes.
    """
    if (left.right_tag, right.left_tag) not in dictionary.morph_pairs:
        return Verdict(False, MORPHOTACTIC)
    left_keys = [left.surface[-1]]
    if left.right_phon:
        left_keys.append(left.right_phon)
    right_keys = [right.surface[0]]
    if right.left_phon:
        right_keys.append(right.left_phon)
    for lk in left_keys:
        for rk in right_keys:
            if (lk, rk) in dictionary.phon_pairs:
                return Verdict(True)
    return Verdict(False, PHONOLOGICAL)


def enroll(
    lattice: PhonemeLattice, dictionary: CompiledDictionary
) -> TriangularTable[MorphemeEntry]:
    """Enroll every morpheme spelled by some lattice chain segment.

    Walks positions left to right carrying a frontier of (start, trie
    node) states, so prefixes that match no dictionary word are dropped as
    early as possible. Cell (i, j) ends up holding exactly the entries
    whose surface is spelled by positions i..j (1-based, inclusive).
    """
    n = len(lattice)
    tbl: TriangularTable[MorphemeEntry] = TriangularTable(n)
    frontier: list[tuple[int, _TrieNode]] = []
    for pos in range(1, n + 1):
        frontier.append((pos, dictionary.root))
        advanced: list[tuple[int, _TrieNode]] = []
        seen: set[tuple[int, int]] = set()
        for start, node in frontier:
            for sym in lattice.positions[pos - 1]:
                child = node.children.get(sym)
                if child is None:
                    continue
                for entry in child.entries:
                    tbl.add(start, pos, entry)
                if child.children and (start, id(child)) not in seen:
                    seen.add((start, id(child)))
                    advanced.append((start, child))
        frontier = advanced
    return tbl


@dataclass(frozen=True)
class MorphAnalysis:
    """One complete tiling of the lattice by connected morphemes."""

    morphemes: tuple[tuple[MorphemeEntry, tuple[int, int]], ...]
    eojeol_breaks: tuple[int, ...] = ()

    @property
    def rendering(self) -> str:
        return "+".join(entry.orth_text for entry, _ in self.morphemes)

    @property
    def glosses(self) -> tuple[str, ...]:
        return tuple(entry.gloss for entry, _ in self.morphemes)

    @property
    def spans(self) -> tuple[tuple[int, int], ...]:
        return tuple(span for _, span in self.morphemes)

    def syllable_spans(self) -> tuple[tuple[int, int], ...]:
        """Spans counted in syllables of the orthographic renderings.

        The phoneme-positioned table is authoritative; these are the
        coarser coordinates a syllable-oriented report shows next to it.
        """
        spans = []
        start = 1
        for entry, _ in self.morphemes:
            end = start + entry.syllable_count - 1
            spans.append((start, end))
            start = end + 1
        return tuple(spans)


def render(analysis: MorphAnalysis) -> str:
    """'+' between morphemes, '-' between syllables within a morpheme."""
    return analysis.rendering


@dataclass(frozen=True)
class MorphemeLattice:
    """All analyses of one pause unit, plus how far a failed search got."""

    analyses: tuple[MorphAnalysis, ...]
    furthest_reached: int = 0

    def __len__(self) -> int:
        return len(self.analyses)

    def renderings(self) -> tuple[str, ...]:
        return tuple(a.rendering for a in self.analyses)


@dataclass(frozen=True)
class _Partial:
    entry: MorphemeEntry
    span: tuple[int, int]
    prev: "_Partial | None"


def analyze(
    lattice: PhonemeLattice, dictionary: CompiledDictionary
) -> MorphemeLattice:
    """Find every tiling of the lattice by connected dictionary morphemes.

    An analysis must start with a BOS-legal tag, end with an EOS-legal
    tag, and pass both connectivity checks at every junction. All
    surviving analyses are returned, sorted by rendering for stable
    output; ranking among them is deliberately not attempted.
    """
    n = len(lattice)
    if n == 0:
        return MorphemeLattice((), 0)
    tbl = enroll(lattice, dictionary)
    ends: dict[int, list[_Partial]] = {}
    for j in range(1, n + 1):
        bucket: list[_Partial] = []
        for i in range(1, j + 1):
            for entry in tbl.cell(i, j):
                if i == 1:
                    if (BOS, entry.left_tag) in dictionary.morph_pairs:
                        bucket.append(_Partial(entry, (i, j), None))
                else:
                    for prev in ends.get(i - 1, ()):
                        if connect(prev.entry, entry, dictionary).legal:
                            bucket.append(_Partial(entry, (i, j), prev))
        if bucket:
            ends[j] = bucket

    analyses = []
    for partial in ends.get(n, ()):
        if (partial.entry.right_tag, EOS) not in dictionary.morph_pairs:
            continue
        morphemes: list[tuple[MorphemeEntry, tuple[int, int]]] = []
        cur: _Partial | None = partial
        while cur is not None:
            morphemes.append((cur.entry, cur.span))
            cur = cur.prev
        morphemes.reverse()
        breaks = tuple(
            idx
            for idx, (left, right) in enumerate(zip(morphemes, morphemes[1:]))
            if (left[0].right_tag, right[0].left_tag) in dictionary.eojeol_pairs
        )
        analyses.append(MorphAnalysis(tuple(morphemes), breaks))

    def total_order(a: MorphAnalysis):
        # fully determines an analysis; keeps output byte-stable across
        # processes regardless of set iteration order
        return tuple(
            (span, e.surface, e.orth_text, e.gloss, e.left_tag, e.right_tag,
             e.left_phon or "", e.right_phon or "")
            for e, span in a.morphemes
        )

    unique = sorted(set(analyses), key=lambda a: (a.rendering, total_order(a)))
    furthest = max(ends, default=0)
    return MorphemeLattice(tuple(unique), furthest)


def load_dictionary_entries(
    path: str | Path, inventory: PhonemeInventory
) -> list[MorphemeEntry]:
    """Read dictionary lines:
    `surface<TAB>orthographic<TAB>gloss<TAB>left_tag<TAB>right_tag<TAB>left_phon<TAB>right_phon`.

    Surfaces and orthographic forms are Yale text ('-' allowed); a phon
    class of '-' means none. '#' starts a comment.
    """
    entries = []
    path = Path(path)
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 7:
            raise DictionaryError(f"{path}:{lineno}: expected 7 tab-separated fields")
        surface_text, orth_text, gloss, ltag, rtag, lphon, rphon = (
            f.strip() for f in fields
        )
        try:
            surface = tuple(p.symbol for p in parse_yale(inventory, surface_text))
            ortho = tuple(p.symbol for p in parse_yale(inventory, orth_text))
        except Exception as exc:
            raise DictionaryError(f"{path}:{lineno}: {exc}") from None
        entries.append(
            MorphemeEntry(
                surface,
                ortho,
                orth_text,
                gloss,
                ltag,
                rtag,
                lphon if lphon != "-" else None,
                rphon if rphon != "-" else None,
            )
        )
    return entries


def load_pairs(
    path: str | Path,
) -> tuple[list[tuple[str, str]], list[tuple[str, str]]]:
    """Read a connectivity matrix file listing legal pairs.

    Lines are `left<TAB>right[<TAB>eojeol]`; the optional third field
    flags the pair as an orthographic-word boundary. Returns (pairs,
    eojeol-flagged pairs).
    """
    pairs: list[tuple[str, str]] = []
    eojeol: list[tuple[str, str]] = []
    path = Path(path)
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line:
            continue
        fields = [f.strip() for f in line.split("\t")]
        if len(fields) == 2:
            pairs.append((fields[0], fields[1]))
        elif len(fields) == 3 and fields[2] == "eojeol":
            pairs.append((fields[0], fields[1]))
            eojeol.append((fields[0], fields[1]))
        else:
            raise DictionaryError(
                f"{path}:{lineno}: expected `left<TAB>right` with optional `eojeol` flag"
            )
    return pairs, eojeol

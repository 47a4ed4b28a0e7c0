"""Phoneme lattices and confusion-matrix error simulation.

A lattice is a "sausage": an ordered list of positions, each holding a
non-empty set of alternative phoneme symbols. The simulator mutates a
correct phoneme sequence into such a lattice using a recognizer confusion
matrix, guaranteeing the correct phoneme stays present at every position.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import LatticeError
from .phonology import PhonemeInventory

ROW_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PhonemeLattice:
    """Per-position alternative phoneme symbols; first alternative is the
    best/true one when known."""

    positions: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        for i, alts in enumerate(self.positions):
            if not alts:
                raise LatticeError(f"lattice position {i + 1} has no alternatives")
            if len(set(alts)) != len(alts):
                raise LatticeError(f"lattice position {i + 1} repeats an alternative")

    def __len__(self) -> int:
        return len(self.positions)

    def validate(self, inventory: PhonemeInventory) -> None:
        for i, alts in enumerate(self.positions):
            for sym in alts:
                if sym not in inventory:
                    raise LatticeError(
                        f"lattice position {i + 1}: unknown phoneme {sym!r}"
                    )

    @classmethod
    def from_sequence(cls, symbols: Iterable[str]) -> "PhonemeLattice":
        return cls(tuple((s,) for s in symbols))

    def to_text(self) -> str:
        return "\n".join(" ".join(alts) for alts in self.positions)

    @classmethod
    def from_text(cls, text: str) -> "PhonemeLattice":
        positions = []
        for line in text.splitlines():
            line = line.strip()
            if line:
                positions.append(tuple(line.split()))
        return cls(tuple(positions))


def read_lattices(path: str | Path) -> list[PhonemeLattice]:
    """Read one or more lattices from a file; blank lines separate them."""
    blocks: list[list[str]] = [[]]
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            blocks[-1].append(line)
        elif blocks[-1]:
            blocks.append([])
    return [PhonemeLattice.from_text("\n".join(b)) for b in blocks if b]


def write_lattices(path: str | Path, lattices: Sequence[PhonemeLattice]) -> None:
    Path(path).write_text(
        "\n\n".join(lat.to_text() for lat in lattices) + "\n", encoding="utf-8"
    )


class ConfusionMatrix:
    """Recognition confusion probabilities: (true, recognized) -> prob.

    Each true phoneme's outgoing probabilities must sum to 1. The insertion
    order of true phonemes and of alternatives within a row is kept and
    used for deterministic tie-breaking.
    """

    def __init__(self, rows: dict[str, dict[str, float]]):
        self.rows = rows
        self._order: dict[str, int] = {}
        for true, row in rows.items():
            total = math.fsum(row.values())
            if abs(total - 1.0) > ROW_SUM_TOLERANCE:
                raise LatticeError(
                    f"confusion row for {true!r} sums to {total!r}, expected 1"
                )
            for sym in (true, *row):
                self._order.setdefault(sym, len(self._order))

    def row(self, true: str) -> dict[str, float]:
        try:
            return self.rows[true]
        except KeyError:
            raise LatticeError(f"no confusion row for phoneme {true!r}") from None

    def order(self, symbol: str) -> int:
        return self._order.get(symbol, len(self._order))

    @classmethod
    def identity(cls, symbols: Iterable[str]) -> "ConfusionMatrix":
        return cls({s: {s: 1.0} for s in symbols})

    @classmethod
    def read(cls, path: str | Path) -> "ConfusionMatrix":
        rows: dict[str, dict[str, float]] = {}
        path = Path(path)
        for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            line = raw.split("#", 1)[0].rstrip()
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise LatticeError(f"{path}:{lineno}: expected `true<TAB>recognized<TAB>prob`")
            true, recognized, prob = fields[0].strip(), fields[1].strip(), fields[2]
            try:
                p = float(prob)
            except ValueError:
                raise LatticeError(f"{path}:{lineno}: bad probability {prob!r}") from None
            if not 0.0 <= p <= 1.0:
                raise LatticeError(f"{path}:{lineno}: probability {p} outside [0, 1]")
            rows.setdefault(true, {})[recognized] = p
        try:
            return cls(rows)
        except LatticeError as exc:
            raise LatticeError(f"{path}: {exc}") from None

    def write(self, path: str | Path) -> None:
        lines = [
            f"{true}\t{rec}\t{p}"
            for true, row in self.rows.items()
            for rec, p in row.items()
        ]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class SimConfig:
    """Mutation knobs: mean and cap of alternatives per position, plus seed."""

    target_alternatives: float = 2.3
    max_alternatives: int = 4
    seed: int = 0

    def __post_init__(self) -> None:
        if not 1 <= self.target_alternatives <= self.max_alternatives:
            raise LatticeError(
                "need 1 <= target_alternatives <= max_alternatives, got "
                f"{self.target_alternatives} and {self.max_alternatives}"
            )


def simulate(
    truth: Sequence[str], cm: ConfusionMatrix, cfg: SimConfig
) -> PhonemeLattice:
    """Mutate a correct phoneme sequence into an error lattice.

    Every position keeps its true phoneme first, then adds the most
    confusable alternatives in descending confusion probability. The
    number of extras is a per-position binomial draw whose mean is
    target_alternatives - 1, so the expected lattice width matches the
    target whenever enough confusable phonemes exist. Identical seeds
    yield identical lattices.
    """
    rng = random.Random(cfg.seed)
    n_extra = cfg.max_alternatives - 1
    p = (cfg.target_alternatives - 1.0) / n_extra if n_extra else 0.0
    positions = []
    for sym in truth:
        row = cm.row(sym)
        confusable = sorted(
            (s for s, prob in row.items() if s != sym and prob > 0.0),
            key=lambda s: (-row[s], cm.order(s)),
        )
        k = sum(rng.random() < p for _ in range(n_extra))
        positions.append((sym, *confusable[:k]))
    return PhonemeLattice(tuple(positions))


def chain_count(lattice: PhonemeLattice) -> int:
    """Number of distinct phoneme chains through the lattice (1 if empty)."""
    return math.prod(len(alts) for alts in lattice.positions)


def enumerate_chains(lattice: PhonemeLattice, limit: int) -> list[tuple[str, ...]]:
    """First `limit` chains in lexicographic order; exhaustive when the
    lattice has at most `limit` chains."""
    if limit < 1:
        raise LatticeError(f"limit must be >= 1, got {limit}")
    ordered = [sorted(alts) for alts in lattice.positions]
    return list(itertools.islice(itertools.product(*ordered), limit))

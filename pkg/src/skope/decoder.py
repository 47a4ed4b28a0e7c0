"""Deterministic decoding of diphone spotting sequences into phoneme lattices.

The acoustic front end spots one diphone per 30 msec frame shift. Decoding
proceeds in three steps: group consecutive identical diphones into runs,
drop short runs (insertion errors), then split each diphone into its two
phonemes and merge the shared phoneme of chaining neighbors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import DecodeError
from .lattice import PhonemeLattice
from .phonology import Diphone, PhonemeInventory, classify_diphone


@dataclass(frozen=True)
class SpottingFrame:
    """One spotted diphone at one frame ordinal."""

    index: int
    diphone: Diphone
    score: float | None = None


@dataclass(frozen=True)
class DiphoneRun:
    """Maximal run of identical consecutive diphone labels."""

    diphone: Diphone
    start_frame: int
    end_frame: int

    @property
    def count(self) -> int:
        return self.end_frame - self.start_frame + 1


@dataclass(frozen=True)
class DecoderConfig:
    min_count: int = 2
    frame_shift_ms: int = 30

    def __post_init__(self) -> None:
        if self.min_count < 1:
            raise DecodeError(f"min_count must be >= 1, got {self.min_count}")


@dataclass(frozen=True)
class ChainBreak:
    """Two adjacent runs that neither chain nor merge.

    `after_position` is the 1-based lattice position of the left run's last
    phoneme; the gap sits between it and the next position.
    """

    after_position: int
    left: Diphone
    right: Diphone


@dataclass(frozen=True)
class DecodeResult:
    lattice: PhonemeLattice
    breaks: tuple[ChainBreak, ...] = field(default_factory=tuple)


def group_runs(frames: Sequence[SpottingFrame]) -> list[DiphoneRun]:
    """Group consecutive identical diphones into maximal runs."""
    for prev, cur in zip(frames, frames[1:]):
        if cur.index <= prev.index:
            raise DecodeError(
                f"frame indices must strictly increase ({prev.index} then {cur.index})"
            )
    runs: list[DiphoneRun] = []
    for frame in frames:
        if runs and runs[-1].diphone == frame.diphone and frame.index == runs[-1].end_frame + 1:
            runs[-1] = DiphoneRun(frame.diphone, runs[-1].start_frame, frame.index)
        else:
            runs.append(DiphoneRun(frame.diphone, frame.index, frame.index))
    return runs


def prune_insertions(
    runs: Sequence[DiphoneRun], config: DecoderConfig
) -> list[DiphoneRun]:
    """Drop runs shorter than the insertion threshold, keeping order."""
    return [run for run in runs if run.count >= config.min_count]


def merge_to_phonemes(runs: Sequence[DiphoneRun]) -> DecodeResult:
    """Split runs into phonemes, merging the shared phoneme of chained runs.

    When a run's first phoneme differs from its predecessor's second, both
    phonemes are kept and the junction is reported as a ChainBreak; later
    lattice-based analysis can still prune the spurious reading.
    """
    symbols: list[str] = []
    breaks: list[ChainBreak] = []
    prev: Diphone | None = None
    for run in runs:
        d = run.diphone
        if symbols and symbols[-1] == d.first.symbol:
            symbols.append(d.second.symbol)
        else:
            if prev is not None:
                breaks.append(ChainBreak(len(symbols), prev, d))
            symbols.extend((d.first.symbol, d.second.symbol))
        prev = d
    return DecodeResult(PhonemeLattice.from_sequence(symbols), tuple(breaks))


def decode(frames: Sequence[SpottingFrame], config: DecoderConfig) -> DecodeResult:
    """Full decode: group runs, prune insertions, merge to a lattice."""
    return merge_to_phonemes(prune_insertions(group_runs(frames), config))


def load_frames(path: str | Path, inventory: PhonemeInventory) -> list[SpottingFrame]:
    """Read a frames file: `index<TAB>first<TAB>second[<TAB>score]` per line."""
    frames = []
    path = Path(path)
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) not in (3, 4):
            raise DecodeError(f"{path}:{lineno}: expected 3 or 4 tab-separated fields")
        try:
            index = int(fields[0])
        except ValueError:
            raise DecodeError(f"{path}:{lineno}: bad frame index {fields[0]!r}") from None
        try:
            diphone = classify_diphone(inventory[fields[1].strip()], inventory[fields[2].strip()])
        except Exception as exc:
            raise DecodeError(f"{path}:{lineno}: {exc}") from None
        score = None
        if len(fields) == 4:
            try:
                score = float(fields[3])
            except ValueError:
                raise DecodeError(f"{path}:{lineno}: bad score {fields[3]!r}") from None
        frames.append(SpottingFrame(index, diphone, score))
    return frames

"""Triangular table: the shared span-indexed control structure.

Cells are keyed (i, j) with 1 <= i <= j <= size and hold whatever the
analysis enrolls: morpheme entries during morphological analysis, grammar
nodes during relaxation parsing.
"""

from __future__ import annotations

from typing import Generic, Iterator, TypeVar

T = TypeVar("T")


class TriangularTable(Generic[T]):
    def __init__(self, size: int):
        if size < 0:
            raise ValueError(f"table size must be >= 0, got {size}")
        self.size = size
        self._cells: dict[tuple[int, int], list[T]] = {}

    def _check(self, i: int, j: int) -> None:
        if not 1 <= i <= j <= self.size:
            raise ValueError(f"cell ({i}, {j}) outside table of size {self.size}")

    def add(self, i: int, j: int, item: T) -> bool:
        """Enroll an item at (i, j); returns False if already present."""
        self._check(i, j)
        cell = self._cells.setdefault((i, j), [])
        if item in cell:
            return False
        cell.append(item)
        return True

    def cell(self, i: int, j: int) -> tuple[T, ...]:
        self._check(i, j)
        return tuple(self._cells.get((i, j), ()))

    def spans(self) -> Iterator[tuple[int, int]]:
        """Occupied cells in (start, end) order."""
        return iter(sorted(self._cells))

    def __len__(self) -> int:
        return sum(len(c) for c in self._cells.values())

    def __bool__(self) -> bool:
        return len(self) > 0

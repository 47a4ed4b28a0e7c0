"""Categorial grammar with unordered argument sets, plus a chart-parse oracle.

A category is either basic (`np`, `s[command]`) or complex: a result
category with an unordered multiset of argument categories consumed to the
left (`s\\{np[subj],np[obj]}`) or to the right (`b/{a}`). Because the
argument set is unordered, cancellation licenses Korean-style free word
order within each direction. chart_parse exhaustively closes the two
cancellation rules over adjacent spans and is the deterministic reference
against which the relaxation parser is validated.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

from .errors import LexiconError

logger = logging.getLogger(__name__)

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class Basic:
    """Basic category: a name with an optional feature, e.g. np[subj]."""

    name: str
    feature: str | None = None

    def __str__(self) -> str:
        return f"{self.name}[{self.feature}]" if self.feature else self.name


@dataclass(frozen=True)
class Complex:
    """Functor category: result plus an unordered argument multiset.

    direction "left" means the arguments are consumed from the left
    (written result\\{...}), "right" from the right (result/{...}). The
    argument tuple is kept in a canonical sort so equality and hashing
    follow multiset semantics.
    """

    result: "Category"
    args: tuple["Category", ...]
    direction: str

    def __post_init__(self) -> None:
        if not self.args:
            raise LexiconError("complex category needs at least one argument")
        if self.direction not in (LEFT, RIGHT):
            raise LexiconError(f"bad direction {self.direction!r}")
        object.__setattr__(self, "args", tuple(sorted(self.args, key=str)))

    def __str__(self) -> str:
        result = str(self.result)
        if isinstance(self.result, Complex):
            result = f"({result})"
        sep = "\\" if self.direction == LEFT else "/"
        return f"{result}{sep}{{{','.join(str(a) for a in self.args)}}}"


Category = Union[Basic, Complex]


def left_cancel(arg: Category, functor: Category) -> Category | None:
    """arg then functor result\\S: cancel one matching argument, or None."""
    if not isinstance(functor, Complex) or functor.direction != LEFT:
        return None
    return _cancel(functor, arg)


def right_cancel(functor: Category, arg: Category) -> Category | None:
    """functor result/S then arg: mirror of left_cancel."""
    if not isinstance(functor, Complex) or functor.direction != RIGHT:
        return None
    return _cancel(functor, arg)


def _cancel(functor: Complex, arg: Category) -> Category | None:
    if arg not in functor.args:
        return None
    remaining = list(functor.args)
    remaining.remove(arg)
    if not remaining:
        return functor.result
    return Complex(functor.result, tuple(remaining), functor.direction)


class _CategoryReader:
    """Recursive-descent reader for the textual category notation."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, message: str) -> LexiconError:
        return LexiconError(f"bad category {self.text!r} at {self.pos}: {message}")

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_space(self) -> None:
        while self.peek().isspace():
            self.pos += 1

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.fail(f"expected {ch!r}")
        self.pos += 1

    def name(self) -> str:
        start = self.pos
        while self.peek().isalnum() or self.peek() in ("_", "'"):
            self.pos += 1
        if self.pos == start:
            raise self.fail("expected a category name")
        return self.text[start : self.pos]

    def primary(self) -> Category:
        self.skip_space()
        if self.peek() == "(":
            self.pos += 1
            cat = self.category()
            self.skip_space()
            self.expect(")")
            return cat
        name = self.name()
        feature = None
        if self.peek() == "[":
            self.pos += 1
            feature = self.name()
            self.expect("]")
        return Basic(name, feature)

    def category(self) -> Category:
        cat = self.primary()
        while True:
            self.skip_space()
            ch = self.peek()
            if ch not in ("\\", "/"):
                return cat
            direction = LEFT if ch == "\\" else RIGHT
            self.pos += 1
            self.skip_space()
            self.expect("{")
            args = [self.category()]
            self.skip_space()
            while self.peek() == ",":
                self.pos += 1
                args.append(self.category())
                self.skip_space()
            self.expect("}")
            cat = Complex(cat, tuple(args), direction)


def parse_category(text: str) -> Category:
    reader = _CategoryReader(text)
    cat = reader.category()
    reader.skip_space()
    if reader.pos != len(text):
        raise reader.fail("trailing input")
    return cat


@dataclass(frozen=True)
class LexiconEntry:
    form: str
    senses: tuple[Category, ...]

    def __post_init__(self) -> None:
        if not self.senses:
            raise LexiconError(f"lexicon entry {self.form!r} has no senses")
        if len(set(self.senses)) != len(self.senses):
            raise LexiconError(f"lexicon entry {self.form!r} repeats a sense")


class Lexicon:
    """Morpheme form -> senses. Repeated lines accumulate senses."""

    def __init__(self, entries: Sequence[LexiconEntry]):
        self.entries = {e.form: e for e in entries}
        if len(self.entries) != len(entries):
            raise LexiconError("duplicate lexicon forms")

    def __contains__(self, form: str) -> bool:
        return form in self.entries

    def senses(self, form: str) -> tuple[Category, ...]:
        try:
            return self.entries[form].senses
        except KeyError:
            raise LexiconError(f"no lexicon entry for morpheme {form!r}") from None

    @classmethod
    def read(cls, path: str | Path) -> "Lexicon":
        senses: dict[str, list[Category]] = {}
        path = Path(path)
        for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            line = raw.split("#", 1)[0].rstrip()
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise LexiconError(f"{path}:{lineno}: expected `form<TAB>category`")
            form = fields[0].strip()
            try:
                cat = parse_category(fields[1].strip())
            except LexiconError as exc:
                raise LexiconError(f"{path}:{lineno}: {exc}") from None
            bucket = senses.setdefault(form, [])
            if cat in bucket:
                logger.warning("%s:%d: duplicate sense for %r", path, lineno, form)
                continue
            bucket.append(cat)
        return cls([LexiconEntry(f, tuple(s)) for f, s in senses.items()])


@dataclass(frozen=True)
class ParseTree:
    """Derivation tree: leaves are lexical senses, internal nodes one
    cancellation step over their two children."""

    category: Category
    span: tuple[int, int]
    children: tuple["ParseTree", ...] = ()
    form: str | None = None
    activation: float | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def size(self) -> int:
        return 1 + sum(child.size() for child in self.children)

    def leaves(self) -> list["ParseTree"]:
        if self.is_leaf:
            return [self]
        return [leaf for child in self.children for leaf in child.leaves()]

    def normal_form(self):
        """Hashable structural identity, ignoring activation scores."""
        return (
            str(self.category),
            self.span,
            self.form,
            tuple(child.normal_form() for child in self.children),
        )

    def preorder_spans(self) -> tuple[tuple[int, int], ...]:
        out = [self.span]
        for child in self.children:
            out.extend(child.preorder_spans())
        return tuple(out)

    def to_text(self) -> str:
        head = f"{self.category}({self.span[0]},{self.span[1]})"
        if self.is_leaf:
            return f"{self.form}:{head}" if self.form else head
        return f"({head} {' '.join(c.to_text() for c in self.children)})"


def chart_parse(
    forms: Sequence[str], lexicon: Lexicon, max_derivations: int = 100_000
) -> tuple[ParseTree, ...]:
    """Exhaustive CKY-style closure of the two cancellation rules.

    Returns every derivation of every full-span category. Intended as the
    reference for small inputs; max_derivations guards against grammar
    blowups.
    """
    n = len(forms)
    if n == 0:
        raise LexiconError("cannot parse an empty morpheme sequence")
    cells: dict[tuple[int, int], list[ParseTree]] = {}
    for i, form in enumerate(forms, start=1):
        cells[(i, i)] = [
            ParseTree(cat, (i, i), form=form)
            for cat in sorted(lexicon.senses(form), key=str)
        ]
    total = 0
    for width in range(2, n + 1):
        for i in range(1, n - width + 2):
            j = i + width - 1
            cell: list[ParseTree] = []
            for m in range(i, j):
                for left in cells.get((i, m), ()):
                    for right in cells.get((m + 1, j), ()):
                        for cat in (
                            left_cancel(left.category, right.category),
                            right_cancel(left.category, right.category),
                        ):
                            if cat is not None:
                                cell.append(ParseTree(cat, (i, j), (left, right)))
                                total += 1
                                if total > max_derivations:
                                    raise LexiconError(
                                        f"chart exceeded {max_derivations} derivations"
                                    )
            if cell:
                cells[(i, j)] = cell
    return tuple(cells.get((1, n), ()))

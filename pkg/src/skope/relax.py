"""Table-driven interactive relaxation parsing over the categorial grammar.

Parsing is a population of grammar nodes in a triangular table, evolved by
a three-step cycle: add nodes (every node above the generation threshold
combines with adjacent table cells through cancellation), spread activation
(bottom-up with rich-get-richer competition among parents, top-down
uniformly to children), and decay (incomplete nodes are penalized, nodes
falling below the removal threshold leave the table together with anything
built on them). Full-span basic-category nodes are collected as parse
roots, ranked by their peak activation.

Positions are morpheme slots for plain sequences and phoneme coordinates
for morpheme lattices, so the same table geometry drives both.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from .errors import ConfigError, LexiconError
from .grammar import (
    LEFT,
    RIGHT,
    Basic,
    Category,
    Complex,
    Lexicon,
    ParseTree,
    left_cancel,
    right_cancel,
)
from .morph import MorphemeLattice

LEFTWARD = "leftward"
RIGHTWARD = "rightward"

DECAY_LOSS = "loss"  # node keeps a * (1 - d) each cycle
DECAY_RETENTION = "retention"  # node keeps a * d each cycle

LEXICAL = "lexical"
GENERATED = "generated"


@dataclass(frozen=True)
class RelaxationParams:
    """Relaxation dynamics parameters.

    rho/rho_prime are the upward/downward propagation portions, d the decay
    ratio, theta the node-generation threshold, phi the node-removal
    threshold. decay_mode picks how d is read: "loss" keeps a*(1-d) per
    cycle, "retention" keeps a*d. down_split divides the downward portion
    among the children; switching it off gives the whole portion to each.
    """

    rho: float = 0.05
    rho_prime: float = 0.03
    d: float = 0.87
    theta: float = 0.51
    phi: float = 0.066
    init_lexical: float = 1.0
    init_generated: float = 0.2
    max_cycles: int = 200
    stability_window: int = 5
    decay_mode: str = DECAY_LOSS
    down_split: bool = True

    def __post_init__(self) -> None:
        for name in ("rho", "rho_prime", "d", "theta", "phi", "init_lexical", "init_generated"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value}")
        if not self.phi < self.theta:
            raise ConfigError(f"need phi < theta, got {self.phi} >= {self.theta}")
        if self.max_cycles < 1:
            raise ConfigError(f"max_cycles must be >= 1, got {self.max_cycles}")
        if self.stability_window < 1:
            raise ConfigError(f"stability_window must be >= 1, got {self.stability_window}")
        if self.decay_mode not in (DECAY_LOSS, DECAY_RETENTION):
            raise ConfigError(f"unknown decay_mode {self.decay_mode!r}")


def load_params(path: str | Path) -> RelaxationParams:
    """Read a `key=value` parameter file; '#' starts a comment."""
    values: dict = {}
    floats = {"rho", "rho_prime", "d", "theta", "phi", "init_lexical", "init_generated"}
    ints = {"max_cycles", "stability_window"}
    path = Path(path)
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected `key=value`")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        try:
            if key in floats:
                values[key] = float(value)
            elif key in ints:
                values[key] = int(value)
            elif key == "decay_mode":
                values[key] = value
            elif key == "down_split":
                if value.lower() not in ("true", "false"):
                    raise ValueError(value)
                values[key] = value.lower() == "true"
            else:
                raise ConfigError(f"{path}:{lineno}: unknown parameter {key!r}")
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: bad value {value!r} for {key}") from None
    return RelaxationParams(**values)


class GrammarNode:
    """One table node: a category over a span with a live activation.

    cr is the argument count of the functor category that generated the
    node, ca how many arguments it has actually bound (lexical nodes have
    cr = ca = 0 and count as complete). children are the two constituents
    combined by the generating cancellation, in span order.
    """

    __slots__ = ("id", "category", "span", "activation", "cr", "ca",
                 "children", "parents", "kind", "form")

    def __init__(self, node_id: int, category: Category, span: tuple[int, int],
                 activation: float, kind: str, cr: int = 0, ca: int = 0,
                 children: tuple[int, ...] = (), form: str | None = None):
        self.id = node_id
        self.category = category
        self.span = span
        self.activation = activation
        self.kind = kind
        self.cr = cr
        self.ca = ca
        self.children = children
        self.parents: list[int] = []
        self.form = form

    @property
    def complete(self) -> bool:
        return self.ca == self.cr

    def __repr__(self) -> str:
        return (f"GrammarNode({self.id}, {self.category}, {self.span}, "
                f"a={self.activation:.4f}, {self.ca}/{self.cr})")


class RelaxationState:
    """Live node population indexed by span and by (category, span)."""

    def __init__(self, size: int, record_trace: bool = False):
        self.size = size
        self.nodes: dict[int, GrammarNode] = {}
        self.by_span: dict[tuple[int, int], list[int]] = {}
        self.by_key: dict[tuple[Category, tuple[int, int]], int] = {}
        self.cycle = 0
        self.next_id = 1
        self.trace: list[tuple[int, int, str, tuple[int, int], float]] | None = (
            [] if record_trace else None
        )

    def add_lexical(self, category: Category, span: tuple[int, int],
                    activation: float, form: str) -> GrammarNode:
        return self._add(GrammarNode(self.next_id, category, span, activation,
                                     LEXICAL, form=form))

    def _add(self, node: GrammarNode) -> GrammarNode:
        key = (node.category, node.span)
        if key in self.by_key:
            raise ValueError(f"node {key} already in table")
        self.nodes[node.id] = node
        self.by_span.setdefault(node.span, []).append(node.id)
        self.by_key[key] = node.id
        self.next_id += 1
        return node

    def merge_or_add_generated(self, category: Category, span: tuple[int, int],
                               left: GrammarNode, right: GrammarNode,
                               functor: GrammarNode, init: float) -> GrammarNode:
        """Create a generated node, or fold a duplicate (same category and
        span) into the existing one by summing in the initial activation.
        The first derivation's constituent links are kept."""
        key = (category, span)
        existing = self.by_key.get(key)
        if existing is not None:
            node = self.nodes[existing]
            node.activation += init
            return node
        assert isinstance(functor.category, Complex)
        node = GrammarNode(self.next_id, category, span, init, GENERATED,
                           cr=len(functor.category.args), ca=1,
                           children=(left.id, right.id))
        self._add(node)
        left.parents.append(node.id)
        right.parents.append(node.id)
        return node

    def cell(self, span: tuple[int, int]) -> tuple[int, ...]:
        return tuple(self.by_span.get(span, ()))

    def remove(self, dead: set[int]) -> None:
        for nid in dead:
            node = self.nodes.pop(nid)
            self.by_span[node.span].remove(nid)
            if not self.by_span[node.span]:
                del self.by_span[node.span]
            del self.by_key[(node.category, node.span)]
        for node in self.nodes.values():
            if any(p in dead for p in node.parents):
                node.parents = [p for p in node.parents if p not in dead]

    def record_trace(self) -> None:
        if self.trace is None:
            return
        for nid in sorted(self.nodes):
            node = self.nodes[nid]
            self.trace.append(
                (self.cycle, nid, str(node.category), node.span, node.activation)
            )


def generation_positions(
    span: tuple[int, int], direction: str, n: int
) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Table positions a node at `span` may generate into.

    Leftward, a node at (i, j) generates at (k, j) for k in 1..i-1 and
    searches cell (k, i-1) for the adjacent constituent; rightward it
    generates at (i, k) for k in j+1..n searching (j+1, k). Spans always
    tile exactly, with no gap or overlap.
    """
    i, j = span
    if not 1 <= i <= j <= n:
        raise ValueError(f"span {span} outside table of size {n}")
    if direction == LEFTWARD:
        return [((k, j), (k, i - 1)) for k in range(1, i)]
    if direction == RIGHTWARD:
        return [((i, k), (j + 1, k)) for k in range(j + 1, n + 1)]
    raise ValueError(f"unknown direction {direction!r}")


def spread_up(
    activation: float, parent_activations: Sequence[float], rho: float
) -> list[float]:
    """Bottom-up increments: parent i gets n*rho*a * a_i^2 / sum_j a_j^2.

    Strong parents absorb most of the flow, which inhibits weak
    competitors without explicit inhibitory links. The increments always
    sum to n*rho*a; all-zero parents split that mass uniformly.
    """
    n = len(parent_activations)
    if n == 0:
        return []
    denom = sum(a * a for a in parent_activations)
    if denom == 0.0:
        return [rho * activation] * n
    return [n * rho * activation * a * a / denom for a in parent_activations]


def spread_down(
    activation: float, children: int, rho_prime: float, split: bool = True
) -> float:
    """Top-down per-child increment: rho'*a divided among the children,
    or the whole portion to each child when split is off."""
    if children < 1:
        raise ValueError("spread_down needs at least one child")
    return rho_prime * activation / children if split else rho_prime * activation


def decay(node, params: RelaxationParams) -> float:
    """New activation after one decay step (does not mutate the node).

    Complete nodes (ca == cr, lexical included) keep the base fraction;
    incomplete ones are additionally penalized by ca/cr, so a node with no
    bound constituents drops straight to zero.
    """
    base = node.activation * (1.0 - params.d) if params.decay_mode == DECAY_LOSS \
        else node.activation * params.d
    if node.complete:
        return base
    if node.ca == 0:
        return 0.0
    return base * node.ca / node.cr


def relax_step(state: RelaxationState, params: RelaxationParams) -> RelaxationState:
    """One add-nodes / spread-activation / decay cycle, in place.

    Generation fires for every node above theta, searching the cells that
    abut its span; constituents are taken from the table as it stood at
    the start of the cycle, so each cycle adds at most one cancellation
    level. Spreading computes all increments from post-add activations
    before applying any. Decay then removes nodes below phi, plus any node
    whose derivation lost a constituent.
    """
    n = state.size
    firing = [nid for nid in sorted(state.nodes)
              if state.nodes[nid].activation > params.theta]
    cells_before = {span: tuple(ids) for span, ids in state.by_span.items()}

    for fid in firing:
        x = state.nodes[fid]
        for direction in (LEFTWARD, RIGHTWARD):
            for gspan, sspan in generation_positions(x.span, direction, n):
                for oid in cells_before.get(sspan, ()):
                    y = state.nodes[oid]
                    lnode, rnode = (y, x) if direction == LEFTWARD else (x, y)
                    for category, functor in (
                        (left_cancel(lnode.category, rnode.category), rnode),
                        (right_cancel(lnode.category, rnode.category), lnode),
                    ):
                        if category is not None:
                            state.merge_or_add_generated(
                                category, gspan, lnode, rnode, functor,
                                params.init_generated,
                            )

    snapshot = {nid: node.activation for nid, node in state.nodes.items()}
    increments = dict.fromkeys(state.nodes, 0.0)
    for nid in sorted(state.nodes):
        node = state.nodes[nid]
        if node.parents:
            parent_acts = [snapshot[p] for p in node.parents]
            for pid, delta in zip(node.parents,
                                  spread_up(snapshot[nid], parent_acts, params.rho)):
                increments[pid] += delta
        if node.children:
            delta = spread_down(snapshot[nid], len(node.children),
                                params.rho_prime, params.down_split)
            for cid in node.children:
                increments[cid] += delta
    for nid, node in state.nodes.items():
        node.activation += increments[nid]

    for node in state.nodes.values():
        node.activation = decay(node, params)
    dead = {nid for nid, node in state.nodes.items() if node.activation < params.phi}
    while True:
        cascaded = {
            nid
            for nid, node in state.nodes.items()
            if nid not in dead and any(c in dead for c in node.children)
        }
        if not cascaded:
            break
        dead |= cascaded
    state.remove(dead)

    state.cycle += 1
    state.record_trace()
    return state


@dataclass(frozen=True)
class PartialSpan:
    """Diagnostic: a completed constituent that never reached a full parse."""

    category: str
    span: tuple[int, int]
    peak_activation: float


@dataclass(frozen=True)
class RelaxResult:
    trees: tuple[ParseTree, ...]
    partials: tuple[PartialSpan, ...]
    cycles: int
    skipped_forms: tuple[str, ...] = ()
    trace: tuple[tuple[int, int, str, tuple[int, int], float], ...] | None = None


def _seed_sequence(forms: Sequence[str], lexicon: Lexicon):
    if not forms:
        return 0, [], []
    seeds = []
    for slot, form in enumerate(forms, start=1):
        for cat in sorted(lexicon.senses(form), key=str):
            seeds.append((form, (slot, slot), cat))
    return len(forms), seeds, []


def _seed_lattice(morphemes: MorphemeLattice, lexicon: Lexicon):
    if not morphemes.analyses:
        return 0, [], []
    n = max(span[1] for a in morphemes.analyses for _, span in a.morphemes)
    seen = set()
    seeds = []
    skipped = set()
    for analysis in morphemes.analyses:
        for entry, span in analysis.morphemes:
            form = entry.orth_text
            if form not in lexicon:
                skipped.add(form)
                continue
            for cat in sorted(lexicon.senses(form), key=str):
                key = (form, span, cat)
                if key not in seen:
                    seen.add(key)
                    seeds.append((form, span, cat))
    seeds.sort(key=lambda s: (s[1], s[0], str(s[2])))
    return n, seeds, sorted(skipped)


def _extract_tree(state: RelaxationState, nid: int) -> ParseTree:
    node = state.nodes[nid]
    if not node.children:
        return ParseTree(node.category, node.span, form=node.form)
    children = tuple(
        _extract_tree(state, cid)
        for cid in sorted(node.children, key=lambda c: state.nodes[c].span)
    )
    return ParseTree(node.category, node.span, children)


def parse(
    morphemes: MorphemeLattice | Sequence[str],
    lexicon: Lexicon,
    params: RelaxationParams | None = None,
    record_trace: bool = False,
) -> RelaxResult:
    """Relaxation-parse a morpheme sequence or a whole morpheme lattice.

    Lexical nodes are seeded for every sense of every morpheme (for a
    lattice, over all analyses on their phoneme spans; forms missing from
    the lexicon are skipped and reported). The cycle runs until the table
    is empty, the population is unchanged over stability_window cycles, or
    max_cycles. Every full-span complete basic-category node ever observed
    becomes a candidate root; results are ranked by the root's peak
    activation, then smaller trees, then leftmost derivations. When no
    root ever forms, the completed constituents with the widest spans are
    reported instead.
    """
    params = params or RelaxationParams()
    if isinstance(morphemes, MorphemeLattice):
        n, seeds, skipped = _seed_lattice(morphemes, lexicon)
    else:
        n, seeds, skipped = _seed_sequence(list(morphemes), lexicon)
    if not seeds:
        return RelaxResult((), (), 0, tuple(skipped), () if record_trace else None)

    state = RelaxationState(n, record_trace=record_trace)
    for form, span, cat in seeds:
        state.add_lexical(cat, span, params.init_lexical, form)
    state.record_trace()

    roots: dict[int, tuple[ParseTree, float]] = {}
    peaks: dict[int, tuple[str, tuple[int, int], bool, float]] = {}

    def observe() -> None:
        for nid, node in state.nodes.items():
            prev = peaks.get(nid)
            peak = node.activation if prev is None else max(prev[3], node.activation)
            peaks[nid] = (str(node.category), node.span, node.complete, peak)
            if (node.span == (1, n) and node.complete
                    and isinstance(node.category, Basic)):
                if nid not in roots:
                    roots[nid] = (_extract_tree(state, nid), node.activation)
                else:
                    tree, best = roots[nid]
                    roots[nid] = (tree, max(best, node.activation))

    observe()
    history: deque[tuple] = deque(maxlen=params.stability_window)
    for _ in range(params.max_cycles):
        if not state.nodes:
            break
        relax_step(state, params)
        observe()
        snapshot = tuple(
            (nid, state.nodes[nid].activation) for nid in sorted(state.nodes)
        )
        history.append(snapshot)
        if len(history) == params.stability_window and len(set(history)) == 1:
            break

    best: dict = {}
    for tree, peak in roots.values():
        nf = tree.normal_form()
        if nf not in best or best[nf][1] < peak:
            best[nf] = (tree, peak)
    ranked = sorted(
        best.values(),
        key=lambda item: (-item[1], item[0].size(), item[0].preorder_spans(),
                          item[0].to_text()),
    )
    trees = tuple(replace(tree, activation=peak) for tree, peak in ranked)

    partials: tuple[PartialSpan, ...] = ()
    if not trees:
        complete = [
            PartialSpan(cat, span, peak)
            for cat, span, is_complete, peak in peaks.values()
            if is_complete
        ]
        complete.sort(key=lambda p: (-(p.span[1] - p.span[0]), -p.peak_activation, p.span, p.category))
        partials = tuple(complete[:8])

    trace = tuple(state.trace) if state.trace is not None else None
    return RelaxResult(trees, partials, state.cycle, tuple(skipped), trace)

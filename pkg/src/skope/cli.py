"""Command-line surface: decode, simulate, morph, parse, pipeline.

Every stage reads and writes the line-oriented text formats documented in
the module docstrings, so stages compose through intermediate files exactly
like the all-in-one `pipeline` command. Exit codes: 0 success, 1 the run
worked but produced an empty result (no lattice, no analysis, or no parse
tree), 2 unreadable or malformed input.
"""

from __future__ import annotations

import functools
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from . import decoder as dec
from . import lattice as lat
from . import morph as mo
from . import relax as rx
from .errors import SkopeError
from .grammar import Lexicon
from .phonology import load_inventory, parse_yale
from .report import SentenceReport, write_report

STAGES = ("simulate", "morph", "parse")


def _skope_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SkopeError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _read_truth_lines(path: str) -> list[str]:
    lines = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines


@click.group()
@click.version_option(package_name="skope")
def main() -> None:
    """Spoken-language processing over phoneme lattices: decode diphone
    spotting output, simulate recognition-error lattices, analyze them
    morphologically, and parse the result by interactive relaxation."""


@main.command()
@click.option("--frames", required=True, help="Diphone spotting frames file.")
@click.option("--inventory", required=True, help="Phoneme inventory file.")
@click.option("--min-count", default=2, show_default=True,
              help="Insertion-pruning threshold in frames.")
@click.option("--out", default=None, help="Write the lattice here instead of stdout.")
@_skope_errors
def decode(frames: str, inventory: str, min_count: int, out: str | None) -> None:
    """Decode a diphone spotting sequence into a phoneme lattice."""
    inv = load_inventory(inventory)
    spotted = dec.load_frames(frames, inv)
    result = dec.decode(spotted, dec.DecoderConfig(min_count=min_count))
    for brk in result.breaks:
        click.echo(
            f"note: runs {brk.left.label} and {brk.right.label} do not chain "
            f"between positions {brk.after_position} and {brk.after_position + 1}",
            err=True,
        )
    _emit(result.lattice.to_text() + "\n", out)
    if len(result.lattice) == 0:
        sys.exit(1)


@main.command()
@click.option("--truth", required=True, help="Yale-romanized truth file, one pause unit per line.")
@click.option("--inventory", required=True, help="Phoneme inventory file.")
@click.option("--confusion", required=True, help="Confusion matrix file.")
@click.option("--seed", default=0, show_default=True,
              help="Base seed; line i uses seed+i.")
@click.option("--target-alts", default=2.3, show_default=True,
              help="Mean alternatives per position.")
@click.option("--max-alts", default=4, show_default=True,
              help="Cap on alternatives per position.")
@click.option("--out", default=None, help="Write lattices here instead of stdout.")
@_skope_errors
def simulate(truth: str, inventory: str, confusion: str, seed: int,
             target_alts: float, max_alts: int, out: str | None) -> None:
    """Mutate correct phoneme sequences into recognition-error lattices."""
    inv = load_inventory(inventory)
    cm = lat.ConfusionMatrix.read(confusion)
    lattices = []
    for i, line in enumerate(_read_truth_lines(truth)):
        symbols = [p.symbol for p in parse_yale(inv, line)]
        cfg = lat.SimConfig(target_alts, max_alts, seed + i)
        lattices.append(lat.simulate(symbols, cm, cfg))
    _emit("\n\n".join(l.to_text() for l in lattices) + "\n", out)
    if not lattices:
        sys.exit(1)


def _load_dictionary(inventory, dictionary, morph_matrix, phon_matrix):
    inv = load_inventory(inventory)
    entries = mo.load_dictionary_entries(dictionary, inv)
    morph_pairs, eojeol = mo.load_pairs(morph_matrix)
    phon_pairs, _ = mo.load_pairs(phon_matrix)
    return inv, mo.build_dictionary(entries, None, morph_pairs, phon_pairs, eojeol)


def _analysis_lines(result: mo.MorphemeLattice) -> list[str]:
    lines = []
    for analysis in result.analyses:
        spans = ",".join(f"{i}-{j}" for i, j in analysis.spans)
        syl = ",".join(f"{i}-{j}" for i, j in analysis.syllable_spans())
        glosses = "+".join(analysis.glosses)
        breaks = ",".join(str(b) for b in analysis.eojeol_breaks) or "-"
        lines.append(f"{analysis.rendering}\t{spans}\t{syl}\t{glosses}\t{breaks}")
    return lines


@main.command()
@click.option("--lattice", "lattice_path", required=True, help="Phoneme lattice file.")
@click.option("--inventory", required=True, help="Phoneme inventory file.")
@click.option("--dict", "dictionary", required=True, help="Morpheme dictionary file.")
@click.option("--morph-matrix", required=True, help="POS connectivity matrix file.")
@click.option("--phon-matrix", required=True, help="Phoneme connectivity matrix file.")
@click.option("--analyses", "analyses_out", default=None,
              help="Also write analyses with spans to this file.")
@_skope_errors
def morph(lattice_path: str, inventory: str, dictionary: str, morph_matrix: str,
          phon_matrix: str, analyses_out: str | None) -> None:
    """Analyze phoneme lattices into orthographic morpheme sequences."""
    inv, compiled = _load_dictionary(inventory, dictionary, morph_matrix, phon_matrix)
    blocks = []
    detail_blocks = []
    empty = False
    for lx in lat.read_lattices(lattice_path):
        lx.validate(inv)
        result = mo.analyze(lx, compiled)
        if result.analyses:
            blocks.append("\n".join(result.renderings()))
        else:
            empty = True
            blocks.append("")
            click.echo(
                f"note: no analysis; search reached position {result.furthest_reached} "
                f"of {len(lx)}",
                err=True,
            )
        detail_blocks.append("\n".join(_analysis_lines(result)))
    click.echo("\n\n".join(blocks))
    if analyses_out:
        Path(analyses_out).write_text("\n\n".join(detail_blocks) + "\n", encoding="utf-8")
    if empty:
        sys.exit(1)


def _read_analysis_file(path: str) -> list[list[list[tuple[str, tuple[int, int]]]]]:
    """Parse an analyses file back into (form, span) lists, one list per
    analysis, grouped into blocks: blank lines separate the lattices the
    analyses came from, and each block is parsed on its own."""
    blocks: list[list[list[tuple[str, tuple[int, int]]]]] = [[]]
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line:
            if blocks[-1]:
                blocks.append([])
            continue
        fields = line.split("\t")
        if len(fields) < 2:
            raise SkopeError(f"{path}: expected `rendering<TAB>spans` columns")
        forms = fields[0].split("+")
        spans = []
        for token in fields[1].split(","):
            i, _, j = token.partition("-")
            spans.append((int(i), int(j)))
        if len(forms) != len(spans):
            raise SkopeError(f"{path}: {len(forms)} morphemes but {len(spans)} spans")
        blocks[-1].append(list(zip(forms, spans)))
    return [b for b in blocks if b]


def _as_morpheme_lattice(analyses: list[list[tuple[str, tuple[int, int]]]]) -> mo.MorphemeLattice:
    built = []
    for items in analyses:
        morphemes = tuple(
            (mo.MorphemeEntry((form,), (form,), form, "", "X", "X"), span)
            for form, span in items
        )
        built.append(mo.MorphAnalysis(morphemes))
    return mo.MorphemeLattice(tuple(built))


def _tree_lines(result: rx.RelaxResult, n_best: int) -> list[str]:
    lines = []
    for rank, tree in enumerate(result.trees[:n_best], start=1):
        lines.append(
            f"{rank}\t{tree.category}\t{tree.activation:.6f}\t{tree.to_text()}"
        )
    return lines


def _trace_lines(trace) -> list[str]:
    return [
        f"{cycle}\t{node_id}\t{category}\t{span[0]}-{span[1]}\t{activation:.9f}"
        for cycle, node_id, category, span, activation in trace
    ]


@main.command(name="parse")
@click.option("--morphemes", default=None,
              help="Morpheme sequence file: forms separated by spaces or '+', one sentence per line.")
@click.option("--analyses", "analyses_in", default=None,
              help="Analyses file from `skope morph --analyses` (parsed as one lattice).")
@click.option("--lexicon", required=True, help="Syntactic lexicon file.")
@click.option("--params", "params_path", default=None, help="Relaxation parameter file.")
@click.option("--trace", "trace_path", default=None, help="Write per-cycle activations here.")
@click.option("--n-best", default=5, show_default=True, help="Trees to print per sentence.")
@click.option("--out", default=None, help="Write parses here instead of stdout.")
@_skope_errors
def parse_cmd(morphemes: str | None, analyses_in: str | None, lexicon: str,
              params_path: str | None, trace_path: str | None, n_best: int,
              out: str | None) -> None:
    """Parse morpheme sequences (or a whole morpheme lattice) by
    interactive relaxation over the categorial grammar."""
    if (morphemes is None) == (analyses_in is None):
        raise SkopeError("pass exactly one of --morphemes or --analyses")
    lex = Lexicon.read(lexicon)
    params = rx.load_params(params_path) if params_path else rx.RelaxationParams()
    want_trace = trace_path is not None

    inputs: list = []
    if morphemes is not None:
        for line in _read_truth_lines(morphemes):
            inputs.append([f for f in line.replace("+", " ").split() if f])
    else:
        for block in _read_analysis_file(analyses_in):
            inputs.append(_as_morpheme_lattice(block))

    blocks = []
    trace_sections = []
    empty = False
    for idx, item in enumerate(inputs):
        result = rx.parse(item, lex, params, record_trace=want_trace)
        for form in result.skipped_forms:
            click.echo(f"note: morpheme {form!r} missing from lexicon, skipped", err=True)
        if result.trees:
            blocks.append("\n".join(_tree_lines(result, n_best)))
        else:
            empty = True
            blocks.append("")
            for p in result.partials:
                click.echo(
                    f"note: partial {p.category} over ({p.span[0]},{p.span[1]}) "
                    f"peak {p.peak_activation:.4f}",
                    err=True,
                )
        if want_trace:
            trace_sections.append(f"# sentence {idx}")
            trace_sections.extend(_trace_lines(result.trace))
    _emit("\n\n".join(blocks) + "\n", out)
    if trace_path:
        Path(trace_path).write_text("\n".join(trace_sections) + "\n", encoding="utf-8")
    if empty:
        sys.exit(1)


def _pipeline_sentence(paths: dict, knobs: dict, index: int, line: str) -> SentenceReport:
    inv = load_inventory(paths["inventory"])
    cm = lat.ConfusionMatrix.read(paths["confusion"])
    _, compiled = _load_dictionary(
        paths["inventory"], paths["dictionary"], paths["morph_matrix"], paths["phon_matrix"]
    )
    report = SentenceReport(index=index, truth=line)
    symbols = [p.symbol for p in parse_yale(inv, line)]
    cfg = lat.SimConfig(knobs["target_alts"], knobs["max_alts"], knobs["seed"] + index)
    lattice = lat.simulate(symbols, cm, cfg)
    report.lattice = lattice
    report.chains = lat.chain_count(lattice)
    if knobs["stop_after"] == "simulate":
        return report
    result = mo.analyze(lattice, compiled)
    report.renderings = result.renderings()
    if knobs["stop_after"] == "morph" or not result.analyses:
        return report
    lex = Lexicon.read(paths["lexicon"])
    params = rx.load_params(paths["params"]) if paths["params"] else rx.RelaxationParams()
    parsed = rx.parse(result, lex, params, record_trace=True)
    report.trees = tuple(t.to_text() for t in parsed.trees[: knobs["n_best"]])
    if parsed.trees:
        report.best_category = str(parsed.trees[0].category)
        report.best_activation = parsed.trees[0].activation
    report.trace = parsed.trace or ()
    return report


def _pipeline_worker(payload):
    paths, knobs, index, line = payload
    return _pipeline_sentence(paths, knobs, index, line)


@main.command()
@click.option("--truth", required=True, help="Yale-romanized truth file, one pause unit per line.")
@click.option("--inventory", required=True)
@click.option("--confusion", required=True)
@click.option("--dict", "dictionary", required=True)
@click.option("--morph-matrix", required=True)
@click.option("--phon-matrix", required=True)
@click.option("--lexicon", required=True)
@click.option("--params", "params_path", default=None)
@click.option("--seed", default=0, show_default=True, help="Base seed; line i uses seed+i.")
@click.option("--target-alts", default=2.3, show_default=True)
@click.option("--max-alts", default=4, show_default=True)
@click.option("--n-best", default=5, show_default=True)
@click.option("--stop-after", type=click.Choice(STAGES), default="parse", show_default=True)
@click.option("--report", "report_dir", default=None,
              help="Directory for report.tsv and figures.")
@click.option("--jobs", default=1, show_default=True,
              help="Parallel sentence workers (one analysis is never split).")
@_skope_errors
def pipeline(truth: str, inventory: str, confusion: str, dictionary: str,
             morph_matrix: str, phon_matrix: str, lexicon: str,
             params_path: str | None, seed: int, target_alts: float, max_alts: int,
             n_best: int, stop_after: str, report_dir: str | None, jobs: int) -> None:
    """Run simulate -> morph -> parse end to end and print a TSV report."""
    paths = {
        "inventory": inventory,
        "confusion": confusion,
        "dictionary": dictionary,
        "morph_matrix": morph_matrix,
        "phon_matrix": phon_matrix,
        "lexicon": lexicon,
        "params": params_path,
    }
    knobs = {
        "seed": seed,
        "target_alts": target_alts,
        "max_alts": max_alts,
        "n_best": n_best,
        "stop_after": stop_after,
    }
    lines = _read_truth_lines(truth)
    payloads = [(paths, knobs, i, line) for i, line in enumerate(lines)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_pipeline_worker, payloads))
    else:
        reports = [_pipeline_worker(p) for p in payloads]

    from .report import REPORT_COLUMNS

    click.echo("\t".join(REPORT_COLUMNS))
    for r in reports:
        click.echo("\t".join(r.row()))
    if report_dir:
        write_report(report_dir, reports)

    final_empty = any(
        (stop_after == "simulate" and (r.lattice is None or len(r.lattice) == 0))
        or (stop_after == "morph" and not r.renderings)
        or (stop_after == "parse" and not r.trees)
        for r in reports
    )
    if not reports or final_empty:
        sys.exit(1)


if __name__ == "__main__":
    main()

"""Command line: corpus generation, suites, coloring, reduction and drawing.

Every subcommand exits nonzero when it reports a failure or a finding.
"""

from __future__ import annotations

import json
import sys

import click

from . import constraint_color as cc
from . import reduction, wing
from .corpus import CorpusError, CorpusItem, emit_diagram, generate, side_problems
from .graph_core import Graph, GraphError, read_edge_list
from .suites import SUITES, SuiteError, run_suite
from .witness import BUDGET_ENV, BudgetExceeded, SearchBudget


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _load_item(path: str) -> CorpusItem:
    """A corpus item JSON, a graph JSON ({"n", "edges"}) or an edge list."""
    text = sys.stdin.read() if path == "-" else open(path).read()
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError:
            # a JSONL corpus: take its first item
            data = json.loads(stripped.splitlines()[0])
        if "generator" in data:
            item = CorpusItem.from_json(data)
            problems = side_problems(item)
            if problems:
                raise click.ClickException("side data rejected: " + "; ".join(problems))
            return item
        return CorpusItem(Graph.from_json(data), "file", {"path": path})
    return CorpusItem(read_edge_list(text), "file", {"path": path})


def _budget(node_cap: int | None) -> SearchBudget:
    return SearchBudget(node_cap=node_cap) if node_cap else SearchBudget.from_env()


node_cap_option = click.option("--node-cap", type=int, default=None, help=f"search node cap (default: ${BUDGET_ENV} or 2000000)")


@click.group()
def main():
    """Desk-scale checks for wing-1 embeddings, constrained colorings and minor constructions."""


@main.command()
@click.argument("mode", type=click.Choice(["all_small", "random_wing1", "maximal_planar", "random_graphs"]))
@click.option("--n", "n", type=int, default=None, help="fixed vertex count")
@click.option("--n-range", nargs=2, type=int, default=None, help="inclusive vertex count range")
@click.option("--density", type=float, default=None, help="arc density (random_wing1); drawn per item if omitted")
@click.option("--p", type=float, default=None, help="edge probability (random_graphs)")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--count", type=int, default=10, show_default=True)
@click.option("-o", "--output", type=click.File("w"), default="-")
def gen(mode, n, n_range, density, p, seed, count, output):
    """Write a corpus as JSON lines, one item per line."""
    size = tuple(n_range) if n_range else n
    if size is None:
        raise click.UsageError("give --n or --n-range")
    params = {"all_small": {"n": n},
              "random_wing1": {"n": size, "density": density, "seed": seed, "count": count},
              "maximal_planar": {"n": size, "seed": seed, "count": count},
              "random_graphs": {"n": size, "p": p, "seed": seed, "count": count}}[mode]
    try:
        for item in generate(mode, **params):
            output.write(item.dumps() + "\n")
    except CorpusError as exc:
        raise click.ClickException(str(exc))


@main.command()
@click.argument("suite", type=click.Choice(sorted(SUITES)))
@click.option("--scale", type=click.Choice(["full", "quick"]), default="full", show_default=True)
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), default=None, help="JSONL corpus instead of the default one")
@click.option("--report", type=click.File("w"), default=None, help="JSONL verdict report")
@click.option("--archive", type=click.Path(file_okay=False), default=None, help="directory for counterexample bundles")
@click.option("--json", "as_json", is_flag=True, help="print the summary as JSON")
@node_cap_option
def check(suite, scale, corpus_path, report, archive, as_json, node_cap):
    """Run an acceptance suite."""
    corpus = None
    if corpus_path:
        with open(corpus_path) as fh:
            corpus = [CorpusItem.from_json(line) for line in fh if line.strip()]
    try:
        rep = run_suite(suite, corpus, _budget(node_cap), scale, report, archive)
    except SuiteError as exc:
        raise click.ClickException(str(exc))
    if as_json:
        click.echo(_dump(rep.summary()))
    else:
        counts = ", ".join(f"{k}={v}" for k, v in sorted(rep.counts.items()))
        click.echo(f"{suite}: {counts} ({rep.elapsed:.1f}s)")
        for tag, c in sorted(rep.tags.items()):
            click.echo(f"  {tag}: {c}")
        for path in rep.archive[:20]:
            click.echo(f"  archived {path}")
    sys.exit(0 if rep.clean else 1)


@main.command()
@click.argument("path")
@click.option("--system", "system_path", type=click.Path(exists=True), default=None, help="constraint system JSON (wing-1 mode)")
@click.option("--boundary", default=None, help="comma separated boundary walk (planar mode)")
@click.option("--json", "as_json", is_flag=True)
@node_cap_option
def color(path, system_path, boundary, as_json, node_cap):
    """Color a graph: outer vertices on two colors, a constraint system, or a
    planar graph with at most three boundary colors."""
    item = _load_item(path)
    g = item.graph
    if boundary is not None or "boundary" in item.side:
        walk = [int(x) for x in boundary.split(",")] if boundary is not None else item.side["boundary"]
        try:
            att = cc.planar_4color_attempt(g, walk)
        except cc.ColoringError as exc:
            raise click.ClickException(str(exc))
        out, ok = att.to_json(), att.succeeded
    else:
        w = item.wing() if "order" in item.side else wing.build_wing1(g)
        if not isinstance(w, wing.WingEmbedding):
            raise click.ClickException("graph is not outerplanar")
        try:
            if system_path:
                with open(system_path) as fh:
                    cs = cc.ConstraintSystem.from_json(fh.read())
                sol = cc.solve_wing1_constraints(w, cs, _budget(node_cap))
            elif "system" in item.side:
                sol = cc.solve_wing1_constraints(w, cc.ConstraintSystem.from_json(item.side["system"]), _budget(node_cap))
            else:
                sol = cc.outer_two_color(w)
        except (cc.ConstraintError, BudgetExceeded) as exc:
            raise click.ClickException(str(exc))
        out, ok = sol.to_json(), sol.by_induction
    if as_json:
        click.echo(_dump(out))
    else:
        col = out["coloring"]
        click.echo("no coloring" if col is None else " ".join(f"{v}:{c}" for v, c in sorted(col["colors"].items(), key=lambda x: int(x[0]))))
        for key in ("blocked", "failures"):
            if out.get(key):
                click.echo(f"{key}: {_dump(out[key])}")
    sys.exit(0 if ok else 1)


@main.command()
@click.argument("path")
@click.option("--k", type=int, default=None, help="target chromatic number (default: the graph's own)")
@click.option("--dirac", is_flag=True, help="build a K4 minor of a 4-chromatic graph")
@click.option("--wheel", type=int, default=None, help="run the degree-5 neighborhood check at this vertex")
@click.option("--json", "as_json", is_flag=True)
@node_cap_option
def reduce(path, k, dirac, wheel, as_json, node_cap):
    """One reduction step, the K4 construction, or the degree-5 check."""
    from . import oracle

    g = _load_item(path).graph
    budget = _budget(node_cap)
    try:
        if dirac:
            out = {"format": 1, "kind": "clique_minor", "witness": reduction.dirac_k4_witness(g, budget).to_json()}
        elif wheel is not None:
            out = reduction.five_wheel_check(g, wheel).to_json()
        else:
            out = reduction.reduce_step(g, k or oracle.chromatic_number(g, budget), budget).to_json()
    except (GraphError, BudgetExceeded) as exc:
        raise click.ClickException(str(exc))
    click.echo(_dump(out) if as_json else json.dumps(out, indent=1, sort_keys=True))


@main.command()
@click.argument("path")
@click.option("--format", "fmt", type=click.Choice(["dot", "svg-arc"]), default="dot", show_default=True)
@click.option("-o", "--output", type=click.File("w"), default="-")
def draw(path, fmt, output):
    """Emit DOT, or an SVG arc diagram along the wing-1 order."""
    item = _load_item(path)
    if fmt == "svg-arc" and "order" not in item.side:
        w = wing.build_wing1(item.graph)
        if not isinstance(w, wing.WingEmbedding):
            raise click.ClickException("svg-arc needs a wing order and the graph is not outerplanar")
        item = CorpusItem(item.graph, item.generator, item.params, item.seed, item.index, {**item.side, "order": list(w.order)})
    try:
        output.write(emit_diagram(item, fmt))
    except CorpusError as exc:
        raise click.ClickException(str(exc))


if __name__ == "__main__":
    main()

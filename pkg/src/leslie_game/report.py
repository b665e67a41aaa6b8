"""Text renderers: normal-form tables (CSV / Markdown), DOT game trees, trajectory CSV.

Every renderer is deterministic; identical inputs give byte-identical text.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Literal, Sequence

from .game import BimatrixGame, NashResult, country_actions, leader_follower_payoffs
from .leslie import PopulationVector
from .scenario import Scenario

__all__ = [
    "RenderOptions",
    "format_number",
    "render_bimatrix",
    "render_equilibria",
    "render_tree",
    "render_trajectory",
]

Format = Literal["markdown", "csv", "dot"]
SNAP_TOL = 1e-6


@dataclass(frozen=True)
class RenderOptions:
    format: Format = "csv"
    integer_snap: bool = True

    def __post_init__(self):
        if self.format not in ("markdown", "csv", "dot"):
            raise ValueError(f"unknown format {self.format!r}")


def format_number(x: float, integer_snap: bool = True) -> str:
    """Shortest round-trip repr; values within 1e-6 of an integer print as it."""
    if integer_snap:
        n = round(x)
        if abs(x - n) <= SNAP_TOL:
            return str(int(n))
    return repr(float(x))


def _csv(rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerows(rows)
    return buf.getvalue()


def render_bimatrix(game: BimatrixGame, opts: RenderOptions = RenderOptions()) -> str:
    """Rows are the row player's strategies; each cell prints as ``u_row,u_col``.

    In CSV each cell spans two fields, so the header carries each column
    label followed by an empty field.
    """
    num = lambda x: format_number(x, opts.integer_snap)  # noqa: E731
    if opts.format == "csv":
        header = [""]
        for label in game.col_labels:
            header += [label, ""]
        rows = [header]
        for label, cells in zip(game.row_labels, game.cells):
            row = [label]
            for u, v in cells:
                row += [num(u), num(v)]
            rows.append(row)
        return _csv(rows)
    if opts.format == "markdown":
        esc = lambda s: s.replace("|", "\\|")  # noqa: E731
        lines = [
            "| | " + " | ".join(esc(c) for c in game.col_labels) + " |",
            "|---|" + "---|" * len(game.col_labels),
        ]
        for label, cells in zip(game.row_labels, game.cells):
            body = " | ".join(f"{num(u)},{num(v)}" for u, v in cells)
            lines.append(f"| {esc(label)} | {body} |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"render_bimatrix does not support format {opts.format!r}")


def render_equilibria(result: NashResult, integer_snap: bool = True) -> str:
    """CSV listing of equilibrium cells: strategy labels and both payoffs."""
    g = result.game
    rows = [["row", "column", "u_row", "u_col"]]
    for r, c in result.equilibria:
        u, v = g.cells[r][c]
        rows.append(
            [g.row_labels[r], g.col_labels[c], format_number(u, integer_snap), format_number(v, integer_snap)]
        )
    return _csv(rows)


def _dot_str(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def render_tree(
    scenario: Scenario, leader: str | int, *, integer_snap: bool = True, clamp: bool = False
) -> str:
    """DOT digraph of the sequential game; leaves show (u_leader, u_follower)."""
    li = scenario.country_index(leader)
    fi = 1 - li
    lead_name = scenario.countries[li].name
    follow_name = scenario.countries[fi].name
    num = lambda x: format_number(x, integer_snap)  # noqa: E731

    lines = [
        "digraph game {",
        "  node [fontname=\"Helvetica\"];",
        f"  n0 [label={_dot_str(lead_name)}, shape=circle];",
    ]
    edges = []
    for a in country_actions(scenario, li):
        mid = f"n{a.id + 1}"
        lines.append(f"  {mid} [label={_dot_str(follow_name)}, shape=circle];")
        edges.append(f"  n0 -> {mid} [label={_dot_str(a.label)}];")
        for f in country_actions(scenario, fi):
            leaf = f"leaf_{a.id + 1}_{f.id + 1}"
            u, v = leader_follower_payoffs(scenario, li, a, f, clamp=clamp)
            lines.append(f"  {leaf} [label={_dot_str(f'({num(u)},{num(v)})')}, shape=box];")
            edges.append(f"  {mid} -> {leaf} [label={_dot_str(f.label)}];")
    return "\n".join(lines + edges + ["}"]) + "\n"


def render_trajectory(
    traj: Sequence[PopulationVector | Sequence[float]], opts: RenderOptions = RenderOptions()
) -> str:
    if opts.format != "csv":
        raise ValueError(f"render_trajectory does not support format {opts.format!r}")
    if not traj:
        raise ValueError("empty trajectory")
    k = len(traj[0])
    num = lambda x: format_number(x, opts.integer_snap)  # noqa: E731
    rows = [["t", *(f"class_{i}" for i in range(1, k + 1)), "total"]]
    for t, n in enumerate(traj):
        counts = [float(x) for x in n]
        rows.append([str(t), *(num(x) for x in counts), num(math.fsum(counts))])
    return _csv(rows)

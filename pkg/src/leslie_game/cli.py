"""Command-line entry point.

Exit codes: 0 success, 1 domain error (validation, negative population,
non-convergence), 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from typing import Sequence, TextIO

from . import game, report
from .leslie import DEFAULT_MAX_ITER, DEFAULT_TOL, LeslieError, dominant_eigen, project_trajectory
from .scenario import Scenario, ScenarioError, builtin_paper_scenario, load_scenario, serialize_scenario

PROG = "leslie-game"


def _add_source(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("scenario", nargs="?", help="scenario JSON file")
    src.add_argument(
        "--builtin-paper", action="store_true", help="use the built-in two-country scenario"
    )


def _add_clamp(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--clamp", action="store_true", help="floor negative projected counts at 0 instead of failing"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Leslie-matrix population projection and the two-country policy game.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("project", help="project one country under a joint profile")
    _add_source(p)
    p.add_argument("--country", required=True)
    p.add_argument("--profile", required=True, help="comma-separated actions, one per country")
    p.add_argument("--steps", type=int, help="projection steps (default: scenario horizon)")
    p.add_argument("--format", choices=["csv"], default="csv")
    _add_clamp(p)

    p = sub.add_parser("eigen", help="dominant eigenvalue and stable age distribution")
    _add_source(p)
    p.add_argument("--country", required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)

    for name, help_ in (("table", "normal-form payoff table"), ("nash", "pure Nash equilibria")):
        p = sub.add_parser(name, help=help_)
        _add_source(p)
        p.add_argument(
            "--leader", help="country moving first; omit for the simultaneous game"
        )
        if name == "table":
            p.add_argument("--format", choices=["csv", "markdown"], default="csv")
        _add_clamp(p)

    p = sub.add_parser("spe", help="backward-induction outcome")
    _add_source(p)
    p.add_argument("--first", required=True, help="country that decides first")
    p.add_argument("--tie-break", choices=["first", "last"], default="first")
    _add_clamp(p)

    p = sub.add_parser("tree", help="game tree as Graphviz DOT")
    _add_source(p)
    p.add_argument("--leader", required=True)
    _add_clamp(p)

    sub.add_parser("show-paper", help="print the built-in scenario as a scenario file")
    return parser


def _scenario(args: argparse.Namespace) -> Scenario:
    if args.builtin_paper:
        return builtin_paper_scenario()
    return load_scenario(args.scenario)


def _profile(scenario: Scenario, text: str) -> tuple[str, ...]:
    labels = tuple(x.strip() for x in text.split(","))
    if len(labels) != len(scenario.countries):
        raise ScenarioError(
            f"--profile needs {len(scenario.countries)} comma-separated actions, got {text!r}"
        )
    for c, label in zip(scenario.countries, labels):
        if label not in c.actions:
            raise ScenarioError(f"--profile: country {c.name} has no action {label!r}")
    return labels


def _game(args: argparse.Namespace, scenario: Scenario) -> game.BimatrixGame:
    if args.leader is None:
        return game.build_simultaneous_normal_form(scenario, clamp=args.clamp)
    return game.build_sequential_normal_form(scenario, args.leader, clamp=args.clamp)


def _cmd_project(args, out: TextIO) -> None:
    s = _scenario(args)
    ci = s.country_index(args.country)
    dyn = s.effect(_profile(s, args.profile)).dynamics[ci]
    steps = s.horizon if args.steps is None else args.steps
    traj = project_trajectory(dyn.matrix, s.countries[ci].initial, dyn.immigration, steps, clamp=args.clamp)
    out.write(report.render_trajectory(traj))


def _cmd_eigen(args, out: TextIO) -> None:
    s = _scenario(args)
    ci = s.country_index(args.country)
    matrix = s.effect(_profile(s, args.profile)).dynamics[ci].matrix
    res = dominant_eigen(matrix, tol=args.tol, max_iter=args.max_iter)
    out.write(f"lambda,{res.lam!r}\n")
    out.write("stable_distribution," + ",".join(repr(w) for w in res.stable_distribution) + "\n")
    out.write(f"iterations,{res.iterations}\n")
    out.write(f"residual,{res.residual!r}\n")


def _cmd_table(args, out: TextIO) -> None:
    g = _game(args, _scenario(args))
    out.write(report.render_bimatrix(g, report.RenderOptions(format=args.format)))


def _cmd_nash(args, out: TextIO) -> None:
    g = _game(args, _scenario(args))
    out.write(report.render_equilibria(game.pure_nash(g)))


def _cmd_spe(args, out: TextIO) -> None:
    s = _scenario(args)
    res = game.backward_induction(s, args.first, args.tie_break, clamp=args.clamp)
    lead = s.countries[res.leader].name
    follow = s.countries[res.follower].name
    num = report.format_number
    u, v = res.payoffs
    a, b = res.realized_profile.labels
    out.write(f"leader: {lead}\n")
    out.write(f"leader action: {res.leader_action.label}\n")
    out.write(f"follower ({follow}) best-response map: {res.follower_response_map.label}\n")
    out.write(f"realized profile: {s.countries[0].name}={a}, {s.countries[1].name}={b}\n")
    out.write(f"payoffs ({lead}, {follow}): ({num(u)}, {num(v)})\n")
    co_lead = [x.label for x in res.alternates.leader]
    out.write(f"co-optimal leader actions: {' '.join(co_lead)}\n")
    for x, opts in zip(game.country_actions(s, res.leader), res.alternates.follower):
        out.write(f"co-optimal {follow} responses to {x.label}: {' '.join(o.label for o in opts)}\n")


def _cmd_tree(args, out: TextIO) -> None:
    out.write(report.render_tree(_scenario(args), args.leader, clamp=args.clamp))


def _cmd_show_paper(args, out: TextIO) -> None:
    out.write(serialize_scenario(builtin_paper_scenario()).decode("utf-8"))


COMMANDS = {
    "project": _cmd_project,
    "eigen": _cmd_eigen,
    "table": _cmd_table,
    "nash": _cmd_nash,
    "spe": _cmd_spe,
    "tree": _cmd_tree,
    "show-paper": _cmd_show_paper,
}


def run(
    argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None
) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        COMMANDS[args.command](args, stdout)
    except (ScenarioError, LeslieError, ValueError, OSError) as e:
        print(f"{PROG} {args.command}: error: {e}", file=stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())

import csv
import io
import re

import numpy as np
import pytest

from conftest import random_scenario
from leslie_game.game import BimatrixGame, build_sequential_normal_form, pure_nash
from leslie_game.leslie import ImmigrationVector, PopulationVector, make_leslie, project_trajectory
from leslie_game.report import (
    RenderOptions,
    format_number,
    render_bimatrix,
    render_equilibria,
    render_tree,
    render_trajectory,
)
from leslie_game.scenario import CountrySpec, Dynamics, EffectEntry, Scenario

CSV = RenderOptions("csv")


@pytest.mark.parametrize(
    "x, snap, text",
    [(188.0, True, "188"), (188.0000001, True, "188"), (-0.0, True, "0"), (0.5, True, "0.5"), (188.0, False, "188.0")],
)
def test_format_number(x, snap, text):
    assert format_number(x, snap) == text


def test_table_1_csv(paper):
    lines = render_bimatrix(build_sequential_normal_form(paper, "A"), CSV).splitlines()
    assert lines[0] == ",SS,,SI,,IS,,II,"
    assert lines[1] == "S,188,343,188,343,158,375,158,375"
    assert lines[2] == "I,230,328,140,285,230,328,140,285"


def test_table_2_csv(paper):
    lines = render_bimatrix(build_sequential_normal_form(paper, "B"), CSV).splitlines()
    assert lines[2] == "I,375,158,285,140,375,158,285,140"


def test_zero_game_csv():
    text = render_bimatrix(BimatrixGame.from_arrays([[0]], [[0]]), CSV)
    assert text.splitlines()[1] == "A1,0,0"


def test_markdown(paper):
    text = render_bimatrix(build_sequential_normal_form(paper, "A"), RenderOptions("markdown"))
    assert text.splitlines() == [
        "| | SS | SI | IS | II |",
        "|---|---|---|---|---|",
        "| S | 188,343 | 188,343 | 158,375 | 158,375 |",
        "| I | 230,328 | 140,285 | 230,328 | 140,285 |",
    ]


def test_unsupported_formats(paper):
    g = build_sequential_normal_form(paper, "A")
    with pytest.raises(ValueError):
        render_bimatrix(g, RenderOptions("dot"))
    with pytest.raises(ValueError):
        render_trajectory([(1, 2)], RenderOptions("markdown"))
    with pytest.raises(ValueError):
        RenderOptions("pdf")


def test_csv_quotes_labels_with_commas():
    g = BimatrixGame.from_arrays([[1.5]], [[2]], ["a,b"], ["c"])
    rows = list(csv.reader(io.StringIO(render_bimatrix(g, CSV))))
    assert rows[1] == ["a,b", "1.5", "2"]


@pytest.mark.parametrize("seed", range(20))
def test_csv_parse_back(seed):
    rng = np.random.default_rng(seed)
    R = rng.normal(0, 100, (3, 4))
    C = rng.integers(-50, 50, (3, 4)).astype(float)
    g = BimatrixGame.from_arrays(R, C)
    rows = list(csv.reader(io.StringIO(render_bimatrix(g, CSV))))[1:]
    for i, row in enumerate(rows):
        values = [float(v) for v in row[1:]]
        assert np.allclose(values[0::2], R[i], rtol=0, atol=1e-9)
        assert values[1::2] == C[i].tolist()


def _leaf_labels(dot):
    return re.findall(r'^  leaf_\S+ \[label="([^"]+)"', dot, flags=re.M)


def test_tree_a_first(paper):
    dot = render_tree(paper, "A")
    assert sorted(_leaf_labels(dot)) == sorted(["(188,343)", "(158,375)", "(230,328)", "(140,285)"])
    assert dot.startswith("digraph game {")
    assert 'n0 [label="A"' in dot


def test_tree_b_first_path(paper):
    dot = render_tree(paper, "B")
    # I edge from the root, then S to the leaf
    assert 'n0 -> n2 [label="I"];' in dot
    assert 'n2 -> leaf_2_1 [label="S"];' in dot
    assert 'leaf_2_1 [label="(375,158)", shape=box];' in dot


def test_tree_single_action_countries():
    L = make_leslie([1], [])
    c = tuple(CountrySpec(n, ("x",), PopulationVector([2])) for n in ("A", "B"))
    d = (Dynamics(L, ImmigrationVector([0])),) * 2
    dot = render_tree(Scenario(c, (EffectEntry(("x", "x"), d),)), "A")
    assert len(_leaf_labels(dot)) == 1
    assert dot.count("->") == 2


@pytest.mark.parametrize("seed", range(10))
def test_tree_leaf_count_and_determinism(seed):
    s = random_scenario(np.random.default_rng(seed))
    dot = render_tree(s, 1)
    n = len(s.countries[0].actions) * len(s.countries[1].actions)
    assert len(_leaf_labels(dot)) == n
    assert render_tree(s, 1) == dot


def test_trajectory_csv():
    traj = project_trajectory(make_leslie([0, 2, 1], [0.2, 0.4]), (30, 35, 25), None, 1)
    assert render_trajectory(traj).splitlines() == [
        "t,class_1,class_2,class_3,total",
        "0,30,35,25,90",
        "1,95,6,14,115",
    ]


def test_trajectory_zeros():
    assert render_trajectory([(0, 0, 0)]).splitlines()[1] == "0,0,0,0,0"


def test_trajectory_paper_final_total(paper):
    dyn = paper.effect(("S", "S")).dynamics[0]
    traj = project_trajectory(dyn.matrix, paper.countries[0].initial, dyn.immigration, 1)
    assert render_trajectory(traj).splitlines()[-1].split(",")[-1] == "188"


def test_render_equilibria(paper):
    text = render_equilibria(pure_nash(build_sequential_normal_form(paper, "A")))
    assert text.splitlines() == [
        "row,column,u_row,u_col",
        "S,II,158,375",
        "I,SS,230,328",
        "I,IS,230,328",
    ]

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leslie_game.leslie import (
    ImmigrationVector,
    LeslieError,
    NegativePopulation,
    PopulationVector,
    from_dense,
    make_leslie,
    project_once,
    project_trajectory,
    to_dense,
    total_population,
)
from oracles import dense_multiply, leslie_rows

LA_0 = ([0, 2, 1], [0.2, 0.4])
LA_S = ([0, 3, 1], [0.4, 0.6])
LB_S = ([0, 6, 2], [0.6, 0.8])


def test_make_leslie_paper_matrix():
    L = make_leslie(*LA_0)
    assert L.fertilities == (0.0, 2.0, 1.0)
    assert L.survivals == (0.2, 0.4)
    assert L.k == 3


def test_make_leslie_single_class():
    L = make_leslie([0], [])
    assert to_dense(L).tolist() == [[0.0]]


@pytest.mark.parametrize(
    "fert, surv, message",
    [
        ([0, 2, 1], [0.2, 1.4], "survival outside [0,1] at index 2"),
        ([0, 2, 1], [-0.1, 0.4], "survival outside [0,1] at index 1"),
        ([0, -2, 1], [0.2, 0.4], "negative fertility at index 2"),
        ([0, 2, 1], [0.2], "dimension mismatch"),
        ([], [], "at least one"),
        ([0, float("nan")], [0.5], "non-finite fertility at index 2"),
    ],
)
def test_make_leslie_rejects(fert, surv, message):
    with pytest.raises(LeslieError, match=message.replace("[", r"\[").replace("]", r"\]")):
        make_leslie(fert, surv)


def test_to_dense_paper_matrices():
    assert to_dense(make_leslie(*LA_0)).tolist() == [[0, 2, 1], [0.2, 0, 0], [0, 0.4, 0]]
    assert to_dense(make_leslie(*LB_S)).tolist() == [[0, 6, 2], [0.6, 0, 0], [0, 0.8, 0]]


def test_from_dense_rejects_off_pattern():
    with pytest.raises(LeslieError, match=r"\(3,1\)"):
        from_dense([[0, 2, 1], [0.2, 0, 0], [0.1, 0.4, 0]])


leslie_inputs = st.integers(1, 6).flatmap(
    lambda k: st.tuples(
        st.lists(st.floats(0, 10, allow_nan=False), min_size=k, max_size=k),
        st.lists(st.floats(0, 1), min_size=k - 1, max_size=k - 1),
    )
)


@given(leslie_inputs)
def test_dense_sparsity_and_round_trip(fp):
    fert, surv = fp
    L = make_leslie(fert, surv)
    A = to_dense(L)
    k = len(fert)
    for i in range(k):
        for j in range(k):
            if i == 0:
                assert A[i, j] == fert[j]
            elif i == j + 1:
                assert A[i, j] == surv[j]
            else:
                assert A[i, j] == 0
    assert from_dense(A) == L
    assert np.array_equal(to_dense(from_dense(A)), A)


def test_project_once_worked_vectors():
    n = (30, 35, 25)
    assert project_once(make_leslie(*LA_S), n, (5, 10, 10)).counts == (135, 22, 31)
    assert project_once(make_leslie(*LA_S), n, (-5, 0, 0)).counts == (125, 12, 21)
    assert project_once(make_leslie(*LA_0), n, (35, 40, 40)).counts == (130, 46, 54)


def test_project_once_zero_population():
    assert project_once(make_leslie(*LA_0), (0, 0, 0)).counts == (0, 0, 0)


def test_project_once_dimension_mismatch():
    with pytest.raises(LeslieError, match="dimension mismatch"):
        project_once(make_leslie(*LA_0), (1, 2))
    with pytest.raises(LeslieError, match="dimension mismatch"):
        project_once(make_leslie(*LA_0), (1, 2, 3), (1, 1))


def test_negative_population_names_first_class():
    L = make_leslie([0, 0, 0], [0.5, 0.5])
    with pytest.raises(NegativePopulation) as info:
        project_once(L, (10, 10, 10), (0, -6, -1))
    assert info.value.age_class == 2
    assert "age class 2" in str(info.value)


def test_clamp_floors_at_zero():
    L = make_leslie([0, 0, 0], [0.5, 0.5])
    out = project_once(L, (10, 10, 10), (0, -6, -1), clamp=True)
    assert out.counts == (0, 0, 4)
    assert "-0.0" not in repr(out)


def test_population_vector_rejects_bad_entries():
    with pytest.raises(NegativePopulation):
        PopulationVector([1, -1])
    with pytest.raises(LeslieError):
        PopulationVector([1, float("inf")])
    with pytest.raises(LeslieError):
        PopulationVector([])


def test_immigration_may_be_negative():
    assert ImmigrationVector([-5, 0, 0]).flows == (-5.0, 0.0, 0.0)


def test_trajectory():
    L = make_leslie(*LA_0)
    traj = project_trajectory(L, (30, 35, 25), None, 1)
    assert [t.counts for t in traj] == [(30, 35, 25), (95, 6, 14)]


def test_trajectory_pure_replacement():
    traj = project_trajectory(make_leslie([0], []), (7,), (3,), 2)
    assert [t.counts for t in traj] == [(7,), (3,), (3,)]


def test_trajectory_zero_steps_is_initial():
    assert [t.counts for t in project_trajectory(make_leslie(*LA_0), (30, 35, 25), None, 0)] == [
        (30, 35, 25)
    ]


def test_trajectory_reports_failing_step():
    L = make_leslie([0, 0], [1.0])
    with pytest.raises(NegativePopulation) as info:
        project_trajectory(L, (10, 0), (-4, 0), 5)
    # 10,0 -> 0-4 < 0 at step 1
    assert info.value.step == 1


@pytest.mark.parametrize(
    "n, total", [((135, 22, 31), 188), ((0, 0, 0), 0), ((255, 58, 62), 375)]
)
def test_total_population(n, total):
    assert total_population(PopulationVector(n)) == total


@st.composite
def projection_case(draw):
    k = draw(st.integers(1, 5))
    fert = draw(st.lists(st.floats(0, 5), min_size=k, max_size=k))
    surv = draw(st.lists(st.floats(0, 1), min_size=k - 1, max_size=k - 1))
    vec = st.lists(st.floats(0, 1e4), min_size=k, max_size=k)
    return fert, surv, draw(vec), draw(vec), draw(vec), draw(st.floats(0, 10)), draw(st.floats(0, 10))


@settings(max_examples=200)
@given(projection_case())
def test_projection_linearity(case):
    fert, surv, n1, n2, imm, a, b = case
    L = make_leslie(fert, surv)
    mixed = [a * x + b * y for x, y in zip(n1, n2)]
    lhs = np.array(project_once(L, mixed, imm).counts)
    rhs = a * np.array(project_once(L, n1).counts) + b * np.array(project_once(L, n2).counts) + imm
    assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-9)


@settings(max_examples=200)
@given(projection_case())
def test_projection_matches_hand_multiply(case):
    fert, surv, n1, _, imm, _, _ = case
    got = project_once(make_leslie(fert, surv), n1, imm).counts
    want = dense_multiply(leslie_rows(fert, surv), n1, imm)
    assert np.allclose(got, want, rtol=1e-12, atol=1e-9)
    assert min(got) >= 0

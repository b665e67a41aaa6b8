"""The two-country policy game: payoffs, normal forms, Nash cells, backward induction.

Payoffs are weighted population totals after projecting each country with
the (matrix, immigration) pair selected by the joint profile. All payoff
comparisons are exact; inputs that are exact in binary floating point
produce exact ties.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .leslie import project_trajectory
from .scenario import Scenario, ScenarioError

__all__ = [
    "Action",
    "JointProfile",
    "ContingentStrategy",
    "BimatrixGame",
    "NashResult",
    "Alternates",
    "SpeResult",
    "country_actions",
    "profile_payoffs",
    "leader_follower_payoffs",
    "enumerate_follower_strategies",
    "build_sequential_normal_form",
    "build_simultaneous_normal_form",
    "pure_nash",
    "verify_equilibrium",
    "backward_induction",
]

Payoff = tuple[float, float]
TieBreak = Literal["first", "last"]


@dataclass(frozen=True)
class Action:
    id: int
    label: str


@dataclass(frozen=True)
class JointProfile:
    action_A: Action
    action_B: Action

    @property
    def labels(self) -> tuple[str, str]:
        return (self.action_A.label, self.action_B.label)


@dataclass(frozen=True)
class ContingentStrategy:
    """A follower's plan: ``responses[i]`` answers leader action ``i``."""

    responses: tuple[Action, ...]

    @property
    def label(self) -> str:
        return "".join(a.label for a in self.responses)

    def __call__(self, leader_action: Action) -> Action:
        return self.responses[leader_action.id]


@dataclass(frozen=True)
class BimatrixGame:
    """Normal form; ``cells[r][c] = (row player payoff, column player payoff)``."""

    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    cells: tuple[tuple[Payoff, ...], ...]

    def __post_init__(self):
        if len(self.cells) != len(self.row_labels):
            raise ValueError(
                f"{len(self.cells)} rows of cells for {len(self.row_labels)} row labels"
            )
        for r, row in enumerate(self.cells, start=1):
            if len(row) != len(self.col_labels):
                raise ValueError(
                    f"row {r} has {len(row)} cells for {len(self.col_labels)} column labels"
                )
            for u, v in row:
                if not (math.isfinite(u) and math.isfinite(v)):
                    raise ValueError(f"row {r}: non-finite payoff")

    @classmethod
    def from_arrays(
        cls,
        row_payoffs,
        col_payoffs,
        row_labels: Sequence[str] | None = None,
        col_labels: Sequence[str] | None = None,
    ) -> BimatrixGame:
        R = np.asarray(row_payoffs, dtype=float)
        C = np.asarray(col_payoffs, dtype=float)
        if R.shape != C.shape or R.ndim != 2:
            raise ValueError(f"payoff arrays must share a 2-D shape, got {R.shape} and {C.shape}")
        m, n = R.shape
        rows = tuple(row_labels) if row_labels is not None else tuple(f"A{i + 1}" for i in range(m))
        cols = tuple(col_labels) if col_labels is not None else tuple(f"B{j + 1}" for j in range(n))
        cells = tuple(
            tuple((float(R[i, j]), float(C[i, j])) for j in range(n)) for i in range(m)
        )
        return cls(rows, cols, cells)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.row_labels), len(self.col_labels))

    def row_payoffs(self) -> np.ndarray:
        return np.array([[u for u, _ in row] for row in self.cells], dtype=float).reshape(self.shape)

    def col_payoffs(self) -> np.ndarray:
        return np.array([[v for _, v in row] for row in self.cells], dtype=float).reshape(self.shape)

    def scaled(self, factor: float) -> BimatrixGame:
        return BimatrixGame.from_arrays(
            self.row_payoffs() * factor, self.col_payoffs() * factor, self.row_labels, self.col_labels
        )


@dataclass(frozen=True)
class NashResult:
    equilibria: tuple[tuple[int, int], ...]
    game: BimatrixGame

    def labelled(self) -> list[tuple[str, str]]:
        return [(self.game.row_labels[r], self.game.col_labels[c]) for r, c in self.equilibria]


@dataclass(frozen=True)
class Alternates:
    """Every co-optimal choice, including the one that was picked."""

    leader: tuple[Action, ...]
    follower: tuple[tuple[Action, ...], ...]


@dataclass(frozen=True)
class SpeResult:
    leader: int
    follower: int
    leader_action: Action
    follower_response_map: ContingentStrategy
    realized_profile: JointProfile
    payoffs: Payoff
    alternates: Alternates


def country_actions(scenario: Scenario, country: str | int) -> list[Action]:
    c = scenario.countries[scenario.country_index(country)]
    return [Action(i, label) for i, label in enumerate(c.actions)]


def _two_countries(scenario: Scenario) -> None:
    if len(scenario.countries) != 2:
        raise ScenarioError(
            f"the game needs exactly 2 countries, scenario has {len(scenario.countries)}"
        )


def _payoff_vector(scenario: Scenario, labels: Sequence[str], clamp: bool) -> tuple[float, ...]:
    effect = scenario.effect(labels)
    weights = scenario.weights
    out = []
    for country, dyn in zip(scenario.countries, effect.dynamics):
        final = project_trajectory(
            dyn.matrix, country.initial, dyn.immigration, scenario.horizon, clamp=clamp
        )[-1]
        out.append(math.fsum(w * n for w, n in zip(weights, final)))
    return tuple(out)


def profile_payoffs(
    scenario: Scenario, profile: JointProfile | Sequence[str], *, clamp: bool = False
) -> Payoff:
    """(u_A, u_B): each country's weighted total after ``scenario.horizon`` steps.

    The profile's matrix and immigration are re-applied every step.
    """
    _two_countries(scenario)
    labels = profile.labels if isinstance(profile, JointProfile) else tuple(profile)
    u_a, u_b = _payoff_vector(scenario, labels, clamp)
    return (u_a, u_b)


def enumerate_follower_strategies(
    leader_actions: Sequence[Action], follower_actions: Sequence[Action]
) -> list[ContingentStrategy]:
    """All |follower|^|leader| response maps in lexicographic order."""
    if not leader_actions or not follower_actions:
        raise ValueError("both action lists must be non-empty")
    return [
        ContingentStrategy(tuple(combo))
        for combo in itertools.product(follower_actions, repeat=len(leader_actions))
    ]


def leader_follower_payoffs(
    scenario: Scenario, leader: int, a: Action, f: Action, *, clamp: bool = False
) -> Payoff:
    """Payoffs as (leader, follower) when the leader plays ``a`` and the follower ``f``."""
    labels = (a.label, f.label) if leader == 0 else (f.label, a.label)
    u = profile_payoffs(scenario, labels, clamp=clamp)
    return u if leader == 0 else (u[1], u[0])


def build_sequential_normal_form(
    scenario: Scenario, leader: str | int, *, clamp: bool = False
) -> BimatrixGame:
    """Leader actions in rows, follower contingent strategies in columns.

    Cells are (leader payoff, follower payoff), so with B leading the pair
    order is (u_B, u_A).
    """
    _two_countries(scenario)
    li = scenario.country_index(leader)
    fi = 1 - li
    lead = country_actions(scenario, li)
    strategies = enumerate_follower_strategies(lead, country_actions(scenario, fi))
    cache: dict[tuple[int, int], Payoff] = {}
    rows = []
    for a in lead:
        row = []
        for f in strategies:
            key = (a.id, f(a).id)
            if key not in cache:
                cache[key] = leader_follower_payoffs(scenario, li, a, f(a), clamp=clamp)
            row.append(cache[key])
        rows.append(tuple(row))
    return BimatrixGame(
        tuple(a.label for a in lead), tuple(f.label for f in strategies), tuple(rows)
    )


def build_simultaneous_normal_form(scenario: Scenario, *, clamp: bool = False) -> BimatrixGame:
    _two_countries(scenario)
    a_acts, b_acts = scenario.countries[0].actions, scenario.countries[1].actions
    cells = tuple(
        tuple(profile_payoffs(scenario, (a, b), clamp=clamp) for b in b_acts) for a in a_acts
    )
    return BimatrixGame(a_acts, b_acts, cells)


def pure_nash(game: BimatrixGame) -> NashResult:
    """All pure equilibria: cells that are a column-max for the row player and a
    row-max for the column player. Ties count as maxima."""
    R, C = game.row_payoffs(), game.col_payoffs()
    if R.size == 0:
        raise ValueError("empty game")
    mask = (R == R.max(axis=0, keepdims=True)) & (C == C.max(axis=1, keepdims=True))
    cells = tuple((int(r), int(c)) for r, c in np.argwhere(mask))
    return NashResult(cells, game)


def verify_equilibrium(game: BimatrixGame, cell: tuple[int, int]) -> bool:
    r, c = cell
    m, n = game.shape
    if not (0 <= r < m and 0 <= c < n):
        raise IndexError(f"cell {cell} outside a {m}x{n} game")
    u, v = game.cells[r][c]
    for i in range(m):
        if game.cells[i][c][0] > u:
            return False
    for j in range(n):
        if game.cells[r][j][1] > v:
            return False
    return True


def _argmax_all(values: Sequence[float]) -> list[int]:
    best = max(values)
    return [i for i, x in enumerate(values) if x == best]


def backward_induction(
    scenario: Scenario,
    leader: str | int,
    tie_break: TieBreak = "first",
    *,
    clamp: bool = False,
) -> SpeResult:
    """Subgame-perfect play with ``leader`` moving first.

    ``tie_break`` picks the lowest ("first") or highest ("last") index among
    co-optimal actions; all of them are reported in ``alternates``.
    """
    if tie_break not in ("first", "last"):
        raise ValueError(f"tie_break must be 'first' or 'last', got {tie_break!r}")
    _two_countries(scenario)
    li = scenario.country_index(leader)
    fi = 1 - li
    lead = country_actions(scenario, li)
    follow = country_actions(scenario, fi)
    pick = (lambda xs: xs[0]) if tie_break == "first" else (lambda xs: xs[-1])

    payoff: dict[tuple[int, int], Payoff] = {}
    for a in lead:
        for f in follow:
            payoff[a.id, f.id] = leader_follower_payoffs(scenario, li, a, f, clamp=clamp)

    follower_opt = []
    responses = []
    for a in lead:
        best = _argmax_all([payoff[a.id, f.id][1] for f in follow])
        follower_opt.append(tuple(follow[j] for j in best))
        responses.append(follow[pick(best)])
    response_map = ContingentStrategy(tuple(responses))

    leader_best = _argmax_all([payoff[a.id, response_map(a).id][0] for a in lead])
    chosen = lead[pick(leader_best)]
    reply = response_map(chosen)
    profile = (
        JointProfile(chosen, reply) if li == 0 else JointProfile(reply, chosen)
    )
    return SpeResult(
        leader=li,
        follower=fi,
        leader_action=chosen,
        follower_response_map=response_map,
        realized_profile=profile,
        payoffs=payoff[chosen.id, reply.id],
        alternates=Alternates(tuple(lead[i] for i in leader_best), tuple(follower_opt)),
    )

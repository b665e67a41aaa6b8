"""Leslie-matrix population projection and a two-country immigration/survival policy game."""

from .game import (
    Action,
    BimatrixGame,
    ContingentStrategy,
    JointProfile,
    NashResult,
    SpeResult,
    backward_induction,
    build_sequential_normal_form,
    build_simultaneous_normal_form,
    enumerate_follower_strategies,
    profile_payoffs,
    pure_nash,
    verify_equilibrium,
)
from .leslie import (
    EigenResult,
    ImmigrationVector,
    LeslieError,
    LeslieMatrix,
    NegativePopulation,
    NonConvergence,
    PopulationVector,
    dominant_eigen,
    make_leslie,
    project_once,
    project_trajectory,
    to_dense,
    total_population,
)
from .report import RenderOptions, render_bimatrix, render_tree, render_trajectory
from .scenario import (
    Scenario,
    ScenarioError,
    builtin_paper_scenario,
    parse_scenario,
    serialize_scenario,
)

__version__ = "0.1.0"

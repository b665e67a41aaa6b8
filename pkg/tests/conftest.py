import itertools
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from leslie_game import builtin_paper_scenario  # noqa: E402
from leslie_game.leslie import ImmigrationVector, PopulationVector, make_leslie  # noqa: E402
from leslie_game.scenario import CountrySpec, Dynamics, EffectEntry, Scenario  # noqa: E402

_acceptance: dict[int, tuple[str, str]] = {}


@pytest.fixture
def paper():
    return builtin_paper_scenario()


def random_scenario(
    rng: np.random.Generator,
    n_countries: int = 2,
    allow_emigration: bool = False,
    max_actions: int = 3,
    max_k: int = 4,
) -> Scenario:
    """A random valid scenario; immigration is non-negative unless asked otherwise."""
    k = int(rng.integers(1, max_k + 1))
    countries = []
    for c in range(n_countries):
        n_act = int(rng.integers(1, max_actions + 1))
        initial = rng.integers(0, 100, k).astype(float)
        countries.append(CountrySpec(f"C{c}", tuple(f"a{j}" for j in range(n_act)), PopulationVector(initial)))
    effects = []
    for profile in itertools.product(*(c.actions for c in countries)):
        dyn = []
        for _ in countries:
            fert = np.round(rng.uniform(0, 4, k), 2)
            surv = np.round(rng.uniform(0, 1, k - 1), 2)
            lo = -20 if allow_emigration else 0
            imm = rng.integers(lo, 50, k).astype(float)
            dyn.append(Dynamics(make_leslie(fert, surv), ImmigrationVector(imm)))
        effects.append(EffectEntry(profile, tuple(dyn)))
    weights = None
    if rng.random() < 0.3:
        weights = tuple(float(w) for w in rng.integers(1, 4, k))
    horizon = int(rng.integers(1, 4))
    return Scenario(tuple(countries), tuple(effects), horizon, weights)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        prev = _acceptance.get(number)
        status = "PASS" if rep.passed else "FAIL"
        # A criterion with several tests passes only if all of them pass.
        if prev and prev[0] == "FAIL":
            status = "FAIL"
        _acceptance[number] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        status, title = _acceptance[number]
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}")

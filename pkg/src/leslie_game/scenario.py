"""Two-country scenario model, JSON scenario files and the built-in paper data.

A scenario keys each country's Leslie matrix and immigration vector on the
full joint profile (one action per country), because immigration depends on
what the other country does.

File layout::

    {
      "age_classes": 3,
      "horizon": 1,
      "payoff_weights": [1, 1, 1],
      "countries": [{"name": "A", "actions": ["S", "I"], "initial": [30, 35, 25]}, ...],
      "effects": [
        {"profile": {"A": "S", "B": "S"},
         "dynamics": {"A": {"fertilities": [...], "survivals": [...], "immigration": [...]},
                      "B": {...}}},
        ...
      ]
    }

Indices in error messages are 1-based.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Any, Iterator, Sequence

from .leslie import (
    ImmigrationVector,
    LeslieError,
    LeslieMatrix,
    PopulationVector,
    make_leslie,
)

__all__ = [
    "ScenarioError",
    "CountrySpec",
    "Dynamics",
    "EffectEntry",
    "Scenario",
    "parse_scenario",
    "serialize_scenario",
    "load_scenario",
    "builtin_paper_scenario",
]


class ScenarioError(ValueError):
    """A scenario document or object violates the schema."""


@dataclass(frozen=True)
class CountrySpec:
    name: str
    actions: tuple[str, ...]
    initial: PopulationVector

    def __post_init__(self):
        if not self.name:
            raise ScenarioError("country name must be non-empty")
        if not self.actions:
            raise ScenarioError(f"country {self.name}: needs at least one action")
        if any(not a for a in self.actions):
            raise ScenarioError(f"country {self.name}: action labels must be non-empty")
        if len(set(self.actions)) != len(self.actions):
            raise ScenarioError(f"country {self.name}: duplicate action labels")


@dataclass(frozen=True)
class Dynamics:
    """What one country experiences under one joint profile."""

    matrix: LeslieMatrix
    immigration: ImmigrationVector


@dataclass(frozen=True)
class EffectEntry:
    profile: tuple[str, ...]
    dynamics: tuple[Dynamics, ...]


@dataclass(frozen=True)
class Scenario:
    """Countries, a total effect table over joint profiles, horizon and weights.

    ``effects`` is kept in canonical order: joint profiles enumerated
    lexicographically by action index, first country varying slowest.
    """

    countries: tuple[CountrySpec, ...]
    effects: tuple[EffectEntry, ...]
    horizon: int = 1
    payoff_weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.countries:
            raise ScenarioError("scenario needs at least one country")
        names = [c.name for c in self.countries]
        if len(set(names)) != len(names):
            raise ScenarioError(f"duplicate country names: {names}")
        k = self.age_classes
        for c in self.countries:
            if len(c.initial) != k:
                raise ScenarioError(
                    f"country {c.name}: initial vector has {len(c.initial)} age "
                    f"classes, expected {k}"
                )
        if not isinstance(self.horizon, int) or self.horizon < 1:
            raise ScenarioError(f"horizon must be a positive integer, got {self.horizon!r}")
        if self.payoff_weights is not None:
            if len(self.payoff_weights) != k:
                raise ScenarioError(
                    f"payoff_weights has {len(self.payoff_weights)} entries, expected {k}"
                )
            if not all(math.isfinite(w) for w in self.payoff_weights):
                raise ScenarioError("payoff_weights must be finite")

        expected = list(self.profiles())
        given = [e.profile for e in self.effects]
        if sorted(given) != sorted(set(given)):
            dupes = sorted({p for p in given if given.count(p) > 1})
            raise ScenarioError(
                "effect table has duplicate profiles " + ", ".join(map(_fmt, dupes))
            )
        missing = [p for p in expected if p not in given]
        if missing:
            raise ScenarioError(
                "effect table missing profile " + ", ".join(map(_fmt, missing))
            )
        extra = [p for p in given if p not in expected]
        if extra:
            raise ScenarioError("effect table has unknown profile " + ", ".join(map(_fmt, extra)))
        for e in self.effects:
            if len(e.dynamics) != len(self.countries):
                raise ScenarioError(f"effect {_fmt(e.profile)}: one dynamics entry per country")
            for c, d in zip(self.countries, e.dynamics):
                if d.matrix.k != k or len(d.immigration) != k:
                    raise ScenarioError(
                        f"effect {_fmt(e.profile)}, country {c.name}: dimension "
                        f"mismatch, expected {k} age classes"
                    )
        if given != expected:
            order = {p: i for i, p in enumerate(expected)}
            object.__setattr__(
                self, "effects", tuple(sorted(self.effects, key=lambda e: order[e.profile]))
            )

    @property
    def age_classes(self) -> int:
        return len(self.countries[0].initial)

    @property
    def weights(self) -> tuple[float, ...]:
        return self.payoff_weights or (1.0,) * self.age_classes

    def profiles(self) -> Iterator[tuple[str, ...]]:
        return itertools.product(*(c.actions for c in self.countries))

    def country_index(self, country: str | int) -> int:
        """Resolve a country name (or a 0-based index) to its position."""
        if isinstance(country, int):
            if not 0 <= country < len(self.countries):
                raise ScenarioError(f"no country with index {country}")
            return country
        for i, c in enumerate(self.countries):
            if c.name == country:
                return i
        raise ScenarioError(
            f"unknown country {country!r}; expected one of "
            + ", ".join(c.name for c in self.countries)
        )

    def effect(self, profile: Sequence[str]) -> EffectEntry:
        profile = tuple(profile)
        for e in self.effects:
            if e.profile == profile:
                return e
        raise ScenarioError("effect table missing profile " + _fmt(profile))


def _fmt(profile: Sequence[str]) -> str:
    return "(" + ",".join(profile) + ")"


# -- parsing ---------------------------------------------------------------

_TOP_KEYS = ("age_classes", "horizon", "payoff_weights", "countries", "effects")


def _require(obj: Any, kind: type | tuple[type, ...], where: str) -> Any:
    if isinstance(obj, bool) or not isinstance(obj, kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(t.__name__ for t in kind)
        raise ScenarioError(f"{where}: expected {names}, got {type(obj).__name__}")
    return obj


def _numbers(obj: Any, where: str) -> list[float]:
    _require(obj, list, where)
    out = []
    for i, v in enumerate(obj, start=1):
        _require(v, (int, float), f"{where}[{i}]")
        if not math.isfinite(v):
            raise ScenarioError(f"{where}[{i}]: non-finite number")
        out.append(float(v))
    return out


def _keys(obj: dict, allowed: Sequence[str], required: Sequence[str], where: str) -> None:
    unknown = [k for k in obj if k not in allowed]
    if unknown:
        raise ScenarioError(f"{where}: unknown field {unknown[0]!r}")
    for k in required:
        if k not in obj:
            raise ScenarioError(f"{where}: missing field {k!r}")


def _scenario_from_doc(doc: Any) -> Scenario:
    _require(doc, dict, "document")
    _keys(doc, _TOP_KEYS, ("age_classes", "countries", "effects"), "document")
    k = _require(doc["age_classes"], int, "age_classes")
    if k < 1:
        raise ScenarioError("age_classes: must be >= 1")
    horizon = _require(doc.get("horizon", 1), int, "horizon")
    if horizon < 1:
        raise ScenarioError("horizon: must be >= 1")
    weights = None
    if doc.get("payoff_weights") is not None:
        weights = tuple(_numbers(doc["payoff_weights"], "payoff_weights"))
        if len(weights) != k:
            raise ScenarioError(f"payoff_weights: expected {k} entries, got {len(weights)}")

    countries = []
    for ci, cdoc in enumerate(_require(doc["countries"], list, "countries"), start=1):
        where = f"countries[{ci}]"
        _require(cdoc, dict, where)
        _keys(cdoc, ("name", "actions", "initial"), ("name", "actions", "initial"), where)
        name = _require(cdoc["name"], str, f"{where}.name")
        actions = _require(cdoc["actions"], list, f"{where}.actions")
        for ai, a in enumerate(actions, start=1):
            _require(a, str, f"{where}.actions[{ai}]")
        initial = _numbers(cdoc["initial"], f"{where}.initial")
        if len(initial) != k:
            raise ScenarioError(
                f"{where}.initial: dimension mismatch, expected {k} age classes, got {len(initial)}"
            )
        try:
            countries.append(CountrySpec(name, tuple(actions), PopulationVector(initial)))
        except (LeslieError, ScenarioError) as e:
            raise ScenarioError(f"{where}: {e}") from None
    if not countries:
        raise ScenarioError("countries: needs at least one country")
    by_name = {c.name: c for c in countries}

    effects = []
    for ei, edoc in enumerate(_require(doc["effects"], list, "effects"), start=1):
        where = f"effects[{ei}]"
        _require(edoc, dict, where)
        _keys(edoc, ("profile", "dynamics"), ("profile", "dynamics"), where)
        pdoc = _require(edoc["profile"], dict, f"{where}.profile")
        ddoc = _require(edoc["dynamics"], dict, f"{where}.dynamics")
        for field, d in (("profile", pdoc), ("dynamics", ddoc)):
            for name in d:
                if name not in by_name:
                    raise ScenarioError(f"{where}.{field}: unknown country {name!r}")
        profile = []
        dynamics = []
        for c in countries:
            if c.name not in pdoc:
                raise ScenarioError(f"{where}.profile: missing country {c.name!r}")
            label = _require(pdoc[c.name], str, f"{where}.profile.{c.name}")
            if label not in c.actions:
                raise ScenarioError(
                    f"{where}.profile.{c.name}: unknown action {label!r}"
                )
            profile.append(label)
            if c.name not in ddoc:
                raise ScenarioError(f"{where}.dynamics: missing country {c.name!r}")
            dynamics.append(_dynamics_from_doc(ddoc[c.name], k, f"{where}.dynamics.{c.name}"))
        effects.append(EffectEntry(tuple(profile), tuple(dynamics)))

    return Scenario(tuple(countries), tuple(effects), horizon, weights)


def _dynamics_from_doc(d: Any, k: int, where: str) -> Dynamics:
    _require(d, dict, where)
    fields = ("fertilities", "survivals", "immigration")
    _keys(d, fields, fields, where)
    fert = _numbers(d["fertilities"], f"{where}.fertilities")
    surv = _numbers(d["survivals"], f"{where}.survivals")
    imm = _numbers(d["immigration"], f"{where}.immigration")
    if len(fert) != k:
        raise ScenarioError(f"{where}.fertilities: dimension mismatch, expected {k}, got {len(fert)}")
    if len(imm) != k:
        raise ScenarioError(f"{where}.immigration: dimension mismatch, expected {k}, got {len(imm)}")
    try:
        matrix = make_leslie(fert, surv)
    except LeslieError as e:
        raise ScenarioError(f"{where}: {e}") from None
    return Dynamics(matrix, ImmigrationVector(imm))


def parse_scenario(text: bytes | str) -> Scenario:
    """Parse and fully validate a JSON scenario document.

    Raises:
        ScenarioError: with the line/column of a syntax error, or the
            offending field path for schema and model violations.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ScenarioError(f"not valid UTF-8: {e}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}") from None
    try:
        return _scenario_from_doc(doc)
    except LeslieError as e:
        raise ScenarioError(str(e)) from None


def load_scenario(path: str) -> Scenario:
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        return parse_scenario(data)
    except ScenarioError as e:
        raise ScenarioError(f"{path}: {e}") from None


# -- serialization ---------------------------------------------------------

def _num(x: float) -> int | float:
    return int(x) if x.is_integer() else x


def _nums(xs: Sequence[float]) -> list[int | float]:
    return [_num(float(x)) for x in xs]


def _emit(obj: Any, indent: int = 0) -> str:
    # json.dumps(indent=...) but with scalar-only lists kept on one line.
    pad = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_emit(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        items = [pad + _emit(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    return json.dumps(obj, ensure_ascii=False, separators=(", ", ": "))


def scenario_to_doc(s: Scenario) -> dict[str, Any]:
    doc: dict[str, Any] = {"age_classes": s.age_classes, "horizon": s.horizon}
    if s.payoff_weights is not None:
        doc["payoff_weights"] = _nums(s.payoff_weights)
    doc["countries"] = [
        {"name": c.name, "actions": list(c.actions), "initial": _nums(c.initial)}
        for c in s.countries
    ]
    doc["effects"] = [
        {
            "profile": {c.name: a for c, a in zip(s.countries, e.profile)},
            "dynamics": {
                c.name: {
                    "fertilities": _nums(d.matrix.fertilities),
                    "survivals": _nums(d.matrix.survivals),
                    "immigration": _nums(d.immigration),
                }
                for c, d in zip(s.countries, e.dynamics)
            },
        }
        for e in s.effects
    ]
    return doc


def serialize_scenario(s: Scenario) -> bytes:
    """Canonical UTF-8 JSON: fixed key order, effects in lexicographic profile order."""
    return (_emit(scenario_to_doc(s)) + "\n").encode("utf-8")


# -- the paper's two-country data -------------------------------------------

def builtin_paper_scenario() -> Scenario:
    """Countries A and B, actions S (survival) and I (immigration), horizon 1.

    When both invest in immigration each keeps its base immigration vector;
    that reading is the one that reproduces the (I, I) payoffs (140, 285).
    """
    LA_0 = make_leslie([0, 2, 1], [0.2, 0.4])
    LB_0 = make_leslie([0, 5, 2], [0.2, 0.4])
    LA_S = make_leslie([0, 3, 1], [0.4, 0.6])
    LB_S = make_leslie([0, 6, 2], [0.6, 0.8])
    IA_0 = ImmigrationVector([5, 10, 10])
    IB_0 = ImmigrationVector([15, 20, 20])
    IA_i = ImmigrationVector([35, 40, 40])
    IB_minus_i = ImmigrationVector([10, 15, 15])
    IB_i = ImmigrationVector([45, 50, 50])
    IA_minus_i = ImmigrationVector([-5, 0, 0])

    countries = (
        CountrySpec("A", ("S", "I"), PopulationVector([30, 35, 25])),
        CountrySpec("B", ("S", "I"), PopulationVector([40, 30, 30])),
    )
    effects = (
        EffectEntry(("S", "S"), (Dynamics(LA_S, IA_0), Dynamics(LB_S, IB_0))),
        EffectEntry(("S", "I"), (Dynamics(LA_S, IA_minus_i), Dynamics(LB_0, IB_i))),
        EffectEntry(("I", "S"), (Dynamics(LA_0, IA_i), Dynamics(LB_S, IB_minus_i))),
        EffectEntry(("I", "I"), (Dynamics(LA_0, IA_0), Dynamics(LB_0, IB_0))),
    )
    return Scenario(countries, effects, horizon=1)

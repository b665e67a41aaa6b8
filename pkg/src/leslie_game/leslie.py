"""Leslie matrices and age-structured population projection.

Age classes are labelled from 1 in every user-facing message; storage is
0-based. Counts are in thousands of individuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "LeslieError",
    "NegativePopulation",
    "NonConvergence",
    "PopulationVector",
    "ImmigrationVector",
    "LeslieMatrix",
    "EigenResult",
    "make_leslie",
    "to_dense",
    "from_dense",
    "project_once",
    "project_trajectory",
    "total_population",
    "dominant_eigen",
]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000


class LeslieError(ValueError):
    """Invalid Leslie-model input."""


class NegativePopulation(LeslieError):
    """A projection produced a negative count."""

    def __init__(self, age_class: int, value: float, step: int | None = None):
        self.age_class = age_class
        self.value = value
        self.step = step
        where = f" at step {step}" if step is not None else ""
        super().__init__(
            f"negative population {value!r} in age class {age_class}{where}"
        )


class NonConvergence(LeslieError):
    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"power iteration did not converge in {iterations} iterations "
            f"(last residual {residual:.3e})"
        )


def _as_floats(values: Iterable[float], what: str) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    for i, v in enumerate(out, start=1):
        if not math.isfinite(v):
            raise LeslieError(f"{what}: non-finite value at index {i}")
    return out


@dataclass(frozen=True)
class PopulationVector:
    counts: tuple[float, ...]

    def __init__(self, counts: Iterable[float]):
        values = _as_floats(counts, "population")
        if not values:
            raise LeslieError("population: needs at least one age class")
        for i, v in enumerate(values, start=1):
            if v < 0:
                raise NegativePopulation(i, v)
        object.__setattr__(self, "counts", values)

    def __len__(self) -> int:
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)

    def __getitem__(self, i: int) -> float:
        return self.counts[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.counts, dtype=float)


@dataclass(frozen=True)
class ImmigrationVector:
    """Net inflow per age class; negative entries mean net emigration."""

    flows: tuple[float, ...]

    def __init__(self, flows: Iterable[float]):
        values = _as_floats(flows, "immigration")
        if not values:
            raise LeslieError("immigration: needs at least one age class")
        object.__setattr__(self, "flows", values)

    def __len__(self) -> int:
        return len(self.flows)

    def __iter__(self):
        return iter(self.flows)

    def __getitem__(self, i: int) -> float:
        return self.flows[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.flows, dtype=float)

    @classmethod
    def zeros(cls, k: int) -> ImmigrationVector:
        return cls([0.0] * k)


@dataclass(frozen=True)
class LeslieMatrix:
    """Fertilities F_1..F_k and survival probabilities P_1..P_{k-1}.

    Build through :func:`make_leslie`, which validates the inputs.
    """

    fertilities: tuple[float, ...]
    survivals: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.fertilities)

    def __post_init__(self):
        _validate(self.fertilities, self.survivals)


@dataclass(frozen=True)
class EigenResult:
    lam: float
    stable_distribution: tuple[float, ...]
    iterations: int
    residual: float


def _validate(fertilities: Sequence[float], survivals: Sequence[float]) -> None:
    if len(fertilities) < 1:
        raise LeslieError("need at least one fertility (one age class)")
    if len(survivals) != len(fertilities) - 1:
        raise LeslieError(
            f"dimension mismatch: {len(fertilities)} fertilities need "
            f"{len(fertilities) - 1} survivals, got {len(survivals)}"
        )
    for i, f in enumerate(fertilities, start=1):
        if not math.isfinite(f):
            raise LeslieError(f"non-finite fertility at index {i}")
        if f < 0:
            raise LeslieError(f"negative fertility at index {i}")
    for i, p in enumerate(survivals, start=1):
        if not (0.0 <= p <= 1.0):
            raise LeslieError(f"survival outside [0,1] at index {i}")


def make_leslie(
    fertilities: Iterable[float], survivals: Iterable[float]
) -> LeslieMatrix:
    """Validate and build a Leslie matrix.

    Raises:
        LeslieError: on a length mismatch, a negative fertility or a survival
            probability outside [0, 1]. The message carries the 1-based index.
    """
    return LeslieMatrix(
        tuple(float(f) for f in fertilities), tuple(float(p) for p in survivals)
    )


def to_dense(L: LeslieMatrix) -> np.ndarray:
    k = L.k
    A = np.zeros((k, k))
    A[0, :] = L.fertilities
    for j, p in enumerate(L.survivals):
        A[j + 1, j] = p
    return A


def from_dense(A: np.ndarray | Sequence[Sequence[float]]) -> LeslieMatrix:
    """Inverse of :func:`to_dense`; rejects entries off the Leslie pattern."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise LeslieError(f"expected a non-empty square matrix, got shape {A.shape}")
    k = A.shape[0]
    survivals = [A[j + 1, j] for j in range(k - 1)]
    mask = np.ones_like(A, dtype=bool)
    mask[0, :] = False
    for j in range(k - 1):
        mask[j + 1, j] = False
    if np.any(A[mask] != 0):
        r, c = np.argwhere(mask & (A != 0))[0]
        raise LeslieError(f"non-zero entry off the Leslie pattern at ({r + 1},{c + 1})")
    return make_leslie(A[0, :], survivals)


def _check_dim(L: LeslieMatrix, n: Sequence[float], what: str) -> None:
    if len(n) != L.k:
        raise LeslieError(
            f"dimension mismatch: matrix has {L.k} age classes, {what} has {len(n)}"
        )


def project_once(
    L: LeslieMatrix,
    n: PopulationVector | Sequence[float],
    imm: ImmigrationVector | Sequence[float] | None = None,
    *,
    clamp: bool = False,
) -> PopulationVector:
    """One projection interval: ``dense(L) @ n + imm``.

    A negative class raises :class:`NegativePopulation` unless ``clamp`` is
    set, in which case such classes are floored at 0.
    """
    if not isinstance(n, PopulationVector):
        n = PopulationVector(n)
    _check_dim(L, n, "population")
    out = to_dense(L) @ n.as_array()
    if imm is not None:
        if not isinstance(imm, ImmigrationVector):
            imm = ImmigrationVector(imm)
        _check_dim(L, imm, "immigration")
        out = out + imm.as_array()
    negative = np.flatnonzero(out < 0)
    if negative.size:
        if not clamp:
            i = int(negative[0])
            raise NegativePopulation(i + 1, float(out[i]))
        out = np.maximum(out, 0.0)
    # -0.0 would survive the >= 0 check but prints badly
    return PopulationVector(out + 0.0)


def project_trajectory(
    L: LeslieMatrix,
    n0: PopulationVector | Sequence[float],
    imm: ImmigrationVector | Sequence[float] | None = None,
    steps: int = 1,
    *,
    clamp: bool = False,
) -> list[PopulationVector]:
    """Apply :func:`project_once` ``steps`` times; returns ``steps + 1`` states.

    ``steps == 0`` returns just the initial state.
    """
    if steps < 0:
        raise LeslieError(f"steps must be >= 0, got {steps}")
    if not isinstance(n0, PopulationVector):
        n0 = PopulationVector(n0)
    _check_dim(L, n0, "population")
    traj = [n0]
    for t in range(steps):
        try:
            traj.append(project_once(L, traj[-1], imm, clamp=clamp))
        except NegativePopulation as e:
            raise NegativePopulation(e.age_class, e.value, step=t + 1) from None
    return traj


def total_population(n: PopulationVector | Sequence[float]) -> float:
    return math.fsum(n)


def _nilpotent(L: LeslieMatrix) -> bool:
    # No fertility is reachable from class 1, so the characteristic polynomial is lambda^k.
    reach = 1.0
    for i, f in enumerate(L.fertilities):
        if f > 0 and reach > 0:
            return False
        if i < L.k - 1:
            reach *= L.survivals[i]
    return True


def dominant_eigen(
    L: LeslieMatrix, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> EigenResult:
    """Dominant eigenvalue (asymptotic growth factor) and stable age distribution.

    Power iteration on ``dense(L) + I`` with 1-norm normalisation from the
    uniform start vector. The unit shift breaks the modulus ties of
    imprimitive matrices, so iteration converges whenever fertility is
    reachable from the first class. Converged when
    ``max|A w - lam w| <= tol * max(1, lam)``; the eigenvalue is then
    refined by Newton steps on the characteristic equation and the stable
    distribution rebuilt from it, kept only if the residual does not grow.

    Raises:
        NonConvergence: if ``max_iter`` steps do not reach ``tol``.
    """
    if tol <= 0:
        raise LeslieError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise LeslieError(f"max_iter must be >= 1, got {max_iter}")
    A = to_dense(L)
    k = L.k

    if _nilpotent(L):
        # A e_m = 0 for the first class m that does not survive (or the last class).
        m = next((j for j, p in enumerate(L.survivals) if p == 0), k - 1)
        w = np.zeros(k)
        w[m] = 1.0
        return EigenResult(0.0, tuple(w), 0, float(np.max(np.abs(A @ w))))

    B = A + np.eye(k)
    w = np.full(k, 1.0 / k)
    residual = math.inf
    for it in range(1, max_iter + 1):
        y = B @ w
        mu = float(y.sum())
        w = y / mu
        lam = mu - 1.0
        residual = float(np.max(np.abs(A @ w - lam * w)))
        if residual <= tol * max(1.0, lam):
            break
    else:
        raise NonConvergence(max_iter, residual)

    polished = _polish(L, lam)
    if polished is not None:
        w2 = _stable_vector(L, polished)
        r2 = float(np.max(np.abs(A @ w2 - polished * w2)))
        if r2 <= residual:
            lam, w, residual = polished, w2, r2
    w = w / math.fsum(w)
    return EigenResult(max(lam, 0.0), tuple(float(x) for x in w), it, residual)


def _net_fertility(L: LeslieMatrix) -> list[float]:
    # F_i times the probability of surviving from class 1 to class i.
    out, reach = [], 1.0
    for i, f in enumerate(L.fertilities):
        out.append(f * reach)
        if i < L.k - 1:
            reach *= L.survivals[i]
    return out


def _polish(L: LeslieMatrix, lam: float, steps: int = 200) -> float | None:
    """Refine lam as the positive root of x^k - sum_i c_i x^(k-i).

    Newton from the power-iteration estimate, falling back to bisection
    whenever a step leaves the bracket. The residual test alone leaves lam
    poorly determined when the matrix is close to reducible or nilpotent.
    """
    c = _net_fertility(L)
    coeffs = [1.0] + [-ci for ci in c]
    if all(ci == 0 for ci in c):
        return None

    def p_and_dp(x: float) -> tuple[float, float]:
        p, dp = 0.0, 0.0
        for a in coeffs:
            dp = dp * x + p
            p = p * x + a
        return p, dp

    lo, hi = 0.0, max(1.0, math.fsum(c))
    x = lam if lo < lam < hi else 0.5 * hi
    for _ in range(steps):
        p, dp = p_and_dp(x)
        if p == 0:
            return x
        if p < 0:
            lo = x
        else:
            hi = x
        x_new = x - p / dp if dp != 0 else lo - 1.0
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 2 * math.ulp(x) or hi - lo <= 2 * math.ulp(hi):
            return x_new
        x = x_new
    return x


def _stable_vector(L: LeslieMatrix, lam: float) -> np.ndarray:
    w = np.empty(L.k)
    w[0] = 1.0
    for i, p in enumerate(L.survivals):
        w[i + 1] = w[i] * p / lam
    return w / w.sum()

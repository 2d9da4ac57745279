"""Domain types for dual-hop multi-channel multi-user relay resource allocation.

A problem instance (:class:`Scenario`) holds normalized channel power gains for
the three link types of a two-hop relay network with a direct link:

* ``a[m]``   source -> relay gain on first-hop channel ``m`` (1/W),
* ``b[n, k]`` relay -> user ``k`` gain on second-hop channel ``n`` (1/W),
* ``c[m, k]`` source -> user ``k`` direct gain on channel ``m`` (1/W),

together with user weights and source / relay / total power limits.  Gains are
stored pre-normalized against the receiver noise power, so ``gain * power`` is
a dimensionless SNR.  All rates are in bits per (two-slot) channel use, log
base 2 throughout.

A solution selects N paths ``(m, pi(m), user(m))``: a pairing permutation of
first-hop onto second-hop channels plus one user per pair, and per-path source
and relay powers.  All types are immutable value objects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

# Relative feasibility tolerance for power-budget checks (scale free).
FEAS_REL_TOL = 1e-9


class Strategy(str, Enum):
    """Relaying strategy selecting the per-path rate expression."""

    DF = "DF"
    AF = "AF"
    AF_UPPER = "AF_UPPER"


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Scenario:
    """One coherence block of a relay network instance.

    Shape errors raise immediately; semantic issues (negative gains, degenerate
    instances) are reported by :func:`validate` so callers can collect them.
    """

    n_channels: int
    n_users: int
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    w: np.ndarray
    p_s: float
    p_r: float
    p_t: float
    strategy: Strategy = Strategy.DF

    def __post_init__(self):
        n, k = int(self.n_channels), int(self.n_users)
        if n < 1 or k < 1:
            raise ValueError("n_channels and n_users must be positive")
        object.__setattr__(self, "n_channels", n)
        object.__setattr__(self, "n_users", k)
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        a = _frozen_array(self.a)
        b = _frozen_array(self.b)
        c = _frozen_array(self.c)
        w = _frozen_array(self.w)
        if a.shape != (n,):
            raise ValueError(f"a must have shape ({n},), got {a.shape}")
        if b.shape != (n, k):
            raise ValueError(f"b must have shape ({n}, {k}), got {b.shape}")
        if c.shape != (n, k):
            raise ValueError(f"c must have shape ({n}, {k}), got {c.shape}")
        if w.shape != (k,):
            raise ValueError(f"w must have shape ({k},), got {w.shape}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "p_s", float(self.p_s))
        object.__setattr__(self, "p_r", float(self.p_r))
        object.__setattr__(self, "p_t", float(self.p_t))

    @property
    def power_limits(self) -> np.ndarray:
        """Vector (p_s, p_r, p_t)."""
        return np.array([self.p_s, self.p_r, self.p_t])

    def with_zero_direct_links(self) -> "Scenario":
        """Copy of the instance with every direct-link gain set to zero."""
        return Scenario(
            self.n_channels,
            self.n_users,
            self.a,
            self.b,
            np.zeros_like(np.asarray(self.c)),
            self.w,
            self.p_s,
            self.p_r,
            self.p_t,
            self.strategy,
        )


def validate(scenario: Scenario) -> list[str]:
    """Return every violated instance invariant; an empty list means ok.

    Reported violations: negative gains or weights, non-positive power limits,
    and degenerate instances where no path (m, n, k) with positive weight,
    positive first-hop gain and a usable second hop or direct link exists.
    """
    errors = []
    for name, arr in (("a", scenario.a), ("b", scenario.b), ("c", scenario.c)):
        if np.any(arr < 0):
            errors.append(f"negative gain in {name}")
    if np.any(scenario.w < 0):
        errors.append("negative weight in w")
    for name, limit in (("p_s", scenario.p_s), ("p_r", scenario.p_r), ("p_t", scenario.p_t)):
        if not limit > 0:
            errors.append(f"non-positive power limit {name}")
    if not errors and not _has_usable_path(scenario):
        errors.append("degenerate instance: no path with positive weight, first-hop and second-hop-or-direct gain")
    return errors


def _has_usable_path(s: Scenario) -> bool:
    # exists (m, n, k): w_k > 0, a_m > 0 and b[n, k] + c[m, k] > 0
    active_k = s.w > 0
    active_m = s.a > 0
    if not active_k.any() or not active_m.any():
        return False
    b_any = (s.b > 0).any(axis=0)  # per user: some second-hop channel works
    c_any = (s.c[active_m, :] > 0).any(axis=0)  # per user: direct link on an active m
    return bool(np.any(active_k & (b_any | c_any)))


@dataclass(frozen=True)
class Assignment:
    """Channel pairing plus a pair -> user map, all indices 0-based.

    ``pairing[m] = n`` pairs first-hop channel ``m`` with second-hop channel
    ``n``; ``user_of_pair[m]`` is the user served on that path.  Equivalent to
    a binary selection tensor with exactly N ones, one per first-hop channel
    and one per second-hop channel.
    """

    pairing: np.ndarray
    user_of_pair: np.ndarray

    def __post_init__(self):
        pairing = _frozen_array(self.pairing, dtype=int)
        users = _frozen_array(self.user_of_pair, dtype=int)
        n = pairing.shape[0]
        if sorted(pairing.tolist()) != list(range(n)):
            raise ValueError("pairing must be a permutation of 0..N-1")
        if users.shape != (n,):
            raise ValueError("user_of_pair must have length N")
        if np.any(users < 0):
            raise ValueError("user indices must be nonnegative")
        object.__setattr__(self, "pairing", pairing)
        object.__setattr__(self, "user_of_pair", users)

    @property
    def n_channels(self) -> int:
        return self.pairing.shape[0]

    def to_phi(self, n_users: int) -> np.ndarray:
        """Materialize the binary N x N x K selection tensor."""
        n = self.n_channels
        if np.any(self.user_of_pair >= n_users):
            raise ValueError("user index out of range for n_users")
        phi = np.zeros((n, n, n_users))
        phi[np.arange(n), self.pairing, self.user_of_pair] = 1.0
        return phi

    @classmethod
    def from_phi(cls, phi: np.ndarray) -> "Assignment":
        """Recover (pairing, user map) from a binary selection tensor."""
        phi = np.asarray(phi, dtype=float)
        n = phi.shape[0]
        if phi.shape[:2] != (n, n) or phi.ndim != 3:
            raise ValueError("phi must be N x N x K")
        if not np.all((phi == 0.0) | (phi == 1.0)):
            raise ValueError("phi must be binary")
        if not (np.allclose(phi.sum(axis=(1, 2)), 1.0) and np.allclose(phi.sum(axis=(0, 2)), 1.0)):
            raise ValueError("phi rows/columns must each contain exactly one selected path")
        pairing = np.zeros(n, dtype=int)
        users = np.zeros(n, dtype=int)
        for m in range(n):
            flat = int(np.argmax(phi[m]))
            pairing[m], users[m] = divmod(flat, phi.shape[2])
        return cls(pairing, users)


@dataclass(frozen=True)
class PowerAllocation:
    """Per-path source and relay powers, indexed by first-hop channel."""

    ps: np.ndarray
    pr: np.ndarray

    def __post_init__(self):
        ps = _frozen_array(self.ps)
        pr = _frozen_array(self.pr)
        if ps.shape != pr.shape or ps.ndim != 1:
            raise ValueError("ps and pr must be vectors of equal length")
        object.__setattr__(self, "ps", ps)
        object.__setattr__(self, "pr", pr)

    def budget_violations(self, scenario: Scenario, rel_tol: float = FEAS_REL_TOL) -> list[str]:
        """Names of power budgets exceeded beyond ``rel_tol * limit``."""
        out = []
        if np.any(self.ps < 0) or np.any(self.pr < 0):
            out.append("negative power")
        checks = (
            ("p_s", self.ps.sum(), scenario.p_s),
            ("p_r", self.pr.sum(), scenario.p_r),
            ("p_t", self.ps.sum() + self.pr.sum(), scenario.p_t),
        )
        for name, used, limit in checks:
            if used > limit * (1.0 + rel_tol):
                out.append(name)
        return out

    def is_feasible(self, scenario: Scenario, rel_tol: float = FEAS_REL_TOL) -> bool:
        return not self.budget_violations(scenario, rel_tol)


@dataclass(frozen=True)
class Multipliers:
    """Nonnegative dual prices for the source, relay and total power budgets."""

    ls: float
    lr: float
    lt: float

    def __post_init__(self):
        object.__setattr__(self, "ls", float(self.ls))
        object.__setattr__(self, "lr", float(self.lr))
        object.__setattr__(self, "lt", float(self.lt))
        if self.ls < 0 or self.lr < 0 or self.lt < 0:
            raise ValueError("multipliers must be nonnegative")

    @property
    def mu_s(self) -> float:
        """Effective price of source power."""
        return self.ls + self.lt

    @property
    def mu_r(self) -> float:
        """Effective price of relay power."""
        return self.lr + self.lt

    def as_array(self) -> np.ndarray:
        return np.array([self.ls, self.lr, self.lt])

    @classmethod
    def from_array(cls, arr) -> "Multipliers":
        ls, lr, lt = np.asarray(arr, dtype=float)
        return cls(ls, lr, lt)


@dataclass(frozen=True)
class SolveResult:
    """Solution plus convergence diagnostics for a single scheme run.

    ``dual_value`` upper-bounds the achievable optimum whenever the scheme ran
    dual minimization; exact restricted schemes report ``dual_value ==
    primal_value``.  ``region_used`` is the multiplier region of the winning
    dual solve (None for fixed-power schemes).
    """

    assignment: Assignment
    powers: PowerAllocation
    primal_value: float
    dual_value: float
    gap: float
    iterations: int
    region_used: str | None
    per_path_rates: np.ndarray
    multipliers: Multipliers | None = None
    converged: bool = True
    region_check_ok: bool = True
    gap_flag: bool = False
    notes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "per_path_rates", _frozen_array(self.per_path_rates))


# ---------------------------------------------------------------------------
# Scenario JSON schema (the on-disk format consumed by the CLI)

_SCENARIO_KEYS = {"n_channels", "n_users", "a", "b", "c", "w", "p_s", "p_r", "p_t", "strategy"}


class SchemaError(ValueError):
    """Raised when a scenario or config document violates its schema."""


def scenario_from_dict(doc: dict) -> Scenario:
    """Build a Scenario from a JSON-style dict.  Unknown keys are rejected."""
    if not isinstance(doc, dict):
        raise SchemaError("scenario document must be a JSON object")
    unknown = set(doc) - _SCENARIO_KEYS
    if unknown:
        raise SchemaError(f"unknown scenario keys: {sorted(unknown)}")
    missing = _SCENARIO_KEYS - set(doc)
    if missing:
        raise SchemaError(f"missing scenario keys: {sorted(missing)}")
    try:
        strategy = Strategy(doc["strategy"])
    except ValueError as exc:
        raise SchemaError(f"unknown strategy {doc['strategy']!r}") from exc
    try:
        return Scenario(
            n_channels=doc["n_channels"],
            n_users=doc["n_users"],
            a=doc["a"],
            b=doc["b"],
            c=doc["c"],
            w=doc["w"],
            p_s=doc["p_s"],
            p_r=doc["p_r"],
            p_t=doc["p_t"],
            strategy=strategy,
        )
    except (TypeError, ValueError) as exc:
        raise SchemaError(str(exc)) from exc


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "n_channels": s.n_channels,
        "n_users": s.n_users,
        "a": s.a.tolist(),
        "b": s.b.tolist(),
        "c": s.c.tolist(),
        "w": s.w.tolist(),
        "p_s": s.p_s,
        "p_r": s.p_r,
        "p_t": s.p_t,
        "strategy": s.strategy.value,
    }


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    return scenario_from_dict(doc)

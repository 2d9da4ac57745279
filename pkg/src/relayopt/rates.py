"""Per-path achievable-rate functions and the weighted sum-rate objective.

All functions broadcast over numpy arrays and return rates in bits per
two-slot frame channel use (the 1/2 pre-log factor is included).
"""

from __future__ import annotations

import numpy as np

from .model import Assignment, PowerAllocation, Scenario, Strategy


def df_rate(a, b, c, ps, pr):
    """Decode-and-forward rate with repetition coding and direct-link combining.

    0.5 * min(log2(1 + a*ps), log2(1 + c*ps + b*pr)): the relay must decode on
    the first hop, the user combines the relayed and direct copies.
    """
    first = np.log2(1.0 + np.asarray(a) * ps)
    second = np.log2(1.0 + np.asarray(c) * ps + np.asarray(b) * pr)
    return 0.5 * np.minimum(first, second)


def af_rate(a, b, c, ps, pr):
    """Exact amplify-and-forward rate (not concave in the powers)."""
    a, b, c = np.asarray(a, dtype=float), np.asarray(b, dtype=float), np.asarray(c, dtype=float)
    ps, pr = np.asarray(ps, dtype=float), np.asarray(pr, dtype=float)
    relay_snr = a * b * ps * pr / (1.0 + a * ps + b * pr)
    return 0.5 * np.log2(1.0 + relay_snr + c * ps)


def af_rate_upper(a, b, c, ps, pr):
    """Concave upper bound on the AF rate (the amplifier noise "1" dropped).

    The 0/0 singularity at a*ps + b*pr = 0 is closed by continuous extension:
    the relayed SNR term is 0 there.
    """
    a, b, c = np.asarray(a, dtype=float), np.asarray(b, dtype=float), np.asarray(c, dtype=float)
    ps, pr = np.asarray(ps, dtype=float), np.asarray(pr, dtype=float)
    denom = a * ps + b * pr
    num = a * b * ps * pr
    with np.errstate(divide="ignore", invalid="ignore"):
        relay_snr = np.where(denom > 0.0, num / np.where(denom > 0.0, denom, 1.0), 0.0)
    return 0.5 * np.log2(1.0 + relay_snr + c * ps)


_RATE_FUNCTIONS = {
    Strategy.DF: df_rate,
    Strategy.AF: af_rate,
    Strategy.AF_UPPER: af_rate_upper,
}


def rate_function(strategy: Strategy):
    """The achieved-rate function a scheme reports for this strategy."""
    return _RATE_FUNCTIONS[Strategy(strategy)]


def path_gains(scenario: Scenario, assignment: Assignment):
    """Gather (a, b, c, w) along the N selected paths, indexed by first hop."""
    m = np.arange(scenario.n_channels)
    n = assignment.pairing
    k = assignment.user_of_pair
    return scenario.a[m], scenario.b[n, k], scenario.c[m, k], scenario.w[k]


def per_path_rates(scenario: Scenario, assignment: Assignment, powers: PowerAllocation) -> np.ndarray:
    """Unweighted achieved rate of each selected path."""
    a, b, c, _ = path_gains(scenario, assignment)
    return rate_function(scenario.strategy)(a, b, c, powers.ps, powers.pr)


def weighted_sum_rate(scenario: Scenario, assignment: Assignment, powers: PowerAllocation) -> float:
    """Objective value sum_m w_user(m) * R(m, pairing(m), user(m))."""
    _, _, _, w = path_gains(scenario, assignment)
    return float(np.dot(w, per_path_rates(scenario, assignment, powers)))

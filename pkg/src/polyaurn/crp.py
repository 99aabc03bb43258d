"""Chinese restaurant seating with periodically opening restaurants.

Customers arrive one at a time.  After every block of `period` arrivals a new
restaurant opens, raising the pull of fresh tables, so the seating weights at
time N = n*p + k use the capacity c_N = N + (n+1)*theta (plus theta_bar when
a cocktail bar with infinite capacity competes for customers as well):

 - an occupied table with s customers attracts the next one with weight s - a,
 - a new table gets weight m*a + (n+1)*theta with m the occupied-table count,
 - the bar, if present, gets weight b + theta_bar with b its customer count.

The partition process is the branch structure of a plane-oriented forest with
immigrating roots: scaling all weights by 1 + alpha with a = 1/(1+alpha)
turns table weights into branch weights (a size-s branch holds weight
s*(1+alpha) - 1), new-table weight into total root weight, and the bar into
a pseudo-root of weight theta_bar/a whose subtree never spawns tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .urns import Pmf, draw_color, exact_pmf_dp, triangular, with_white_immigration

__all__ = [
    "CrpParams",
    "capacity",
    "seating_weights",
    "seating_probabilities",
    "tree_equivalents",
    "CrpState",
    "crp_step",
    "simulate_crp",
    "simulate_table_count_batch",
    "table_count_urn",
    "table_count_pmf",
]


def _num(x):
    if isinstance(x, bool):
        raise TypeError("bool is not a parameter")
    if isinstance(x, (int, str, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        return x
    raise TypeError(f"unsupported parameter {x!r}")


@dataclass(frozen=True)
class CrpParams:
    a: object
    theta: object
    period: int
    theta_bar: object = None

    def __post_init__(self):
        object.__setattr__(self, "a", _num(self.a))
        object.__setattr__(self, "theta", _num(self.theta))
        if self.theta_bar is not None:
            object.__setattr__(self, "theta_bar", _num(self.theta_bar))
        if not 0 < self.a < 1:
            raise ValueError("need 0 < a < 1")
        if not self.theta > 0:
            raise ValueError("need theta > 0")
        if self.theta_bar is not None and not self.theta_bar > 0:
            raise ValueError("theta_bar must be positive when present")
        if self.period < 1:
            raise ValueError("period must be >= 1")


def capacity(params: CrpParams, N: int):
    """Total seating weight facing customer N+1."""
    n = N // params.period
    c = N + (n + 1) * params.theta
    if params.theta_bar is not None:
        c = c + params.theta_bar
    return c


def seating_weights(params: CrpParams, table_sizes, N: int, bar_count: int = 0):
    """(per-table weights, new-table weight, bar weight or None) at time N."""
    n = N // params.period
    m = len(table_sizes)
    tables = [s - params.a for s in table_sizes]
    fresh = m * params.a + (n + 1) * params.theta
    bar = None if params.theta_bar is None else bar_count + params.theta_bar
    return tables, fresh, bar


def seating_probabilities(params: CrpParams, table_sizes, N: int, bar_count: int = 0):
    """Same split as seating_weights, normalized by the capacity."""
    tables, fresh, bar = seating_weights(params, table_sizes, N, bar_count)
    c = capacity(params, N)
    probs = [w / c for w in tables]
    return probs, fresh / c, None if bar is None else bar / c


def tree_equivalents(params: CrpParams):
    """(alpha, ell, beta) of the matching plane-oriented forest; beta is None
    without a bar.  All seating weights scale by 1 + alpha."""
    alpha = 1 / params.a - 1
    ell = params.theta / params.a
    beta = None if params.theta_bar is None else params.theta_bar / params.a
    return alpha, ell, beta


@dataclass
class CrpState:
    time: int = 0
    table_sizes: list = None
    bar_count: int = 0

    def __post_init__(self):
        if self.table_sizes is None:
            self.table_sizes = []


def crp_step(params: CrpParams, state: CrpState, u: float) -> CrpState:
    """Seat one customer using a single uniform draw; the cumulative order is
    tables, then the fresh table, then the bar."""
    tables, fresh, bar = seating_weights(
        params, state.table_sizes, state.time, state.bar_count
    )
    weights = tables + [fresh] + ([bar] if bar is not None else [])
    choice = draw_color(weights, capacity(params, state.time), u)
    sizes = list(state.table_sizes)
    bar_count = state.bar_count
    if choice < len(sizes):
        sizes[choice] += 1
    elif choice == len(sizes):
        sizes.append(1)
    else:
        bar_count += 1
    return CrpState(state.time + 1, sizes, bar_count)


def simulate_crp(params: CrpParams, N: int, rng) -> CrpState:
    state = CrpState()
    for _ in range(N):
        state = crp_step(params, state, float(rng.random()))
    return state


def simulate_table_count_batch(
    params: CrpParams, N: int, n_reps: int, seed: int
) -> np.ndarray:
    """Occupied-table counts after N customers for n_reps runs.

    The table count only needs (m, b) per replicate: customers at tables are
    N - b, so the joint joining weight is (N - b) - m*a and each step is one
    comparison against two thresholds.
    """
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    a = float(params.a)
    theta = float(params.theta)
    theta_bar = 0.0 if params.theta_bar is None else float(params.theta_bar)
    has_bar = params.theta_bar is not None
    m = np.zeros(n_reps)
    b = np.zeros(n_reps)
    for N_cur in range(N):
        n = N_cur // params.period
        c = N_cur + (n + 1) * theta + theta_bar
        x = rng.random(n_reps) * c
        fresh = m * a + (n + 1) * theta
        if has_bar:
            at_bar = x < b + theta_bar
            at_new = ~at_bar & (x < b + theta_bar + fresh)
            b += at_bar
        else:
            at_new = x < fresh
        m += at_new
    return m.astype(np.int64)


def table_count_urn(params: CrpParams):
    """Two-color urn whose white count tracks the table count exactly.

    Only defined without a bar.  White weight after N customers equals
    m*a + (n+1)*theta where m is the table count and n = N // period: a new
    table adds a to white and 1-a to black (the join weight of its seated
    customer), a join adds 1 to black, and each refresh adds theta to white.
    """
    if params.theta_bar is not None:
        raise ValueError("exact table-count law is only available without a bar")
    a, theta = params.a, params.theta
    spec = triangular(params.period, a, 1 - a, 1 - a, theta, 0 * a)
    imm = [0 * a] * params.period
    imm[params.period - 1] = theta
    return with_white_immigration(spec, imm)


def table_count_pmf(params: CrpParams, N: int) -> Pmf:
    """Exact distribution of the number of tables after N customers."""
    spec = table_count_urn(params)
    pmf = exact_pmf_dp(spec, N)
    n = N // params.period
    shift = (n + 1) * params.theta
    return pmf.map_support(lambda w: (w - shift) / params.a)

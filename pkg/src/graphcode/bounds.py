"""Closed-form bounds, repetition counts and feasibility conditions.

Logarithms are natural throughout; entropies are in bits and appear only in
the cut-set constant.  Code rates are message bits per channel use and the
random coding exponent is evaluated at the matching rate in nats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from .channels import ChannelKind
from .codes import exponent_at_code_rate
from .graphs import ceil_int

ERASURE_SPREAD = 2.0 / (1.0 - 1.0 / math.e) + 1.0


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: float
    flags: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    derived: dict = field(default_factory=dict)
    log_value: float | None = None

    @property
    def applicable(self) -> bool:
        return all(self.flags.values())


def binary_entropy(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def _ln_n(n: float) -> float:
    return math.log(n) if n > 1 else 0.0


# ------------------------------------------------------ repetition counts

def gc3_repetitions(n: int, c: float, p_ch: float, epsilon: float) -> int:
    """Step-one repetitions so that one neighbour bit is lost w.p. <= p_ch/(c ln N)."""
    if epsilon <= 0:
        return 1
    target = c * _ln_n(n) / p_ch
    if target <= 1:
        return 1
    return max(1, ceil_int(math.log(target) / math.log(1 / epsilon)))


def gc2_repetitions(n: int, rho: float, p_ch: float, epsilon: float) -> int:
    """Local-phase repetitions so that majority decoding fails w.p. <= p_ch/(2 rho ln N)."""
    if epsilon <= 0:
        return 1
    spread = 4 * epsilon * (1 - epsilon)
    if spread >= 1:
        raise ValueError("majority repetition cannot help at crossover 1/2")
    target = 2 * rho * _ln_n(n) / p_ch
    if target <= 1:
        return 1
    return max(1, ceil_int(2 * math.log(target) / math.log(1 / spread)))


def repetition_bound(epsilon: float, j: int) -> float:
    return (4 * epsilon * (1 - epsilon)) ** (j / 2)


# ----------------------------------------------------------- lower bounds

def cutset_lower_bsc(n: int, dbar: float, pe: float, epsilon: float) -> float:
    return (1 - binary_entropy(pe)) / (1 - binary_entropy(epsilon)) * dbar * n


def cutset_lower_bec(n: int, dbar: float, pe: float, epsilon: float) -> float:
    return (1 - binary_entropy(pe)) / (1 - epsilon) * dbar * n


def cutset_lower(n, dbar, pe, epsilon, kind) -> float:
    if ChannelKind(kind) is ChannelKind.BSC:
        return cutset_lower_bsc(n, dbar, pe, epsilon)
    return cutset_lower_bec(n, dbar, pe, epsilon)


def goyal_identity_check(beta: float, n: int, pe: float, epsilon: float) -> BoundReport:
    """Whether ``beta`` broadcasts per node is ruled out at this N and Pe."""
    rhs = math.sqrt(1 / n) + 48 * beta ** 2 * math.log(1 / epsilon) / (epsilon ** (4 * beta) * math.log(n))
    return BoundReport("goyal_identity", rhs, {"inequality_holds": 1 - pe < rhs},
                       {"beta": beta, "N": n, "Pe": pe, "epsilon": epsilon})


def _loglog_term(pe: float) -> float:
    # ln ln(1/(1-Pe)); -inf when Pe == 0, +inf when Pe == 1
    if pe <= 0:
        return -math.inf
    if pe >= 1:
        return math.inf
    return math.log(-math.log1p(-pe))


def constant_degree_lower(n: int, degree: float, delta: float, epsilon: float) -> float:
    if epsilon <= 0:
        return 0.0
    val = (n / degree) * (math.log(n) - _loglog_term(delta)) / math.log(1 / epsilon)
    return max(val, 0.0)


def edge_lower_bound(n: int, pe: float, epsilon: float, c: float, p_ch: float) -> float:
    """Minimum total out-degree implied by the erasure density bound."""
    if epsilon <= 0:
        return 0.0
    t = gc3_repetitions(n, c, p_ch, epsilon)
    rhs = n * (math.log(n) - _loglog_term(pe)) / math.log(1 / epsilon)
    return max((rhs - n) / t, 0.0)


def erasure_density_lower(degrees, n: int, pe: float, epsilon: float) -> BoundReport:
    d = np.asarray(degrees, dtype=float)
    if epsilon <= 0:
        lhs, rhs = float(d.sum()), 0.0
    else:
        pos = d[d > 0]
        lhs = float(np.sum(pos * np.ceil(1 + np.log(pos) / math.log(1 / epsilon) - 1e-9)))
        rhs = n * (math.log(n) - _loglog_term(pe)) / math.log(1 / epsilon)
    return BoundReport("erasure_density", rhs, {"satisfied": lhs > rhs},
                       {"N": n, "Pe": pe, "epsilon": epsilon}, {"lhs": lhs, "rhs": rhs})


# --------------------------------------------------------------- GC-1

def gc1_count_upper(n: int, dbar: float, gamma: float, rate: float) -> float:
    return n * (dbar / rate + 1) + n * (gamma * math.log(n) / rate + 1)


def gc1_error_upper(n: int, gamma: float, rate: float, epsilon: float,
                    kind=ChannelKind.BSC) -> BoundReport:
    e = exponent_at_code_rate(epsilon, rate, kind)
    slope = gamma * e / rate - 1
    log_value = -slope * math.log(n) + math.log1p(math.exp(-e / rate))
    return BoundReport("gc1_error", math.exp(log_value), {"rate_below_gamma_exponent": rate < gamma * e},
                       {"N": n, "gamma": gamma, "R": rate, "epsilon": epsilon},
                       {"exponent": e}, log_value)


# --------------------------------------------------------------- GC-2

def cells_bound(n: int, cg: float) -> float:
    return (math.sqrt(2 * n / (cg * math.log(n))) + 1) ** 2


def gc2_local_error_upper(n: int, rho: float, p_ch: float, epsilon: float, cg: float,
                          kind=ChannelKind.BSC) -> BoundReport:
    e = exponent_at_code_rate(epsilon + p_ch, 0.5, kind)
    lead = n / (rho * math.log(n)) + cells_bound(n, cg)
    log_value = -4 * rho * e * math.log(n) + math.log(lead)
    return BoundReport("gc2_local_error", math.exp(log_value), {"exponent_above_one": 4 * rho * e > 1},
                       {"N": n, "rho": rho, "p_ch": p_ch, "epsilon": epsilon, "cg": cg},
                       {"exponent": e}, log_value)


def gc2_counts(n: int, rho: float, p_ch: float, epsilon: float, cg: float, dbar: float,
               rate: float) -> tuple[float, float]:
    """Upper estimates of the (local, routing) broadcast counts.

    The routing term carries the code rate and the per-block rounding, which
    reduce to the unit-rate form when R = 1 and blocks are long.
    """
    j = gc2_repetitions(n, rho, p_ch, epsilon)
    block = ceil_int(rho * math.log(n))
    cells = cells_bound(n, cg)
    local = (j + 2) * (n + 2 * rho * math.log(n) * cells)
    routing = 3 * dbar * n * (1 / rate + 1 / block) + 3 * (block / rate + 1) * cells
    return local, routing


def gc2_routing_error_upper(n: int, rho: float, rate: float, epsilon: float, b: int,
                            kind=ChannelKind.BSC) -> BoundReport:
    e = exponent_at_code_rate(epsilon, rate, kind)
    lead = 6 * b * (n / (rho * math.log(n)) + b * b)
    log_value = math.log(lead) - (rho / rate) * e * math.log(n)
    return BoundReport("gc2_routing_error", math.exp(log_value),
                       {"exponent_above_three_halves": (rho / rate) * e > 1.5},
                       {"N": n, "rho": rho, "R": rate, "epsilon": epsilon, "B": b},
                       {"exponent": e}, log_value)


# --------------------------------------------------------------- GC-3

def effective_erasure(p_ch: float, epsilon: float) -> float:
    return ERASURE_SPREAD * p_ch + epsilon


def _log_base_terms(n: int, p: float, eps0: float, k: np.ndarray) -> np.ndarray:
    """log of eps0 + (1 - eps0) * (1 + (1 - 2p)^k) / 2 for each k."""
    q = 1 - 2 * p
    if q > 0:
        one_minus_qk = -np.expm1(k * math.log(q))
    elif q == 0:
        one_minus_qk = np.ones_like(k, dtype=float)
    else:
        # alternating sign of (1-2p)^k
        one_minus_qk = 1 - np.where(k % 2 == 0, 1.0, -1.0) * np.exp(k * math.log(-q))
    drop = (1 - eps0) * one_minus_qk / 2
    with np.errstate(divide="ignore"):
        return np.log1p(-drop)


def gc3_error_upper_sum(n: int, c: float, p_ch: float, epsilon: float) -> BoundReport:
    p = c * math.log(n) / n
    eps0 = effective_erasure(p_ch, epsilon)
    flags = {"c_log_n_above_one": c * math.log(n) > 1, "edge_probability_valid": p <= 1}
    inputs = {"N": n, "c": c, "p_ch": p_ch, "epsilon": epsilon}
    if p > 1:
        return BoundReport("gc3_sum", math.nan, flags, inputs, {"eps0": eps0, "p": p}, math.nan)
    if epsilon <= 0:
        return BoundReport("gc3_sum", 0.0, flags, inputs, {"eps0": eps0}, -math.inf)
    k = np.arange(1, n + 1, dtype=float)
    log_binom = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    terms = log_binom + k * math.log(epsilon) + n * _log_base_terms(n, p, eps0, k)
    log_value = float(logsumexp(terms))
    return BoundReport("gc3_sum", math.exp(log_value), flags, inputs,
                       {"eps0": eps0, "p": p}, log_value)


def gc3_closed_parts(c: float, p_ch: float, epsilon: float, delta: float) -> dict:
    eps0 = effective_erasure(p_ch, epsilon)
    b = 0.5 * (1 - eps0) * (1 - (1 - math.exp(-2 * c * delta)) / 2)
    slope = c * (1 - eps0) * (1 - c * delta)
    return {"eps0": eps0, "b_delta": b, "exponent": 2 - slope, "slope": slope}


def gc3_error_upper_closed(n: int, c: float, p_ch: float, epsilon: float,
                           delta: float) -> BoundReport:
    parts = gc3_closed_parts(c, p_ch, epsilon, delta)
    b = parts["b_delta"]
    first = n * math.log1p(-b) if b < 1 else -math.inf
    second = (math.log(delta * math.e * epsilon) + parts["exponent"] * math.log(n)
              - math.log(math.log(n))) if epsilon > 0 else -math.inf
    log_value = float(np.logaddexp(first, second))
    flags = {"epsilon_below_b_delta": epsilon < b,
             "exponent_condition": 2 < parts["slope"],
             "c_log_n_above_one": c * math.log(n) > 1,
             "edge_probability_valid": c * math.log(n) <= n}
    return BoundReport("gc3_closed", math.exp(log_value), flags,
                       {"N": n, "c": c, "p_ch": p_ch, "epsilon": epsilon, "delta": delta},
                       parts, log_value)


def gc3_closed_dominates_sum(n: int, c: float, p_ch: float, epsilon: float,
                             delta: float) -> BoundReport:
    closed = gc3_error_upper_closed(n, c, p_ch, epsilon, delta)
    total = gc3_error_upper_sum(n, c, p_ch, epsilon)
    flags = {**closed.flags, **total.flags}
    holds = total.log_value <= closed.log_value
    return BoundReport("gc3_dominance", closed.value - total.value, flags, closed.inputs,
                       {"sum": total.value, "closed": closed.value, "dominates": holds})


def best_feasible_delta(n: int, c: float, p_ch: float, epsilon: float,
                        grid=None) -> BoundReport | None:
    """Smallest feasible closed-form bound over a grid of delta values."""
    if grid is None:
        grid = np.geomspace(1e-4, 0.5 / c, 200)
    best = None
    for delta in grid:
        rep = gc3_error_upper_closed(n, c, p_ch, epsilon, float(delta))
        if rep.applicable and (best is None or rep.log_value < best.log_value):
            best = rep
    return best

"""Adjacency-parity code on extended Erdos-Renyi graphs with erasure decoding."""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from ..bounds import gc3_repetitions
from ..channels import ChannelKind, TrialRng
from ..gf2 import ERASED, Outcome, mat_vec_mul, solve_systematic_sparse, sparse_parity
from ..graphs import Network, _bernoulli_positions, er_probability
from .common import SchemeConfig, SchemeResult, bit_positions, check_message


def _links(net: Network) -> tuple[np.ndarray, np.ndarray]:
    """(source position, destination position) of links among non-sink nodes, self-loops included."""
    pos = bit_positions(net)
    if not len(net.edges):
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    u, v = pos[net.edges[:, 0]], pos[net.edges[:, 1]]
    keep = (u >= 0) & (v >= 0)
    return u[keep], v[keep]


def _decode(k: int, src, dst, received):
    sol = solve_systematic_sparse(k, src, dst, received)
    if sol.outcome is Outcome.UNIQUE:
        return sol.x, None
    return None, sol.outcome.value


def _missing_sink_links(net: Network) -> np.ndarray:
    linked = np.zeros(net.size, dtype=bool)
    if len(net.edges):
        linked[net.edges[net.edges[:, 1] == net.sink, 0]] = True
    return net.nonsink[~linked[net.nonsink]]


def run_gc3(net: Network, x, cfg: SchemeConfig, rng: TrialRng) -> SchemeResult:
    x = check_message(net, x)
    if cfg.kind is not ChannelKind.BEC:
        raise ValueError("GC-3 is defined over erasure channels")
    n = net.n
    eps = cfg.epsilon
    t = gc3_repetitions(n, cfg.er_density, cfg.p_ch, eps)
    no_link = _missing_sink_links(net)
    if no_link.size:
        raise ValueError(f"nodes without a sink link: {no_link[:10].tolist()}")

    src, dst = _links(net)
    inner = src != dst
    # step 1: a neighbour's bit is missing only if all t copies were erased;
    # a node's own bit is always known to itself
    lost = rng.for_purpose("gc3-local").random(int(inner.sum())) < eps ** t
    parity_lost = np.zeros(n, dtype=bool)
    parity_lost[dst[inner][lost]] = True
    parity = sparse_parity(n, src, dst, x)

    # step 2: own bit and local parity over the sink link
    link = rng.for_purpose("gc3-sink").random(2 * n) < eps
    received = np.concatenate([x, parity])
    received[np.concatenate([np.zeros(n, bool), parity_lost]) | link] = ERASED
    estimate, failure = _decode(n, src, dst, received)

    counts = np.zeros(net.size, dtype=np.int64)
    counts[net.nonsink] = t + 2
    phases = {"local": n * t, "sink": 2 * n}
    extras = {"t": t, "links": int(inner.sum()), "lost_links": int(lost.sum()),
              "out_degree": np.bincount(src[inner], minlength=n)}
    return SchemeResult(estimate, counts, phases, failure, extras)


def sample_er_adjacency(n: int, c: float, rng: np.random.Generator) -> np.ndarray:
    p = er_probability(n, c)
    if p > 1:
        raise ValueError(f"edge probability {p:.4g} exceeds 1")
    a = np.zeros(n * n, dtype=np.uint8)
    a[_bernoulli_positions(n * n, p, rng)] = 1
    return a.reshape(n, n)


def run_p2p_erasure(n: int, c: float, x, epsilon: float, rng: TrialRng) -> SchemeResult:
    """Sparse systematic code [I | A] with A from a directed ER graph, over a BEC."""
    x = np.asarray(x, dtype=np.uint8)
    if x.shape != (n,):
        raise ValueError("message length must equal the code dimension")
    p = er_probability(n, c)
    if p > 1:
        raise ValueError(f"edge probability {p:.4g} exceeds 1")
    src, dst = np.divmod(_bernoulli_positions(n * n, p, rng.for_purpose("p2p-code")), n)
    word = np.concatenate([x, sparse_parity(n, src, dst, x)])
    word[rng.for_purpose("p2p-channel").random(2 * n) < epsilon] = ERASED
    estimate, failure = _decode(n, src, dst, word)
    ones = int(src.size)
    counts = np.full(n, 2, dtype=np.int64)
    return SchemeResult(estimate, counts, {"channel": 2 * n}, failure,
                        {"ones": ones, "sparse": ones <= 2 * p * n * n, "src": src, "dst": dst})


# ------------------------------------------------ exact confusion analysis

def erasure_masks(adjacency: np.ndarray, epsilon: Fraction, t: int) -> dict[int, Fraction]:
    """Exact law of the set of erased sink positions, by brute force.

    Enumerates every outcome of the primitive erasure events (one per
    neighbour link in step one, one per sink-link use in step two) and
    accumulates the probability of the induced erased-position bitmask.
    Bit i of a mask is position i of the received word ``[x, y]``.
    """
    a = np.asarray(adjacency, dtype=np.uint8)
    n = a.shape[0]
    links = [(m, k) for m in range(n) for k in range(n) if m != k and a[m, k]]
    q = epsilon ** t
    events = [(q, ("link", k)) for _, k in links] + [(epsilon, ("pos", i)) for i in range(2 * n)]
    law: dict[int, Fraction] = {}
    for outcome in itertools.product((False, True), repeat=len(events)):
        prob = Fraction(1)
        mask = 0
        for happened, (pr, (kind, idx)) in zip(outcome, events):
            prob *= pr if happened else 1 - pr
            if happened:
                mask |= 1 << (n + idx if kind == "link" else idx)
        law[mask] = law.get(mask, Fraction(0)) + prob
    return law


def confusion_probability(adjacency, x_true, x_alt, law: dict[int, Fraction]) -> Fraction:
    """Probability that ``x_alt`` is consistent with what the sink receives from ``x_true``."""
    a = np.asarray(adjacency, dtype=np.uint8)
    n = a.shape[0]
    g = np.concatenate([np.eye(n, dtype=np.uint8), a], axis=1)
    sent = mat_vec_mul(g, np.asarray(x_true, np.uint8)).tolist()
    other = mat_vec_mul(g, np.asarray(x_alt, np.uint8)).tolist()
    total = Fraction(0)
    for mask, p in law.items():
        if all(sent[i] == other[i] for i in range(2 * n) if not mask >> i & 1):
            total += p
    return total

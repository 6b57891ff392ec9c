"""Tree relaying with block codes over the sink-rooted BFS tree."""
from __future__ import annotations

import math

import numpy as np

from ..channels import ChannelKind, TrialRng, noisy_link
from ..codes import CapabilityError, CodeBook, codeword_length
from ..graphs import BfsLayering, Network, ceil_int
from .common import SchemeConfig, SchemeResult, bit_positions, check_message


def gc1_lengths(net: Network, layering: BfsLayering, gamma: float, rate: float):
    """Per-node (message bits, payload bits, codeword length).

    Nodes with fewer than gamma*ln(N) descendants pad up to ceil(gamma*ln N)
    bits; the others carry exactly their own subtree.
    """
    threshold = gamma * math.log(net.n) if net.n > 1 else 0.0
    padded = max(1, ceil_int(threshold))
    out = {}
    for v in net.nonsink.tolist():
        payload = int(layering.desc_count[v]) + 1
        k = padded if layering.desc_count[v] < threshold else payload
        out[v] = (k, payload, codeword_length(k, rate))
    return out


def run_gc1(net: Network, layering: BfsLayering, x, cfg: SchemeConfig, rng: TrialRng,
            codebook: CodeBook | None = None) -> SchemeResult:
    x = check_message(net, x)
    pos = bit_positions(net)
    lengths = gc1_lengths(net, layering, cfg.gamma, cfg.rate)
    padded = max((k for k, p, _ in lengths.values() if k > p), default=0)
    if padded > cfg.k_max:
        raise CapabilityError(f"padded block of {padded} bits exceeds K_MAX={cfg.k_max}; "
                              "lower gamma or N")
    if codebook is None:
        codebook = CodeBook(cfg.rate, int(rng.for_purpose("codes").integers(2 ** 63)), cfg.k_max)

    counts = np.zeros(net.size, dtype=np.int64)
    sent_ids: dict[int, np.ndarray] = {}
    sent_bits: dict[int, np.ndarray] = {}
    for v in layering.post_order():
        kids = layering.children[v]
        ids = np.concatenate([[v]] + [sent_ids[c] for c in kids]).astype(np.int64)
        bits = np.concatenate([[x[pos[v]]]] + [sent_bits[c] for c in kids]).astype(np.uint8)
        rest = np.argsort(ids[1:], kind="stable") + 1
        order = np.concatenate([[0], rest])
        ids, bits = ids[order], bits[order]
        k, payload, n = lengths[v]
        message = np.zeros(k, dtype=np.uint8)
        message[:payload] = bits
        word = codebook.encode(message, n)
        parent = int(layering.parent[v])
        heard = noisy_link(cfg.channel, word, rng.for_node(parent))
        decoded = codebook.decode(heard, k, known_zero_tail=k - payload)
        sent_ids[v], sent_bits[v] = ids, decoded[:payload]
        counts[v] = n

    estimate = np.zeros(net.n, dtype=np.uint8)
    for c in layering.children[net.sink]:
        estimate[pos[sent_ids[c]]] = sent_bits[c]
    return SchemeResult(estimate, counts, {"relay": int(counts.sum())})


def run_gc1_bec(net, layering, x, cfg: SchemeConfig, rng: TrialRng, codebook=None) -> SchemeResult:
    if cfg.kind is not ChannelKind.BEC:
        raise ValueError("the erasure variant needs a BEC channel")
    return run_gc1(net, layering, x, cfg, rng, codebook)

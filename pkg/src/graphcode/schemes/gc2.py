"""Cell-partitioned local codes followed by backbone routing (geometric nets)."""
from __future__ import annotations

import math

import numpy as np

from ..bounds import gc2_repetitions
from ..channels import (ChannelKind, TrialRng, equivalent_crossover, noisy_link,
                        repeat_erasure, repeat_majority)
from ..codes import CapabilityError, CodeBook, build_gc2_generator, codeword_length, ml_decode_bsc
from ..gf2 import ERASED
from ..graphs import Backbone, CellPartition, Network, backbone, bfs_layering, ceil_int, tessellate
from .common import SchemeConfig, SchemeResult, bit_positions, check_message


def block_size(n: int, rho: float) -> int:
    return max(1, ceil_int(rho * math.log(n)))


def _split_blocks(bits: np.ndarray, size: int) -> list[np.ndarray]:
    nblocks = max(1, -(-len(bits) // size))
    padded = np.zeros(nblocks * size, dtype=np.uint8)
    padded[:len(bits)] = bits
    return [padded[i * size:(i + 1) * size] for i in range(nblocks)]


def _route_tree(bb: Backbone):
    tree = bfs_layering(bb.network)
    return tree, tree.post_order()


def gc2_audit(net: Network, partition: CellPartition, bb: Backbone, j: int, rho: float,
              rate: float) -> dict:
    """Closed-form per-phase counts for a given partition and backbone."""
    local = (j + 2) * sum(len(g) for g in partition.groups)
    cell_bits = {}
    for v in net.nonsink.tolist():
        c = int(partition.cell_of[v])
        cell_bits[c] = cell_bits.get(c, 0) + 1
    tree, order = _route_tree(bb)
    size = block_size(net.n, rho)
    carried = {}
    routing = 0
    for i in order:
        own = cell_bits.get(int(bb.cells[i]), 0)
        carried[i] = own + sum(carried[c] for c in tree.children[i])
        nblocks = max(1, -(-carried[i] // size))
        routing += bb.hops(i, int(tree.parent[i])) * nblocks * codeword_length(size, rate)
    return {"local": local, "routing": routing}


def run_gc2(net: Network, x, cfg: SchemeConfig, rng: TrialRng, codebook: CodeBook | None = None,
            partition: CellPartition | None = None) -> SchemeResult:
    x = check_message(net, x)
    if net.coords is None:
        raise ValueError("GC-2 needs a geometric network")
    pos = bit_positions(net)
    layering = bfs_layering(net)
    if partition is None:
        partition = tessellate(net, None, cfg.group_density, layering)
    largest = max(len(g) for g in partition.groups)
    size = block_size(net.n, cfg.group_density)
    if max(largest, size) > cfg.k_max:
        raise CapabilityError(f"group of {max(largest, size)} bits exceeds K_MAX={cfg.k_max}; "
                              "lower the group density")
    gen = build_gc2_generator(partition, rng.for_purpose("gc2-blocks"))
    bb = backbone(net, partition, layering)
    if codebook is None:
        codebook = CodeBook(cfg.rate, int(rng.for_purpose("codes").integers(2 ** 63)), cfg.k_max)
    channel = cfg.channel
    erasure = channel.kind is ChannelKind.BEC
    j = gc2_repetitions(net.n, cfg.group_density, cfg.p_ch, equivalent_crossover(channel))

    counts = np.zeros(net.size, dtype=np.int64)
    head_view: dict[int, dict[int, int]] = {}
    for g, slots in enumerate(partition.groups):
        phys = partition.physical_group(g)
        truth = x[pos[phys]]
        block = gen.blocks[g]
        head = int(partition.heads[partition.group_cell[g]])
        code_bits = np.zeros(len(slots), dtype=np.uint8)
        for q in np.unique(phys).tolist():
            noise = rng.for_node(q)
            if erasure:
                seen = repeat_erasure(channel, truth, j, noise)
            else:
                seen = repeat_majority(channel, truth, j, noise)
            seen = np.where(phys == q, truth, seen)
            for slot in np.flatnonzero(phys == q):
                need = block[:, slot].astype(bool)
                if np.any(seen[need] == ERASED):
                    code_bits[slot] = noise.random() < 0.5
                else:
                    code_bits[slot] = int(seen[need].sum()) & 1
        np.add.at(counts, phys, j + 2)
        word = np.concatenate([truth, code_bits])
        remote = np.concatenate([phys != head, phys != head])
        heard = word.copy()
        heard[remote] = noisy_link(channel, word[remote], rng.for_node(head))
        decoded = ml_decode_bsc(gen.block_code(g), heard)
        view = head_view.setdefault(head, {})
        # a physical node with several dummies is read by majority of its copies
        for v in np.unique(phys).tolist():
            copies = decoded[phys == v]
            ones = int(copies.sum())
            view[v] = int(copies[0]) if 2 * ones == len(copies) else int(2 * ones > len(copies))
    local = int(counts.sum())

    tree, order = _route_tree(bb)
    held: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    code = codebook.code(size, codeword_length(size, cfg.rate))
    for i in order:
        head = int(bb.heads[i])
        view = head_view.get(head, {})
        ids = [np.array(sorted(view), dtype=np.int64)]
        bits = [np.array([view[v] for v in sorted(view)], dtype=np.uint8)]
        for c in tree.children[i]:
            ids.append(held[c][0])
            bits.append(held[c][1])
        ids_all, bits_all = np.concatenate(ids), np.concatenate(bits)
        blocks = _split_blocks(bits_all, size)
        tail = len(blocks) * size - len(bits_all)
        path = bb.paths[(i, int(tree.parent[i]))]
        out = []
        for b_index, blk in enumerate(blocks):
            pad = tail if b_index == len(blocks) - 1 else 0
            for sender, receiver in zip(path[:-1], path[1:]):
                heard = noisy_link(channel, code.encode(blk), rng.for_node(receiver))
                counts[sender] += code.n
                blk = ml_decode_bsc(code, heard, pad)
            out.append(blk)
        held[i] = (ids_all, np.concatenate(out)[:len(bits_all)])

    estimate = np.zeros(net.n, dtype=np.uint8)
    sink_index = bb.network.sink
    sink_view = head_view.get(int(bb.heads[sink_index]), {})
    for v, b in sink_view.items():
        estimate[pos[v]] = b
    for c in tree.children[sink_index]:
        estimate[pos[held[c][0]]] = held[c][1]
    routing = int(counts.sum()) - local
    return SchemeResult(estimate, counts, {"local": local, "routing": routing},
                        extras={"j": j, "cells": partition.b ** 2, "groups": len(partition.groups)})


def run_gc2_bec(net, x, cfg: SchemeConfig, rng: TrialRng, codebook=None, partition=None) -> SchemeResult:
    if cfg.kind is not ChannelKind.BEC:
        raise ValueError("the erasure variant needs a BEC channel")
    return run_gc2(net, x, cfg, rng, codebook, partition)

"""Random systematic block codes, the graph-code generator families and the
random coding exponent."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import minimize_scalar

from . import gf2
from .channels import ChannelKind
from .graphs import CellPartition, Network, ceil_int

K_MAX = 16
LN2 = math.log(2.0)


class CapabilityError(RuntimeError):
    pass


class CapacityWarning(RuntimeWarning):
    pass


# --------------------------------------------------------------- exponents

def _h2_nats(eps: float) -> float:
    if eps <= 0 or eps >= 1:
        return 0.0
    return -eps * math.log(eps) - (1 - eps) * math.log(1 - eps)


def capacity_nats(epsilon: float, kind=ChannelKind.BSC) -> float:
    kind = ChannelKind(kind)
    if kind is ChannelKind.BSC:
        return LN2 - _h2_nats(epsilon)
    return LN2 * (1 - epsilon)


def gallager_e0(gallager_rho: float, epsilon: float, kind=ChannelKind.BSC) -> float:
    kind = ChannelKind(kind)
    s = gallager_rho
    if kind is ChannelKind.BSC:
        a = 1.0 / (1.0 + s)
        mix = (epsilon ** a if epsilon > 0 else 0.0) + (1 - epsilon) ** a
        return s * LN2 - (1 + s) * math.log(mix)
    return -math.log(epsilon + (1 - epsilon) * 2.0 ** (-s))


def random_coding_exponent(epsilon: float, rate_nats: float, kind=ChannelKind.BSC) -> float:
    """max over the Gallager parameter in [0, 1] of E0 - rho * R, in nats."""
    kind = ChannelKind(kind)
    if kind is ChannelKind.BSC and epsilon >= 0.5:
        return 0.0
    if rate_nats >= capacity_nats(epsilon, kind):
        warnings.warn(f"rate {rate_nats:.4g} nats is not below capacity; exponent is 0",
                      CapacityWarning, stacklevel=2)
        return 0.0

    def objective(s):
        return -(gallager_e0(s, epsilon, kind) - s * rate_nats)

    res = minimize_scalar(objective, bounds=(0.0, 1.0), method="bounded",
                          options={"xatol": 1e-12})
    best = max(-res.fun, -objective(0.0), -objective(1.0))
    return max(best, 0.0)


def exponent_at_code_rate(epsilon: float, rate: float, kind=ChannelKind.BSC) -> float:
    """Exponent for a code of rate ``rate`` message bits per channel use."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CapacityWarning)
        return random_coding_exponent(epsilon, rate * LN2, kind)


# ----------------------------------------------------------- block codes

def codeword_length(k: int, rate: float) -> int:
    return ceil_int(k / rate)


def _message_table(k: int) -> np.ndarray:
    # row i is message i with the first bit most significant, so row order
    # is lexicographic order of messages
    idx = np.arange(2 ** k, dtype=np.int64)
    return ((idx[:, None] >> np.arange(k - 1, -1, -1)[None, :]) & 1).astype(np.uint8)


def _pack(bits: np.ndarray) -> np.ndarray:
    """Pack the last axis into little-endian uint64 words."""
    n = bits.shape[-1]
    words = -(-n // 64)
    padded = np.zeros(bits.shape[:-1] + (words * 64,), dtype=np.uint8)
    padded[..., :n] = bits
    return np.packbits(padded, axis=-1, bitorder="little").view("<u8")


@dataclass(frozen=True, eq=False)
class SystematicCode:
    """Binary linear code with generator ``[I_K | P]``."""

    parity: np.ndarray
    rate: float = float("nan")

    @property
    def k(self) -> int:
        return self.parity.shape[0]

    @property
    def n(self) -> int:
        return self.parity.shape[0] + self.parity.shape[1]

    @cached_property
    def generator(self) -> np.ndarray:
        return np.concatenate([gf2.identity(self.k), self.parity], axis=1)

    def encode(self, message) -> np.ndarray:
        return gf2.mat_vec_mul(self.generator, message)

    @cached_property
    def codebook(self) -> np.ndarray:
        """Packed codewords of every message in lexicographic order."""
        if self.k > K_MAX:
            raise CapabilityError(f"exhaustive decoding of K={self.k} exceeds K_MAX={K_MAX}; "
                                  "use a shorter block")
        msgs = _message_table(self.k)
        words = (msgs.astype(np.float32) @ self.generator.astype(np.float32)).astype(np.int64) & 1
        return _pack(words.astype(np.uint8))


RandomSystematicCode = SystematicCode


def sample_random_code(k: int, rate: float, rng: np.random.Generator) -> SystematicCode:
    if not 0 < rate <= 1:
        raise ValueError("rate must lie in (0, 1]")
    if k < 1:
        raise ValueError("message length must be positive")
    n = codeword_length(k, rate)
    parity = rng.integers(0, 2, size=(k, n - k), dtype=np.uint8)
    return SystematicCode(parity, rate)


def ml_decode_bsc(code: SystematicCode, received, fixed_zero_tail: int = 0) -> np.ndarray:
    """Minimum Hamming distance decoding by exhaustive search.

    ``fixed_zero_tail`` restricts the search to messages whose last bits are
    known to be zero padding.  Ties go to the lexicographically smallest
    message.
    """
    if code.k > K_MAX:
        raise CapabilityError(f"exhaustive decoding of K={code.k} exceeds K_MAX={K_MAX}; "
                              "use a shorter block")
    received = np.asarray(received, dtype=np.uint8)
    if received.shape != (code.n,):
        raise gf2.DimensionError(f"received length {received.shape} != {code.n}")
    book = code.codebook[::2 ** fixed_zero_tail]
    dist = np.bitwise_count(book ^ _pack(received)[None, :]).sum(axis=1)
    best = int(np.argmin(dist)) << fixed_zero_tail
    return ((best >> np.arange(code.k - 1, -1, -1)) & 1).astype(np.uint8)


def erasure_decode(code_or_generator, received) -> gf2.Solution:
    g = code_or_generator.generator if hasattr(code_or_generator, "generator") else code_or_generator
    return gf2.solve_with_erasures(g, received)


class CodeBook:
    """Lazily sampled random codes shared by every node of one scheme instance.

    Messages longer than ``K_MAX`` are cut into near-equal blocks, each with
    its own sampled code; block lengths are apportioned so the total codeword
    length is still ``ceil(K / R)``.
    """

    def __init__(self, rate: float, seed: int, k_max: int = K_MAX):
        self.rate = rate
        self.seed = seed
        self.k_max = k_max
        self._codes: dict[tuple[int, int], SystematicCode] = {}

    def code(self, k: int, n: int) -> SystematicCode:
        key = (k, n)
        if key not in self._codes:
            # keyed by shape, so the code does not depend on the order of use
            rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(k, n)))
            parity = rng.integers(0, 2, size=(k, n - k), dtype=np.uint8)
            self._codes[key] = SystematicCode(parity, self.rate)
        return self._codes[key]

    def layout(self, k: int, n: int | None = None) -> list[tuple[int, int]]:
        if n is None:
            n = codeword_length(k, self.rate)
        nblocks = -(-k // self.k_max)
        base, extra = divmod(k, nblocks)
        sizes = [base + (1 if i < extra else 0) for i in range(nblocks)]
        out, done_k, done_n = [], 0, 0
        for i, size in enumerate(sizes):
            done_k += size
            end = n if i == nblocks - 1 else ceil_int(done_k / self.rate)
            out.append((size, end - done_n))
            done_n = end
        return out

    def encode(self, message: np.ndarray, n: int | None = None) -> np.ndarray:
        parts, pos = [], 0
        for size, length in self.layout(len(message), n):
            parts.append(self.code(size, length).encode(message[pos:pos + size]))
            pos += size
        return np.concatenate(parts)

    def decode(self, received: np.ndarray, k: int, known_zero_tail: int = 0) -> np.ndarray:
        layout = self.layout(k, len(received))
        parts, pos, start = [], 0, 0
        for size, length in layout:
            # zero padding only ever lives in the final block
            tail = known_zero_tail if start + size == k else 0
            tail = min(tail, size)
            parts.append(ml_decode_bsc(self.code(size, length), received[pos:pos + length], tail))
            pos += length
            start += size
        return np.concatenate(parts)


# ---------------------------------------------------------- graph codes

@dataclass(frozen=True, eq=False)
class Gc2Generator:
    blocks: list

    @cached_property
    def atilde(self) -> np.ndarray:
        size = sum(b.shape[0] for b in self.blocks)
        out = np.zeros((size, size), dtype=np.uint8)
        pos = 0
        for b in self.blocks:
            k = b.shape[0]
            out[pos:pos + k, pos:pos + k] = b
            pos += k
        return out

    @cached_property
    def generator(self) -> np.ndarray:
        a = self.atilde
        return np.concatenate([gf2.identity(a.shape[0]), a], axis=1)

    def block_code(self, g: int) -> SystematicCode:
        return SystematicCode(self.blocks[g])


def sample_symmetric(size: int, rng: np.random.Generator) -> np.ndarray:
    upper = np.triu(rng.integers(0, 2, size=(size, size), dtype=np.uint8))
    return upper | np.triu(upper, 1).T


def build_gc2_generator(partition: CellPartition, rng: np.random.Generator) -> Gc2Generator:
    if not partition.groups:
        raise ValueError("partition has no groups")
    return Gc2Generator([sample_symmetric(len(g), rng) for g in partition.groups])


@dataclass(frozen=True, eq=False)
class Gc3Generator:
    adjacency: np.ndarray

    @cached_property
    def generator(self) -> np.ndarray:
        n = self.adjacency.shape[0]
        return np.concatenate([gf2.identity(n), self.adjacency], axis=1)

    @property
    def ones(self) -> int:
        return int(self.adjacency.sum())


def nonsink_adjacency(net: Network) -> np.ndarray:
    """Adjacency among non-sink nodes, rows/cols in ascending non-sink id order."""
    ids = net.nonsink
    pos = np.full(net.size, -1, dtype=np.int64)
    pos[ids] = np.arange(len(ids))
    a = np.zeros((net.n, net.n), dtype=np.uint8)
    if len(net.edges):
        u, v = pos[net.edges[:, 0]], pos[net.edges[:, 1]]
        keep = (u >= 0) & (v >= 0)
        a[u[keep], v[keep]] = 1
    return a


def build_gc3_generator(net: Network) -> Gc3Generator:
    return Gc3Generator(nonsink_adjacency(net))

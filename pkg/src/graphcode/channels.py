"""Binary symmetric / erasure channels and the repetition sub-protocols.

All channel functions accept a scalar bit or an array of bits and return the
same shape.  Repetition protocols draw the sufficient statistic (number of
flips or "all copies lost") directly, which has the same law as simulating
every individual channel use.
"""
from __future__ import annotations

import enum
import zlib
from dataclasses import dataclass, field

import numpy as np

from .gf2 import ERASED


class ChannelKind(str, enum.Enum):
    BSC = "bsc"
    BEC = "bec"


@dataclass(frozen=True)
class ChannelSpec:
    kind: ChannelKind
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "kind", ChannelKind(self.kind))
        eps = float(self.epsilon)
        if not 0.0 <= eps <= 1.0:
            raise ValueError(f"epsilon must be a probability, got {eps}")
        if self.kind is ChannelKind.BSC and eps > 0.5:
            raise ValueError("BSC crossover above 1/2 is not a valid model")
        object.__setattr__(self, "epsilon", eps)

    @classmethod
    def bsc(cls, epsilon: float) -> "ChannelSpec":
        return cls(ChannelKind.BSC, epsilon)

    @classmethod
    def bec(cls, epsilon: float) -> "ChannelSpec":
        return cls(ChannelKind.BEC, epsilon)


@dataclass
class TrialRng:
    """Independent random streams for one Monte Carlo trial.

    A stream is identified by ``(seed, trial, node)`` (or a named purpose in
    place of the node), so a trial reproduces the same noise regardless of
    which worker runs it or in what order.
    """

    seed: int
    trial: int
    _cache: dict = field(default_factory=dict, repr=False)

    def _make(self, kind: int, index: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.trial, kind, index))
        return np.random.Generator(np.random.PCG64(ss))

    def for_node(self, node: int) -> np.random.Generator:
        key = ("node", node)
        if key not in self._cache:
            self._cache[key] = self._make(0, int(node))
        return self._cache[key]

    def for_purpose(self, name: str) -> np.random.Generator:
        key = ("purpose", name)
        if key not in self._cache:
            self._cache[key] = self._make(1, zlib.crc32(name.encode()))
        return self._cache[key]


def _shape_like(bits):
    arr = np.asarray(bits, dtype=np.uint8)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    return int(arr) if scalar else arr


def transmit(spec: ChannelSpec, bits, rng: np.random.Generator):
    arr, scalar = _shape_like(bits)
    hit = rng.random(arr.shape) < spec.epsilon
    if spec.kind is ChannelKind.BSC:
        out = arr ^ hit.astype(np.uint8)
    else:
        out = np.where(hit, np.uint8(ERASED), arr).astype(np.uint8)
    return _out(out, scalar)


def repeat_majority(spec: ChannelSpec, bits, j: int, rng: np.random.Generator):
    """Send each bit ``j`` times over a BSC and take the majority vote."""
    if j < 1:
        raise ValueError("repetition count must be at least 1")
    if spec.kind is not ChannelKind.BSC:
        raise ValueError("majority repetition needs a BSC")
    arr, scalar = _shape_like(bits)
    flips = rng.binomial(j, spec.epsilon, size=arr.shape)
    coin = rng.random(arr.shape) < 0.5
    wrong = (2 * flips > j) | ((2 * flips == j) & coin)
    return _out(arr ^ wrong.astype(np.uint8), scalar)


def repeat_erasure(spec: ChannelSpec, bits, t: int, rng: np.random.Generator):
    """Send each bit ``t`` times over a BEC; erased only if every copy is."""
    if t < 1:
        raise ValueError("repetition count must be at least 1")
    if spec.kind is not ChannelKind.BEC:
        raise ValueError("erasure repetition needs a BEC")
    arr, scalar = _shape_like(bits)
    lost = rng.random(arr.shape) < spec.epsilon ** t
    return _out(np.where(lost, np.uint8(ERASED), arr).astype(np.uint8), scalar)


def bec_as_bsc(spec: ChannelSpec, bits, rng: np.random.Generator):
    """BEC use where an erasure is replaced by a fair coin (a BSC(eps/2))."""
    if spec.kind is not ChannelKind.BEC:
        raise ValueError("conversion applies to a BEC")
    arr, scalar = _shape_like(bits)
    lost = rng.random(arr.shape) < spec.epsilon
    coin = (rng.random(arr.shape) < 0.5).astype(np.uint8)
    return _out(np.where(lost, coin, arr).astype(np.uint8), scalar)


def noisy_link(spec: ChannelSpec, bits, rng: np.random.Generator):
    """A single binary-output link: BSC as is, BEC through the coin conversion."""
    if spec.kind is ChannelKind.BSC:
        return transmit(spec, bits, rng)
    return bec_as_bsc(spec, bits, rng)


def equivalent_crossover(spec: ChannelSpec) -> float:
    return spec.epsilon if spec.kind is ChannelKind.BSC else spec.epsilon / 2

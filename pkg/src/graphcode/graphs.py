"""Network topologies, sink-rooted BFS layering, tessellation and backbone."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

CEIL_SLACK = 1e-9


def ceil_int(value: float) -> int:
    """Ceiling that ignores floating-point dust just above an integer."""
    return int(math.ceil(value - CEIL_SLACK))


class ConnectivityError(ValueError):
    def __init__(self, unreachable, message: str | None = None):
        self.unreachable = frozenset(int(u) for u in unreachable)
        super().__init__(message or f"{len(self.unreachable)} node(s) cannot reach the sink: "
                         f"{sorted(self.unreachable)[:10]}")


class GenerationError(ConnectivityError):
    pass


@dataclass(frozen=True, eq=False)
class Network:
    """Directed graph on node ids ``0..n`` where one id is the sink.

    ``n`` counts the non-sink nodes, so there are ``n + 1`` nodes in total.
    """

    n: int
    sink: int
    edges: np.ndarray
    coords: np.ndarray | None = None
    generator: str = "custom"
    params: dict = field(default_factory=dict)

    @classmethod
    def from_edges(cls, n, sink, edges, coords=None, generator="custom", params=None):
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if e.min() < 0 or e.max() > n:
                raise ValueError("edge endpoint outside the node id range")
            e = np.unique(e, axis=0)
        if coords is not None:
            coords = np.asarray(coords, dtype=float).reshape(n + 1, 2)
        return cls(int(n), int(sink), e, coords, generator, dict(params or {}))

    @property
    def size(self) -> int:
        return self.n + 1

    @cached_property
    def nonsink(self) -> np.ndarray:
        ids = np.arange(self.size)
        return ids[ids != self.sink]

    def _csr(self, key_col: int):
        order = np.lexsort((self.edges[:, 1 - key_col], self.edges[:, key_col])) if len(self.edges) else np.array([], int)
        sorted_edges = self.edges[order] if len(self.edges) else self.edges
        counts = np.bincount(sorted_edges[:, key_col], minlength=self.size) if len(self.edges) else np.zeros(self.size, int)
        indptr = np.concatenate([[0], np.cumsum(counts)])
        return indptr, sorted_edges[:, 1 - key_col] if len(self.edges) else np.array([], np.int64)

    @cached_property
    def _out(self):
        return self._csr(0)

    @cached_property
    def _in(self):
        return self._csr(1)

    def out_neighbors(self, u: int) -> np.ndarray:
        ptr, nbr = self._out
        return nbr[ptr[u]:ptr[u + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        ptr, nbr = self._in
        return nbr[ptr[v]:ptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(np.any(self.out_neighbors(u) == v))

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.size, self.size), dtype=np.uint8)
        if len(self.edges):
            a[self.edges[:, 0], self.edges[:, 1]] = 1
        return a

    def unreachable(self) -> np.ndarray:
        dist = _reverse_bfs_dist(self)
        return np.flatnonzero(dist < 0)

    def is_connected(self) -> bool:
        return self.unreachable().size == 0

    def require_connected(self, error=ConnectivityError):
        bad = self.unreachable()
        if bad.size:
            raise error(bad)


def _reverse_bfs(net: Network):
    """Levels of a BFS toward the sink with lowest-id parent choice."""
    size = net.size
    dist = np.full(size, -1, dtype=np.int64)
    parent = np.full(size, -1, dtype=np.int64)
    dist[net.sink] = 0
    src, dst = (net.edges[:, 0], net.edges[:, 1]) if len(net.edges) else (np.array([], int), np.array([], int))
    frontier = np.zeros(size, dtype=bool)
    frontier[net.sink] = True
    level = 0
    while frontier.any():
        hit = frontier[dst] & (dist[src] < 0)
        if not hit.any():
            break
        s, d = src[hit], dst[hit]
        best = np.full(size, size, dtype=np.int64)
        np.minimum.at(best, s, d)
        newly = np.flatnonzero(best < size)
        level += 1
        dist[newly] = level
        parent[newly] = best[newly]
        frontier = np.zeros(size, dtype=bool)
        frontier[newly] = True
    return dist, parent


def _reverse_bfs_dist(net: Network) -> np.ndarray:
    return _reverse_bfs(net)[0]


@dataclass(frozen=True, eq=False)
class BfsLayering:
    sink: int
    parent: np.ndarray
    dist: np.ndarray
    layers: list
    desc_count: np.ndarray

    @cached_property
    def children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in range(len(self.parent))]
        for v in np.argsort(self.parent, kind="stable"):
            p = self.parent[v]
            if p >= 0:
                kids[p].append(int(v))
        return kids

    @property
    def depth(self) -> int:
        return len(self.layers)

    def descendants(self, v: int) -> np.ndarray:
        out, stack = [], list(self.children[v])
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(self.children[u])
        return np.array(sorted(out), dtype=np.int64)

    def post_order(self) -> list[int]:
        """Children before parents, siblings by ascending id; sink excluded."""
        order: list[int] = []
        stack = [(self.sink, False)]
        while stack:
            v, expanded = stack.pop()
            if expanded:
                if v != self.sink:
                    order.append(v)
                continue
            stack.append((v, True))
            for c in reversed(self.children[v]):
                stack.append((c, False))
        return order


def bfs_layering(net: Network) -> BfsLayering:
    dist, parent = _reverse_bfs(net)
    bad = np.flatnonzero(dist < 0)
    if bad.size:
        raise ConnectivityError(bad)
    depth = int(dist.max()) if net.size else 0
    layers = [np.flatnonzero(dist == level) for level in range(1, depth + 1)]
    desc = np.zeros(net.size, dtype=np.int64)
    for layer in reversed(layers):
        np.add.at(desc, parent[layer], desc[layer] + 1)
    return BfsLayering(net.sink, parent, dist, layers, desc)


def avg_distance(layering: BfsLayering) -> float:
    d = np.delete(layering.dist, layering.sink)
    return float(d.mean()) if d.size else 0.0


# ---------------------------------------------------------------- generators

def gen_complete(n: int) -> Network:
    if n < 1:
        raise ValueError("need at least one non-sink node")
    ids = np.arange(1, n + 1)
    a, b = np.meshgrid(ids, ids, indexing="ij")
    pairs = np.column_stack([a.ravel(), b.ravel()])
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    sink_links = np.concatenate([np.column_stack([ids, np.zeros_like(ids)]),
                                 np.column_stack([np.zeros_like(ids), ids])])
    return Network.from_edges(n, 0, np.concatenate([pairs, sink_links]),
                              generator="complete", params={"n": n})


def _pairs_within(points: np.ndarray, r: float) -> np.ndarray:
    pairs = cKDTree(points).query_pairs(r, output_type="ndarray")
    if len(pairs) == 0:
        return np.zeros((0, 2), dtype=np.int64)
    return np.concatenate([pairs, pairs[:, ::-1]])


def gen_grid(side: int, r: float = 1.0) -> Network:
    """``side x side`` lattice, sink at the (0, 0) corner, links within ``r`` cells."""
    if side < 2:
        raise ValueError("grid side must be at least 2")
    if r < 1:
        raise GenerationError(range(1, side * side), "grid radius below 1 leaves every node isolated")
    rows, cols = np.divmod(np.arange(side * side), side)
    lattice = np.column_stack([cols, rows]).astype(float)
    edges = _pairs_within(lattice, r + CEIL_SLACK)
    net = Network.from_edges(side * side - 1, 0, edges, coords=lattice / (side - 1),
                             generator="grid", params={"side": side, "r": r, "r_unit": r / (side - 1)})
    net.require_connected(GenerationError)
    return net


def _geometric(coords, r: float, generator: str, params: dict) -> Network:
    pts = np.asarray(coords, dtype=float).reshape(-1, 2)
    if np.any(pts < 0) or np.any(pts > 1):
        raise ValueError("coordinates must lie in the unit square")
    if not 0 < r < 1:
        raise ValueError("radius must be in (0, 1)")
    edges = _pairs_within(pts, r)
    return Network.from_edges(len(pts) - 1, 0, edges, coords=pts, generator=generator,
                              params={**params, "r": r})


def gen_geometric(coords, r: float) -> Network:
    """Unit-disk graph on the given points; point 0 is the sink."""
    net = _geometric(coords, r, "geometric", {"n": len(coords) - 1})
    net.require_connected(GenerationError)
    return net


def gen_random_geometric(n: int, r: float, rng: np.random.Generator) -> tuple[Network, bool]:
    pts = rng.random((n + 1, 2))
    net = _geometric(pts, r, "random_geometric", {"n": n})
    return net, net.is_connected()


def er_probability(n: int, c: float) -> float:
    return c * math.log(n) / n if n > 1 else 0.0


def _bernoulli_positions(total: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Indices of successes in ``total`` Bernoulli(p) trials via geometric gaps."""
    if p <= 0 or total == 0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1:
        return np.arange(total, dtype=np.int64)
    chunks, pos = [], -1
    expect = total * p
    batch = int(expect + 6 * math.sqrt(expect) + 16)
    while True:
        gaps = rng.geometric(p, size=batch)
        idx = pos + np.cumsum(gaps)
        if idx[-1] >= total:
            chunks.append(idx[idx < total])
            break
        chunks.append(idx)
        pos = int(idx[-1])
    return np.concatenate(chunks)


def gen_extended_er(n: int, c: float, rng: np.random.Generator) -> Network:
    """Directed ER graph (self-loops allowed) plus a link from every node to the sink."""
    if c <= 0:
        raise ValueError("density constant must be positive")
    p = er_probability(n, c)
    if p > 1 + CEIL_SLACK:
        raise ValueError(f"edge probability {p:.4g} exceeds 1")
    p = min(p, 1.0)
    idx = _bernoulli_positions(n * n, p, rng)
    src, dst = np.divmod(idx, n)
    inner = np.column_stack([src + 1, dst + 1])
    ids = np.arange(1, n + 1)
    sink_links = np.column_stack([ids, np.zeros_like(ids)])
    # positions are distinct and sorted, so the dedup pass of from_edges is skipped
    return Network(n, 0, np.concatenate([sink_links, inner]), None, "er",
                   {"n": n, "c": c, "p": p})


def gen_star(tails: int, tail_len: int, clique_size: int = 0, kind: str = "light") -> Network:
    """Sink-centred star of paths; ``heavy`` hangs a clique off each tail end."""
    if tails < 1 or tail_len < 1:
        raise ValueError("need at least one tail of length at least one")
    if kind not in ("light", "heavy"):
        raise ValueError(f"unknown star kind {kind!r}")
    if kind == "heavy" and clique_size < 1:
        raise ValueError("heavy star needs a clique")
    edges, nxt = [], 1
    for _ in range(tails):
        prev = 0
        for _ in range(tail_len):
            edges += [(prev, nxt), (nxt, prev)]
            prev, nxt = nxt, nxt + 1
        if kind == "heavy":
            members = list(range(nxt, nxt + clique_size))
            nxt += clique_size
            for i, u in enumerate(members):
                edges += [(u, prev), (prev, u)]
                for v in members[i + 1:]:
                    edges += [(u, v), (v, u)]
    return Network.from_edges(nxt - 1, 0, edges, generator="star",
                              params={"tails": tails, "tail_len": tail_len,
                                      "clique_size": clique_size, "kind": kind})


# ------------------------------------------------------------ edge-list files

def write_edge_list(net: Network, path) -> None:
    lines = [f"N {net.n} SINK {net.sink}"]
    if net.coords is not None:
        lines += [f"POS {i} {x!r} {y!r}" for i, (x, y) in enumerate(net.coords.tolist())]
    lines += [f"E {u} {v}" for u, v in net.edges.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path, require_connected: bool = False) -> Network:
    n = sink = None
    pos, edges = {}, []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0].startswith("#"):
            continue
        tag = parts[0].upper()
        try:
            if tag == "N":
                n, sink = int(parts[1]), int(parts[3])
            elif tag == "POS":
                pos[int(parts[1])] = (float(parts[2]), float(parts[3]))
            elif tag == "E":
                edges.append((int(parts[1]), int(parts[2])))
            else:
                raise ValueError(f"unknown record {tag}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"{path}:{lineno}: malformed line {raw!r}") from exc
    if n is None:
        raise ValueError(f"{path}: missing 'N <count> SINK <id>' header")
    coords = None
    if pos:
        if len(pos) != n + 1:
            raise ValueError(f"{path}: positions given for {len(pos)} of {n + 1} nodes")
        coords = np.array([pos[i] for i in range(n + 1)])
    net = Network.from_edges(n, sink, edges, coords=coords, generator="file",
                             params={"path": str(path)})
    if require_connected:
        net.require_connected()
    return net


# ------------------------------------------------------- tessellation/backbone

def cell_count(r: float) -> int:
    return ceil_int(math.sqrt(2) / r)


def _cell_index(coords: np.ndarray, b: int) -> np.ndarray:
    # a point exactly on a grid line belongs to the lower cell
    ij = np.clip(np.ceil(coords * b).astype(np.int64) - 1, 0, b - 1)
    return ij[:, 0] + b * ij[:, 1]


def split_dense(members: list[int], threshold: float) -> list[list[int]]:
    """Split a dense cell into consecutive groups of near-equal size.

    Every group holds at least ``ceil(threshold)`` members; the number of
    groups is the largest that allows this, which keeps sizes at or below
    ``2 * threshold`` whenever any such split exists.
    """
    lo = max(1, ceil_int(threshold))
    count = len(members)
    ngroups = max(1, count // lo)
    base, extra = divmod(count, ngroups)
    out, start = [], 0
    for g in range(ngroups):
        size = base + (1 if g < extra else 0)
        out.append(members[start:start + size])
        start += size
    return out


@dataclass(frozen=True, eq=False)
class CellPartition:
    b: int
    r: float
    rho: float
    threshold: float
    cell_of: np.ndarray
    dense: frozenset
    sparse: frozenset
    heads: dict
    groups: list
    group_cell: list
    dummy_of: dict

    def physical(self, ident: int) -> int:
        return self.dummy_of.get(int(ident), int(ident))

    def physical_group(self, g: int) -> np.ndarray:
        return np.array([self.physical(i) for i in self.groups[g]], dtype=np.int64)

    @property
    def total_slots(self) -> int:
        return sum(len(g) for g in self.groups)


def tessellate(net: Network, r: float | None = None, rho: float = 1.0,
               layering: BfsLayering | None = None) -> CellPartition:
    if net.coords is None:
        raise ValueError("tessellation needs node coordinates")
    if rho <= 0:
        raise ValueError("group density must be positive")
    if r is None:
        r = net.params.get("r_unit", net.params.get("r"))
    if layering is None:
        layering = bfs_layering(net)
    b = cell_count(r)
    cell_of = _cell_index(net.coords, b)
    threshold = rho * math.log(net.n) if net.n > 1 else 0.0

    members: dict[int, list[int]] = {}
    for v in net.nonsink.tolist():
        members.setdefault(int(cell_of[v]), []).append(v)
    occupied: dict[int, list[int]] = {}
    for v in range(net.size):
        occupied.setdefault(int(cell_of[v]), []).append(v)
    heads = {c: min(vs, key=lambda v: (layering.dist[v], v)) for c, vs in occupied.items()}

    dense = frozenset(c for c, vs in members.items() if len(vs) > threshold)
    sparse = frozenset(range(b * b)) - dense
    groups, group_cell, dummy_of = [], [], {}
    next_id = net.size
    for c in sorted(members):
        vs = members[c]
        if c in dense:
            for grp in split_dense(vs, threshold):
                groups.append(np.array(grp, dtype=np.int64))
                group_cell.append(c)
        else:
            copies = max(1, ceil_int(threshold / len(vs)))
            grp = []
            for v in vs:
                for _ in range(copies):
                    dummy_of[next_id] = v
                    grp.append(next_id)
                    next_id += 1
            groups.append(np.array(grp, dtype=np.int64))
            group_cell.append(c)
    return CellPartition(b, float(r), float(rho), threshold, cell_of, dense, sparse,
                         heads, groups, group_cell, dummy_of)


@dataclass(frozen=True, eq=False)
class Backbone:
    heads: np.ndarray
    cells: np.ndarray
    paths: dict
    network: Network

    def index_of_cell(self, cell: int) -> int:
        return int(np.flatnonzero(self.cells == cell)[0])

    def hops(self, i: int, j: int) -> int:
        return len(self.paths[(i, j)]) - 1


def backbone(net: Network, partition: CellPartition, layering: BfsLayering | None = None) -> Backbone:
    """Graph over cell heads; each link carries its realizing physical path."""
    cells = np.array(sorted(partition.heads), dtype=np.int64)
    heads = np.array([partition.heads[c] for c in cells], dtype=np.int64)
    index = {int(c): i for i, c in enumerate(cells)}
    cell_of = partition.cell_of
    paths: dict = {}
    if len(net.edges):
        u, v = net.edges[:, 0], net.edges[:, 1]
        cu, cv = cell_of[u], cell_of[v]
        cross = cu != cv
        u, v, cu, cv = u[cross], v[cross], cu[cross], cv[cross]
        head_cell = np.full(cell_of.max() + 1, -1, dtype=np.int64)
        head_cell[cells] = heads
        hu, hv = head_cell[cu], head_cell[cv]
        hops = 1 + (u != hu) + (v != hv)
        order = np.lexsort((v, u, hops, cv, cu))
        seen = set()
        for k in order.tolist():
            key = (int(cu[k]), int(cv[k]))
            if key in seen:
                continue
            seen.add(key)
            path = [int(hu[k])]
            for node in (int(u[k]), int(v[k]), int(hv[k])):
                if node != path[-1]:
                    path.append(node)
            paths[(index[key[0]], index[key[1]])] = tuple(path)
    sink_index = index[int(cell_of[net.sink])]
    bnet = Network.from_edges(len(cells) - 1, sink_index, list(paths), generator="backbone")
    bad = bnet.unreachable()
    if bad.size and net.is_connected():
        raise RuntimeError(f"backbone lost connectivity for heads {heads[bad].tolist()}")
    return Backbone(heads, cells, paths, bnet)

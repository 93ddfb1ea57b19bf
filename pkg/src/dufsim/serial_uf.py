"""Serial union-find decoder: the correctness oracle for the array simulator.

Iterates Growing (every odd cluster's frontier edge gains +1 growth per odd
endpoint) and Merging (union across newly fully-grown edges) until no odd
cluster remains.  A cluster that has absorbed a fully-grown boundary edge
counts as even (matched to the boundary).  Erased edges start fully grown.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import DecodingGraph
from .noise import Syndrome


class UnionFindForest:
    """Union by size with path compression; roots carry defect parity and a
    boundary-touched bit."""

    def __init__(self, n: int, defects):
        self.parent = list(range(n + 1))
        self.size = [1] * (n + 1)
        self.parity = [bool(defects[i]) for i in range(n + 1)]
        self.touched = [False] * (n + 1)

    def find(self, v: int) -> int:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, u: int, v: int) -> int:
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return ru
        if self.size[ru] < self.size[rv]:
            ru, rv = rv, ru
        self.parent[rv] = ru
        self.size[ru] += self.size[rv]
        self.parity[ru] ^= self.parity[rv]
        self.touched[ru] |= self.touched[rv]
        return ru

    def touch_boundary(self, v: int) -> None:
        self.touched[self.find(v)] = True

    def is_odd(self, v: int) -> bool:
        r = self.find(v)
        return self.parity[r] and not self.touched[r]


@dataclass(frozen=True)
class Cluster:
    """Canonical form: root = minimum member id, members sorted."""

    root: int
    members: tuple[int, ...]
    parity: bool
    touched: bool


@dataclass(frozen=True)
class ClusterSet:
    """Clusters containing at least one defect, plus the fully-grown edge set.

    The comparison currency between the serial and distributed decoders:
    equality is exact equality of the canonical cluster tuples.
    """

    clusters: tuple[Cluster, ...]
    full_edges: frozenset[int]

    def export_text(self) -> str:
        lines = [f"{c.root} {int(c.parity)} {int(c.touched)} "
                 + " ".join(map(str, c.members)) for c in self.clusters]
        return "\n".join(lines) + ("\n" if lines else "")

    def same_partition(self, other: "ClusterSet") -> bool:
        return self.clusters == other.clusters


def clusters_from_components(g: DecodingGraph, defects, full_edges) -> ClusterSet:
    """Canonical ClusterSet: connected components of the fully-grown edge
    subgraph that contain at least one defect."""
    full = sorted(full_edges)
    adj: dict[int, list[int]] = {}
    touched_v = set()
    for eid in full:
        e = g.edges[eid]
        if e.v == 0:
            touched_v.add(e.u)
            continue
        adj.setdefault(e.u, []).append(e.v)
        adj.setdefault(e.v, []).append(e.u)
    seen = set()
    clusters = []
    for start in range(1, g.num_vertices + 1):
        if start in seen or not defects[start]:
            continue
        comp = [start]
        seen.add(start)
        stack = [start]
        while stack:
            v = stack.pop()
            for u in adj.get(v, ()):
                if u not in seen:
                    seen.add(u)
                    comp.append(u)
                    stack.append(u)
        comp.sort()
        parity = bool(np.logical_xor.reduce([bool(defects[v]) for v in comp]))
        touched = any(v in touched_v for v in comp)
        clusters.append(Cluster(comp[0], tuple(comp), parity, touched))
    clusters.sort(key=lambda c: c.root)
    return ClusterSet(tuple(clusters), frozenset(full))


@dataclass
class SerialDecodeResult:
    clusters: ClusterSet
    growth: np.ndarray          # per edge id
    iterations: int
    forest: UnionFindForest


def decode_serial(g: DecodingGraph, s: Syndrome) -> SerialDecodeResult:
    E = len(g.edges)
    growth = np.zeros(E, dtype=np.int32)
    weights = g.weights
    uf = UnionFindForest(g.num_vertices, s.defects)

    full: list[int] = []
    for eid in s.erased_edges:
        growth[eid] = weights[eid]
        full.append(eid)
    _merge(g, uf, full)

    iterations = 0
    while _any_odd(g, uf, s):
        iterations += 1
        newly_full = []
        for e in g.edges:
            if growth[e.id] >= weights[e.id]:
                continue
            inc = 0
            ru = uf.find(e.u)
            if e.v == 0:
                inc = 1 if uf.is_odd(ru) else 0
            else:
                rv = uf.find(e.v)
                if ru != rv:
                    inc = (1 if uf.is_odd(ru) else 0) + (1 if uf.is_odd(rv) else 0)
            if inc:
                growth[e.id] = min(growth[e.id] + inc, weights[e.id])
                if growth[e.id] == weights[e.id]:
                    newly_full.append(e.id)
        _merge(g, uf, newly_full)
        full.extend(newly_full)

    clusters = clusters_from_components(g, s.defects, full)
    return SerialDecodeResult(clusters, growth, iterations, uf)


def _merge(g: DecodingGraph, uf: UnionFindForest, edge_ids) -> None:
    for eid in edge_ids:
        e = g.edges[eid]
        if e.v == 0:
            uf.touch_boundary(e.u)
        else:
            uf.union(e.u, e.v)


def _any_odd(g: DecodingGraph, uf: UnionFindForest, s: Syndrome) -> bool:
    return any(uf.is_odd(int(v)) for v in np.flatnonzero(s.defects))


def brute_force_clusters(g: DecodingGraph, s: Syndrome) -> ClusterSet:
    """Independent fixpoint oracle: repeatedly grow all odd clusters' frontiers
    by +1 per odd endpoint and recompute connected components from scratch
    (BFS; no union-find).  Used to cross-check both decoders on small cases."""
    E = len(g.edges)
    growth = [0] * E
    weights = [int(w) for w in g.weights]
    for eid in s.erased_edges:
        growth[eid] = weights[eid]

    def components():
        adj: dict[int, list[int]] = {}
        touched = set()
        for e in g.edges:
            if growth[e.id] < weights[e.id]:
                continue
            if e.v == 0:
                touched.add(e.u)
            else:
                adj.setdefault(e.u, []).append(e.v)
                adj.setdefault(e.v, []).append(e.u)
        comp_of = {}
        comps = []
        for start in range(1, g.num_vertices + 1):
            if start in comp_of:
                continue
            queue = [start]
            comp_of[start] = len(comps)
            members = [start]
            while queue:
                v = queue.pop()
                for u in adj.get(v, ()):
                    if u not in comp_of:
                        comp_of[u] = len(comps)
                        members.append(u)
                        queue.append(u)
            comps.append(members)
        odd = []
        for members in comps:
            parity = sum(1 for v in members if s.defects[v]) % 2 == 1
            is_touched = any(v in touched for v in members)
            odd.append(parity and not is_touched)
        return comp_of, odd

    while True:
        comp_of, odd = components()
        if not any(odd):
            break
        for e in g.edges:
            if growth[e.id] >= weights[e.id]:
                continue
            if e.v == 0:
                inc = 1 if odd[comp_of[e.u]] else 0
            else:
                cu, cv = comp_of[e.u], comp_of[e.v]
                inc = 0 if cu == cv else (1 if odd[cu] else 0) + (1 if odd[cv] else 0)
            growth[e.id] = min(growth[e.id] + inc, weights[e.id])

    full = [e.id for e in g.edges if growth[e.id] >= weights[e.id]]
    return clusters_from_components(g, s.defects, full)

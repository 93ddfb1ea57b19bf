"""Corrections from cluster spanning trees, and their validation.

Peeling walks a cluster's spanning tree from the leaves inward, emitting the
tree edge under every defect it meets and toggling the defect onto the parent.
Boundary-touched clusters root at a vertex owning a fully-grown boundary edge,
which absorbs a leftover defect; even clusters root at the minimum-id member.
"""

from __future__ import annotations

import numpy as np

from .graph import DecodingGraph
from .noise import ErrorPattern, Syndrome, syndrome_from_pattern


class PeelingError(Exception):
    """Raised for clusters peeling cannot discharge (odd and off-boundary)."""


def pair_edge(g: DecodingGraph, u: int, v: int) -> int:
    idx = getattr(g, "_pair_edge_index", None)
    if idx is None:
        idx = {(e.u, e.v): e.id for e in g.edges if e.v != 0}
        g._pair_edge_index = idx
    return idx[(min(u, v), max(u, v))]


def peel(g: DecodingGraph, members, tree_edges, defects,
         boundary_edge: int | None = None) -> frozenset[int]:
    """Correction edges for one cluster.

    ``tree_edges`` must span ``members`` (from the array decoder's parent
    forest, or BFS over the fully-grown internal edges).  ``defects`` is
    indexed by vertex id.  ``boundary_edge`` is a fully-grown boundary edge of
    the cluster, if it has one.
    """
    members = list(members)
    live = {v: bool(defects[v]) for v in members}
    if not any(live.values()):
        return frozenset()

    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in members}
    for eid in tree_edges:
        e = g.edges[eid]
        adj[e.u].append((e.v, eid))
        adj[e.v].append((e.u, eid))

    if boundary_edge is not None:
        root = g.edges[boundary_edge].u
    else:
        root = min(members)

    order = [root]
    parent_of: dict[int, tuple[int, int]] = {root: (0, -1)}
    k = 0
    while k < len(order):
        v = order[k]
        k += 1
        for u, eid in sorted(adj[v]):
            if u not in parent_of:
                parent_of[u] = (v, eid)
                order.append(u)
    if len(order) != len(members):
        raise PeelingError("tree edges do not span the cluster")

    correction = []
    for v in reversed(order[1:]):  # leaves inward, deterministic order
        if live[v]:
            p, eid = parent_of[v]
            correction.append(eid)
            live[v] = False
            live[p] ^= True
    if live[root]:
        if boundary_edge is None:
            raise PeelingError("odd cluster without a boundary edge")
        correction.append(boundary_edge)
    return frozenset(correction)


def tree_from_parent_forest(g: DecodingGraph, members, parent) -> list[int]:
    """Tree edges implied by the array decoder's parenthood registers."""
    edges = []
    for v in members:
        p = int(parent[v])
        if p != v:
            edges.append(pair_edge(g, v, p))
    return edges


def tree_by_bfs(g: DecodingGraph, members, full_edges) -> list[int]:
    """Spanning tree over the cluster's fully-grown internal edges (the serial
    decoder has no parent forest, so it builds one from the root out)."""
    members = set(members)
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in members}
    for eid in full_edges:
        e = g.edges[eid]
        if e.v != 0 and e.u in members and e.v in members:
            adj[e.u].append((e.v, eid))
            adj[e.v].append((e.u, eid))
    root = min(members)
    seen = {root}
    tree = []
    queue = [root]
    while queue:
        v = queue.pop(0)
        for u, eid in sorted(adj[v]):
            if u not in seen:
                seen.add(u)
                tree.append(eid)
                queue.append(u)
    return tree


def boundary_edge_of(g: DecodingGraph, members, full_edges) -> int | None:
    """Minimum-id fully-grown boundary edge owned by the cluster, if any."""
    members = set(members)
    best = None
    for eid in sorted(full_edges):
        e = g.edges[eid]
        if e.v == 0 and e.u in members:
            best = eid
            break
    return best


def correction_toggles(g: DecodingGraph, correction) -> np.ndarray:
    out = np.zeros(g.num_vertices + 1, dtype=bool)
    for eid in correction:
        e = g.edges[eid]
        out[e.u] ^= True
        if e.v != 0:
            out[e.v] ^= True
    return out


def check_annihilation(g: DecodingGraph, s: Syndrome, correction) -> bool:
    """True iff the correction's defect toggles reproduce the syndrome exactly
    (boundary edges annihilate single defects)."""
    return bool(np.array_equal(correction_toggles(g, correction)[1:],
                               np.asarray(s.defects[1:], dtype=bool)))


def residual_qubit_flips(g: DecodingGraph, residual_edges) -> np.ndarray:
    """Net data-qubit flips (mod 2) of a set of mechanisms over the window."""
    net = np.zeros((g.d, g.d), dtype=bool)
    for eid in residual_edges:
        e = g.edges[eid]
        if e.qubit is not None:
            net[e.qubit] ^= True
    return net


def logical_flip(g: DecodingGraph, error: ErrorPattern, correction) -> bool:
    """True iff the residual error (error XOR correction) crosses the logical
    cut an odd number of times.  The cut is the first data-qubit column;
    residual chains terminate only on the two open sides, so any column gives
    the same parity (checked exhaustively by :func:`homology_all_columns`)."""
    if not check_annihilation(g, syndrome_from_pattern(g, error), correction):
        raise ValueError("correction does not annihilate the error's syndrome")
    residual = frozenset(error.fired_edges) ^ frozenset(correction)
    net = residual_qubit_flips(g, residual)
    return bool(np.logical_xor.reduce(net[:, 0]))


def homology_all_columns(g: DecodingGraph, residual_edges) -> list[bool]:
    """Crossing parity of every data-qubit column; the independent oracle for
    logical_flip (for a syndrome-free residual all entries must agree)."""
    net = residual_qubit_flips(g, residual_edges)
    return [bool(np.logical_xor.reduce(net[:, c])) for c in range(g.d)]


def corrections_for_clusters(g: DecodingGraph, cluster_set, defects,
                             parent=None) -> frozenset[int]:
    """Peel every cluster; uses the parent forest when the array decoder
    supplies one, else BFS trees."""
    full = cluster_set.full_edges
    out: set[int] = set()
    for c in cluster_set.clusters:
        bedge = boundary_edge_of(g, c.members, full) if c.touched else None
        if parent is not None:
            tree = tree_from_parent_forest(g, c.members, parent)
        else:
            tree = tree_by_bfs(g, c.members, full)
        out |= peel(g, c.members, tree, defects, bedge)
    return frozenset(out)


def corrections_to_text(per_trial_corrections) -> str:
    """Edge-id list export, one trial per line."""
    return "\n".join(" ".join(str(e) for e in sorted(c))
                      for c in per_trial_corrections) + "\n"

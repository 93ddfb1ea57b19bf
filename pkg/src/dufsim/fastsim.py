"""Event-driven fast path of the array simulator.

Register-transfer equivalent of pearray._commit_cycle: each cycle only the
vertices whose inputs may have changed (neighbors of last cycle's changes,
endpoints of grown edges) are re-evaluated, all reads against the
previous-cycle snapshot, commits atomic.  A cycle with no busy PE is a
fixpoint, so idle waiting costs nothing.  Produces cycle-for-cycle identical
results to the dense engine (tests assert this); use it for large batches.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .graph import DecodingGraph
from .pearray import DEFAULT_PARAMS, BatchDecodeResult, SimParams


class FastArrays:
    """CSR adjacency for the kernel: per vertex, its non-boundary slots
    (neighbor, edge) sorted by neighbor id, plus its boundary edge ids."""

    def __init__(self, g: DecodingGraph):
        V, E = g.num_vertices, len(g.edges)
        self.V, self.E = V, E
        self.w = g.weights.astype(np.int16)
        self.eu = g.edge_u.astype(np.int32)
        self.ev = g.edge_v.astype(np.int32)
        nbrs: list[list[tuple[int, int]]] = [[] for _ in range(V + 1)]
        bnds: list[list[int]] = [[] for _ in range(V + 1)]
        for e in g.edges:
            if e.v == 0:
                bnds[e.u].append(e.id)
            else:
                nbrs[e.u].append((e.v, e.id))
                nbrs[e.v].append((e.u, e.id))
        indptr = np.zeros(V + 2, dtype=np.int64)
        nbr_flat, edge_flat = [], []
        for v in range(1, V + 1):
            nbrs[v].sort()
            for u, eid in nbrs[v]:
                nbr_flat.append(u)
                edge_flat.append(eid)
            indptr[v + 1] = len(nbr_flat)
        self.indptr = indptr
        self.nbr = np.array(nbr_flat, dtype=np.int32)
        self.edge = np.array(edge_flat, dtype=np.int32)
        bindptr = np.zeros(V + 2, dtype=np.int64)
        bedge_flat = []
        for v in range(1, V + 1):
            for eid in sorted(bnds[v]):
                bedge_flat.append(eid)
            bindptr[v + 1] = len(bedge_flat)
        self.bindptr = bindptr
        self.bedge = np.array(bedge_flat, dtype=np.int32)


def fast_arrays(g: DecodingGraph) -> FastArrays:
    arrs = getattr(g, "_fast_arrays", None)
    if arrs is None:
        arrs = FastArrays(g)
        g._fast_arrays = arrs
    return arrs


@njit(cache=True)
def _decode_one(m, erased_rows, erase_mode,
                indptr, nbr, edge, bindptr, bedge, eu, ev, w,
                B_lat, G_lat, settle, ring_len, max_cycles,
                cid, parent, odd, st_odd, st_bnd, busy, growth,
                new_cid, new_parent, new_odd, new_st_odd, new_st_bnd, new_busy,
                act_flag, act_list, nxt_flag, nxt_list, edge_flag, edge_list,
                edge_vals, n_busy_ring, n_odd_ring):
    """Full decode of one trial.  Scratch arrays are caller-provided and
    reused; returns (decision_cycle, iterations, first_grow)."""
    V = cid.shape[0] - 1
    E = w.shape[0]

    # init registers
    cid[0] = 0
    parent[0] = 0
    odd[0] = 0
    st_odd[0] = 0
    st_bnd[0] = 0
    busy[0] = 0
    n_act = 0
    n_odd = 0
    for v in range(1, V + 1):
        cid[v] = v
        parent[v] = v
        odd[v] = m[v]
        st_odd[v] = m[v]
        st_bnd[v] = 0
        busy[v] = 0
        if m[v]:
            n_odd += 1
    for e in range(E):
        growth[e] = 0
    for i in range(erased_rows.shape[0]):
        e = erased_rows[i]
        growth[e] = w[e]
        u = eu[e]
        if act_flag[u] == 0:
            act_flag[u] = 1
            act_list[n_act] = u
            n_act += 1
        v2 = ev[e]
        if v2 != 0 and act_flag[v2] == 0:
            act_flag[v2] = 1
            act_list[n_act] = v2
            n_act += 1
    # pre-grown boundary edges set st_bnd at init
    for i in range(erased_rows.shape[0]):
        e = erased_rows[i]
        if ev[e] == 0:
            st_bnd[eu[e]] = 1

    n_busy = 0
    for i in range(ring_len):
        n_busy_ring[i] = 0
        n_odd_ring[i] = 0
    n_odd_ring[0] = n_odd   # codd view of the init state

    if erase_mode:
        grow_at = np.int64(-1)
        eval_from = np.int64(settle + 2)
        meaningful_from = np.int64(1)
        first_grow = np.int64(-1)
    else:
        grow_at = np.int64(1 + B_lat)
        eval_from = grow_at + settle + 1
        meaningful_from = grow_at + 1
        first_grow = grow_at

    iterations = 0
    t = np.int64(0)
    while True:
        t += 1
        if t > max_cycles:
            return np.int64(-1), iterations, first_grow

        # --- growing: compute new growth from the snapshot; committed only
        #     after the merging phase has read the old values ---------------
        n_edges = 0
        if t == grow_at:
            iterations += 1
            for v in range(1, V + 1):
                if odd[v]:
                    for k in range(indptr[v], indptr[v + 1]):
                        e = edge[k]
                        if edge_flag[e] == 0 and growth[e] < w[e]:
                            edge_flag[e] = 1
                            edge_list[n_edges] = e
                            n_edges += 1
                    for k in range(bindptr[v], bindptr[v + 1]):
                        e = bedge[k]
                        if edge_flag[e] == 0 and growth[e] < w[e]:
                            edge_flag[e] = 1
                            edge_list[n_edges] = e
                            n_edges += 1
            kept = 0
            for i in range(n_edges):
                e = edge_list[i]
                edge_flag[e] = 0
                u = eu[e]
                v2 = ev[e]
                if cid[u] == cid[v2]:
                    continue
                inc = np.int16(0)
                if odd[u]:
                    inc += 1
                if v2 != 0 and odd[v2]:
                    inc += 1
                if inc > 0:
                    ng = growth[e] + inc
                    if ng > w[e]:
                        ng = w[e]
                    if ng != growth[e]:
                        edge_list[kept] = e
                        edge_vals[kept] = ng
                        kept += 1
            n_edges = kept

        # --- merging + checking over the active set --------------------
        n_nxt = 0
        for i in range(n_act):
            v = act_list[i]
            best_cid = cid[v]
            best_nbr = np.int32(-1)
            sub_par = m[v]
            sub_bnd = np.uint8(0)
            disagree = False
            for k in range(indptr[v], indptr[v + 1]):
                u = nbr[k]
                e = edge[k]
                if growth[e] != w[e]:
                    continue
                cu = cid[u]
                if cu < best_cid:
                    # ascending-neighbor iteration: lowest id wins ties
                    best_cid = cu
                    best_nbr = u
                if cu != cid[v] or odd[u] != odd[v]:
                    disagree = True
                if parent[u] == v:
                    sub_par ^= st_odd[u]
                    if st_bnd[u]:
                        sub_bnd = np.uint8(1)
            for k in range(bindptr[v], bindptr[v + 1]):
                if growth[bedge[k]] == w[bedge[k]]:
                    sub_bnd = np.uint8(1)
            if best_cid < cid[v]:
                new_cid[v] = best_cid
                new_parent[v] = best_nbr
            else:
                new_cid[v] = cid[v]
                new_parent[v] = parent[v]
            new_st_odd[v] = sub_par
            new_st_bnd[v] = sub_bnd
            if parent[v] == v:
                new_odd[v] = sub_par & (np.uint8(1) - sub_bnd)
            else:
                new_odd[v] = odd[parent[v]]
            stale = (st_odd[v] != sub_par) or (st_bnd[v] != sub_bnd)
            mism = (parent[v] == v) and \
                   (odd[v] != (st_odd[v] & (np.uint8(1) - st_bnd[v])))
            new_busy[v] = 1 if (disagree or stale or mism) else 0

        # --- commit -----------------------------------------------------
        for i in range(n_act):
            v = act_list[i]
            changed = False
            if new_cid[v] != cid[v]:
                cid[v] = new_cid[v]
                changed = True
            if new_parent[v] != parent[v]:
                parent[v] = new_parent[v]
                changed = True
            if new_st_odd[v] != st_odd[v]:
                st_odd[v] = new_st_odd[v]
                changed = True
            if new_st_bnd[v] != st_bnd[v]:
                st_bnd[v] = new_st_bnd[v]
                changed = True
            if new_odd[v] != odd[v]:
                if new_odd[v]:
                    n_odd += 1
                else:
                    n_odd -= 1
                odd[v] = new_odd[v]
                changed = True
            if new_busy[v] != busy[v]:
                if new_busy[v]:
                    n_busy += 1
                else:
                    n_busy -= 1
                busy[v] = new_busy[v]
            if changed:
                if nxt_flag[v] == 0:
                    nxt_flag[v] = 1
                    nxt_list[n_nxt] = v
                    n_nxt += 1
                for k in range(indptr[v], indptr[v + 1]):
                    e = edge[k]
                    if growth[e] != w[e]:
                        continue
                    u = nbr[k]
                    if nxt_flag[u] == 0:
                        nxt_flag[u] = 1
                        nxt_list[n_nxt] = u
                        n_nxt += 1
        # growth commits at the end of the grow cycle; endpoints react next cycle
        for i in range(n_edges):
            e = edge_list[i]
            growth[e] = edge_vals[i]
            u = eu[e]
            if nxt_flag[u] == 0:
                nxt_flag[u] = 1
                nxt_list[n_nxt] = u
                n_nxt += 1
            v2 = ev[e]
            if v2 != 0 and nxt_flag[v2] == 0:
                nxt_flag[v2] = 1
                nxt_list[n_nxt] = v2
                n_nxt += 1

        for i in range(n_act):
            act_flag[act_list[i]] = 0
        for i in range(n_nxt):
            v = nxt_list[i]
            nxt_flag[v] = 0
            act_flag[v] = 1
            act_list[i] = v
        n_act = n_nxt

        # --- ring buffers (registers at end of cycle t) ------------------
        # n_odd stands in for OR(codd): codd lags odd by one cycle, but the
        # controller only consults it at a quiescent view, where odd has not
        # changed since the previous cycle.
        n_busy_ring[t % ring_len] = n_busy
        n_odd_ring[t % ring_len] = n_odd

        # --- controller ---------------------------------------------------
        view = t - 1 - G_lat
        if t >= eval_from and view >= 1:
            if view >= meaningful_from:
                busy_view = n_busy_ring[view % ring_len] > 0
            else:
                busy_view = True
            if not busy_view:
                codd_view = n_odd_ring[view % ring_len] > 0
                # the prologue merging stage always falls through to the
                # initial growing stage, so its cost is trial-independent
                if codd_view or first_grow < 0:
                    grow_at = t + 1 + B_lat
                    eval_from = grow_at + settle + 1
                    meaningful_from = grow_at + 1
                    if first_grow < 0:
                        first_grow = grow_at
                else:
                    return t, iterations, first_grow


@njit(cache=True)
def _decode_many(m_all, erased_ptr, erased_flat, erase_mode,
                 indptr, nbr, edge, bindptr, bedge, eu, ev, w,
                 B_lat, G_lat, settle, max_cycles,
                 out_decision, out_iters, out_first,
                 out_cid, out_parent, out_growth):
    V = indptr.shape[0] - 2
    E = w.shape[0]
    Bn = m_all.shape[0]
    ring_len = G_lat + 4
    cid = np.empty(V + 1, dtype=np.int32)
    parent = np.empty(V + 1, dtype=np.int32)
    odd = np.empty(V + 1, dtype=np.uint8)
    st_odd = np.empty(V + 1, dtype=np.uint8)
    st_bnd = np.empty(V + 1, dtype=np.uint8)
    busy = np.empty(V + 1, dtype=np.uint8)
    growth = np.empty(E, dtype=np.int16)
    new_cid = np.empty(V + 1, dtype=np.int32)
    new_parent = np.empty(V + 1, dtype=np.int32)
    new_odd = np.empty(V + 1, dtype=np.uint8)
    new_st_odd = np.empty(V + 1, dtype=np.uint8)
    new_st_bnd = np.empty(V + 1, dtype=np.uint8)
    new_busy = np.empty(V + 1, dtype=np.uint8)
    act_flag = np.zeros(V + 1, dtype=np.uint8)
    nxt_flag = np.zeros(V + 1, dtype=np.uint8)
    act_list = np.empty(V + 1, dtype=np.int32)
    nxt_list = np.empty(V + 1, dtype=np.int32)
    edge_flag = np.zeros(E, dtype=np.uint8)
    edge_list = np.empty(E, dtype=np.int32)
    edge_vals = np.empty(E, dtype=np.int16)
    n_busy_ring = np.empty(ring_len, dtype=np.int64)
    n_odd_ring = np.empty(ring_len, dtype=np.int64)
    for b in range(Bn):
        erased_rows = erased_flat[erased_ptr[b]:erased_ptr[b + 1]]
        dec, iters, first = _decode_one(
            m_all[b], erased_rows, erase_mode,
            indptr, nbr, edge, bindptr, bedge, eu, ev, w,
            B_lat, G_lat, settle, ring_len, max_cycles,
            cid, parent, odd, st_odd, st_bnd, busy, growth,
            new_cid, new_parent, new_odd, new_st_odd, new_st_bnd, new_busy,
            act_flag, act_list, nxt_flag, nxt_list, edge_flag, edge_list,
            edge_vals, n_busy_ring, n_odd_ring)
        out_decision[b] = dec
        out_iters[b] = iters
        out_first[b] = first
        for v2 in range(V + 1):
            out_cid[b, v2] = cid[v2]
            out_parent[b, v2] = parent[v2]
        for e2 in range(E):
            out_growth[b, e2] = growth[e2]


def decode_batch_fast(g: DecodingGraph, defects: np.ndarray,
                      erased: np.ndarray | None = None,
                      erasure_mode: bool = False,
                      params: SimParams = DEFAULT_PARAMS) -> BatchDecodeResult:
    """Event-driven equivalent of pearray.decode_batch."""
    from .pearray import _cycle_limit
    fa = fast_arrays(g)
    B = defects.shape[0]
    m_all = defects.astype(np.uint8)
    m_all[:, 0] = 0
    if erased is not None and erased.any():
        erasure_mode = True
        ptr = np.zeros(B + 1, dtype=np.int64)
        rows = []
        for b in range(B):
            ids = np.flatnonzero(erased[b])
            rows.append(ids)
            ptr[b + 1] = ptr[b] + ids.size
        flat = (np.concatenate(rows) if rows else np.zeros(0)).astype(np.int32)
    else:
        ptr = np.zeros(B + 1, dtype=np.int64)
        flat = np.zeros(0, dtype=np.int32)

    p = params
    out_decision = np.empty(B, dtype=np.int64)
    out_iters = np.empty(B, dtype=np.int32)
    out_first = np.empty(B, dtype=np.int64)
    out_cid = np.empty((B, fa.V + 1), dtype=np.int32)
    out_parent = np.empty((B, fa.V + 1), dtype=np.int32)
    out_growth = np.empty((B, fa.E), dtype=np.int16)
    _decode_many(m_all, ptr, flat, erasure_mode,
                 fa.indptr, fa.nbr, fa.edge, fa.bindptr, fa.bedge,
                 fa.eu, fa.ev, fa.w,
                 np.int64(p.broadcast_latency), np.int64(p.gather_latency),
                 np.int64(p.settle), np.int64(p.max_cycles or _cycle_limit(g)),
                 out_decision, out_iters, out_first,
                 out_cid, out_parent, out_growth)
    if (out_decision < 0).any():
        raise RuntimeError("decode exceeded the cycle limit")
    transitions = 2 * out_iters + 1 + (1 if erasure_mode else 0)
    return BatchDecodeResult(
        cycles=out_decision + p.epilogue, decision_cycle=out_decision,
        iterations=out_iters, transitions=transitions, first_grow=out_first,
        cid=out_cid, parent=out_parent, growth=out_growth,
        defects=defects.astype(bool), erasure_mode=erasure_mode,
        graph=g, params=params)

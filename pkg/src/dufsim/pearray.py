"""Cycle-accurate synchronous simulation of the PE array and its controller.

One processing element per decoding-graph vertex.  Every cycle, all next
register values are computed from the current registers and committed
atomically (register-transfer semantics), so simultaneous reads are race-free
by construction.  Per-vertex registers: cid, parent, odd, st_odd (subtree
defect parity, convergecast over the parenthood forest), st_bnd (subtree
boundary-grown OR, same machinery), codd (odd delayed one stage for the
controller), busy.  Edge growth registers live with the lower-id PE.

Update rules, applied every cycle from the previous-cycle snapshot:

* growing (only in a growing cycle): every edge not fully grown whose
  endpoints hold different cids grows by the number of odd endpoints,
  clamped at its weight; boundary edges grow by their single endpoint's odd.
* merging: adopt the minimum cid among fully-grown neighbors if smaller
  (lowest-id neighbor wins ties) and point parent at its holder; recompute
  st_odd = XOR(m, children's st_odd) and st_bnd = own boundary-grown OR
  children's st_bnd; a root latches odd = st_odd AND NOT st_bnd from the same
  subtree computation, non-roots copy the parent's previous odd.
* checking (fused with merging): busy iff a fully-grown neighbor disagrees on
  cid or odd, or st_odd/st_bnd are stale against the children, or a root's
  odd mismatches st_odd AND NOT st_bnd.

The controller broadcasts the stage through a registered fan-out tree and
gathers OR(busy)/OR(codd) through a registered fan-in tree, so its view lags
the array; the pipeline depths below are architecture constants, confirmed by
the trace oracle and calibrated once against measured-latency anchors.  A
growing stage costs exactly one array cycle.  With erasures enabled the
controller runs one merging stage before the first growing stage (erased
edges start fully grown).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import DecodingGraph
from .noise import Syndrome
from .corrector import corrections_for_clusters
from .serial_uf import Cluster, ClusterSet

_INT32_MAX = np.int32(2**31 - 1)


@dataclass(frozen=True)
class SimParams:
    """Architecture/timing constants of the simulated array.

    broadcast_latency: cycles for a committed global_stage to reach the PEs.
    gather_latency: cycles for the busy/codd OR trees to reach the controller.
    settle: post-entry wait before the controller starts evaluating.
    epilogue: completion handshake cycles included in the reported total.
    """

    broadcast_latency: int = 4
    gather_latency: int = 2
    settle: int = 2
    epilogue: int = 2
    clock_ns: float = 10.0
    max_cycles: int | None = None


DEFAULT_PARAMS = SimParams()


class SimArrays:
    """Precomputed per-graph index arrays for the vectorized register update.

    Per-vertex slots are contiguous (one dummy slot each, so reduceat never
    sees an empty segment); the padded edge E never reaches full growth.
    """

    def __init__(self, g: DecodingGraph):
        V, E = g.num_vertices, len(g.edges)
        self.graph = g
        self.V, self.E = V, E
        self.w = g.weights.astype(np.int16)
        self.w_pad = np.concatenate([self.w, np.array([32000], dtype=np.int16)])
        self.eu = g.edge_u
        self.ev = g.edge_v
        self.ids = np.arange(V + 1, dtype=np.int32)

        slots = []
        for e in g.edges:
            if e.v != 0:
                slots.append((e.u, e.v, e.id))
                slots.append((e.v, e.u, e.id))
        for v in range(1, V + 1):
            slots.append((v, 0, E))  # dummy
        slots.sort()
        S = len(slots)
        self.S = S
        self.slot_vertex = np.array([s[0] for s in slots], dtype=np.int32)
        self.slot_nbr = np.array([s[1] for s in slots], dtype=np.int32)
        self.slot_edge = np.array([s[2] for s in slots], dtype=np.int32)
        self.slot_real = self.slot_edge != E
        self.slot_w = self.w_pad[self.slot_edge]
        self.slot_rank = np.arange(S, dtype=np.int32)
        self.slot_nbr_pad = np.concatenate(
            [self.slot_nbr, np.array([0], dtype=np.int32)])
        starts = np.zeros(V, dtype=np.int64)
        vprev = 0
        for i, (sv, _, _) in enumerate(slots):
            if sv != vprev:
                starts[sv - 1] = i
                vprev = sv
        self.starts = starts
        self.slot_vcol = self.slot_vertex - 1

        bslots = [(e.u, e.id) for e in g.edges if e.v == 0]
        bslots += [(v, E) for v in range(1, V + 1)]
        bslots.sort()
        self.bslot_edge = np.array([b[1] for b in bslots], dtype=np.int32)
        self.bslot_w = self.w_pad[self.bslot_edge]
        bstarts = np.zeros(V, dtype=np.int64)
        vprev = 0
        for i, (bv, _) in enumerate(bslots):
            if bv != vprev:
                bstarts[bv - 1] = i
                vprev = bv
        self.bstarts = bstarts

        # growth guard: boundary edges always satisfy "endpoint cids differ"
        # because the virtual endpoint 0 keeps cid 0.


def sim_arrays(g: DecodingGraph) -> SimArrays:
    arrs = getattr(g, "_sim_arrays", None)
    if arrs is None:
        arrs = SimArrays(g)
        g._sim_arrays = arrs
    return arrs


@dataclass
class SimState:
    """Batched register file: row = trial, column = vertex id (0 = virtual
    boundary endpoint, pinned inert)."""

    arrays: SimArrays
    m: np.ndarray
    cid: np.ndarray
    parent: np.ndarray
    odd: np.ndarray
    st_odd: np.ndarray
    st_bnd: np.ndarray
    codd: np.ndarray
    busy: np.ndarray
    growth: np.ndarray  # [B, E+1]; column E is padding

    @property
    def batch(self) -> int:
        return self.m.shape[0]

    def rows(self, keep: np.ndarray) -> "SimState":
        return SimState(self.arrays, self.m[keep], self.cid[keep],
                        self.parent[keep], self.odd[keep], self.st_odd[keep],
                        self.st_bnd[keep], self.codd[keep], self.busy[keep],
                        self.growth[keep])

    def snapshot(self) -> dict:
        return {"cid": self.cid.copy(), "parent": self.parent.copy(),
                "odd": self.odd.copy(), "st_odd": self.st_odd.copy(),
                "st_bnd": self.st_bnd.copy(), "busy": self.busy.copy(),
                "codd": self.codd.copy(), "growth": self.growth.copy()}


def init_state(g: DecodingGraph, defects: np.ndarray,
               erased: np.ndarray | None = None) -> SimState:
    """Registers at cycle 0: cid = id, odd = st_odd = m, parent = id; erased
    edges start fully grown (and st_bnd reflects any pre-grown boundary edge)."""
    arrs = sim_arrays(g)
    B = defects.shape[0]
    V, E = arrs.V, arrs.E
    if defects.shape[1] != V + 1:
        raise ValueError("defect array must have V+1 columns (0 unused)")
    m = defects.astype(bool).copy()
    m[:, 0] = False
    cid = np.broadcast_to(arrs.ids, (B, V + 1)).copy()
    cid[:, 0] = 0
    parent = cid.copy()
    odd = m.copy()
    st_odd = m.copy()
    growth = np.zeros((B, E + 1), dtype=np.int16)
    if erased is not None and erased.any():
        wfull = np.broadcast_to(arrs.w, (B, E))
        growth[:, :E][erased] = wfull[erased]
    own_bnd = np.bitwise_or.reduceat(
        growth[:, arrs.bslot_edge] == arrs.bslot_w, arrs.bstarts, axis=1)
    st_bnd = np.zeros_like(m)
    st_bnd[:, 1:] = own_bnd
    codd = odd.copy()
    busy = np.zeros_like(m)
    return SimState(arrs, m, cid, parent, odd, st_odd, st_bnd, codd, busy, growth)


def _commit_cycle(st: SimState, grow_rows: np.ndarray | None) -> None:
    """Compute all next registers from the current snapshot and commit them."""
    a = st.arrays
    cid, parent, odd, st_odd, st_bnd, m = (st.cid, st.parent, st.odd,
                                           st.st_odd, st.st_bnd, st.m)
    growth = st.growth

    full_slot = growth[:, a.slot_edge] == a.slot_w
    live = full_slot & a.slot_real
    cid_n = cid[:, a.slot_nbr]

    cand = np.where(live, cid_n, _INT32_MAX)
    minv = np.minimum.reduceat(cand, a.starts, axis=1)
    cid_v = cid[:, 1:]
    adopt = minv < cid_v
    match = live & (cid_n == minv[:, a.slot_vcol])
    rank = np.where(match, a.slot_rank, np.int32(a.S))
    first = np.minimum.reduceat(rank, a.starts, axis=1)
    parent_cand = a.slot_nbr_pad[first]
    cid_new = np.where(adopt, minv, cid_v)
    parent_new = np.where(adopt, parent_cand, parent[:, 1:])

    child = (parent[:, a.slot_nbr] == a.slot_vertex) & a.slot_real
    sub_par = m[:, 1:] ^ np.bitwise_xor.reduceat(
        child & st_odd[:, a.slot_nbr], a.starts, axis=1)
    own_bnd = np.bitwise_or.reduceat(
        growth[:, a.bslot_edge] == a.bslot_w, a.bstarts, axis=1)
    sub_bnd = own_bnd | np.bitwise_or.reduceat(
        child & st_bnd[:, a.slot_nbr], a.starts, axis=1)

    root = parent[:, 1:] == a.ids[1:]
    odd_parent = np.take_along_axis(odd, parent[:, 1:], axis=1)
    odd_new = np.where(root, sub_par & ~sub_bnd, odd_parent)

    cid_vs = cid[:, a.slot_vertex]
    odd_vs = odd[:, a.slot_vertex]
    odd_ns = odd[:, a.slot_nbr]
    disagree = np.bitwise_or.reduceat(
        live & ((cid_n != cid_vs) | (odd_ns != odd_vs)), a.starts, axis=1)
    stale = (st_odd[:, 1:] != sub_par) | (st_bnd[:, 1:] != sub_bnd)
    mismatch = root & (odd[:, 1:] != (st_odd[:, 1:] & ~st_bnd[:, 1:]))
    busy_new = disagree | stale | mismatch

    codd_new = odd.copy()

    if grow_rows is not None and grow_rows.any():
        rows = np.flatnonzero(grow_rows)
        sub = growth[rows][:, :a.E]
        inc = (odd[rows][:, a.eu].astype(np.int16)
               + odd[rows][:, a.ev].astype(np.int16))
        inc *= (cid[rows][:, a.eu] != cid[rows][:, a.ev])
        grown = np.minimum(sub + inc, a.w[None, :])
        st.growth[rows, :a.E] = grown

    st.cid[:, 1:] = cid_new
    st.parent[:, 1:] = parent_new
    st.st_odd[:, 1:] = sub_par
    st.st_bnd[:, 1:] = sub_bnd
    st.odd[:, 1:] = odd_new
    st.busy[:, 1:] = busy_new
    st.codd = codd_new


# -- single-cycle operations (unit-test surface) -------------------------------

def step_growing(st: SimState) -> None:
    """One growing cycle: the single synchronous growth update (the merging
    and checking logic still runs, reading the pre-growth snapshot)."""
    _commit_cycle(st, np.ones(st.batch, dtype=bool))


def step_merging(st: SimState) -> None:
    """One merging cycle (merging + checking fused)."""
    _commit_cycle(st, None)


def compute_busy(st: SimState) -> np.ndarray:
    """The busy bits the checking logic would latch next cycle."""
    probe = st.rows(np.arange(st.batch))
    _commit_cycle(probe, None)
    return probe.busy.copy()


@dataclass
class BatchDecodeResult:
    cycles: np.ndarray            # total, epilogue included
    decision_cycle: np.ndarray    # controller terminate-decision cycle
    iterations: np.ndarray        # growing stages executed
    transitions: np.ndarray       # global stage transitions (context accounting)
    first_grow: np.ndarray
    cid: np.ndarray
    parent: np.ndarray
    growth: np.ndarray            # [B, E]
    defects: np.ndarray
    erasure_mode: bool
    graph: DecodingGraph
    params: SimParams

    def clusters_of(self, i: int) -> ClusterSet:
        return clusters_from_cid(self.graph, self.defects[i], self.cid[i],
                                 self.growth[i])

    def corrections_of(self, i: int) -> frozenset[int]:
        return corrections_for_clusters(self.graph, self.clusters_of(i),
                                        self.defects[i], parent=self.parent[i])


def decode_batch(g: DecodingGraph, defects: np.ndarray,
                 erased: np.ndarray | None = None, erasure_mode: bool = False,
                 params: SimParams = DEFAULT_PARAMS) -> BatchDecodeResult:
    """Decode a batch of syndromes, cycle-for-cycle deterministic per trial."""
    arrs = sim_arrays(g)
    B = defects.shape[0]
    st = init_state(g, defects, erased)
    p = params
    erasure_mode = erasure_mode or (erased is not None and bool(np.any(erased)))

    grow_at = np.full(B, -1, dtype=np.int64)
    eval_from = np.full(B, -1, dtype=np.int64)
    meaningful_from = np.ones(B, dtype=np.int64)
    if erasure_mode:
        eval_from[:] = p.settle + 2
        first_grow = np.full(B, -1, dtype=np.int64)
    else:
        grow_at[:] = 1 + p.broadcast_latency
        eval_from[:] = grow_at + p.settle + 1
        meaningful_from[:] = grow_at + 1
        first_grow = grow_at.copy()

    iterations = np.zeros(B, dtype=np.int32)
    decision = np.zeros(B, dtype=np.int64)
    orig = np.arange(B)

    hist_busy = [np.zeros(B, dtype=bool)]
    hist_codd = [st.odd[:, 1:].any(axis=1)]

    out_cid = np.empty((B, arrs.V + 1), dtype=np.int32)
    out_parent = np.empty((B, arrs.V + 1), dtype=np.int32)
    out_growth = np.empty((B, arrs.E), dtype=np.int16)

    limit = p.max_cycles or _cycle_limit(g)
    t = 0
    while orig.size:
        t += 1
        if t > limit:
            raise RuntimeError(f"decode exceeded {limit} cycles")
        grow_rows = grow_at[orig] == t
        iterations[orig[grow_rows]] += 1
        _commit_cycle(st, grow_rows if grow_rows.any() else None)

        ab = np.zeros(B, dtype=bool)
        ac = np.zeros(B, dtype=bool)
        ab[orig] = st.busy[:, 1:].any(axis=1)
        ac[orig] = st.codd[:, 1:].any(axis=1)
        hist_busy.append(ab)
        hist_codd.append(ac)

        view = t - 1 - p.gather_latency
        elig = (eval_from[orig] <= t)
        if view >= 1 and elig.any():
            busy_view = np.where(view >= meaningful_from[orig],
                                 hist_busy[view][orig], True)
            quiet = elig & ~busy_view
            if quiet.any():
                codd_view = hist_codd[view][orig]
                # the prologue always falls through to the first growing stage
                regrow = quiet & (codd_view | (first_grow[orig] < 0))
                finish = quiet & ~regrow
                if regrow.any():
                    gat = t + 1 + p.broadcast_latency
                    grow_at[orig[regrow]] = gat
                    eval_from[orig[regrow]] = gat + p.settle + 1
                    meaningful_from[orig[regrow]] = gat + 1
                    fg = first_grow[orig] < 0
                    first_grow[orig[regrow & fg]] = gat
                if finish.any():
                    idx = orig[finish]
                    decision[idx] = t
                    out_cid[idx] = st.cid[finish]
                    out_parent[idx] = st.parent[finish]
                    out_growth[idx] = st.growth[finish, :arrs.E]
                    keep = ~finish
                    st = st.rows(keep)
                    orig = orig[keep]

    transitions = 2 * iterations + 1 + (1 if erasure_mode else 0)
    return BatchDecodeResult(
        cycles=(decision + p.epilogue).astype(np.int64),
        decision_cycle=decision, iterations=iterations,
        transitions=transitions, first_grow=first_grow,
        cid=out_cid, parent=out_parent, growth=out_growth,
        defects=defects.astype(bool), erasure_mode=erasure_mode,
        graph=g, params=params)


def _cycle_limit(g: DecodingGraph) -> int:
    d = g.d
    wmax = int(g.weights.max())
    return max(20000, (3 * d**4 + 2 * d) * max(1, wmax // 2) + 1000)


def cycle_bound(d: int) -> int:
    """Worst-case cycle count of the array for rounds = d, unweighted."""
    return 3 * d**4 + 2 * d


def clusters_from_cid(g: DecodingGraph, defects, cid_row, growth_row) -> ClusterSet:
    """ClusterSet read off the final cid registers (vertices grouped by cid,
    keeping groups that contain a defect), for comparison with the serial
    decoder's canonical form."""
    arrs = sim_arrays(g)
    cids = np.asarray(cid_row[1:], dtype=np.int64)
    dmask = np.asarray(defects[1:], dtype=bool)
    growth = np.asarray(growth_row)
    full = growth[:arrs.E] == arrs.w
    full_ids = np.flatnonzero(full)
    roots = np.unique(cids[dmask])
    if roots.size == 0:
        return ClusterSet((), frozenset(int(i) for i in full_ids))
    keep = np.isin(cids, roots)
    members = np.flatnonzero(keep) + 1
    owner = cids[keep]
    order = np.argsort(owner, kind="stable")
    members = members[order]
    owner = owner[order]
    cuts = np.flatnonzero(np.diff(owner)) + 1
    groups = np.split(members, cuts)

    bnd_full = full & (arrs.ev == 0)
    touched_roots = set(cids[arrs.eu[np.flatnonzero(bnd_full)] - 1])

    clusters = []
    for grp in groups:
        grp_sorted = np.sort(grp)
        root = int(grp_sorted[0])
        parity = bool(dmask[grp_sorted - 1].sum() & 1)
        touched = int(cids[root - 1]) in touched_roots
        clusters.append(Cluster(root, tuple(int(v) for v in grp_sorted),
                                parity, touched))
    clusters.sort(key=lambda c: c.root)
    return ClusterSet(tuple(clusters), frozenset(int(i) for i in full_ids))


# -- single-trial API with optional trace --------------------------------------

@dataclass
class TraceEvent:
    cycle: int
    array_cycle: int
    stage: str
    changes: tuple  # (register, vertex, value)


@dataclass
class DecodeResult:
    """Outcome of one decode: total cycles (controller pipeline and epilogue
    included), the PE-array quiescence cycle in array counting (first growing
    cycle = 1; -1 when the decode was not traced), growing-stage count, final
    clusters and corrections."""

    cycles: int
    quiesce_cycle: int
    iterations: int
    transitions: int
    clusters: ClusterSet
    corrections: frozenset[int]
    cid: np.ndarray
    parent: np.ndarray
    growth: np.ndarray
    stage_cycles: dict
    trace: list[TraceEvent] | None = None

    def ns(self, clock_ns: float = 10.0) -> float:
        return self.cycles * clock_ns


def decode_distributed(g: DecodingGraph, s: Syndrome,
                       params: SimParams = DEFAULT_PARAMS,
                       record_trace: bool = False) -> DecodeResult:
    """Decode one syndrome; with record_trace, log per-cycle register changes."""
    arrs = sim_arrays(g)
    defects = np.asarray(s.defects, dtype=bool)[None, :]
    erased = None
    if s.erased_edges:
        erased = np.zeros((1, arrs.E), dtype=bool)
        erased[0, list(s.erased_edges)] = True

    if not record_trace:
        from .fastsim import decode_batch_fast
        res = decode_batch_fast(g, defects, erased, s.erasure_mode, params)
        clusters = res.clusters_of(0)
        corrections = res.corrections_of(0)
        return DecodeResult(
            int(res.cycles[0]), -1, int(res.iterations[0]),
            int(res.transitions[0]), clusters, corrections,
            res.cid[0], res.parent[0], res.growth[0],
            _stage_cycles(res, 0, params))

    # Traced run: replay the same controller with snapshot diffs.
    p = params
    st = init_state(g, defects, erased)
    erasure_mode = s.erasure_mode or (erased is not None)
    if erasure_mode:
        grow_at, eval_from, meaningful_from = -1, p.settle + 2, 1
        first_grow = -1
    else:
        grow_at = 1 + p.broadcast_latency
        eval_from = grow_at + p.settle + 1
        meaningful_from = grow_at + 1
        first_grow = grow_at
    hist_busy = [False]
    hist_codd = [bool(st.odd[:, 1:].any())]
    trace: list[TraceEvent] = []
    iterations = 0
    quiesce = -1
    t = 0
    limit = p.max_cycles or _cycle_limit(g)
    while True:
        t += 1
        if t > limit:
            raise RuntimeError(f"decode exceeded {limit} cycles")
        growing = t == grow_at
        if growing:
            iterations += 1
        before = st.snapshot()
        _commit_cycle(st, np.array([growing]))
        hist_busy.append(bool(st.busy[:, 1:].any()))
        hist_codd.append(bool(st.codd[:, 1:].any()))
        changes = _diff(before, st)
        rel = t - (first_grow - 1) if 0 < first_grow <= t else 0
        stage = "growing" if growing else "merging"
        trace.append(TraceEvent(t, rel, stage, changes))
        if quiesce < 0 and first_grow > 0 and t > first_grow and not changes:
            quiesce = rel

        view = t - 1 - p.gather_latency
        if t >= eval_from and view >= 1:
            busy_view = hist_busy[view] if view >= meaningful_from else True
            if not busy_view:
                if hist_codd[view] or first_grow < 0:
                    grow_at = t + 1 + p.broadcast_latency
                    eval_from = grow_at + p.settle + 1
                    meaningful_from = grow_at + 1
                    if first_grow < 0:
                        first_grow = grow_at
                else:
                    decision = t
                    break

    transitions = 2 * iterations + 1 + (1 if erasure_mode else 0)
    defrow = defects[0]
    clusters = clusters_from_cid(g, defrow, st.cid[0], st.growth[0, :arrs.E])
    corrections = corrections_for_clusters(g, clusters, defrow,
                                           parent=st.parent[0])
    if quiesce < 0:
        quiesce = 0 if first_grow < 0 else decision - (first_grow - 1)
    total = decision + p.epilogue
    stage_cycles = {"growing": iterations,
                    "merging": decision - iterations,
                    "epilogue": p.epilogue}
    return DecodeResult(total, quiesce, iterations, transitions, clusters,
                        corrections, st.cid[0].copy(), st.parent[0].copy(),
                        st.growth[0, :arrs.E].copy(), stage_cycles, trace)


def _stage_cycles(res: BatchDecodeResult, i: int, p: SimParams) -> dict:
    return {"growing": int(res.iterations[i]),
            "merging": int(res.decision_cycle[i] - res.iterations[i]),
            "epilogue": p.epilogue}


def _diff(before: dict, st: SimState) -> tuple:
    changes = []
    for name in ("cid", "parent", "odd", "st_odd", "st_bnd"):
        old, new = before[name], getattr(st, name)
        for v in np.flatnonzero((old != new).any(axis=0)):
            changes.append((name, int(v), int(new[0, v])))
    gold, gnew = before["growth"], st.growth
    for e in np.flatnonzero((gold != gnew).any(axis=0)):
        changes.append(("growth", int(e), int(gnew[0, e])))
    return tuple(changes)


def trace_to_text(trace: list[TraceEvent]) -> str:
    """Line-delimited trace dump (cycle, stage, changed registers)."""
    lines = []
    for ev in trace:
        items = " ".join(f"{r}[{v}]={x}" for r, v, x in ev.changes)
        lines.append(f"{ev.cycle} {ev.array_cycle} {ev.stage} {items}".rstrip())
    return "\n".join(lines) + "\n"


# -- time-multiplexed decoding --------------------------------------------------

def context_switched_cycles(n: int, decision_cycle, transitions,
                            epilogue: int) -> np.ndarray:
    """Physical cycle count when n sub-graphs time-share one lattice: every
    logical cycle takes n context passes (reloads overlap with the passes
    inside a stage), and each global stage transition drains the pipeline and
    reloads every context (one cycle per context)."""
    decision_cycle = np.asarray(decision_cycle)
    if n == 1:
        return decision_cycle + epilogue
    return n * decision_cycle + n * np.asarray(transitions) + epilogue


def decode_context_switched(g: DecodingGraph, s: Syndrome, n: int,
                            params: SimParams = DEFAULT_PARAMS) -> DecodeResult:
    """Decode with n sub-graphs time-sharing one physical lattice.

    Context memory is double-buffered per logical cycle, so every pass reads
    the other contexts' previous-logical-cycle registers; the register
    evolution (hence the final cid/parent/growth state and clusters) is
    bit-identical to the monolithic array, only the cycle accounting changes.
    """
    from .graph import partition
    partition(g, n)  # validates n against the graph
    base = decode_distributed(g, s, params)
    cycles = int(context_switched_cycles(
        n, base.cycles - params.epilogue, base.transitions, params.epilogue))
    stage_cycles = dict(base.stage_cycles)
    stage_cycles["context_switches"] = 0 if n == 1 else base.transitions
    return DecodeResult(cycles, base.quiesce_cycle, base.iterations,
                        base.transitions, base.clusters, base.corrections,
                        base.cid, base.parent, base.growth, stage_cycles)

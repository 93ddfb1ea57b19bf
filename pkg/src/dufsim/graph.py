"""Decoding-graph construction for rotated surface codes.

Vertices are Z-type ancilla measurements over a window of measurement rounds;
edges are independent error mechanisms.  The phenomenological graph has space
edges (data-qubit errors), time edges (measurement errors) and boundary edges
(data-qubit errors on the two open sides, which flip a single ancilla).  The
circuit-level graph adds space-time diagonal edges (data errors straddling two
rounds) and hook edges (ancilla errors, modeled on alternating data qubits in
the opposite round orientation), for a maximum vertex degree of 12.

Geometry: data qubits sit on an integer d x d grid.  Plaquette centers (a, b)
with a in -1..d-1, b in 0..d-2 and (a + b) even are the Z ancillas: interior
rows plus half-plaquettes on the first and last rows.  Each data qubit belongs
to one or two Z plaquettes; two gives a space edge, one gives a boundary edge.
Vertex ids are 1..V, round-major then row-major from the bottom-left, so the
array is (d+1) rows by (d-1)/2 columns per round.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

SPACE = "space"
TIME = "time"
DIAGONAL = "space-time-diagonal"
HOOK = "hook"
BOUNDARY = "boundary"

EDGE_KINDS = (SPACE, TIME, DIAGONAL, HOOK, BOUNDARY)

DEFAULT_WEIGHT = 2


@dataclass(frozen=True)
class Vertex:
    """One ancilla measurement: id in 1..V plus (row, col, round) coordinates."""

    id: int
    row: int
    col: int
    round: int


@dataclass(frozen=True)
class Edge:
    """One error mechanism.

    ``v`` is 0 for boundary edges (single real endpoint ``u``).  ``qubit`` is
    the (row, col) of the data qubit the mechanism flips, or None for time
    edges.  ``round`` is the round the mechanism acts in (for time, diagonal
    and hook edges: the earlier of the two rounds it links).
    """

    id: int
    u: int
    v: int
    w: int
    kind: str
    qubit: tuple[int, int] | None
    round: int

    @property
    def is_boundary(self) -> bool:
        return self.v == 0

    def endpoints(self) -> tuple[int, ...]:
        return (self.u,) if self.v == 0 else (self.u, self.v)


def _zancilla_positions(d: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(-1, d) for b in range(d - 1) if (a + b) % 2 == 0]


def _zchecks_of_qubit(r: int, c: int, valid: set[tuple[int, int]]) -> list[tuple[int, int]]:
    if (r + c) % 2 == 0:
        cands = [(r - 1, c - 1), (r, c)]
    else:
        cands = [(r - 1, c), (r, c - 1)]
    return [ab for ab in cands if ab in valid]


class DecodingGraph:
    """Immutable decoding graph: vertices, edges and adjacency.

    Build with :func:`build_phenomenological` or :func:`build_circuit_level`
    (or :func:`from_edges` for hand-made test graphs).  Instances are safe to
    share across concurrent decoders; nothing mutates them after construction.
    """

    def __init__(self, d: int, rounds: int, vertices: Sequence[Vertex],
                 edges: Sequence[Edge]):
        self.d = d
        self.rounds = rounds
        self.vertices = tuple(vertices)
        self.edges = tuple(edges)
        ids = [v.id for v in self.vertices]
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError("vertex ids must be the contiguous range 1..V")
        self.num_vertices = len(self.vertices)
        incident: list[list[int]] = [[] for _ in range(self.num_vertices + 1)]
        for e in self.edges:
            if not 1 <= e.u <= self.num_vertices:
                raise ValueError(f"edge {e.id}: endpoint {e.u} out of range")
            if e.v != 0 and not 1 <= e.v <= self.num_vertices:
                raise ValueError(f"edge {e.id}: endpoint {e.v} out of range")
            if e.v == e.u:
                raise ValueError(f"edge {e.id}: endpoints must be distinct")
            if e.w < 1:
                raise ValueError(f"edge {e.id}: weight must be >= 1")
            incident[e.u].append(e.id)
            if e.v != 0:
                incident[e.v].append(e.id)
        self.incident_edges = tuple(tuple(lst) for lst in incident)

    # incident edges and adjacent vertices of one PE

    def edges_of(self, vid: int) -> tuple[Edge, ...]:
        return tuple(self.edges[i] for i in self.incident_edges[vid])

    def neighbors_of(self, vid: int) -> tuple[int, ...]:
        out = []
        for i in self.incident_edges[vid]:
            e = self.edges[i]
            if e.v == 0:
                continue
            out.append(e.v if e.u == vid else e.u)
        return tuple(out)

    def degree(self, vid: int, include_boundary: bool = False) -> int:
        if include_boundary:
            return len(self.incident_edges[vid])
        return sum(1 for i in self.incident_edges[vid] if self.edges[i].v != 0)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([e.w for e in self.edges], dtype=np.int16)

    @cached_property
    def edge_u(self) -> np.ndarray:
        return np.array([e.u for e in self.edges], dtype=np.int32)

    @cached_property
    def edge_v(self) -> np.ndarray:
        return np.array([e.v for e in self.edges], dtype=np.int32)

    @cached_property
    def vertex_index(self) -> dict[tuple[int, int, int], int]:
        """(row, col, round) -> id."""
        return {(v.row, v.col, v.round): v.id for v in self.vertices}

    def with_weights(self, weights: Sequence[int]) -> "DecodingGraph":
        if len(weights) != len(self.edges):
            raise ValueError("need one weight per edge")
        new_edges = [replace(e, w=int(w)) for e, w in zip(self.edges, weights)]
        return DecodingGraph(self.d, self.rounds, self.vertices, new_edges)

    # -- export --------------------------------------------------------------

    def export_text(self) -> str:
        """Line-delimited dump (one vertex / one edge per line) for debugging
        and golden tests."""
        lines = [f"# decoding-graph d={self.d} rounds={self.rounds} "
                 f"vertices={self.num_vertices} edges={len(self.edges)}"]
        for v in self.vertices:
            lines.append(f"V {v.id} {v.row} {v.col} {v.round}")
        for e in self.edges:
            qr, qc = e.qubit if e.qubit is not None else (-1, -1)
            lines.append(f"E {e.id} {e.kind} {e.u} {e.v} {e.w} {qr} {qc} {e.round}")
        return "\n".join(lines) + "\n"


def _check_params(d: int, rounds: int) -> None:
    if d < 3 or d % 2 == 0:
        raise ValueError(f"code distance must be an odd integer >= 3, got {d}")
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds}")


def vertex_count(d: int, rounds: int) -> int:
    return (d + 1) * ((d - 1) // 2) * rounds


def build_phenomenological(d: int, rounds: int) -> DecodingGraph:
    """Z-type graph: space edges within each round, time edges between
    consecutive rounds, boundary edges on the two open sides.  All w = 2."""
    _check_params(d, rounds)
    positions = _zancilla_positions(d)
    valid = set(positions)
    per_round = len(positions)
    cols = (d - 1) // 2

    def vid(a: int, b: int, t: int) -> int:
        row = a + 1
        col = (b - (a & 1)) // 2
        return t * per_round + row * cols + col + 1

    vertices = []
    for t in range(rounds):
        for a, b in sorted(positions, key=lambda ab: (ab[0] + 1, (ab[1] - (ab[0] & 1)) // 2)):
            vertices.append(Vertex(vid(a, b, t), a + 1, (b - (a & 1)) // 2, t))

    edges: list[Edge] = []

    def add(u: int, v: int, kind: str, qubit, t: int) -> None:
        if v != 0 and u > v:
            u, v = v, u
        edges.append(Edge(len(edges), u, v, DEFAULT_WEIGHT, kind, qubit, t))

    for t in range(rounds):
        for r in range(d):
            for c in range(d):
                checks = _zchecks_of_qubit(r, c, valid)
                if len(checks) == 2:
                    (a1, b1), (a2, b2) = checks
                    add(vid(a1, b1, t), vid(a2, b2, t), SPACE, (r, c), t)
                elif len(checks) == 1:
                    a1, b1 = checks[0]
                    add(vid(a1, b1, t), 0, BOUNDARY, (r, c), t)
                else:
                    raise AssertionError(f"data qubit ({r},{c}) touches no Z check")
    for t in range(rounds - 1):
        for a, b in positions:
            add(vid(a, b, t), vid(a, b, t + 1), TIME, None, t)
    return DecodingGraph(d, rounds, vertices, edges)


def build_circuit_level(d: int, rounds: int) -> DecodingGraph:
    """Phenomenological graph plus diagonal and hook edges spanning two rounds.

    Convention (held constant): for each space pair the diagonal runs from the
    lower-row ancilla at round t to the higher-row ancilla at round t+1; hook
    edges exist for space pairs whose shared data qubit has even (row + col)
    and run in the opposite orientation.
    """
    g = build_phenomenological(d, rounds)
    positions = _zancilla_positions(d)
    valid = set(positions)
    per_round = g.num_vertices // rounds

    edges = list(g.edges)

    def add(u: int, v: int, kind: str, qubit, t: int) -> None:
        edges.append(Edge(len(edges), u, v, DEFAULT_WEIGHT, kind, qubit, t))

    pairs = []
    for r in range(d):
        for c in range(d):
            checks = _zchecks_of_qubit(r, c, valid)
            if len(checks) == 2:
                lo, hi = sorted(checks)  # space pairs always differ by one row
                pairs.append((lo, hi, (r, c)))

    def vid0(a: int, b: int) -> int:
        row = a + 1
        col = (b - (a & 1)) // 2
        return row * ((d - 1) // 2) + col + 1

    for t in range(rounds - 1):
        off_t, off_t1 = t * per_round, (t + 1) * per_round
        for lo, hi, q in pairs:
            add(vid0(*lo) + off_t, vid0(*hi) + off_t1, DIAGONAL, q, t)
        for lo, hi, q in pairs:
            if (q[0] + q[1]) % 2 == 0:
                add(vid0(*hi) + off_t, vid0(*lo) + off_t1, HOOK, q, t)
    return DecodingGraph(d, rounds, g.vertices, edges)


def from_edges(num_vertices: int, pairs: Iterable[tuple[int, int]],
               w: int = DEFAULT_WEIGHT,
               boundary_at: Iterable[int] = ()) -> DecodingGraph:
    """Hand-made graph for tests: explicit vertex count, (u, v) pairs and
    optional boundary edges hanging off the listed vertices."""
    vertices = [Vertex(i, 0, i - 1, 0) for i in range(1, num_vertices + 1)]
    edges = []
    for u, v in pairs:
        u, v = min(u, v), max(u, v)
        edges.append(Edge(len(edges), u, v, w, SPACE, (0, len(edges)), 0))
    for u in boundary_at:
        edges.append(Edge(len(edges), u, 0, w, BOUNDARY, (0, len(edges)), 0))
    return DecodingGraph(3, 1, vertices, edges)


def assign_weights(g: DecodingGraph, edge_probs: Mapping[int, float] | Sequence[float],
                   w_max: int) -> DecodingGraph:
    """Map -log(p_i) affinely from [min, max] onto [2, w_max], round half-up.

    Degenerate case (all p equal) gives all weights 2.  ``edge_probs`` is a
    per-edge-id mapping or a dense sequence.
    """
    if w_max < 2:
        raise ValueError(f"w_max must be >= 2, got {w_max}")
    probs = np.empty(len(g.edges), dtype=float)
    if isinstance(edge_probs, Mapping):
        for e in g.edges:
            probs[e.id] = edge_probs[e.id]
    else:
        probs[:] = np.asarray(edge_probs, dtype=float)
    if np.any(probs <= 0.0) or np.any(probs >= 1.0):
        raise ValueError("edge probabilities must lie in (0, 1)")
    neglog = -np.log(probs)
    lo, hi = neglog.min(), neglog.max()
    if hi == lo:
        weights = np.full(len(g.edges), 2, dtype=int)
    else:
        scaled = 2.0 + (neglog - lo) / (hi - lo) * (w_max - 2)
        weights = np.floor(scaled + 0.5).astype(int)  # round half-up
        weights = np.clip(weights, 2, w_max)
    return g.with_weights(weights)


@dataclass(frozen=True)
class Partition:
    """Time-axis split into n contiguous round bands, plus the virtual PE ->
    (physical PE, context) map used by the time-multiplexed decoder.

    Bands alternate orientation inside the physical lattice (even bands map
    local round ell to ell, odd bands to L-1-ell), so any two adjacent
    vertices in different bands share a physical PE.
    """

    n: int
    bands: tuple[tuple[int, int], ...]      # (first_round, last_round) inclusive
    lattice_rounds: int
    subgraphs: tuple[frozenset[int], ...] = field(repr=False)
    phys_of_vertex: tuple[int, ...] = field(repr=False)   # by vertex id, [0] unused
    context_of_vertex: tuple[int, ...] = field(repr=False)


def partition(g: DecodingGraph, n: int) -> Partition:
    """Split g's rounds into n contiguous bands of near-equal size."""
    if not 1 <= n <= g.rounds:
        raise ValueError(f"need 1 <= n <= rounds, got n={n}, rounds={g.rounds}")
    if any(e.kind in (DIAGONAL, HOOK) for e in g.edges) and n > 1:
        raise ValueError("time-axis partitioning supports phenomenological graphs only")
    base, extra = divmod(g.rounds, n)
    bands = []
    start = 0
    for i in range(n):
        size = base + (1 if i < extra else 0)
        bands.append((start, start + size - 1))
        start += size
    lattice_rounds = base + (1 if extra else 0)
    per_round = g.num_vertices // g.rounds

    # Serpentine walk through lattice positions; consecutive bands reverse
    # direction, so the first round of a band lands on the same position as
    # the last round of the previous one.
    pos_of_round = [0] * g.rounds
    band_of_round = [0] * g.rounds
    pos, direction = 0, 1
    for i, (lo, hi) in enumerate(bands):
        for t in range(lo, hi + 1):
            pos_of_round[t] = pos + direction * (t - lo)
            band_of_round[t] = i
        pos += direction * (hi - lo)
        direction = -direction
    assert all(0 <= p < lattice_rounds for p in pos_of_round)

    phys = [0] * (g.num_vertices + 1)
    ctx = [0] * (g.num_vertices + 1)
    members: list[set[int]] = [set() for _ in range(n)]
    for v in g.vertices:
        i = band_of_round[v.round]
        phys[v.id] = pos_of_round[v.round] * per_round + (v.id - 1) % per_round
        ctx[v.id] = i
        members[i].add(v.id)
    return Partition(n, tuple(bands), lattice_rounds,
                     tuple(frozenset(m) for m in members),
                     tuple(phys), tuple(ctx))

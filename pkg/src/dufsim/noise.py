"""Seeded error-pattern and syndrome generation.

Three channels: phenomenological (data flips between rounds + measurement
flips), circuit-level (one independent mechanism per graph edge, including
diagonal and hook edges) and erasures (detected qubit loss: the lost qubit's
edge is pre-grown and the qubit takes an X flip with probability 1/2).

Conventions: a defect is a change between consecutive raw readouts (round 0
compares against 0).  The window is closed: measurement flips act in rounds
0..R-2 and the last round reads out noiselessly, so every mechanism maps to
exactly one graph edge.  Streams are counter-based (Philox): trial i of seed s
draws from key (s, i), so trials are reproducible and order-independent.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .graph import BOUNDARY, SPACE, TIME, DecodingGraph

_AUX_BASE = 1 << 62

MODELS = ("phenomenological", "circuit", "erasure")

_MAGIC = b"SYN1"


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial of one experiment."""
    return np.random.Generator(np.random.Philox(key=np.array(
        [seed & 0xFFFFFFFFFFFFFFFF, trial], dtype=np.uint64)))


def aux_rng(seed: int, tag: int) -> np.random.Generator:
    """Stream for experiment-level draws (e.g. per-edge probabilities)."""
    return trial_rng(seed, _AUX_BASE + tag)


@dataclass(frozen=True)
class ErrorPattern:
    """Fired mechanisms for one trial.  ``fired_edges`` are edge ids of the
    graph the pattern was sampled on; erasures list ((row, col), round)."""

    fired_edges: frozenset[int]
    erasures: frozenset[tuple[tuple[int, int], int]] = frozenset()

    def data_flips(self, g: DecodingGraph) -> frozenset[tuple[tuple[int, int], int]]:
        return frozenset((g.edges[i].qubit, g.edges[i].round)
                         for i in self.fired_edges if g.edges[i].qubit is not None)

    def measurement_flips(self, g: DecodingGraph) -> frozenset[tuple[int, int]]:
        return frozenset((g.edges[i].u, g.edges[i].round)
                         for i in self.fired_edges if g.edges[i].kind == TIME)

    def xor(self, other: "ErrorPattern") -> "ErrorPattern":
        return ErrorPattern(self.fired_edges ^ other.fired_edges,
                            self.erasures | other.erasures)


@dataclass(frozen=True)
class Syndrome:
    """Per-vertex defect bits plus erased edges for one decoding window.

    ``defects`` is indexed by vertex id (entry 0 unused).  ``erasure_mode``
    marks syndromes produced by an erasure-capable front end; the distributed
    decoder runs its merging prologue whenever it is set, even if no erasure
    fired in this particular trial.
    """

    defects: np.ndarray
    erased_edges: frozenset[int] = frozenset()
    erasure_mode: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def defect_ids(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.defects))

    def count(self) -> int:
        return int(self.defects.sum())


def empty_syndrome(g: DecodingGraph) -> Syndrome:
    return Syndrome(np.zeros(g.num_vertices + 1, dtype=bool))


def syndrome_of(g: DecodingGraph, defect_ids, erased_edges=(),
                erasure_mode: bool = False) -> Syndrome:
    defects = np.zeros(g.num_vertices + 1, dtype=bool)
    defects[list(defect_ids)] = True
    return Syndrome(defects, frozenset(erased_edges), erasure_mode)


def syndrome_from_pattern(g: DecodingGraph, pattern: ErrorPattern,
                          erasure_mode: bool | None = None) -> Syndrome:
    """Defects = XOR of the endpoint toggles of the fired mechanisms."""
    defects = np.zeros(g.num_vertices + 1, dtype=bool)
    for i in pattern.fired_edges:
        e = g.edges[i]
        defects[e.u] ^= True
        if e.v != 0:
            defects[e.v] ^= True
    edge_at = qubit_edge_index(g)
    erased = frozenset(edge_at[(q[0], q[1], t)] for (q, t) in pattern.erasures)
    if erasure_mode is None:
        erasure_mode = bool(pattern.erasures)
    return Syndrome(defects, erased, erasure_mode)


def _check_p(p: float) -> None:
    if not 0.0 <= p < 1.0:
        raise ValueError(f"probability must lie in [0, 1), got {p}")


def sample_phenomenological(g: DecodingGraph, p: float, seed: int,
                            trial: int = 0) -> tuple[ErrorPattern, Syndrome]:
    """Data qubits flip between rounds with probability p; a raw readout is
    the parity of adjacent accumulated flips XOR a measurement flip (also p,
    rounds 0..R-2); a defect is a change between consecutive raw readouts."""
    _check_p(p)
    rng = trial_rng(seed, trial)
    d, R = g.d, g.rounds
    per_round = g.num_vertices // R
    data_flips = rng.random((R, d, d)) < p
    meas_flips = rng.random((R, per_round)) < p
    meas_flips[R - 1] = False  # last round reads out noiselessly

    rows, cols = _ancilla_qubit_matrix(g)
    acc = np.zeros((d, d), dtype=bool)
    defects = np.zeros(g.num_vertices + 1, dtype=bool)
    prev = np.zeros(per_round, dtype=bool)
    for t in range(R):
        acc ^= data_flips[t]
        raw = np.logical_xor.reduce(acc[rows, cols] & (rows >= 0), axis=1)
        raw ^= meas_flips[t]
        defects[t * per_round + 1:(t + 1) * per_round + 1] = raw ^ prev
        prev = raw

    edge_at = qubit_edge_index(g)
    fired = {edge_at[(int(r), int(c), t)]
             for t in range(R) for r, c in zip(*np.nonzero(data_flips[t]))}
    time_at = time_edge_index(g)
    for t in range(R - 1):
        for k in np.flatnonzero(meas_flips[t]):
            fired.add(time_at[(t * per_round + int(k) + 1, t)])
    return ErrorPattern(frozenset(fired)), Syndrome(defects)


def sample_circuit_level(g: DecodingGraph, p: float, seed: int,
                         trial: int = 0) -> tuple[ErrorPattern, Syndrome]:
    """Each graph edge is an independent mechanism firing with probability p;
    a fired mechanism toggles the defect bits of its endpoints."""
    _check_p(p)
    rng = trial_rng(seed, trial)
    fired = frozenset(int(i) for i in np.flatnonzero(rng.random(len(g.edges)) < p))
    pattern = ErrorPattern(fired)
    return pattern, syndrome_from_pattern(g, pattern, erasure_mode=False)


def sample_erasures(g: DecodingGraph, p_e: float, seed: int,
                    trial: int = 0) -> tuple[ErrorPattern, Syndrome]:
    """Pure erasure channel: each data qubit is erased per round with
    probability p_e; the erased qubit's edge joins Syndrome.erased_edges and
    the qubit takes an X flip with probability 1/2.

    Draws from a sub-stream disjoint from the other samplers' so erasures can
    be composed with a phenomenological pattern of the same (seed, trial).
    """
    _check_p(p_e)
    rng = trial_rng(seed, (1 << 61) + trial)
    d, R = g.d, g.rounds
    sites = rng.random((R, d, d)) < p_e
    flips = rng.random((R, d, d)) < 0.5
    erasures = frozenset(((int(r), int(c)), t)
                         for t in range(R) for r, c in zip(*np.nonzero(sites[t])))
    edge_at = qubit_edge_index(g)
    fired = frozenset(edge_at[(int(r), int(c), t)]
                      for t in range(R)
                      for r, c in zip(*np.nonzero(sites[t] & flips[t])))
    pattern = ErrorPattern(fired, erasures)
    return pattern, syndrome_from_pattern(g, pattern, erasure_mode=True)


# -- batch sampling (mechanism route; equivalence with the raw-readout route
#    is covered by tests) ----------------------------------------------------

def sample_fired_batch(g: DecodingGraph, edge_probs: np.ndarray, seed: int,
                       trials: int, first_trial: int = 0) -> np.ndarray:
    """[trials, E] bool of fired mechanisms, one Philox stream per trial.

    For the phenomenological model pass uniform probabilities with the time
    entries of the final round zeroed (see :func:`phenomenological_probs`).
    """
    out = np.empty((trials, len(g.edges)), dtype=bool)
    for i in range(trials):
        rng = trial_rng(seed, first_trial + i)
        out[i] = rng.random(len(g.edges)) < edge_probs
    return out


def sample_erasure_batch(g: DecodingGraph, p_e: float, seed: int, trials: int,
                         first_trial: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """([trials, E] erased-edge mask, [trials, E] fired 50% flips).

    Uses a distinct sub-stream per trial (trial index offset by 2^61) so the
    draws never collide with sample_fired_batch on the same seed.
    """
    qmask = np.array([e.kind in (SPACE, BOUNDARY) for e in g.edges])
    erased = np.zeros((trials, len(g.edges)), dtype=bool)
    fired = np.zeros((trials, len(g.edges)), dtype=bool)
    for i in range(trials):
        rng = trial_rng(seed, (1 << 61) + first_trial + i)
        er = (rng.random(len(g.edges)) < p_e) & qmask
        erased[i] = er
        fired[i] = er & (rng.random(len(g.edges)) < 0.5)
    return erased, fired


def defects_from_fired(g: DecodingGraph, fired: np.ndarray) -> np.ndarray:
    """[B, E] fired mechanisms -> [B, V+1] defect bits."""
    B = fired.shape[0]
    defects = np.zeros((B, g.num_vertices + 1), dtype=bool)
    counts = np.zeros((B, g.num_vertices + 1), dtype=np.int32)
    np.add.at(counts, (slice(None), g.edge_u), fired.astype(np.int32))
    np.add.at(counts, (slice(None), g.edge_v), fired.astype(np.int32))
    defects[:, 1:] = (counts[:, 1:] & 1).astype(bool)
    return defects


def phenomenological_probs(g: DecodingGraph, p: float) -> np.ndarray:
    """Per-edge mechanism probabilities for the phenomenological model: every
    space/boundary/time edge fires at p, except no measurement error feeds the
    noiseless final round (time edges all end before it by construction)."""
    probs = np.full(len(g.edges), p, dtype=float)
    extra = [e.id for e in g.edges if e.kind not in (SPACE, BOUNDARY, TIME)]
    probs[extra] = 0.0
    return probs


def expected_defect_count(g: DecodingGraph, edge_probs: np.ndarray) -> float:
    """Closed-form mean defect count: a vertex flips iff an odd number of its
    incident mechanisms fire, so P(defect) = (1 - prod(1 - 2 p_i)) / 2."""
    total = 0.0
    for vid in range(1, g.num_vertices + 1):
        prod = 1.0
        for eid in g.incident_edges[vid]:
            prod *= 1.0 - 2.0 * edge_probs[eid]
        total += (1.0 - prod) / 2.0
    return total


# -- indices ------------------------------------------------------------------

def qubit_edge_index(g: DecodingGraph) -> dict[tuple[int, int, int], int]:
    """(row, col, round) of a data qubit -> its space/boundary edge id."""
    return {(e.qubit[0], e.qubit[1], e.round): e.id
            for e in g.edges if e.kind in (SPACE, BOUNDARY)}


def time_edge_index(g: DecodingGraph) -> dict[tuple[int, int], int]:
    """(lower vertex id, round) -> time edge id."""
    return {(e.u, e.round): e.id for e in g.edges if e.kind == TIME}


def _ancilla_qubit_matrix(g: DecodingGraph) -> tuple[np.ndarray, np.ndarray]:
    """Padded per-ancilla data-qubit coordinate matrix (row-0 ancillas),
    padding marked with -1."""
    per_round = g.num_vertices // g.rounds
    lists: list[list[tuple[int, int]]] = [[] for _ in range(per_round)]
    for e in g.edges:
        if e.round != 0 or e.kind not in (SPACE, BOUNDARY):
            continue
        lists[e.u - 1].append(e.qubit)
        if e.v != 0:
            lists[e.v - 1].append(e.qubit)
    width = max(len(l) for l in lists)
    rows = np.full((per_round, width), -1, dtype=np.int64)
    cols = np.zeros((per_round, width), dtype=np.int64)
    for k, l in enumerate(lists):
        for j, (r, c) in enumerate(l):
            rows[k, j] = r
            cols[k, j] = c
    return rows, cols


# -- dump / load ---------------------------------------------------------------

_MODEL_CODES = {m: i for i, m in enumerate(MODELS)}


def dump_syndrome(s: Syndrome, d: int, rounds: int, model: str, seed: int) -> bytes:
    """Bit-packed binary form with a small header (d, rounds, model, seed)."""
    packed = np.packbits(s.defects[1:].astype(np.uint8))
    erased = sorted(s.erased_edges)
    head = struct.pack("<4sHHBBQII", _MAGIC, d, rounds, _MODEL_CODES[model],
                       1 if s.erasure_mode else 0, seed & 0xFFFFFFFFFFFFFFFF,
                       len(s.defects) - 1, len(erased))
    return head + packed.tobytes() + np.array(erased, dtype="<u4").tobytes()


def load_syndrome(blob: bytes) -> tuple[Syndrome, dict]:
    head_size = struct.calcsize("<4sHHBBQII")
    magic, d, rounds, model_code, emode, seed, nv, ne = struct.unpack(
        "<4sHHBBQII", blob[:head_size])
    if magic != _MAGIC:
        raise ValueError("not a syndrome dump")
    nbytes = (nv + 7) // 8
    bits = np.unpackbits(np.frombuffer(blob[head_size:head_size + nbytes],
                                       dtype=np.uint8))[:nv].astype(bool)
    erased = np.frombuffer(blob[head_size + nbytes:], dtype="<u4")[:ne]
    defects = np.zeros(nv + 1, dtype=bool)
    defects[1:] = bits
    meta = {"d": d, "rounds": rounds, "model": MODELS[model_code], "seed": seed}
    return Syndrome(defects, frozenset(int(i) for i in erased), bool(emode)), meta


def syndrome_to_text(s: Syndrome, d: int, rounds: int, model: str, seed: int) -> str:
    """Human-readable form for golden tests: header + defect + erased lines."""
    lines = [f"# syndrome d={d} rounds={rounds} model={model} seed={seed} "
             f"erasure_mode={int(s.erasure_mode)}",
             "defects " + " ".join(str(i) for i in s.defect_ids),
             "erased " + " ".join(str(i) for i in sorted(s.erased_edges))]
    return "\n".join(lines) + "\n"

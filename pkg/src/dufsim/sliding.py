"""Sliding-window decoding of an unbounded round stream.

A window of 2d rounds is decoded in full, but only corrections touching the
oldest d rounds are committed; the window then advances by d rounds.  The
committed toggles that land in the retained rounds are exactly the seed
defects the straddling clusters leave behind, so the next window decodes the
residual syndrome and the committed corrections annihilate the whole stream.
Time edges carry no physical correction; committing one transfers its defect
parity across the commit line.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import BOUNDARY, SPACE, TIME, DecodingGraph, build_phenomenological
from .noise import Syndrome
from .pearray import DEFAULT_PARAMS, SimParams, decode_distributed


@dataclass(frozen=True)
class CommittedCorrection:
    """One committed physical correction: data qubit and absolute round."""

    qubit: tuple[int, int]
    round: int
    kind: str


@dataclass
class SlidingResult:
    committed: tuple[CommittedCorrection, ...]
    window_cycles: tuple[int, ...]
    window_clusters: tuple[int, ...]
    windows: int
    residual_defects: int   # leftover stream defects after all commits (0 iff clean)

    @property
    def cycles(self) -> int:
        return int(sum(self.window_cycles))


def decode_sliding_window(g_template: DecodingGraph, defect_rounds,
                          d: int, params: SimParams = DEFAULT_PARAMS) -> SlidingResult:
    """Decode a stream of per-round defect vectors.

    ``g_template`` must be a phenomenological graph with 2d rounds (the
    window).  ``defect_rounds`` is a sequence of T per-round bit arrays
    (length = vertices per round), T a multiple of d and at least 2d.
    """
    window_rounds = 2 * d
    if g_template.rounds != window_rounds:
        raise ValueError("window template must have 2d rounds")
    per_round = g_template.num_vertices // g_template.rounds
    stream = np.array([np.asarray(r, dtype=bool) for r in defect_rounds])
    T = stream.shape[0]
    if T % d != 0 or T < window_rounds:
        raise ValueError("stream length must be a multiple of d and >= 2d")
    if stream.shape[1] != per_round:
        raise ValueError("per-round defect vectors do not match the template")

    residual = stream.copy()
    committed: list[CommittedCorrection] = []
    window_cycles = []
    window_clusters = []
    n_windows = T // d - 1
    for k in range(n_windows):
        base = k * d
        defects = np.zeros(g_template.num_vertices + 1, dtype=bool)
        defects[1:] = residual[base:base + window_rounds].reshape(-1)
        res = decode_distributed(g_template, Syndrome(defects), params)
        window_cycles.append(res.cycles)
        window_clusters.append(len(res.clusters.clusters))
        last = k == n_windows - 1
        for eid in res.corrections:
            e = g_template.edges[eid]
            rounds = [e.round] if e.kind in (SPACE, BOUNDARY) else [e.round, e.round + 1]
            if not last and min(rounds) >= d:
                continue  # lies wholly in the retained half; recheck next window
            for vid, t in _edge_defect_rounds(e):
                residual[base + t, vid - t * per_round - 1] ^= True
            if e.kind != TIME:
                committed.append(CommittedCorrection(e.qubit, base + e.round, e.kind))

    leftover = int(residual.sum())
    return SlidingResult(tuple(committed), tuple(window_cycles),
                         tuple(window_clusters), n_windows, leftover)


def _edge_defect_rounds(e):
    """(vertex id, window round) toggled by committing edge e."""
    per = []
    if e.kind in (SPACE, BOUNDARY):
        per.append((e.u, e.round))
        if e.v != 0:
            per.append((e.v, e.round))
    else:  # time/diagonal/hook span e.round and e.round + 1
        per.append((e.u, e.round))
        per.append((e.v, e.round + 1))
    return per


def window_template(d: int) -> DecodingGraph:
    return build_phenomenological(d, 2 * d)

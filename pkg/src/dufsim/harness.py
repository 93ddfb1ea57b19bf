"""Experiment driver: seeded trial batches, aggregation, CSV and plot output.

Every run is deterministic in (config, seed): trial i draws from the Philox
stream keyed (seed, i) regardless of batching, so reruns produce identical
CSV bytes.  The exit contract for the CLI: any trial failing annihilation or
the worst-case cycle bound makes the run fail.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, fields, replace

import numpy as np

from .corrector import corrections_for_clusters, residual_qubit_flips
from .fastsim import decode_batch_fast
from .graph import (DecodingGraph, assign_weights, build_circuit_level,
                    build_phenomenological)
from .noise import (MODELS, Syndrome, aux_rng, defects_from_fired,
                    phenomenological_probs, sample_erasure_batch,
                    sample_fired_batch)
from .pearray import DEFAULT_PARAMS, SimParams, context_switched_cycles, cycle_bound
from .serial_uf import decode_serial
from .sliding import decode_sliding_window, window_template

CSV_SCHEMA = 1

# Weighted-noise model: per-edge probabilities drawn from N(p, p/2), clipped
# to [p/4, 2p] (an unbounded lower tail collapses the affine weight map onto
# w=2 for every typically-firing edge; the band is a documented calibration
# constant).
P_FLOOR_FACTOR = 0.25
P_CEIL_FACTOR = 2.0


@dataclass
class ExperimentConfig:
    d: int = 13
    rounds: int = 13
    model: str = "phenomenological"
    p: float = 0.001
    p_e: float = 0.0
    w_max: int = 2
    weighted_noise: bool = False
    decoder: str = "distributed"
    context_n: int = 1
    sliding_window: bool = False
    trials: int = 1000
    seed: int = 0
    clock_ns: float = 10.0
    out_dir: str = ""

    def validate(self) -> None:
        if self.d < 3 or self.d % 2 == 0:
            raise ValueError("d must be an odd integer >= 3")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if not 0.0 <= self.p < 1.0 or not 0.0 <= self.p_e < 1.0:
            raise ValueError("p and p_e must lie in [0, 1)")
        if self.w_max < 2:
            raise ValueError("w_max must be >= 2")
        if self.decoder not in ("serial", "distributed"):
            raise ValueError("decoder must be 'serial' or 'distributed'")
        if self.context_n < 1:
            raise ValueError("context_n must be >= 1")
        if self.trials < 0:
            raise ValueError("trials must be >= 0")
        if self.clock_ns <= 0:
            raise ValueError("clock_ns must be positive")
        if self.sliding_window:
            if self.rounds % self.d != 0 or self.rounds < 2 * self.d:
                raise ValueError("sliding window needs rounds a multiple of d, >= 2d")
            if self.model != "phenomenological" or self.decoder != "distributed":
                raise ValueError("sliding window supports the distributed "
                                 "phenomenological configuration")


@dataclass
class TrialRecord:
    trial: int
    defect_count: int
    cycles: int
    ns: float
    iterations: int
    cluster_count: int
    logical_flip: bool
    annihilated: bool


@dataclass
class Summary:
    n: int
    d: int
    rounds: int
    model: str
    p: float
    p_e: float
    w_max: int
    decoder: str
    context_n: int
    sliding_window: bool
    seed: int
    clock_ns: float
    mean_defects: float
    mean_iterations: float
    mean_cycles: float
    mean_ns: float
    p50_ns: float
    p97_ns: float
    p9999_ns: float
    ns_per_round: float
    logical_error_rate: float
    all_annihilated: bool
    cycle_bound_ok: bool


@dataclass
class ExperimentOutcome:
    config: ExperimentConfig
    records: list[TrialRecord]
    summary: Summary | None

    @property
    def ok(self) -> bool:
        if not self.records:
            return True
        return self.summary.all_annihilated and self.summary.cycle_bound_ok


def nearest_rank(sorted_vals: np.ndarray, q: float) -> float:
    """Nearest-rank percentile: the ceil(q/100 * n)-th smallest value."""
    n = len(sorted_vals)
    k = max(1, int(np.ceil(q / 100.0 * n)))
    return float(sorted_vals[k - 1])


def summarize(records: list[TrialRecord], cfg: ExperimentConfig) -> Summary:
    if not records:
        raise ValueError("cannot summarize an empty record list")
    ns = np.sort(np.array([r.ns for r in records]))
    cyc = np.array([r.cycles for r in records], dtype=float)
    bound_ok = True
    if cfg.decoder == "distributed" and cfg.w_max == 2 and not cfg.sliding_window:
        bound_ok = bool((cyc <= cycle_bound(cfg.d)).all())
    return Summary(
        n=len(records), d=cfg.d, rounds=cfg.rounds, model=cfg.model,
        p=cfg.p, p_e=cfg.p_e, w_max=cfg.w_max, decoder=cfg.decoder,
        context_n=cfg.context_n, sliding_window=cfg.sliding_window,
        seed=cfg.seed, clock_ns=cfg.clock_ns,
        mean_defects=float(np.mean([r.defect_count for r in records])),
        mean_iterations=float(np.mean([r.iterations for r in records])),
        mean_cycles=float(cyc.mean()),
        mean_ns=float(ns.mean()),
        p50_ns=nearest_rank(ns, 50.0),
        p97_ns=nearest_rank(ns, 97.0),
        p9999_ns=nearest_rank(ns, 99.99),
        ns_per_round=float(ns.mean()) / cfg.rounds,
        logical_error_rate=float(np.mean([r.logical_flip for r in records])),
        all_annihilated=all(r.annihilated for r in records),
        cycle_bound_ok=bound_ok)


def build_graph(cfg: ExperimentConfig) -> DecodingGraph:
    builder = build_circuit_level if cfg.model == "circuit" else build_phenomenological
    rounds = 2 * cfg.d if cfg.sliding_window else cfg.rounds
    g = builder(cfg.d, rounds)
    if cfg.weighted_noise:
        g = assign_weights(g, edge_probabilities(cfg, g), cfg.w_max)
    return g


def edge_probabilities(cfg: ExperimentConfig, g: DecodingGraph) -> np.ndarray:
    """Per-edge mechanism probabilities.  With weighted_noise they are drawn
    once per experiment from N(p, p/2), clipped to [p/2, p + 3p/2]."""
    if not cfg.weighted_noise:
        if cfg.model == "circuit":
            return np.full(len(g.edges), cfg.p)
        return phenomenological_probs(g, cfg.p)
    rng = aux_rng(cfg.seed, 1)
    draws = rng.normal(cfg.p, cfg.p / 2.0, len(g.edges))
    return np.clip(draws, cfg.p * P_FLOOR_FACTOR,
                   min(cfg.p * P_CEIL_FACTOR, 0.49))


def run_experiment(cfg: ExperimentConfig,
                   params: SimParams | None = None) -> ExperimentOutcome:
    cfg.validate()
    params = params or replace(DEFAULT_PARAMS, clock_ns=cfg.clock_ns)
    if cfg.trials == 0:
        return ExperimentOutcome(cfg, [], None)
    if cfg.sliding_window:
        return _run_sliding(cfg, params)

    g = build_graph(cfg)
    probs = edge_probabilities(cfg, g)
    records: list[TrialRecord] = []
    chunk = 4096
    for start in range(0, cfg.trials, chunk):
        B = min(chunk, cfg.trials - start)
        fired = sample_fired_batch(g, probs, cfg.seed, B, first_trial=start)
        erased = None
        if cfg.model == "erasure":
            erased, efired = sample_erasure_batch(g, cfg.p_e, cfg.seed, B,
                                                  first_trial=start)
            fired ^= efired
        defects = defects_from_fired(g, fired)
        if cfg.decoder == "serial":
            records.extend(_serial_chunk(g, cfg, start, fired, defects, erased))
        else:
            records.extend(_distributed_chunk(g, cfg, params, start, fired,
                                              defects, erased))
    return ExperimentOutcome(cfg, records, summarize(records, cfg))


def _logical_flip_fast(g: DecodingGraph, fired_row, corrections) -> bool:
    net = residual_qubit_flips(g, np.flatnonzero(fired_row))
    net ^= residual_qubit_flips(g, corrections)
    return bool(np.logical_xor.reduce(net[:, 0]))


def _distributed_chunk(g, cfg, params, start, fired, defects, erased):
    res = decode_batch_fast(g, defects, erased, cfg.model == "erasure", params)
    if cfg.context_n > 1:
        cycles = context_switched_cycles(cfg.context_n, res.decision_cycle,
                                         res.transitions, params.epilogue)
    else:
        cycles = res.cycles
    out = []
    for i in range(defects.shape[0]):
        clusters = res.clusters_of(i)
        corr = res.corrections_of(i)
        toggles = _toggles(g, corr)
        annihilated = bool(np.array_equal(toggles[1:], defects[i, 1:]))
        flip = _logical_flip_fast(g, fired[i], corr) if annihilated else False
        out.append(TrialRecord(start + i, int(defects[i, 1:].sum()),
                               int(cycles[i]), float(cycles[i]) * cfg.clock_ns,
                               int(res.iterations[i]), len(clusters.clusters),
                               flip, annihilated))
    return out


def _serial_chunk(g, cfg, start, fired, defects, erased):
    out = []
    for i in range(defects.shape[0]):
        er = frozenset(int(e) for e in np.flatnonzero(erased[i])) if erased is not None \
            else frozenset()
        s = Syndrome(defects[i], er, cfg.model == "erasure")
        res = decode_serial(g, s)
        corr = corrections_for_clusters(g, res.clusters, defects[i])
        toggles = _toggles(g, corr)
        annihilated = bool(np.array_equal(toggles[1:], defects[i, 1:]))
        flip = _logical_flip_fast(g, fired[i], corr) if annihilated else False
        out.append(TrialRecord(start + i, int(defects[i, 1:].sum()), 0, 0.0,
                               res.iterations, len(res.clusters.clusters),
                               flip, annihilated))
    return out


def _run_sliding(cfg, params):
    template = window_template(cfg.d)
    g_full = build_phenomenological(cfg.d, cfg.rounds)
    probs = phenomenological_probs(g_full, cfg.p)
    per_round = g_full.num_vertices // cfg.rounds
    records = []
    for i in range(cfg.trials):
        fired = sample_fired_batch(g_full, probs, cfg.seed, 1, first_trial=i)[0]
        defects = defects_from_fired(g_full, fired[None, :])[0]
        rounds = defects[1:].reshape(cfg.rounds, per_round)
        sres = decode_sliding_window(template, rounds, cfg.d, params)
        annihilated = sres.residual_defects == 0
        net = residual_qubit_flips(g_full, np.flatnonzero(fired))
        for c in sres.committed:
            net[c.qubit] ^= True
        flip = bool(np.logical_xor.reduce(net[:, 0])) if annihilated else False
        records.append(TrialRecord(i, int(defects[1:].sum()), sres.cycles,
                                   sres.cycles * cfg.clock_ns, sres.windows,
                                   sum(sres.window_clusters), flip, annihilated))
    return ExperimentOutcome(cfg, records, summarize(records, cfg))


def _toggles(g, correction):
    out = np.zeros(g.num_vertices + 1, dtype=bool)
    for eid in correction:
        e = g.edges[eid]
        out[e.u] ^= True
        if e.v != 0:
            out[e.v] ^= True
    return out


# -- config file (flat key = value; CLI flags win) ------------------------------

def emit_config(cfg: ExperimentConfig) -> str:
    lines = [f"{f.name} = {getattr(cfg, f.name)!r}" for f in fields(cfg)]
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> ExperimentConfig:
    values = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, raw = line.partition("=")
        key = key.strip()
        values[key] = _parse_value(key, raw.strip())
    return ExperimentConfig(**values)


def _parse_value(key: str, raw: str):
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    if key not in types:
        raise ValueError(f"unknown config key: {key}")
    raw = raw.strip("'\"")
    t = types[key]
    if t in ("bool", bool):
        return raw.lower() in ("1", "true", "yes")
    if t in ("int", int):
        return int(raw)
    if t in ("float", float):
        return float(raw)
    return raw


# -- CSV + plots -----------------------------------------------------------------

TRIALS_COLUMNS = ("trial", "defect_count", "cycles", "ns", "iterations",
                  "cluster_count", "logical_flip", "annihilated")


def trials_csv(records: list[TrialRecord], cfg: ExperimentConfig) -> str:
    buf = io.StringIO()
    buf.write(f"# schema={CSV_SCHEMA} kind=trials\n")
    buf.write(f"# config: {emit_config(cfg).replace(chr(10), '; ')}\n")
    buf.write(",".join(TRIALS_COLUMNS) + "\n")
    for r in records:
        buf.write(f"{r.trial},{r.defect_count},{r.cycles},{r.ns:.4f},"
                  f"{r.iterations},{r.cluster_count},{int(r.logical_flip)},"
                  f"{int(r.annihilated)}\n")
    return buf.getvalue()


SUMMARY_COLUMNS = ("n", "d", "rounds", "model", "p", "p_e", "w_max", "decoder",
                   "context_n", "sliding_window", "seed", "clock_ns",
                   "mean_defects", "mean_iterations", "mean_cycles", "mean_ns",
                   "p50_ns", "p97_ns", "p9999_ns", "ns_per_round",
                   "logical_error_rate", "all_annihilated", "cycle_bound_ok")


def summary_csv(summaries: list[Summary]) -> str:
    buf = io.StringIO()
    buf.write(f"# schema={CSV_SCHEMA} kind=summary\n")
    buf.write(",".join(SUMMARY_COLUMNS) + "\n")
    for s in summaries:
        row = []
        for c in SUMMARY_COLUMNS:
            v = getattr(s, c)
            if isinstance(v, bool):
                v = int(v)
            elif isinstance(v, float):
                v = f"{v:.6f}"
            row.append(str(v))
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def histogram_csv(records: list[TrialRecord], clock_ns: float) -> str:
    """Latency histogram in single-cycle bins; counts sum to the trial count."""
    cyc = np.array([r.cycles for r in records], dtype=int)
    buf = io.StringIO()
    buf.write(f"# schema={CSV_SCHEMA} kind=histogram\n")
    buf.write("cycles,ns,count\n")
    if len(cyc):
        for c in range(cyc.min(), cyc.max() + 1):
            n = int((cyc == c).sum())
            if n:
                buf.write(f"{c},{c * clock_ns:.4f},{n}\n")
    return buf.getvalue()


def emit_outputs(outcome: ExperimentOutcome, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def save(name, text):
        path = os.path.join(out_dir, name)
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"failed writing {path}: {exc}") from exc
        written.append(path)

    save("trials.csv", trials_csv(outcome.records, outcome.config))
    if outcome.summary is not None:
        save("summary.csv", summary_csv([outcome.summary]))
        save("histogram.csv", histogram_csv(outcome.records,
                                            outcome.config.clock_ns))
        written.append(plot_distribution(outcome, out_dir))
    return written


def plot_distribution(outcome: ExperimentOutcome, out_dir: str) -> str:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ns = [r.ns for r in outcome.records]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(ns, bins=50, color="tab:blue", log=True)
    ax.set_xlabel("decoding time (ns)")
    ax.set_ylabel("trials")
    cfg = outcome.config
    ax.set_title(f"d={cfg.d} {cfg.model} p={cfg.p} ({cfg.decoder})")
    path = os.path.join(out_dir, "distribution.png")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_scaling(summaries: list[Summary], out_dir: str) -> list[str]:
    """Scaling figure: mean time per measurement round against distance,
    plus its per-figure CSV."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(out_dir, exist_ok=True)
    rows = sorted((s.d, s.ns_per_round, s.mean_ns) for s in summaries)
    csv_path = os.path.join(out_dir, "scaling.csv")
    with open(csv_path, "w") as fh:
        fh.write(f"# schema={CSV_SCHEMA} kind=scaling\n")
        fh.write("d,ns_per_round,mean_ns\n")
        for d, npr, mns in rows:
            fh.write(f"{d},{npr:.6f},{mns:.6f}\n")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([r[0] for r in rows], [r[1] for r in rows], "o-")
    ax.set_xlabel("code distance d")
    ax.set_ylabel("mean ns per measurement round")
    fig.tight_layout()
    png_path = os.path.join(out_dir, "scaling.png")
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [csv_path, png_path]

"""Distributed union-find surface-code decoder: graphs, noise, serial oracle,
cycle-accurate PE-array simulation, corrections and the experiment harness."""

from .graph import (DecodingGraph, Edge, Partition, Vertex, assign_weights,
                    build_circuit_level, build_phenomenological, from_edges,
                    partition, vertex_count)
from .noise import (ErrorPattern, Syndrome, empty_syndrome,
                    sample_circuit_level, sample_erasures,
                    sample_phenomenological, syndrome_from_pattern)
from .serial_uf import ClusterSet, brute_force_clusters, decode_serial
from .corrector import check_annihilation, logical_flip, peel
from .pearray import (DecodeResult, SimParams, cycle_bound,
                      decode_batch, decode_context_switched,
                      decode_distributed)
from .sliding import decode_sliding_window

__all__ = [
    "DecodingGraph", "Edge", "Vertex", "Partition",
    "build_phenomenological", "build_circuit_level", "from_edges",
    "assign_weights", "partition", "vertex_count",
    "ErrorPattern", "Syndrome", "empty_syndrome", "syndrome_from_pattern",
    "sample_phenomenological", "sample_circuit_level", "sample_erasures",
    "ClusterSet", "decode_serial", "brute_force_clusters",
    "peel", "check_annihilation", "logical_flip",
    "SimParams", "DecodeResult", "decode_batch", "decode_distributed",
    "decode_context_switched", "decode_sliding_window", "cycle_bound",
]

"""Simulator and verification library for multicast quantum network coding.

Builds solvable classical linear multicast codes over GF(p^t), simulates
coherent GHZ distribution over acyclic networks, and runs the 1->2 and
1->3 asymmetric universal-clone multicast protocols end to end, checking
the aggregated outputs against the exact cloning-channel oracles.
"""

from .errors import QmcastError
from .gf import FieldElement, FieldSpec, make_field
from .network import (NetworkSpec, builtin_network, min_cut, parse_network,
                      topological_edge_order)
from .code import (LinearMulticastCode, code_from_document, code_from_json,
                   construct_code, decode_at_target, encode_session)
from .sim import (DensityMatrix, PureState, Register, fidelity, measure_in_basis,
                  partial_trace, teleport, trace_distance)
from .transcript import EbitLedger, RunTranscript, entanglement_entropy
from .uqcm import (CloneParams12, CloneParams13, analytic_fidelities_12,
                   analytic_fidelities_13, channel_12_oracle, channel_13_oracle)
from .kobayashi import ghz_reference, run_protocol1, verified_ghz
from .mcast12 import run_protocol2, verify_12
from .mcast13 import run_protocol3, verify_13

__all__ = [
    "QmcastError", "FieldElement", "FieldSpec", "make_field",
    "NetworkSpec", "builtin_network", "min_cut", "parse_network",
    "topological_edge_order",
    "LinearMulticastCode", "code_from_document", "code_from_json",
    "construct_code", "decode_at_target", "encode_session",
    "DensityMatrix", "PureState", "Register", "fidelity", "measure_in_basis",
    "partial_trace", "teleport", "trace_distance",
    "EbitLedger", "RunTranscript", "entanglement_entropy",
    "CloneParams12", "CloneParams13", "analytic_fidelities_12",
    "analytic_fidelities_13", "channel_12_oracle", "channel_13_oracle",
    "ghz_reference", "run_protocol1", "verified_ghz",
    "run_protocol2", "verify_12", "run_protocol3", "verify_13",
]

__version__ = "0.1.0"

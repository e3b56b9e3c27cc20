"""Hybrid broadcast/consensus settlement simulator.

Owned-object transactions settle through consistent broadcast in two network
round trips; shared-object transactions are sequenced by a consensus black
box. The native core simulates a validator committee deterministically and
checks the protocol's safety invariants on every run.
"""

from duallane._core import (
    default_scenario,
    derive_object_id,
    lamport_version,
    quorum_threshold,
    run_scenario,
    sha256_hex,
    validity_threshold,
    verify_trace,
)

__all__ = [
    "default_scenario",
    "derive_object_id",
    "lamport_version",
    "quorum_threshold",
    "run_scenario",
    "sha256_hex",
    "validity_threshold",
    "verify_trace",
]

"""Extract a span-avoidance certificate and try to forge one.

The extractor proves, constructively, that its input vector stays at
distance > theta from the span of the selected orbit elements, and the
certificate records everything needed to re-check that claim from
scratch.  The verifier recomputes the orbit, recomputes every prefix
distance with the cold-start oracle solver, and rejects certificates
whose ledger was edited after the fact.
"""

import dataclasses
import json

import numpy as np

from orbitgap import (
    ExtractionConfig,
    RolewiczMultiple,
    build_supercyclic_vector,
    default_target_set,
    extract_subsequence,
    verify_certificate,
)
from orbitgap import records

N = 1024
T = RolewiczMultiple(2.0)
x = build_supercyclic_vector(2.0, default_target_set(N, count=8, epsilon=1e-3), N).x

cert = extract_subsequence(T, x, ExtractionConfig(horizon=96, max_steps=16, theta=1.01))
print("selected indices:", cert.indices)
skipped = sorted(set(range(1, max(cert.indices))) - set(cert.indices))
print("skipped indices: ", skipped, "(their orbit directions came too close to x')")

report = verify_certificate(cert, T, x)
print("honest certificate verifies:", report.ok)

# Serialization is canonical: encode -> parse -> encode is byte-identical,
# so certificates work as golden regression files.
text = records.canonical_text(records.encode_certificate(cert))
again = records.canonical_text(records.encode_certificate(
    records.decode_certificate(json.loads(text))))
print("round-trip byte-identical:", again == text)

# Now forge the ledger: claim a distance that was never achieved.
doctored = list(cert.distances)
doctored[5] = 0.25
forged = dataclasses.replace(cert, distances=tuple(doctored))
report = verify_certificate(forged, T, x)
print(f"forged certificate rejected: failed check {report.failed_check!r}")
assert not report.ok

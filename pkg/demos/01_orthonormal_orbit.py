"""The cleanest possible extraction: a forward shift orbit.

The forward shift S sends e_n to e_{n+1}, so the orbit of e_0 is the
orthonormal sequence e_0, e_1, e_2, ...  After the initial rescale by
1 + margin, every orbit direction is orthogonal to everything selected
before it, the greedy scan accepts every index, and every recorded
distance equals the rescaled norm exactly.  A good first sanity check
because all the numerics collapse to closed-form values.
"""

import numpy as np

from orbitgap import ExtractionConfig, ForwardShift, extract_subsequence, verify_certificate
from orbitgap.space import basis_vector

x = basis_vector(0, 128).astype(float)
cfg = ExtractionConfig(horizon=64, max_steps=12, theta=1.2, margin=0.5)

cert = extract_subsequence(ForwardShift(), x, cfg)

print("indices:  ", cert.indices)
print("distances:", np.round(cert.distances, 12))
print("lambda:   ", cert.lambda_scale)

# Every distance is exactly 1 + margin: the orbit direction e_{n} never
# gets any closer to the rescaled x' = 1.5 e_0.
assert all(abs(d - 1.5) < 1e-12 for d in cert.distances)

report = verify_certificate(cert, ForwardShift(), x)
print("verified: ", report.ok, f"(max relative deviation {report.max_rel_deviation:.2e})")

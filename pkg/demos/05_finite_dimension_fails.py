"""Why the construction needs room: extraction in R^8 must die.

The span-avoidance argument selects orbit elements whose span never
captures the base vector.  That requires an infinite-dimensional space;
in R^8 any nine vectors are dependent, so after at most eight accepted
indices the span has swallowed everything and no candidate can keep the
distance above theta.  The extractor surfaces this honestly as
HorizonExhausted rather than quietly returning a short certificate.

The safety ratio exists for the same reason: on a truncation of size N,
certificates longer than N/8 start leaning on the truncation boundary,
so deep runs must be requested explicitly.
"""

import numpy as np

from orbitgap import DenseMatrix, ExtractionConfig, extract_subsequence
from orbitgap.errors import ConfigError, HorizonExhausted

rng = np.random.default_rng(32)
q, r = np.linalg.qr(rng.standard_normal((8, 8)))
T = DenseMatrix(q * np.sign(np.diag(r)))  # a random rotation of R^8
x = rng.standard_normal(8)

# Asking for 16 indices in R^8 trips the safety ratio first.
try:
    extract_subsequence(T, x, ExtractionConfig(horizon=120, max_steps=16))
except ConfigError as err:
    print("safety refusal:", err)

# Overriding it runs the honest scan, which exhausts the horizon.
try:
    extract_subsequence(T, x, ExtractionConfig(horizon=120, max_steps=16, allow_deep=True))
except HorizonExhausted as err:
    print(f"extraction died at step {err.step}: no qualifying index in (n_{err.step - 1}, {err.horizon}]")
    assert err.step <= 9

"""Build a vector whose orbit under 2B nearly hits a family of targets.

The multiple lam*B of the backward shift (lam > 1) is the classical
example of an operator with dense projective orbits.  On a finite
truncation nothing is truly dense, so instead we pick a finite target
family and place shifted, geometrically damped copies of each target
inside one vector x:

    x = sum_j lam^(-m_j) S^(m_j) t_j

Applying (lam B)^(m_j) then recovers t_j up to a tail of the later
blocks, and the block offsets m_j are chosen greedily so each tail is
provably below the requested epsilon.  density_check measures what the
orbit actually achieves, sweeping scalars and powers.
"""

import numpy as np

from orbitgap import (
    RolewiczMultiple,
    build_supercyclic_vector,
    default_target_set,
    density_check,
)

N = 1024
targets = default_target_set(N, count=8, epsilon=1e-3)
result = build_supercyclic_vector(2.0, targets, N)

print("block plan (target -> offset, guaranteed error):")
for entry in result.plan:
    print(f"  t_{entry.target_index} -> m = {entry.offset:3d}   bound {entry.bounded_error:.3e}")

horizon = max(entry.offset for entry in result.plan) + 24
report = density_check(RolewiczMultiple(2.0), result.x, targets, horizon)

print(f"\nmeasured density over powers 0..{horizon}:")
for rec in report.records:
    print(
        f"  t_{rec.target_index}: best at n = {rec.best_n:3d}, "
        f"c = {rec.best_c:.3e}, error {rec.error:.3e}"
    )

assert all(r.error <= e for r, e in zip(report.records, targets.epsilons))
print("\nevery measured error is within its epsilon")
if report.orbit_exhausted_at is not None:
    print(f"(orbit support ran out at power {report.orbit_exhausted_at}, as expected on a truncation)")

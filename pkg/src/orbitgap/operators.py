"""Operator models and orbit generation.

All operators act on the N-dimensional truncation.  The shift boundary is
fixed and documented: a backward shift reads coordinate n+1 and writes 0
into coordinate N-1 (nothing flows in from beyond the truncation); a
forward shift drops the coordinate that would leave past N-1.  Results are
therefore exact whenever the active support stays below N.

Orbits are stored renormalized: each element carries a unit-norm direction
plus the natural log of ||T^n x||.  Norms of hypercyclic-type orbits grow
geometrically and would overflow by n around 1000 if stored raw; spans are
scale-invariant, so consumers work with directions and reconstruct
magnitudes from the log scale when they need them.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .space import NormSpec, L2, norm

MAX_SHIFT_WEIGHT = 1e12


@dataclass(frozen=True)
class BackwardShift:
    """Weighted backward shift: (B_w v)_n = w_{n+1} v_{n+1}."""

    weights: tuple

    def __post_init__(self):
        w = tuple(complex(x) if isinstance(x, complex) else float(x) for x in self.weights)
        if len(w) < 2:
            raise ValueError("weight list must cover at least dimension 2")
        for x in w:
            if not math.isfinite(abs(x)):
                raise ValueError("shift weights must be finite")
            if abs(x) > MAX_SHIFT_WEIGHT:
                raise ValueError(f"shift weight magnitude exceeds bound {MAX_SHIFT_WEIGHT}")
        object.__setattr__(self, "weights", w)

    @classmethod
    def unit(cls, length: int) -> "BackwardShift":
        return cls(weights=(1.0,) * length)

    @classmethod
    def from_rule(cls, rule, length: int) -> "BackwardShift":
        """Materialize weights w_n = rule(n) for n = 0, ..., length-1."""
        return cls(weights=tuple(rule(n) for n in range(length)))


@dataclass(frozen=True)
class RolewiczMultiple:
    """lam * B with lam > 1: the classical hypercyclic multiple of the backward shift."""

    lam: float

    def __post_init__(self):
        lam = float(self.lam)
        if not (math.isfinite(lam) and lam > 1.0):
            raise ValueError(f"Rolewicz multiple requires lam > 1, got {self.lam}")
        object.__setattr__(self, "lam", lam)


@dataclass(frozen=True)
class ForwardShift:
    """Isometric forward shift: (S v)_n = v_{n-1}."""


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    """Arbitrary N x N matrix operator."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"dense operator must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("dense operator entries must be finite")
        a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)


@dataclass(frozen=True)
class Diagonal:
    """Diagonal operator: (D v)_n = d_n v_n."""

    d: tuple

    def __post_init__(self):
        d = tuple(complex(x) if isinstance(x, complex) else float(x) for x in self.d)
        for x in d:
            if not math.isfinite(abs(x)):
                raise ValueError("diagonal entries must be finite")
        object.__setattr__(self, "d", d)


OperatorSpec = BackwardShift | RolewiczMultiple | ForwardShift | DenseMatrix | Diagonal


def apply(T: OperatorSpec, v: np.ndarray) -> np.ndarray:
    """Apply the operator once.  Linear in v; boundary rules as documented above."""
    n = v.shape[0]
    if isinstance(T, BackwardShift):
        if len(T.weights) < n:
            raise DimensionMismatch(
                f"backward shift has {len(T.weights)} weights, needs >= {n}"
            )
        w = np.asarray(T.weights[:n])
        out = np.zeros(n, dtype=np.result_type(v.dtype, w.dtype))
        out[:-1] = w[1:] * v[1:]
    elif isinstance(T, RolewiczMultiple):
        out = np.zeros(n, dtype=v.dtype)
        out[:-1] = T.lam * v[1:]
    elif isinstance(T, ForwardShift):
        out = np.zeros(n, dtype=v.dtype)
        out[1:] = v[:-1]
    elif isinstance(T, DenseMatrix):
        if T.entries.shape[0] != n:
            raise DimensionMismatch(
                f"operator is {T.entries.shape[0]}-dimensional, vector is {n}"
            )
        out = T.entries @ v
    elif isinstance(T, Diagonal):
        if len(T.d) != n:
            raise DimensionMismatch(f"diagonal has length {len(T.d)}, vector is {n}")
        out = np.asarray(T.d) * v
    else:
        raise TypeError(f"unknown operator spec {type(T).__name__}")
    out = np.asarray(out)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class OrbitElement:
    """Renormalized orbit member: T^n x = exp(log_scale) * direction."""

    n: int
    direction: np.ndarray
    log_scale: float


@dataclass(frozen=True)
class ZeroOrbitMarker:
    """End-of-stream marker: T^n x is exactly zero at this power."""

    n: int


def orbit_stream(T, x, n_from, n_to, spec: NormSpec = L2):
    """Yield OrbitElement for each n in [n_from, n_to] with T^n x != 0.

    If the orbit dies inside the range (the truncation of a shift ran out of
    support), the stream ends with a single ZeroOrbitMarker at the first dead
    power instead of raising mid-iteration.
    """
    if n_from < 0 or n_from > n_to:
        raise ValueError(f"invalid power range [{n_from}, {n_to}]")
    nrm = norm(x, spec)
    if nrm == 0.0:
        raise ValueError("orbit base vector must be nonzero")
    u = x / nrm
    u.flags.writeable = False
    log_scale = math.log(nrm)
    for n in range(0, n_to + 1):
        if n >= n_from:
            yield OrbitElement(n=n, direction=u, log_scale=log_scale)
        if n == n_to:
            return
        w = apply(T, u)
        wn = norm(w, spec)
        if wn == 0.0:
            # first dead power, even when it lies before n_from
            yield ZeroOrbitMarker(n=n + 1)
            return
        u = w / wn
        u.flags.writeable = False
        log_scale += math.log(wn)

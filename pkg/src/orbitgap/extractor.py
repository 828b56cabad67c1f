"""Index-sequence extraction and independent certificate verification.

The extraction loop mirrors the inductive construction it implements:
rescale x so that both its norm and its distance to span{Tx} sit above 1,
fix n_1 = 1, then repeatedly pick the smallest later power whose orbit
direction keeps x' at distance > theta from the grown span.  Candidates
are unit directions only; span extension is scalar-invariant, so nothing
is lost by dropping the scalar there.  The recorded distances certify
dist(x', span{T^(n_k) x' : k <= K}) > theta at finite K.

verify_certificate reruns everything from scratch against the batch
oracle and reports the first violated check instead of raising.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    ApproximationInfeasible,
    ConfigError,
    DimensionMismatch,
    HorizonExhausted,
    LinearDependence,
    ZeroOrbit,
)
from .operators import OperatorSpec, apply, orbit_stream, ZeroOrbitMarker
from .space import NormSpec, L2, norm
from .subspace import (
    DEPENDENCY_TOL,
    SpanBasis,
    best_scalar,
    distance,
    distance_batch_oracle,
    distance_if_extended,
    extend,
)

# extraction stays in the regime where the infinite-dimensional guarantee
# plausibly transfers to the truncation unless explicitly overridden
SAFETY_RATIO = 8


@dataclass(frozen=True)
class ExtractionConfig:
    horizon: int
    max_steps: int
    theta: float = 1.0
    margin: float = 0.5
    norm_spec: NormSpec = L2
    strict_tol: float = 1e-9
    allow_deep: bool = False
    workers: int = 1

    def __post_init__(self):
        if not (self.theta >= 1.0 and math.isfinite(self.theta)):
            raise ConfigError(f"theta must be at least 1, got {self.theta}")
        if not (self.margin > 0.0 and math.isfinite(self.margin)):
            raise ConfigError(f"margin must be positive, got {self.margin}")
        if self.max_steps < 1:
            raise ConfigError(f"maxSteps must be at least 1, got {self.max_steps}")
        if self.horizon <= self.max_steps:
            raise ConfigError(
                f"horizon must exceed maxSteps, got {self.horizon} <= {self.max_steps}"
            )
        if not (self.strict_tol > 0.0):
            raise ConfigError(f"strictTol must be positive, got {self.strict_tol}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")


@dataclass(frozen=True, eq=False)
class Certificate:
    """Immutable record of one extraction run.

    Invariants (checked by verify_certificate, not the constructor, so
    that tampered instances can be built and fed to the verifier):
    indices strictly increasing with n_1 = 1; every distance > theta;
    distances non-increasing.
    """

    scaled_x: np.ndarray
    lambda_scale: float
    operator: OperatorSpec
    indices: tuple
    distances: tuple
    theta: float
    norm_spec: NormSpec


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    failed_check: str | None
    message: str
    max_rel_deviation: float
    recomputed_distances: tuple


def rescale_for_extraction(
    x: np.ndarray, T: OperatorSpec, spec: NormSpec = L2, margin: float = 0.5
):
    """lam, x' = lam x with norm(x') and dist(x', span{Tx'}) both >= 1 + margin.

    Raises LinearDependence when x is (numerically) in span{Tx}; such an x
    cannot head the construction, and for an honest supercyclic vector the
    independence always holds.
    """
    if not (margin > 0.0):
        raise ConfigError(f"margin must be positive, got {margin}")
    if not np.any(x):
        raise LinearDependence("x is the zero vector")
    tx = apply(T, x)
    span_tx = SpanBasis.from_vectors([tx]) if np.any(tx) else SpanBasis.empty(x.shape[0])
    if span_tx.rank == 0:
        raise LinearDependence("Tx is the zero vector")
    resid = x - span_tx.ortho[0] * (np.vdot(span_tx.ortho[0], x))
    if float(np.linalg.norm(resid)) < DEPENDENCY_TOL * float(np.linalg.norm(x)):
        raise LinearDependence("x and Tx are numerically dependent")
    d = distance(x, span_tx, spec)
    lam = (1.0 + margin) / min(norm(x, spec), d)
    x_prime = lam * x
    x_prime.flags.writeable = False
    return lam, x_prime


def _qualifies(e, Y, direction, cfg):
    d = distance_if_extended(e, Y, direction, cfg.norm_spec)
    return d > cfg.theta + cfg.strict_tol, d


def _scan_candidates(e, Y, T, x, n_start, cfg):
    """Candidate powers in (n_start, horizon], smallest qualifying first.

    Yields (n, d) for the winner.  Evaluation runs over fixed-size chunks;
    with workers > 1 a chunk is mapped in parallel, and the reduction
    always takes the smallest qualifying index of the chunk, so the result
    does not depend on the worker count.
    """
    stream = orbit_stream(T, x, n_start + 1, cfg.horizon, cfg.norm_spec)
    chunk_size = max(8, 4 * cfg.workers)
    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        died_at = None
        while True:
            chunk = []
            for elem in stream:
                if isinstance(elem, ZeroOrbitMarker):
                    died_at = elem.n
                    break
                chunk.append(elem)
                if len(chunk) == chunk_size:
                    break
            if chunk:
                if pool is None:
                    results = [_qualifies(e, Y, c.direction, cfg) for c in chunk]
                else:
                    results = list(
                        pool.map(lambda c: _qualifies(e, Y, c.direction, cfg), chunk)
                    )
                for elem, (ok, d) in zip(chunk, results):
                    if ok:
                        return elem.n, d
            if died_at is not None:
                raise ZeroOrbit(
                    died_at, f"orbit died at power n={died_at} before any candidate qualified"
                )
            if len(chunk) < chunk_size:
                raise HorizonExhausted(n_start, cfg.horizon)
    finally:
        if pool is not None:
            pool.shutdown(wait=False)


def find_next_index(e, Y: SpanBasis, T: OperatorSpec, x, n_start: int, cfg: ExtractionConfig):
    """Smallest n in (n_start, horizon] whose direction keeps e at distance > theta.

    The hypothesis dist(e, Y) > theta must already hold; candidate scaling
    is irrelevant because span extension is scalar-invariant.
    """
    d_now = distance(e, Y, cfg.norm_spec)
    if not d_now > cfg.theta + cfg.strict_tol:
        raise ConfigError(
            f"precondition failed: dist(e, Y) = {d_now} is not above theta = {cfg.theta}"
        )
    return _scan_candidates(e, Y, T, x, n_start, cfg)


def find_extension_with_target(
    e,
    Y: SpanBasis,
    T: OperatorSpec,
    x,
    y,
    epsilon: float,
    n_start: int,
    cfg: ExtractionConfig,
):
    """Smallest n whose orbit element both approximates y and avoids e.

    Returns (n, c, d) with norm(y - c T^n x) < epsilon and the extended
    distance d > theta.  Here the scalar matters: c is the best
    approximation coefficient, recovered from the renormalized direction.
    c = 0 is permitted (y = 0 is approximable by arbitrarily small orbit
    multiples).
    """
    if not (epsilon > 0.0):
        raise ConfigError(f"epsilon must be positive, got {epsilon}")
    d_now = distance(e, Y, cfg.norm_spec)
    if not d_now > cfg.theta + cfg.strict_tol:
        raise ConfigError(
            f"precondition failed: dist(e, Y) = {d_now} is not above theta = {cfg.theta}"
        )
    y_dist = distance_batch_oracle(y, list(Y.generators), cfg.norm_spec)
    if y_dist > 1e-8 * max(1.0, norm(y, cfg.norm_spec)):
        raise ConfigError(
            f"precondition failed: y is at distance {y_dist} from span(Y)"
        )
    any_avoiding = False
    for elem in orbit_stream(T, x, n_start + 1, cfg.horizon, cfg.norm_spec):
        if isinstance(elem, ZeroOrbitMarker):
            raise ZeroOrbit(
                elem.n, f"orbit died at power n={elem.n} before any candidate qualified"
            )
        ok, d = _qualifies(e, Y, elem.direction, cfg)
        if not ok:
            continue
        any_avoiding = True
        gamma, err = best_scalar(y, elem.direction, cfg.norm_spec)
        if err < epsilon:
            c = gamma * math.exp(-elem.log_scale)
            return elem.n, c, d
    if any_avoiding:
        raise ApproximationInfeasible(
            f"no orbit multiple within epsilon={epsilon} of y up to horizon {cfg.horizon}"
        )
    raise HorizonExhausted(n_start, cfg.horizon)


def extract_subsequence(T: OperatorSpec, x, cfg: ExtractionConfig) -> Certificate:
    """Run the full construction and return its certificate.

    Rescale, set n_1 = 1 with Y_1 = span{Tx'}, then grow the span by the
    smallest qualifying later powers until maxSteps indices are recorded.
    Every recorded distance is the distance of x' to the span at that step,
    so the last one certifies the final proper-span gap.
    """
    N = x.shape[0]
    if cfg.max_steps * SAFETY_RATIO > N and not cfg.allow_deep:
        raise ConfigError(
            f"maxSteps {cfg.max_steps} exceeds N/{SAFETY_RATIO} = {N // SAFETY_RATIO}; "
            "the truncation guarantee degrades there (override to proceed)"
        )
    lam, xp = rescale_for_extraction(x, T, cfg.norm_spec, cfg.margin)

    first = next(iter(orbit_stream(T, xp, 1, 1, cfg.norm_spec)))
    if isinstance(first, ZeroOrbitMarker):
        raise ZeroOrbit(first.n, "Tx is zero, no orbit to select from", step=1)
    Y = SpanBasis.from_vectors([first.direction])
    d1 = distance(xp, Y, cfg.norm_spec)
    if not d1 > cfg.theta + cfg.strict_tol:
        raise ConfigError(
            f"step 1 distance {d1} does not clear theta = {cfg.theta}; "
            "the rescale margin guarantees only 1 + margin"
        )
    indices = [1]
    distances = [d1]
    while len(indices) < cfg.max_steps:
        step = len(indices) + 1
        try:
            n, d = _scan_candidates(xp, Y, T, xp, indices[-1], cfg)
        except HorizonExhausted as err:
            raise HorizonExhausted(err.n_start, err.horizon, step=step) from None
        except ZeroOrbit as err:
            raise ZeroOrbit(err.n, f"{err} at step {step}", step=step) from None
        direction = None
        for elem in orbit_stream(T, xp, n, n, cfg.norm_spec):
            if not isinstance(elem, ZeroOrbitMarker):
                direction = elem.direction
        Y = extend(Y, direction)
        indices.append(n)
        distances.append(d)
    return Certificate(
        scaled_x=xp,
        lambda_scale=lam,
        operator=T,
        indices=tuple(indices),
        distances=tuple(distances),
        theta=cfg.theta,
        norm_spec=cfg.norm_spec,
    )


def _fail(check, message, devs=(), recomputed=()):
    return VerificationReport(
        ok=False,
        failed_check=check,
        message=message,
        max_rel_deviation=max(devs, default=0.0),
        recomputed_distances=tuple(recomputed),
    )


def verify_certificate(cert: Certificate, T: OperatorSpec, x_original) -> VerificationReport:
    """Recompute everything about a certificate from scratch.

    Checks, in order: index shape (strictly increasing, n_1 = 1), the
    scaled vector against lambdaScale times the original, orbit
    regeneration at the certified indices, every prefix distance against
    the batch oracle (1e-8 relative), every distance above theta, and the
    non-increasing ledger.  Structured report, never an exception.
    """
    try:
        idx = list(cert.indices)
        if len(idx) == 0 or len(cert.distances) != len(idx):
            return _fail("indices", "empty certificate or length mismatch")
        if idx[0] != 1:
            return _fail("indices", f"first index is {idx[0]}, must be 1")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            return _fail("indices", "indices are not strictly increasing")

        xp = cert.lambda_scale * np.asarray(x_original)
        ref = np.asarray(cert.scaled_x)
        if xp.shape != ref.shape:
            return _fail("scaled-vector", "scaled vector has wrong dimension")
        scale = max(1.0, float(np.abs(xp).max()))
        if float(np.abs(xp - ref).max()) > 1e-12 * scale:
            return _fail(
                "scaled-vector", "scaledX does not equal lambdaScale times the original x"
            )

        wanted = set(idx)
        directions = {}
        for elem in orbit_stream(T, xp, 1, idx[-1], cert.norm_spec):
            if isinstance(elem, ZeroOrbitMarker):
                break
            if elem.n in wanted:
                directions[elem.n] = elem.direction
        missing = [n for n in idx if n not in directions]
        if missing:
            return _fail("orbit", f"orbit dies before certified index {missing[0]}")

        recomputed = []
        devs = []
        for k in range(len(idx)):
            gens = [directions[n] for n in idx[: k + 1]]
            d = distance_batch_oracle(xp, gens, cert.norm_spec)
            recomputed.append(d)
            claimed = cert.distances[k]
            devs.append(abs(d - claimed) / max(abs(claimed), 1e-300))
        worst = max(devs)
        if worst > 1e-8:
            k_bad = devs.index(worst)
            return _fail(
                "distance-deviation",
                f"distance {k_bad + 1} deviates by {worst:.3e} relative",
                devs,
                recomputed,
            )
        below = [k for k, d in enumerate(cert.distances) if not d > cert.theta]
        if below:
            return _fail(
                "threshold",
                f"distance {below[0] + 1} = {cert.distances[below[0]]} is not above "
                f"theta = {cert.theta}",
                devs,
                recomputed,
            )
        rising = [
            k
            for k, (a, b) in enumerate(zip(cert.distances, cert.distances[1:]))
            if b > a + 1e-12
        ]
        if rising:
            return _fail(
                "monotonicity",
                f"distance increases from step {rising[0] + 1} to {rising[0] + 2}",
                devs,
                recomputed,
            )
        return VerificationReport(
            ok=True,
            failed_check=None,
            message=(
                f"scaled x stays at distance > {cert.theta} from the span of all "
                f"{len(idx)} selected orbit elements"
            ),
            max_rel_deviation=worst,
            recomputed_distances=tuple(recomputed),
        )
    except Exception as exc:  # a malformed certificate must report, not raise
        return _fail("internal", f"{type(exc).__name__}: {exc}")

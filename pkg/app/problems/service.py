"""
Problem Generation Service
==========================

Gaussian designs, sparse signals, label corruptions and dense noise,
assembled into instances of y = X·w∗ + ζ + d.

Every generator is a pure function of its parameters and seed. Normals come
from a Box–Muller transform over numpy's counter-based Philox generator so
streams are reproducible across platforms and independent per seed.
"""

import hashlib
import logging
import math
from typing import Callable, Optional, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike

from app.analytics import eta0
from app.core.exceptions import DimensionMismatchError, DomainError, InvariantViolationError
from app.numerics import Matrix, Vector, as_matrix, as_vector, sorted_abs_order
from app.problems.schemas import CorruptionKind, CorruptionSpec, Problem

logger = logging.getLogger(__name__)

DenseNoise = Union[None, ArrayLike, Callable[[int, int], Vector]]

_SEED_MODULUS = 2 ** 63


# ==================== Seeding ====================

def derive_seed(seed: int, *labels) -> int:
    """Stable child seed for (seed, labels...)."""
    key = ":".join([str(int(seed))] + [str(label) for label in labels])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % _SEED_MODULUS


def _generator(seed: int) -> np.random.Generator:
    if seed < 0:
        raise DomainError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.Philox(int(seed)))


def _box_muller(rng: np.random.Generator, size: int) -> Vector:
    pairs = (size + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # (0, 1]
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:size]


def standard_normal(size: int, seed: int) -> Vector:
    return _box_muller(_generator(seed), size)


# ==================== Designs and Signals ====================

def sample_gaussian_design(m: int, n: int, seed: int) -> Matrix:
    """m×n matrix of i.i.d. N(0,1) entries, row-major."""
    if m < 1 or n < 1:
        raise DomainError(f"design needs m, n >= 1, got m={m}, n={n}")
    return standard_normal(m * n, seed).reshape(m, n)


def sample_sparse_signal(n: int, k: int, amplitude: float, seed: int) -> Vector:
    """k uniformly placed entries equal to ±amplitude, zeros elsewhere."""
    if k < 1 or k > n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = _generator(seed)
    support = rng.choice(n, size=k, replace=False)
    signs = rng.integers(0, 2, size=k) * 2 - 1
    w = np.zeros(n)
    w[support] = signs * amplitude
    return w


def corruption_budget(eta: float, m: int) -> int:
    """⌊ηm⌋, guarded against η·m landing a hair below an integer."""
    if not math.isfinite(eta) or eta < 0.0 or eta > 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    return min(m, int(math.floor(eta * m + 1e-9)))


# ==================== Adversaries ====================

def corrupt_topk_zeroing(X: ArrayLike, w_star: ArrayLike, eta: float) -> Tuple[Vector, np.ndarray]:
    """
    ζ = −(Xw∗) on the ⌊ηm⌋ largest-|·| entries of Xw∗, so those responses
    become exactly 0 when d = 0. Returns (ζ, sorted corrupted indices).
    """
    X = as_matrix(X, "X")
    w_star = as_vector(w_star, "w_star")
    clean = X @ w_star
    count = corruption_budget(eta, clean.shape[0])

    chosen = np.sort(sorted_abs_order(clean, descending=True)[:count])
    zeta = np.zeros_like(clean)
    zeta[chosen] = -clean[chosen]
    return zeta, chosen


def dense_adversary_support_size(m: int, epsilon: float) -> int:
    return int(math.floor((1.0 - (eta0() - epsilon / 2.0)) * m + 1e-9))


def adversarial_dense_noise(X: ArrayLike, w_star: ArrayLike, epsilon: float) -> Vector:
    """
    d = −(Xw∗) on the ⌊(1−(η₀−ε/2))m⌋ smallest-|·| entries of Xw∗.

    Afterwards more than (1−η₀)m responses are 0 while the surviving
    η₀−ε/2 fraction is below the L1 breakdown point, so L1 regression
    returns 0.
    """
    if not 0.0 < epsilon < 0.2:
        raise DomainError(f"epsilon must lie in (0, 0.2), got {epsilon}")
    X = as_matrix(X, "X")
    w_star = as_vector(w_star, "w_star")
    clean = X @ w_star
    size = dense_adversary_support_size(clean.shape[0], epsilon)

    chosen = sorted_abs_order(clean, descending=False)[:size]
    d = np.zeros_like(clean)
    d[chosen] = -clean[chosen]
    return d


def random_corruption(m: int, eta: float, magnitude: float, seed: int) -> Tuple[Vector, np.ndarray]:
    """⌊ηm⌋ uniformly random positions set to ±magnitude."""
    count = corruption_budget(eta, m)
    rng = _generator(seed)
    chosen = np.sort(rng.choice(m, size=count, replace=False))
    signs = rng.integers(0, 2, size=count) * 2 - 1
    zeta = np.zeros(m)
    zeta[chosen] = signs * magnitude
    return zeta, chosen


def scaled_dense_noise(m: int, l1_norm: float, seed: int) -> Vector:
    """A fixed random Gaussian direction rescaled to ‖d‖₁ = l1_norm."""
    if l1_norm < 0.0:
        raise DomainError(f"l1_norm must be non-negative, got {l1_norm}")
    direction = standard_normal(m, seed)
    return direction * (l1_norm / float(np.sum(np.abs(direction))))


# ==================== Assembly ====================

def _resolve_dense_noise(dense_noise: DenseNoise, m: int, seed: int) -> Vector:
    if dense_noise is None:
        return np.zeros(m)
    if callable(dense_noise):
        return as_vector(dense_noise(m, derive_seed(seed, "noise")), "d")
    return as_vector(dense_noise, "d")


def assemble_problem(
    X: ArrayLike,
    w_star: ArrayLike,
    spec: Optional[CorruptionSpec] = None,
    dense_noise: DenseNoise = None,
    seed: int = 0,
    k: Optional[int] = None,
) -> Problem:
    """Apply the corruption spec and dense noise and build a verified Problem."""
    X = as_matrix(X, "X")
    w_star = as_vector(w_star, "w_star")
    m, n = X.shape
    if w_star.shape[0] != n:
        raise DimensionMismatchError(f"w_star has length {w_star.shape[0]}, X has {n} columns")
    spec = spec or CorruptionSpec()

    d = _resolve_dense_noise(dense_noise, m, seed)
    if d.shape[0] != m:
        raise DimensionMismatchError(f"dense noise has length {d.shape[0]}, expected {m}")

    if spec.kind == CorruptionKind.TOPK_ZEROING:
        zeta, _ = corrupt_topk_zeroing(X, w_star, spec.eta)
    elif spec.kind == CorruptionKind.RANDOM_SIGN:
        zeta, _ = random_corruption(m, spec.eta, spec.magnitude, derive_seed(seed, "corruption"))
    elif spec.kind == CorruptionKind.DENSE_ADVERSARY:
        zeta = np.zeros(m)
        d = d + adversarial_dense_noise(X, w_star, spec.epsilon)
    else:
        zeta = np.zeros(m)

    clean = X @ w_star
    y = (clean + zeta) + d

    scale = 1.0 + float(np.max(np.abs(y)))
    if not np.allclose(y - zeta - d, clean, rtol=0.0, atol=1e-12 * scale):
        raise InvariantViolationError("y does not reconstruct from X·w_star + zeta + d")
    support = np.flatnonzero(zeta)
    if support.shape[0] > corruption_budget(spec.eta, m) and spec.kind != CorruptionKind.NONE:
        raise InvariantViolationError(f"corruption exceeds budget: {support.shape[0]} entries")

    logger.debug(
        f"Assembled problem m={m} n={n} adversary={spec.kind.value} "
        f"eta={spec.eta} corrupted={support.shape[0]} seed={seed}"
    )

    return Problem(
        X=X,
        w_star=w_star,
        zeta=zeta,
        d=d,
        y=y,
        corrupted_indices=support,
        seed=seed,
        adversary_name=spec.kind.value,
        eta=spec.eta,
        k=k,
    )


def generate_problem(
    m: int,
    n: int,
    k: int,
    amplitude: float,
    spec: CorruptionSpec,
    seed: int,
    dense_noise: DenseNoise = None,
) -> Problem:
    """Gaussian design + sparse signal + corruption, all derived from one seed."""
    X = sample_gaussian_design(m, n, derive_seed(seed, "design"))
    w_star = sample_sparse_signal(n, k, amplitude, derive_seed(seed, "signal"))
    return assemble_problem(X, w_star, spec, dense_noise=dense_noise, seed=seed, k=k)

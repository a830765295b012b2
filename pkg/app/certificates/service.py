"""
Certificates Service
====================

Computable witnesses for the robustness argument behind L1 regression:

- empirical Ĝ/B̂ of a sample and the worst-case direction gap of a design
- Monte-Carlo robustness constants over k-sparse directions
- the shelling sandwich that lifts sparse-vector bounds to the cone
  V_S = {v : Δ + ‖v_S‖₁ ≥ ‖v_S̄‖₁}, plus a numerical check of it
- the DKW deviation band and its empirical violation rate
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike
from scipy import stats

from app.core.exceptions import DimensionMismatchError, DomainError
from app.numerics import Matrix, Vector, as_matrix, as_vector, sorted_abs_order, top_abs_partial_sums
from app.problems import corruption_budget, derive_seed, standard_normal
from app.certificates.schemas import RobustnessReport, ShellingBounds, ShellingVerification

logger = logging.getLogger(__name__)

# Relative slack allowed on the sandwich for floating-point rounding.
_SANDWICH_RTOL = 1e-9


# ==================== Empirical Tail Masses ====================

def _samples(samples: ArrayLike) -> Vector:
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise DomainError("samples must be non-empty")
    return as_vector(samples, "samples")


def empirical_g_hat(samples: ArrayLike, eta: float) -> float:
    """(1/m)·Σ of the ⌈(1−η)m⌉ smallest |sᵢ|."""
    samples = _samples(samples)
    m = samples.shape[0]
    _, rest = top_abs_partial_sums(samples, corruption_budget(eta, m))
    return rest / m


def empirical_b_hat(samples: ArrayLike, eta: float) -> float:
    """(1/m)·Σ of the ⌊ηm⌋ largest |sᵢ|."""
    samples = _samples(samples)
    m = samples.shape[0]
    top, _ = top_abs_partial_sums(samples, corruption_budget(eta, m))
    return top / m


def direction_gap(X: ArrayLike, v: ArrayLike, eta: float) -> float:
    """
    min over |T| ≤ ηm of ‖(Xv)_T̄‖₁ − ‖(Xv)_T‖₁, attained by the top-|·| set.
    Not normalized by m.
    """
    X = as_matrix(X, "X")
    v = as_vector(v, "v")
    if X.shape[1] != v.shape[0]:
        raise DimensionMismatchError(f"X has {X.shape[1]} columns but v has length {v.shape[0]}")
    Xv = X @ v
    top, rest = top_abs_partial_sums(Xv, corruption_budget(eta, Xv.shape[0]))
    return rest - top


def zero_vs_truth_losses(X: ArrayLike, w_star: ArrayLike, eta: float) -> Tuple[float, float]:
    """
    Under top-zeroing corruption with d = 0, the L1 losses at w = 0 and at
    w = w∗: (‖(Xw∗)_T̄‖₁, ‖(Xw∗)_T‖₁). L1 regression prefers 0 once the
    second exceeds the first.
    """
    X = as_matrix(X, "X")
    w_star = as_vector(w_star, "w_star")
    if X.shape[1] != w_star.shape[0]:
        raise DimensionMismatchError(f"X has {X.shape[1]} columns but w_star has length {w_star.shape[0]}")
    clean = X @ w_star
    top, rest = top_abs_partial_sums(clean, corruption_budget(eta, clean.shape[0]))
    return rest, top


# ==================== Robustness Constants ====================

def _sparse_unit_direction(n: int, k: int, seed: int) -> Vector:
    rng = np.random.Generator(np.random.Philox(seed))
    support = rng.choice(n, size=k, replace=False)
    values = standard_normal(k, derive_seed(seed, "values"))
    norm = float(np.linalg.norm(values))
    v = np.zeros(n)
    if norm == 0.0:
        v[support[0]] = 1.0
    else:
        v[support] = values / norm
    return v


def estimate_robust_constants(
    X: ArrayLike,
    k: int,
    eta: float,
    trials: int,
    seed: int,
) -> RobustnessReport:
    """
    Sample `trials` random k-sparse unit directions (trial t uses seed + t)
    and keep the extreme per-sample top-⌊ηm⌋ and bottom-⌈(1−η)m⌉ masses.
    """
    X = as_matrix(X, "X")
    m, n = X.shape
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if seed < 0:
        raise DomainError(f"seed must be non-negative, got {seed}")
    count = corruption_budget(eta, m)

    s_min, s_max = math.inf, -math.inf
    witness_min = witness_max = None
    for trial in range(trials):
        v = _sparse_unit_direction(n, k, seed + trial)
        top, rest = top_abs_partial_sums(X @ v, count)
        if rest / m < s_min:
            s_min, witness_min = rest / m, v
        if top / m > s_max:
            s_max, witness_max = top / m, v

    logger.info(f"Robust constants over {trials} directions (k={k}, eta={eta}): S_min<={s_min:.6g}, S_max>={s_max:.6g}")

    return RobustnessReport(
        eta=eta,
        k=k,
        trials=trials,
        s_min_estimate=s_min,
        s_max_estimate=s_max,
        witness_min=witness_min,
        witness_max=witness_max,
        seed=seed,
    )


# ==================== Shelling ====================

def shelling_bounds(L: float, U: float, alpha: float, k: int, delta: float) -> ShellingBounds:
    """
    For every v in the cone V_S with |S| = k:

        L(α − U/L)/(1+α)·‖v‖₂ − 2UΔ/(α√k) ≤ ‖Av‖₁ ≤ U(1 + 1/α)·‖v‖₂ + UΔ/(α√k)
    """
    for name, value in (("L", L), ("U", U), ("alpha", alpha), ("delta", delta)):
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value}")
    if L <= 0.0 or U <= 0.0:
        raise DomainError(f"L and U must be positive, got L={L}, U={U}")
    if L > U:
        raise DomainError(f"L must not exceed U, got L={L}, U={U}")
    if alpha <= 1.0:
        raise DomainError(f"alpha must exceed 1, got {alpha}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if delta < 0.0:
        raise DomainError(f"delta must be non-negative, got {delta}")

    root_k = math.sqrt(k)
    return ShellingBounds(
        L=L,
        U=U,
        alpha=alpha,
        k=k,
        delta=delta,
        lower_coefficient=L * (alpha - U / L) / (1.0 + alpha),
        lower_slack=2.0 * U * delta / (alpha * root_k),
        upper_coefficient=U * (1.0 + 1.0 / alpha),
        upper_slack=U * delta / (alpha * root_k),
    )


def shelling_blocks(v: Vector, support: np.ndarray, block_size: int) -> List[Vector]:
    """
    [v restricted to S ∪ T₁, v_T₂, v_T₃, ...] where T₁, T₂, ... partition S̄
    into runs of `block_size` entries in decreasing |vᵢ| order.
    """
    n = v.shape[0]
    outside = np.setdiff1d(np.arange(n), support)
    order = outside[sorted_abs_order(v[outside], descending=True)]

    head = np.zeros(n)
    head_index = np.concatenate([support, order[:block_size]])
    head[head_index] = v[head_index]
    blocks = [head]
    for start in range(block_size, order.shape[0], block_size):
        block = np.zeros(n)
        index = order[start:start + block_size]
        block[index] = v[index]
        blocks.append(block)
    return blocks


def _cone_vector(n: int, support: np.ndarray, delta: float, fraction: float, rng: np.random.Generator) -> Vector:
    """v_S Gaussian, v_S̄ a random direction with ‖v_S̄‖₁ = fraction·(Δ + ‖v_S‖₁)."""
    v = np.zeros(n)
    v[support] = rng.standard_normal(support.shape[0])
    outside = np.setdiff1d(np.arange(n), support)
    if outside.shape[0] == 0:
        return v

    active = rng.choice(outside, size=int(rng.integers(1, outside.shape[0] + 1)), replace=False)
    tail = rng.standard_normal(active.shape[0])
    mass = float(np.sum(np.abs(tail)))
    if mass > 0.0:
        v[active] = tail * (fraction * (delta + float(np.sum(np.abs(v[support])))) / mass)
    return v


def _ratio(A: Matrix, v: Vector) -> Optional[float]:
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        return None
    return float(np.sum(np.abs(A @ v))) / norm


def verify_shelling_numerically(
    A: ArrayLike,
    S: Sequence[int],
    alpha: float,
    delta: float,
    trials: int,
    seed: int,
) -> ShellingVerification:
    """
    Check the shelling sandwich on random vectors of the cone V_S.

    L and U are measured as the extreme values of ‖Aw‖₁/‖w‖₂ over random
    ⌈(1+α²)k⌉-sparse vectors and over the shelling blocks of every sampled
    cone vector, which are exactly the sparse vectors the sandwich depends
    on. Half of the cone vectors sit on the cone boundary
    ‖v_S̄‖₁ = Δ + ‖v_S‖₁; the rest have ‖v_S̄‖₁ drawn uniformly below it.
    """
    A = as_matrix(A, "A")
    m, n = A.shape
    support = np.unique(np.asarray(S, dtype=np.intp))
    k = support.shape[0]
    if k == 0 or support.shape[0] != len(S):
        raise DomainError("S must be a non-empty set of distinct indices")
    if support[0] < 0 or support[-1] >= n:
        raise DomainError(f"S indices must lie in [0, {n})")
    if alpha <= 1.0 or delta < 0.0 or trials < 1:
        raise DomainError(f"need alpha > 1, delta >= 0, trials >= 1; got {alpha}, {delta}, {trials}")

    rng = np.random.Generator(np.random.Philox(seed))
    block_size = min(n, int(math.ceil(alpha * alpha * k - 1e-9)))
    sparsity = min(n, int(math.ceil((1.0 + alpha * alpha) * k - 1e-9)))

    ratios = []
    for _ in range(trials):
        w = np.zeros(n)
        w[rng.choice(n, size=sparsity, replace=False)] = rng.standard_normal(sparsity)
        r = _ratio(A, w)
        if r is not None:
            ratios.append(r)

    cone = []
    boundary = 0
    for trial in range(trials):
        on_boundary = trial % 2 == 1
        fraction = 1.0 if on_boundary else float(rng.random())
        boundary += on_boundary
        v = _cone_vector(n, support, delta, fraction, rng)
        cone.append(v)
        for block in shelling_blocks(v, support, block_size):
            r = _ratio(A, block)
            if r is not None:
                ratios.append(r)

    measured_L, measured_U = min(ratios), max(ratios)
    bounds = shelling_bounds(measured_L, measured_U, alpha, k, delta)

    worst = math.inf
    failures = []
    for index, v in enumerate(cone):
        norm2 = float(np.linalg.norm(v))
        value = float(np.sum(np.abs(A @ v)))
        upper = bounds.upper(norm2)
        margin = min(value - bounds.lower(norm2), upper - value) / max(upper, 1e-300)
        worst = min(worst, margin)
        if margin < -_SANDWICH_RTOL:
            failures.append(index)

    passed = not failures
    log = logger.info if passed else logger.warning
    log(
        f"Shelling check on {m}x{n}, k={k}, alpha={alpha}, delta={delta}: "
        f"{'pass' if passed else 'FAIL'} (worst relative margin {worst:.3e}, L={measured_L:.6g}, U={measured_U:.6g})"
    )

    return ShellingVerification(
        passed=passed,
        worst_margin=worst,
        cone_vectors=len(cone),
        boundary_vectors=boundary,
        measured_L=measured_L,
        measured_U=measured_U,
        bounds=bounds,
        failures=failures,
    )


# ==================== DKW ====================

def dkw_floor(m: int) -> float:
    return math.sqrt(math.log(2.0) / (2.0 * m))


def dkw_band(m: int, tau: float) -> float:
    """P(sup|F_m − F| > τ) ≤ 2·exp(−2mτ²), valid for τ ≥ √(ln 2 / 2m)."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    if not (math.isfinite(tau) and tau > 0.0):
        raise DomainError(f"tau must be positive, got {tau}")
    if tau < dkw_floor(m) * (1.0 - 1e-12):
        raise DomainError(f"tau={tau} is below the DKW validity floor {dkw_floor(m):.6g} for m={m}")
    return 2.0 * math.exp(-2.0 * m * tau * tau)


def dkw_violation_rate(m: int, tau: float, repetitions: int, seed: int) -> float:
    """Fraction of standard-normal samples of size m whose KS statistic exceeds τ."""
    if m < 1 or repetitions < 1:
        raise DomainError(f"need m >= 1 and repetitions >= 1, got m={m}, repetitions={repetitions}")
    violations = 0
    for rep in range(repetitions):
        draws = standard_normal(m, derive_seed(seed, "dkw", rep))
        if stats.kstest(draws, "norm").statistic > tau:
            violations += 1
    rate = violations / repetitions
    logger.debug(f"DKW: {violations}/{repetitions} samples of size {m} deviate by more than {tau}")
    return rate

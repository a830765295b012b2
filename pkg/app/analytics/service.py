"""
Gaussian Analytics
==================

Population quantities for the standard normal that govern the breakdown
behaviour of L1 and ℓp regression on Gaussian designs:

- Φ, Φ⁻¹ and erf⁻¹ (library starting values polished by Newton steps)
- B(γ): contribution to E|Z| of the largest-|Z| γ fraction
- G(γ): contribution of the remaining 1−γ fraction
- η₀, the root of G(η) = B(η)
- p-th moment tail integrals and the ℓp breakdown curve

All quantities are per unit vector. The (η,q)-robustness definition scales
‖(Xv)_S‖_q^q against ‖v‖₂ rather than ‖v‖₂^q, which is inhomogeneous for
q≠1; the p-th moment values here assume ‖v‖₂ = 1 and make no attempt to
reconcile the two.
"""

import logging
import math
from functools import lru_cache
from typing import Iterable, Tuple

from scipy import integrate, optimize, special

from app.core.exceptions import DomainError
from app.analytics.schemas import AnalyticsTable, SQRT_2_OVER_PI

logger = logging.getLogger(__name__)

# Integrand z^p φ(z) is below 1e-300 past t + 40.
_TAIL_SPAN = 40.0
_QUAD_EPSABS = 1e-13
_QUAD_EPSREL = 1e-12
_QUAD_LIMIT = 200
_NEWTON_STEPS = 3


def _check_fraction(value: float, name: str) -> float:
    if not math.isfinite(value) or value < 0.0 or value > 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")
    return float(value)


def _check_exponent(p: float) -> float:
    if not math.isfinite(p) or p <= 0.0 or p > 1.0:
        raise DomainError(f"p must lie in (0, 1], got {p}")
    return float(p)


# ==================== Special Functions ====================

def std_normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def std_normal_cdf(x: float) -> float:
    """Φ(x). Rejects non-finite input."""
    if not math.isfinite(x):
        raise DomainError(f"std_normal_cdf needs a finite argument, got {x}")
    return float(special.ndtr(x))


def std_normal_quantile(p: float) -> float:
    """Φ⁻¹(p) for 0 < p < 1."""
    if not math.isfinite(p) or p <= 0.0 or p >= 1.0:
        raise DomainError(f"std_normal_quantile needs 0 < p < 1, got {p}")

    x = float(special.ndtri(p))
    for _ in range(_NEWTON_STEPS):
        density = std_normal_pdf(x)
        if density < 1e-300:
            break
        step = (float(special.ndtr(x)) - p) / density
        if not math.isfinite(step) or abs(step) < 1e-16 * max(1.0, abs(x)):
            break
        x -= step
    return x


def inv_erf(y: float) -> float:
    """erf⁻¹(y) for −1 < y < 1."""
    if not math.isfinite(y) or abs(y) >= 1.0:
        raise DomainError(f"inv_erf needs |y| < 1, got {y}")
    if y == 0.0:
        return 0.0

    x = float(special.erfinv(y))
    for _ in range(_NEWTON_STEPS):
        slope = 2.0 / math.sqrt(math.pi) * math.exp(-x * x)
        if slope < 1e-300:
            break
        step = (math.erf(x) - y) / slope
        if not math.isfinite(step) or abs(step) < 1e-16 * max(1.0, abs(x)):
            break
        x -= step
    return x


def tail_threshold(gamma: float) -> float:
    """t = Φ⁻¹(1 − γ/2): the |Z| level exceeded by a γ fraction."""
    gamma = _check_fraction(gamma, "gamma")
    if gamma == 0.0:
        return math.inf
    if gamma == 1.0:
        return 0.0
    return math.sqrt(2.0) * inv_erf(1.0 - gamma)


# ==================== B(γ), G(γ), η₀ ====================

def _tail_exponential(gamma: float) -> float:
    """e^{−(erf⁻¹(1−γ))²}, the common factor of B and G."""
    gamma = _check_fraction(gamma, "gamma")
    if gamma == 0.0:
        return 0.0
    if gamma == 1.0:
        return 1.0
    s = inv_erf(1.0 - gamma)
    return math.exp(-s * s)


def big_b(gamma: float) -> float:
    """B(γ) = √(2/π)·e^{−(erf⁻¹(1−γ))²}."""
    return SQRT_2_OVER_PI * _tail_exponential(gamma)


def big_g(gamma: float) -> float:
    """G(γ) = √(2/π)·(1 − e^{−(erf⁻¹(1−γ))²})."""
    return SQRT_2_OVER_PI * (1.0 - _tail_exponential(gamma))


@lru_cache(maxsize=1)
def eta0() -> float:
    """Largest η with G(η) ≥ B(η), by bisection on G − B."""
    root = optimize.bisect(lambda g: big_g(g) - big_b(g), 1e-6, 1.0 - 1e-6, xtol=1e-15, maxiter=200)
    logger.debug(f"eta0 = {root:.15f}")
    return float(root)


def eta0_closed_form() -> float:
    """2(1 − Φ(√(2 ln 2))), written as 2Φ(−√(2 ln 2)) to avoid cancellation."""
    return 2.0 * float(special.ndtr(-math.sqrt(2.0 * math.log(2.0))))


# ==================== p-th Moment Tails ====================

def mean_abs_moment(p: float) -> float:
    """E|Z|^p = 2^{p/2} Γ((p+1)/2) / √π."""
    if not math.isfinite(p) or p <= 0.0:
        raise DomainError(f"p must be positive, got {p}")
    return 2.0 ** (p / 2.0) * float(special.gamma((p + 1.0) / 2.0)) / math.sqrt(math.pi)


def _moment_integral(p: float, lower: float, upper: float) -> float:
    if upper <= lower:
        return 0.0
    value, _ = integrate.quad(
        lambda z: 2.0 * z ** p * std_normal_pdf(z),
        lower,
        upper,
        epsabs=_QUAD_EPSABS,
        epsrel=_QUAD_EPSREL,
        limit=_QUAD_LIMIT,
    )
    return float(value)


def tail_moments_p(gamma: float, p: float) -> Tuple[float, float]:
    """
    (g_p, b_p) = (E[|Z|^p·1{|Z| ≤ t}], E[|Z|^p·1{|Z| > t}]) with t = Φ⁻¹(1−γ/2).

    Evaluated by adaptive Gauss–Kronrod quadrature on [0, t] and [t, t+40].
    """
    p = _check_exponent(p)
    t = tail_threshold(gamma)
    if math.isinf(t):
        return mean_abs_moment(p), 0.0
    if t == 0.0:
        return 0.0, mean_abs_moment(p)
    return _moment_integral(p, 0.0, t), _moment_integral(p, t, t + _TAIL_SPAN)


@lru_cache(maxsize=256)
def breakdown_threshold(p: float) -> float:
    """The γ at which g_p(γ) = b_p(γ); equals η₀ for p = 1 and tends to 1/2 as p → 0."""
    p = _check_exponent(p)

    def gap(gamma: float) -> float:
        g, b = tail_moments_p(gamma, p)
        return g - b

    root = optimize.bisect(gap, 0.0, 1.0, xtol=1e-10, maxiter=200)
    logger.debug(f"breakdown_threshold(p={p}) = {root:.10f}")
    return float(root)


def analytics_table(grid: Iterable[float], p: float = 1.0) -> AnalyticsTable:
    """Evaluate (g, b) on a γ grid; p = 1 uses the closed forms."""
    p = _check_exponent(p)
    gammas = [_check_fraction(float(g), "gamma") for g in grid]
    g_values, b_values = [], []
    for gamma in gammas:
        if p == 1.0:
            g, b = big_g(gamma), big_b(gamma)
        else:
            g, b = tail_moments_p(gamma, p)
        g_values.append(g)
        b_values.append(b)
    return AnalyticsTable(grid=gammas, p=p, g_values=g_values, b_values=b_values)


def breakdown_curve(p_grid: Iterable[float]):
    return [(float(p), breakdown_threshold(float(p))) for p in p_grid]


# ==================== Lower-Bound and Sample-Size Calculators ====================

def _clip(gamma: float) -> float:
    return min(max(gamma, 0.0), 1.0)


def sparse_lower_bound_margin(eta: float, epsilon: float) -> float:
    """
    B(η − ε/2) − G(η + ε/2) − ε.

    Positive when zeroing the top η fraction of responses makes the zero
    vector strictly cheaper than w∗ for L1 regression, up to sampling slack ε.
    """
    _check_fraction(eta, "eta")
    _check_fraction(epsilon, "epsilon")
    return big_b(_clip(eta - epsilon / 2.0)) - big_g(_clip(eta + epsilon / 2.0)) - epsilon


def dense_lower_bound_constant(epsilon: float) -> float:
    """G(η₀ − ε/2) − ε: ‖d‖₁/m per unit ‖w∗‖₂ for the dense-noise adversary."""
    _check_fraction(epsilon, "epsilon")
    return big_g(_clip(eta0() - epsilon / 2.0)) - epsilon


def uniform_recovery_margin(eta: float, epsilon: float, alpha: float) -> float:
    """(G(η−ε) − B(η+ε) − 2ε) − 1/α, the per-sample recovery gap for Δ = 0."""
    _check_fraction(eta, "eta")
    _check_fraction(epsilon, "epsilon")
    if not alpha > 1.0:
        raise DomainError(f"alpha must exceed 1, got {alpha}")
    return big_g(_clip(eta - epsilon)) - big_b(_clip(eta + epsilon)) - 2.0 * epsilon - 1.0 / alpha


def sample_complexity_bound(k: int, n: int, alpha: float, epsilon: float, constant: float = 1.0) -> float:
    """C·(α²/ε²)·k·log(en/(α²εk)); the unknown constant C is a parameter."""
    if k < 1 or n < k:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not alpha > 1.0:
        raise DomainError(f"alpha must exceed 1, got {alpha}")
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    log_term = math.log(math.e * n / (alpha ** 2 * epsilon * k))
    return constant * (alpha ** 2 / epsilon ** 2) * k * max(log_term, 1.0)


def expected_gap_per_sample(eta: float) -> float:
    """G(η) − B(η): the population value of direction_gap / (m‖v‖₂)."""
    return big_g(eta) - big_b(eta)


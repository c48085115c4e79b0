"""Gamma function and the fractional Hardy constants.

``c_{N,a}`` is the constant in the quadratic form
``<(-Lap)^{a/2} u, u> = c_{N,a} \\iint |u(x)-u(y)|^2 / |x-y|^{N+a}``,
``H_{N,a}`` the sharp constant of the fractional Hardy inequality and
``mu* = H_{N,a} c_{N,a}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

# Lanczos approximation, g = 7, nine terms; ~1e-15 relative error for x >= 1/2.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def gamma_fn(x: float) -> float:
    """Gamma function for real ``x > 0``."""
    x = float(x)
    if not (x > 0.0) or not math.isfinite(x):
        raise DomainError(f"gamma_fn is defined here for x > 0 only, got {x}")
    if x > 171.0:
        raise DomainError(f"gamma_fn overflows double precision for x = {x}")
    if x < 0.5:
        return gamma_fn(x + 1.0) / x
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    # split the power to stay finite near the top of the range
    half = t ** (0.5 * (z + 0.5))
    return _SQRT_2PI * half * (half * math.exp(-t)) * acc


def abs_gamma_neg_half(alpha: float) -> float:
    """``|Gamma(-alpha/2)|`` for ``0 < alpha < 2`` via ``Gamma(1-s) / s``."""
    s = 0.5 * alpha
    return gamma_fn(1.0 - s) / s


def _check(N, alpha):
    if not (0.0 < alpha <= 2.0):
        raise DomainError(f"alpha must lie in (0, 2], got {alpha}")
    if not N > alpha:
        raise DomainError(f"need N > alpha, got N={N}, alpha={alpha}")


def critical_exponent(N: int, alpha: float) -> float:
    """Fractional Sobolev exponent ``2N / (N - alpha)``."""
    _check(N, alpha)
    return 2.0 * N / (N - alpha)


def c_N_alpha(N: int, alpha: float) -> float:
    """Quadratic-form constant; it vanishes in the local limit ``alpha = 2``.

    Unlike the Hardy constants it is defined for every ``N >= 1``.
    """
    if not (0.0 < alpha <= 2.0) or N < 1:
        raise DomainError(f"need 0 < alpha <= 2 and N >= 1, got N={N}, alpha={alpha}")
    if alpha == 2.0:
        return 0.0
    return 2.0**alpha * gamma_fn(0.5 * (N + alpha)) / (
        2.0 * math.pi ** (0.5 * N) * abs_gamma_neg_half(alpha)
    )


def pv_constant(N: int, alpha: float) -> float:
    """Constant in front of the principal-value integral; equals ``2 c_{N,alpha}``."""
    if not (0.0 < alpha < 2.0):
        raise DomainError(f"principal-value constant needs 0 < alpha < 2, got {alpha}")
    return 2.0**alpha * gamma_fn(0.5 * (N + alpha)) / (
        math.pi ** (0.5 * N) * abs_gamma_neg_half(alpha)
    )


def H_N_alpha(N: int, alpha: float) -> float:
    """Sharp fractional Hardy constant (infinite for ``alpha = 2``)."""
    _check(N, alpha)
    if alpha == 2.0:
        return math.inf
    ratio = gamma_fn(0.25 * (N + alpha)) / gamma_fn(0.25 * (N - alpha))
    return (
        2.0
        * math.pi ** (0.5 * N)
        * ratio**2
        * abs_gamma_neg_half(alpha)
        / gamma_fn(0.5 * (N + alpha))
    )


def mu_star(N: int, alpha: float) -> float:
    """Critical Hardy coupling ``2^a (Gamma((N+a)/4) / Gamma((N-a)/4))^2``."""
    _check(N, alpha)
    return 2.0**alpha * (gamma_fn(0.25 * (N + alpha)) / gamma_fn(0.25 * (N - alpha))) ** 2


def norm_equivalence_D(N: int, alpha: float, mu: float) -> float:
    """Lower constant ``D = (1 - mu/mu*) / 2`` of the Hardy-shifted norm."""
    ms = mu_star(N, alpha)
    if not (0.0 <= mu < ms):
        raise DomainError(f"0 <= mu < mu* violated: mu={mu}, mu*={ms}")
    return 0.5 * (1.0 - mu / ms)


@dataclass(frozen=True)
class HardyConstants:
    N: int
    alpha: float
    c_N_alpha: float
    H_N_alpha: float
    mu_star: float

    @classmethod
    def of(cls, N: int, alpha: float) -> "HardyConstants":
        return cls(N, float(alpha), c_N_alpha(N, alpha), H_N_alpha(N, alpha), mu_star(N, alpha))

    def D(self, mu: float) -> float:
        return norm_equivalence_D(self.N, self.alpha, mu)

"""Special functions used throughout the package.

Airy Ai and Ai', Gamma and log-Gamma, the exact rationals alpha_k, and the
Tracy-Widom constant chi0 = log(2)/24 + zeta'(-1).

The Airy routines sum the Maclaurin series in extended precision for
|x| <= AIRY_SWITCH and fall back to the Poincare asymptotic expansions
(optimally truncated) beyond it.  Summing in extended precision removes the
cancellation that plain double-precision series suffer on the negative axis,
which matters because the Fredholm determinant for s near -10 is sensitive to
kernel perturbations of order 1e-16.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

__all__ = [
    "AIRY_SWITCH",
    "HierarchyConstants",
    "airy_ai",
    "airy_ai_prime",
    "airy_pair",
    "gamma",
    "lgamma",
    "half_integer_gamma_ratio",
    "alpha",
    "bernoulli",
    "glaisher_log",
    "zeta_prime_minus1",
    "chi0",
    "hierarchy_constants",
]

AIRY_SWITCH = 12.0

# private fixed-precision context; never mutated after import, so reentrant
_MP = mpmath.MPContext()
_MP.prec = 160

# Ai(0) = 3^(-2/3)/Gamma(2/3) and Ai'(0) = -3^(-1/3)/Gamma(1/3)
_AI0 = _MP.mpf("0.35502805388781723926006318600418317639797917419917724058")
_AIP0 = _MP.mpf("-0.25881940379280679840518356018920396347909113835493458221")
_SERIES_EPS = _MP.mpf(2) ** -150


def _check_finite(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"Airy argument must be finite, got {x!r}")
    return x


def _airy_maclaurin(x: float) -> tuple[float, float]:
    # Ai = Ai(0) f + Ai'(0) g with f, g the two canonical power series
    X = _MP.mpf(x)
    x3 = X**3
    f = fp = _MP.mpf(0)
    g = gp = _MP.mpf(0)
    tf = _MP.mpf(1)
    tg = X
    f += tf
    g += tg
    gp += 1
    k = 1
    while True:
        tf = tf * x3 / ((3 * k - 1) * (3 * k))
        tg = tg * x3 / ((3 * k) * (3 * k + 1))
        f += tf
        g += tg
        # derivatives: d/dx x^(3k) = 3k x^(3k-1), d/dx x^(3k+1) = (3k+1) x^(3k)
        if X != 0:
            fp += tf * (3 * k) / X
            gp += tg * (3 * k + 1) / X
        if abs(tf) + abs(tg) < _SERIES_EPS * (abs(f) + abs(g) + 1) and k > 2:
            break
        k += 1
    ai = _AI0 * f + _AIP0 * g
    aip = _AI0 * fp + _AIP0 * gp
    return float(ai), float(aip)


@lru_cache(maxsize=None)
def _asymptotic_coefficients(nmax: int = 80) -> tuple[tuple[float, ...], tuple[float, ...]]:
    u = [1.0]
    for k in range(1, nmax + 1):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    v = [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(nmax + 1)]
    return tuple(u), tuple(v)


def _optimal_sum(coeffs, zeta: float, alternating: bool, parity: int | None = None) -> float:
    # sum c_k (+-1)^k zeta^-k, stopping at the smallest term
    total = 0.0
    prev = math.inf
    idx = range(len(coeffs)) if parity is None else range(parity, len(coeffs), 2)
    for n, k in enumerate(idx):
        term = coeffs[k] / zeta**k
        if alternating:
            term *= (-1) ** (n if parity is not None else k)
        if abs(term) >= prev:
            break
        total += term
        prev = abs(term)
    return total


def _airy_asymptotic(x: float) -> tuple[float, float]:
    u, v = _asymptotic_coefficients()
    z = abs(x)
    zeta = 2.0 / 3.0 * z**1.5
    if x > 0:
        pref = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
        ai = pref / z**0.25 * _optimal_sum(u, zeta, True)
        aip = -pref * z**0.25 * _optimal_sum(v, zeta, True)
        return ai, aip
    # phase reduced in extended precision; zeta reaches ~60 on [-20, 0]
    phase = _MP.mpf(2) / 3 * _MP.mpf(z) ** _MP.mpf(1.5) - _MP.pi / 4
    c, s = float(_MP.cos(phase)), float(_MP.sin(phase))
    ue = _optimal_sum(u, zeta, True, 0)
    uo = _optimal_sum(u, zeta, True, 1)
    ve = _optimal_sum(v, zeta, True, 0)
    vo = _optimal_sum(v, zeta, True, 1)
    ai = (c * ue + s * uo) / (math.sqrt(math.pi) * z**0.25)
    aip = z**0.25 / math.sqrt(math.pi) * (s * ve - c * vo)
    return ai, aip


def airy_pair(x: float) -> tuple[float, float]:
    """Return (Ai(x), Ai'(x))."""
    x = _check_finite(x)
    if abs(x) <= AIRY_SWITCH:
        return _airy_maclaurin(x)
    if x > 120.0:
        return 0.0, -0.0
    return _airy_asymptotic(x)


def airy_ai(x: float) -> float:
    """Airy function Ai(x) for real finite x."""
    return airy_pair(x)[0]


def airy_ai_prime(x: float) -> float:
    """Derivative Ai'(x) for real finite x."""
    return airy_pair(x)[1]


# Lanczos approximation, g = 7, n = 9 (the widely published coefficient set)
_LANCZOS_G = 7
_LANCZOS = (
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


def _is_half_integer(z: float) -> bool:
    return (2 * z) == int(2 * z) and (2 * z) % 2 == 1


def gamma(z: float) -> float:
    """Gamma function for real z (poles at non-positive integers raise)."""
    z = float(z)
    if z <= 0 and z == int(z):
        raise ValueError(f"Gamma has a pole at {z}")
    if _is_half_integer(z) and abs(z) < 150:
        n = int(z - 0.5)
        return float(half_integer_gamma_ratio(n)) * math.sqrt(math.pi)
    if z == int(z) and z < 171:
        return float(math.factorial(int(z) - 1))
    if z < 0.5:
        return math.pi / (math.sin(math.pi * z) * gamma(1.0 - z))
    z -= 1.0
    a = _LANCZOS[0]
    t = z + _LANCZOS_G + 0.5
    for i in range(1, len(_LANCZOS)):
        a += _LANCZOS[i] / (z + i)
    return math.sqrt(2 * math.pi) * t ** (z + 0.5) * math.exp(-t) * a


def lgamma(z: float) -> float:
    """log|Gamma(z)| for real z > 0 via the same Lanczos sum."""
    z = float(z)
    if z <= 0:
        raise ValueError("lgamma implemented for z > 0 only")
    if z < 0.5:
        return math.log(math.pi / abs(math.sin(math.pi * z))) - lgamma(1.0 - z)
    z -= 1.0
    a = _LANCZOS[0]
    t = z + _LANCZOS_G + 0.5
    for i in range(1, len(_LANCZOS)):
        a += _LANCZOS[i] / (z + i)
    return 0.5 * math.log(2 * math.pi) + (z + 0.5) * math.log(t) - t + math.log(a)


def half_integer_gamma_ratio(n: int) -> Fraction:
    """Exact Gamma(n + 1/2)/Gamma(1/2) for integer n (negative n allowed)."""
    r = Fraction(1)
    if n >= 0:
        for i in range(n):
            r *= Fraction(2 * i + 1, 2)
    else:
        for i in range(n, 0):
            r /= Fraction(2 * i + 1, 2)
    return r


def alpha(k: int) -> Fraction:
    """Exact alpha_k = 2 Gamma(2k+3/2) / (Gamma(2k+2) Gamma(3/2))."""
    if k < 0 or int(k) != k:
        raise ValueError("k must be a non-negative integer")
    k = int(k)
    num = half_integer_gamma_ratio(2 * k + 1)
    den = half_integer_gamma_ratio(1) * math.factorial(2 * k + 1)
    return 2 * num / den


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n (B_1 = +1/2 convention is irrelevant here; n even)."""
    # Akiyama-Tanigawa
    a = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return a[0]


@lru_cache(maxsize=None)
def glaisher_log() -> float:
    """log A (Glaisher-Kinkelin) from the Euler-Maclaurin form of log H(n)."""
    n = 40
    N = _MP.mpf(n)
    logh = _MP.fsum(j * _MP.log(j) for j in range(2, n + 1))
    val = logh - (N**2 / 2 + N / 2 + _MP.mpf(1) / 12) * _MP.log(N) + N**2 / 4
    for j in range(2, 16):
        b = bernoulli(2 * j)
        c = _MP.mpf(b.numerator) / b.denominator
        val += c / ((2 * j) * (2 * j - 1) * (2 * j - 2) * N ** (2 * j - 2))
    return float(val)


def zeta_prime_minus1() -> float:
    """zeta'(-1) = 1/12 - log A."""
    return 1.0 / 12.0 - glaisher_log()


def chi0() -> float:
    """Large-gap constant log(2)/24 + zeta'(-1)."""
    return math.log(2.0) / 24.0 + zeta_prime_minus1()


@dataclass(frozen=True)
class HierarchyConstants:
    k: int
    alpha_k: Fraction
    chi0: float
    zeta_prime_minus1: float


def hierarchy_constants(k: int) -> HierarchyConstants:
    return HierarchyConstants(k=k, alpha_k=alpha(k), chi0=chi0(), zeta_prime_minus1=zeta_prime_minus1())

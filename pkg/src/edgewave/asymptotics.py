"""Closed-form pieces of the large-gap expansion for the P_I^{2k} determinant.

Conventions
-----------
* ``k`` is the hierarchy index, ``alpha`` stands for ``specfun.alpha(k)``.
* Fractional powers x^(p/(2k+1)) and x^(p/(3(2k+1))) use the real odd root,
  so they are defined for negative x and even ``p`` gives an even function.
* Quantities that cancel catastrophically (theta - g matching remainders,
  the proof scaffold combination, the transition defect) are evaluated in a
  private 256-bit mpmath context and only rounded at the very end.

The g-function family is parameterized by the rescaled variables (r, y) with
s = r * lam and x = y * lam^(2k+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

import mpmath

from .specfun import alpha, chi0, half_integer_gamma_ratio

__all__ = [
    "GFunctionData",
    "AsymptoticBreakdown",
    "K1Breakdown",
    "ScaffoldRecord",
    "LemmaApproximant",
    "theta",
    "b_coefficients",
    "d1_coefficient",
    "gfunction_data",
    "g1",
    "p1",
    "p1_tilde",
    "p1_tilde_from_b",
    "matching_remainder",
    "lemma41_sign_check",
    "conformal_f1",
    "conformal_f1_from_g1",
    "conformal_f2",
    "conformal_f3",
    "kappa",
    "kappa0",
    "G2Family",
    "g2_family",
    "chi_variable",
    "chi_derivative",
    "theorem_expansion",
    "k1_t1_expansion",
    "transition_eval",
    "proof_scaffold",
    "s1_four_term",
    "s1_expansion_remainder",
    "region_classify",
    "lemma_approximants",
]

_HP = mpmath.MPContext()
_HP.prec = 256

DEFAULT_C1 = 1.0
DEFAULT_DELTA = 1.0 / 6.0
DEFAULT_EPS = 1.0 / 6.0


def _check_k(k: int, minimum: int = 0) -> int:
    if int(k) != k or k < minimum:
        raise ValueError(f"k must be an integer >= {minimum}")
    return int(k)


def _odd_root(x, n: int):
    """Real n-th root for odd n (float or mpf)."""
    if isinstance(x, mpmath.ctx_mp_python.mpf):
        return _HP.sign(x) * _HP.power(abs(x), _HP.mpf(1) / n)
    return math.copysign(abs(x) ** (1.0 / n), x)


def _ratio(n: int) -> Fraction:
    # Gamma(n + 1/2) / Gamma(1/2)
    return half_integer_gamma_ratio(n)


# ---------------------------------------------------------------- theta, b_j, d_1


def theta(k: int, eta: float, y: float) -> float:
    """theta(eta; y) = 4/(4k+3) eta^((4k+3)/2) + y eta^(1/2) for eta > 0."""
    k = _check_k(k)
    if not eta > 0:
        raise ValueError("theta is evaluated on the positive real axis only")
    return 4.0 / (4 * k + 3) * eta ** ((4 * k + 3) / 2.0) + y * math.sqrt(eta)


def _is_rational(v) -> bool:
    return isinstance(v, (int, Fraction))


def b_coefficients(k: int, r, y) -> tuple:
    """b_0, ..., b_{2k+1}; exact Fractions when r and y are int or Fraction."""
    k = _check_k(k)
    a = alpha(k)
    exact = _is_rational(r) and _is_rational(y)
    if exact:
        r, y = Fraction(r), Fraction(y)
    else:
        a = float(a)
        r, y = float(r), float(y)
    out = [-a * r ** (2 * k + 1) - y]
    for j in range(1, 2 * k + 2):
        # Gamma(2k+2)/Gamma(2k+2-j) * Gamma(3/2)/Gamma(j+3/2)
        c = Fraction(math.factorial(2 * k + 1), math.factorial(2 * k + 1 - j)) * _ratio(1) / _ratio(j + 1)
        if not exact:
            c = float(c)
        out.append((-1) ** (j + 1) * c * a * r ** (2 * k + 1 - j))
    return tuple(out)


def d1_coefficient(k: int, r, y):
    """d_1 = alpha r^(2k+2) / (4(k+1)) + r y / 2."""
    a = alpha(k)
    if _is_rational(r) and _is_rational(y):
        return a * Fraction(r) ** (2 * k + 2) / (4 * (k + 1)) + Fraction(r) * Fraction(y) / 2
    return float(a) * float(r) ** (2 * k + 2) / (4 * (k + 1)) + float(r) * float(y) / 2


def region_classify(k: int, lam: float, r: float, y: float, delta: float = DEFAULT_DELTA, C1: float = DEFAULT_C1) -> str:
    """'algebraic', 'transition' or 'exponential' from alpha r^(2k+1) + y."""
    k = _check_k(k)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    v = float(alpha(k)) * float(r) ** (2 * k + 1) + float(y)
    thr = C1 * lam ** (-k - 1 + delta)
    if v < -thr:
        return "algebraic"
    if v > thr:
        return "exponential"
    return "transition"


@dataclass(frozen=True)
class GFunctionData:
    k: int
    r: object
    y: object
    b: tuple
    d1: object
    r0: float
    kappa0: Optional[float]
    region: str


def gfunction_data(
    k: int, r, y, lam: Optional[float] = None, delta: float = DEFAULT_DELTA, C1: float = DEFAULT_C1
) -> GFunctionData:
    """Bundle (k, r, y) with its coefficient family.

    Without ``lam`` the region is read off the sign of alpha r^(2k+1) + y alone.
    ``kappa0`` is only defined for y > 0 and is None otherwise.
    """
    k = _check_k(k)
    b = b_coefficients(k, r, y)
    if lam is None:
        v = -float(b[0])
        region = "algebraic" if v < 0 else ("exponential" if v > 0 else "transition")
    else:
        region = region_classify(k, lam, float(r), float(y), delta, C1)
    r0 = -_odd_root(float(y) / float(alpha(k)), 2 * k + 1)
    k0 = kappa0(k, float(r), float(y)) if float(y) > 0 else None
    return GFunctionData(k=k, r=r, y=y, b=b, d1=d1_coefficient(k, r, y), r0=r0, kappa0=k0, region=region)


# ---------------------------------------------------------------- g_1 and its polynomials


def g1(data: GFunctionData, eta: float) -> float:
    """sum_j (-1)^(j+1) b_j (eta - r)^(1/2 + j), principal branch, eta > r."""
    r = float(data.r)
    if not eta > r:
        raise ValueError("g1 is evaluated for eta > r only")
    t = eta - r
    return sum((-1) ** (j + 1) * float(b) * t ** (0.5 + j) for j, b in enumerate(data.b))


def p1(data: GFunctionData, eta: float) -> float:
    """Polynomial with g1 = (eta - r)^(1/2) p1."""
    k, r, y = data.k, float(data.r), float(data.y)
    total = y
    for j in range(2 * k + 2):
        c = 4.0 / (4 * k + 3) * float(_ratio(j)) / math.factorial(j)
        total += c * r**j * eta ** (2 * k + 1 - j)
    return total


def _p1_tilde_coefficients(k: int) -> list:
    # Gamma(j - 1/2) / (Gamma(j+1) Gamma(-1/2)); Gamma(-1/2)/Gamma(1/2) = -2
    return [float(_ratio(j - 1) / _ratio(-1)) / math.factorial(j) for j in range(2 * k + 2)]


def p1_tilde(data: GFunctionData, eta: float) -> float:
    """Polynomial with g1' = (eta - r)^(-1/2) p1_tilde, in its closed form."""
    k, r, y = data.k, float(data.r), float(data.y)
    coeffs = _p1_tilde_coefficients(k)
    # 2 eta^(2k+1) sum c_j (r/eta)^j, written without dividing by eta
    return 2.0 * sum(c * r**j * eta ** (2 * k + 1 - j) for j, c in enumerate(coeffs)) + y / 2.0


def p1_tilde_from_b(data: GFunctionData, eta: float) -> float:
    """The same polynomial from the b-family: sum (-1)^(j+1) (j + 1/2) b_j (eta - r)^j."""
    t = eta - float(data.r)
    return sum((-1) ** (j + 1) * (j + 0.5) * float(b) * t**j for j, b in enumerate(data.b))


@dataclass(frozen=True)
class SignReport:
    ok: bool
    samples: int
    max_value: float
    first_violation: Optional[float] = None


def lemma41_sign_check(k: int, r: float, y: float, samples: int = 1000, S: float = 50.0, rng=None) -> SignReport:
    """Check p1_tilde < 0 on ``samples`` points of (-S, r).

    Points are a uniform grid (open at both ends) unless ``rng`` is given, in
    which case they are drawn uniformly.
    """
    import numpy as np

    k = _check_k(k, 0)
    a = float(alpha(k))
    if a * float(r) ** (2 * k + 1) + float(y) > 0:
        raise ValueError("requires alpha_k r^(2k+1) + y <= 0")
    if not r > -S:
        raise ValueError("r must exceed -S")
    data = gfunction_data(k, float(r), float(y))
    if rng is None:
        etas = np.linspace(-S, float(r), samples + 2)[1:-1]
    else:
        etas = rng.uniform(-S, float(r), samples)
        etas = etas[etas < float(r)]
    vals = np.array([p1_tilde(data, float(e)) for e in etas])
    bad = np.flatnonzero(vals >= 0)
    return SignReport(
        ok=bad.size == 0,
        samples=int(etas.size),
        max_value=float(vals.max()),
        first_violation=float(etas[bad[0]]) if bad.size else None,
    )


# ---------------------------------------------------------------- matching remainders


def _to_hp(v):
    q = Fraction(v)  # exact for binary floats
    return _HP.mpf(q.numerator) / q.denominator


def _g1_hp(k: int, r, y, eta):
    # b_j rebuilt from exact rationals so that nothing is rounded before the cancellation
    b = b_coefficients(k, Fraction(r), Fraction(y))
    t = eta - _to_hp(r)
    return _HP.fsum((-1) ** (j + 1) * _to_hp(bj) * t ** (_HP.mpf(1) / 2 + j) for j, bj in enumerate(b))


def _g2_hp(k: int, y, eta):
    n = 2 * k + 1
    A = _to_hp(alpha(k))
    yy = _to_hp(y)
    r0 = -_HP.sign(yy) * _HP.power(abs(yy) / A, _HP.mpf(1) / n)
    unit = _p2_unit_coefficients(k)
    p = _HP.fsum(_to_hp(c) * r0**j * eta ** (2 * k - j) for j, c in enumerate(unit))
    d2 = -_HP.fsum(
        _to_hp(_binom_half(2 * k + 2 - j)) * (-1) ** (2 * k + 2 - j) * _to_hp(c) * r0 ** (2 * k + 2)
        for j, c in enumerate(unit)
    )
    return (eta - r0) ** _HP.mpf(1.5) * p, d2


def _theta_hp(k: int, eta, y):
    return _HP.mpf(4) / (4 * k + 3) * eta ** (_HP.mpf(4 * k + 3) / 2) + y * _HP.sqrt(eta)


def matching_remainder(data: GFunctionData, eta: float, family: str = "g1") -> float:
    """|theta - g - d eta^(-1/2)| evaluated in extended precision.

    ``family`` is 'g1' (with the closed-form d_1) or 'g2' (with d_2 from the
    binomial expansion).  The result should decay like eta^(-3/2).
    """
    k = data.k
    e = _HP.mpf(eta)
    th = _theta_hp(k, e, _to_hp(data.y))
    if family == "g1":
        d = d1_coefficient(k, Fraction(data.r), Fraction(data.y))
        rem = th - _g1_hp(k, data.r, data.y, e) - _to_hp(d) / _HP.sqrt(e)
    elif family == "g2":
        g, d2 = _g2_hp(k, data.y, e)
        rem = th - g - d2 / _HP.sqrt(e)
    else:
        raise ValueError("family must be 'g1' or 'g2'")
    return float(abs(rem))


# ---------------------------------------------------------------- conformal maps


def conformal_f1(data: GFunctionData, eta: float) -> float:
    """eta [1 + sum_{j>=1} (-1)^j b_j b_0^(j-1) eta^j]^2 (polynomial form)."""
    b = [float(v) for v in data.b]
    inner = 1.0 + sum((-1) ** j * b[j] * b[0] ** (j - 1) * eta**j for j in range(1, len(b)))
    return eta * inner * inner


def conformal_f1_from_g1(data: GFunctionData, eta: float) -> float:
    """b_0^(-3) (-g1(b_0 eta + r))^2; needs b_0 eta > 0 on the real slice."""
    b0 = float(data.b[0])
    if b0 == 0.0:
        raise ValueError("f1 is undefined when b_0 = 0")
    if not b0 * eta > 0:
        raise ValueError("b_0 eta must be positive on the real slice")
    g = g1(data, b0 * eta + float(data.r))
    return g * g / b0**3


def _f2_bracket(data: GFunctionData, eta: float) -> float:
    t = eta - float(data.r)
    return 1.5 * sum((-1) ** (i + 1) * float(data.b[i]) * t ** (i - 1) for i in range(1, len(data.b)))


def conformal_f2(data: GFunctionData, eta: float) -> float:
    """[(3/2) sum_{i>=1} (-1)^(i+1) b_i (eta - r)^(i-1)]^(2/3) (eta - r); independent of b_0."""
    br = _f2_bracket(data, eta)
    return abs(br) ** (2.0 / 3.0) * (eta - float(data.r))


def kappa(data: GFunctionData, eta: Optional[float] = None) -> float:
    """-b_0 (eta - r)^(1/2) f2(eta)^(-1/2); at eta = r (default) this is -b_0 ((3/2) b_1)^(-1/3)."""
    b0 = float(data.b[0])
    if eta is None or eta == float(data.r):
        base = 1.5 * float(data.b[1])
        if base <= 0:
            raise ValueError("(3/2) b_1 must be positive")
        return -b0 * base ** (-1.0 / 3.0)
    t = eta - float(data.r)
    if t <= 0:
        raise ValueError("kappa is evaluated for eta >= r on the real slice")
    return -b0 * math.sqrt(t / conformal_f2(data, eta))


def kappa0(k: int, r: float, y: float) -> float:
    """-b_0 [(2k+1) alpha (y/alpha)^(2k/(2k+1))]^(-1/3), defined for y > 0."""
    k = _check_k(k)
    if not y > 0:
        raise ValueError("kappa0 is defined for y > 0 only")
    a = float(alpha(k))
    b0 = -a * r ** (2 * k + 1) - y
    return -b0 * ((2 * k + 1) * a * (y / a) ** (2 * k / (2 * k + 1))) ** (-1.0 / 3.0)


@dataclass(frozen=True)
class G2Family:
    k: int
    y: float
    r0: float
    p2_coefficients: tuple  # coefficient of eta^(2k-j) for j = 0..2k, r0 powers included
    d2: float
    d2_from_matching: bool = True

    def p2(self, eta: float) -> float:
        n = 2 * self.k
        return sum(c * eta ** (n - j) for j, c in enumerate(self.p2_coefficients))

    def dp2(self, eta: float) -> float:
        n = 2 * self.k
        return sum(c * (n - j) * eta ** (n - j - 1) for j, c in enumerate(self.p2_coefficients) if n - j > 0)

    def g2(self, eta: float) -> float:
        t = eta - self.r0
        if not t > 0:
            raise ValueError("g2 is evaluated for eta > r0 only")
        return t**1.5 * self.p2(eta)


def _p2_unit_coefficients(k: int) -> list:
    # 4/(4k+3) Gamma(j+3/2)/(Gamma(j+1) Gamma(3/2)), without the r0^j factor
    return [Fraction(4, 4 * k + 3) * _ratio(j + 1) / _ratio(1) / math.factorial(j) for j in range(2 * k + 1)]


def _binom_half(m: int) -> Fraction:
    # binomial(3/2, m)
    out = Fraction(1)
    for i in range(m):
        out *= (Fraction(3, 2) - i) / (i + 1)
    return out


def g2_family(k: int, y: float) -> G2Family:
    """r0 = -(y/alpha)^(1/(2k+1)), the p2 coefficients, and d2.

    d2 has no separate closed form here; it is the eta^(-1/2) coefficient of
    -g2 obtained by expanding (1 - r0/eta)^(3/2).
    """
    k = _check_k(k)
    a = float(alpha(k))
    r0 = -_odd_root(float(y) / a, 2 * k + 1)
    unit = _p2_unit_coefficients(k)
    coeffs = tuple(float(c) * r0**j for j, c in enumerate(unit))
    # eta^(3/2 - m) * eta^(2k - j) hits eta^(-1/2) when m + j = 2k + 2
    d2 = 0.0
    for j, c in enumerate(unit):
        m = 2 * k + 2 - j
        d2 -= float(_binom_half(m)) * (-1) ** m * float(c) * r0 ** (m + j)
    return G2Family(k=k, y=float(y), r0=r0, p2_coefficients=coeffs, d2=d2)


def _p2_at(k: int, s0, s):
    # p2 with r0 replaced by s0, at argument s (float or mpf)
    n = 2 * k
    return sum((float(c) if not isinstance(s, mpmath.ctx_mp_python.mpf) else _HP.mpf(c.numerator) / c.denominator)
               * s0**j * s ** (n - j) for j, c in enumerate(_p2_unit_coefficients(k)))


def _dp2_at(k: int, s0: float, s: float) -> float:
    n = 2 * k
    return sum(float(c) * s0**j * (n - j) * s ** (n - j - 1) for j, c in enumerate(_p2_unit_coefficients(k)) if n - j > 0)


def conformal_f3(k: int, eta: float, r0: float) -> float:
    """((3/2) g2(eta))^(2/3) written as ((3/2) p2(eta))^(2/3) (eta - r0), eta >= r0."""
    k = _check_k(k)
    if eta < r0:
        raise ValueError("f3 is evaluated for eta >= r0 on the real slice")
    base = 1.5 * _p2_at(k, r0, eta)
    if base <= 0:
        raise ValueError("(3/2) p2 must be positive on the branch")
    return base ** (2.0 / 3.0) * (eta - r0)


# ---------------------------------------------------------------- chi


def _chi_rational(k: int, s, x):
    a = float(alpha(k))
    n = 2 * k + 1
    if isinstance(s, mpmath.ctx_mp_python.mpf):
        A = _HP.mpf(alpha(k).numerator) / alpha(k).denominator
        den = _HP.cbrt(n) * _HP.power(A, _HP.mpf(1) / (3 * n)) * _HP.power(abs(x), _HP.mpf(2 * k) / (3 * n))
        return (A * s**n + x) / den
    # x^(2k/(3(2k+1))) is an even power of a real odd root
    den = n ** (1.0 / 3.0) * a ** (1.0 / (3 * n)) * abs(x) ** (2.0 * k / (3 * n))
    return (a * s**n + x) / den


def chi_variable(k: int, s: float, x: float) -> float:
    """Piecewise transition variable: rational form left of s0, f3(s; s0) right of it."""
    k = _check_k(k)
    if not x > 0:
        raise ValueError("chi is defined for x > 0")
    a = float(alpha(k))
    if a * s ** (2 * k + 1) + x <= 0:
        return _chi_rational(k, s, x)
    s0 = -_odd_root(x / a, 2 * k + 1)
    return conformal_f3(k, s, s0)


def chi_derivative(k: int, s: float, x: float) -> float:
    """d chi / d s on each branch (f3 branch differentiated analytically)."""
    k = _check_k(k)
    if not x > 0:
        raise ValueError("chi is defined for x > 0")
    a = float(alpha(k))
    n = 2 * k + 1
    if a * s**n + x <= 0:
        den = n ** (1.0 / 3.0) * a ** (1.0 / (3 * n)) * x ** (2.0 * k / (3 * n))
        return n * a * s ** (2 * k) / den
    s0 = -_odd_root(x / a, n)
    base = 1.5 * _p2_at(k, s0, s)
    # d/ds [base^(2/3) (s - s0)] = base^(-1/3) [base + (s - s0) (3/2) p2'(s)]
    return base ** (-1.0 / 3.0) * (base + (s - s0) * 1.5 * _dp2_at(k, s0, s))


# ---------------------------------------------------------------- theorem expansion


@dataclass(frozen=True)
class AsymptoticBreakdown:
    quartic_power: float
    cross: float
    quadratic: float
    log_term: float
    Ih_term: float
    power_x: float
    log_x: float
    const_block: float
    total: float
    tags: tuple = ()

    FIELDS = ("quartic_power", "cross", "quadratic", "log_term", "Ih_term", "power_x", "log_x", "const_block")

    def terms(self) -> dict:
        return {f: getattr(self, f) for f in self.FIELDS}


def _mpq(q: Fraction):
    return _HP.mpf(q.numerator) / q.denominator


def _theorem_terms_hp(k: int, s, x, Ih, simplify_log: bool = False) -> dict:
    A = _mpq(alpha(k))
    n = 2 * k + 1
    s, x, Ih = _HP.mpf(s), _HP.mpf(x), _HP.mpf(Ih)
    inner = A * s**n if simplify_log else A * s**n + x
    if inner == 0:
        raise ValueError("log argument alpha_k s^(2k+1) + x vanishes")
    xr = _HP.sign(x) * _HP.power(abs(x), _HP.mpf(1) / n)  # real odd root
    return {
        "quartic_power": A**2 * s ** (4 * k + 3) / (4 * (4 * k + 3)),
        "cross": A * x * s ** (2 * k + 2) / (2 * (2 * k + 2)),
        "quadratic": x**2 * s / 4,
        "log_term": -_HP.log(abs(inner)) / 8,
        "Ih_term": -Ih,
        "power_x": _HP.mpf(n**2) / (2 * (2 * k + 2) * (4 * k + 3)) * _HP.power(A, -_HP.mpf(1) / n) * xr ** (4 * k + 3),
        "log_x": k * _HP.log(x * x + 1) / (24 * n),
        "const_block": _HP.log(n) / 24 + _HP.log(A) / (24 * n) + _HP.mpf(chi0()),
    }


def theorem_window(k: int, s: float, c1: float = 1.0, c2: float = 1.0, eps: float = DEFAULT_EPS) -> tuple:
    a = float(alpha(k))
    S = abs(s)
    return (-c1 * S ** (2 * k + 1), a * S ** (2 * k + 1) - c2 * S ** (2 * k / 3.0 + eps))


def theorem_expansion(
    k: int,
    s: float,
    x: float,
    Ih_value: Optional[float] = None,
    allow_missing_Ih: bool = False,
    simplify_log: bool = False,
    c1: float = 1.0,
    c2: float = 1.0,
    eps: float = DEFAULT_EPS,
) -> AsymptoticBreakdown:
    """Itemized large-gap expansion of log det at t = 0.

    ``Ih_value`` is I_h(x) = int_x^inf (h - h_Asy).  Passing None requires
    ``allow_missing_Ih`` and substitutes 0 (tagged).  Points outside the
    uniformity window produce a tagged result rather than an error.
    """
    k = _check_k(k)
    if not s < 0:
        raise ValueError("s must be negative")
    tags = []
    if Ih_value is None:
        if not allow_missing_Ih:
            raise ValueError("Ih_value is required (or pass allow_missing_Ih=True)")
        Ih_value = 0.0
        tags.append("Ih_zero")
    lo, hi = theorem_window(k, s, c1, c2, eps)
    if not lo <= x <= hi:
        tags.append("outside_window")
    if simplify_log:
        tags.append("log_simplified")
    t = _theorem_terms_hp(k, s, x, Ih_value, simplify_log)
    vals = {name: float(v) for name, v in t.items()}
    total = math.fsum(vals.values())
    return AsymptoticBreakdown(**vals, total=total, tags=tuple(tags))


@dataclass(frozen=True)
class K1Breakdown:
    terms: dict
    total: float


def _cbrt(v: float) -> float:
    return math.copysign(abs(v) ** (1.0 / 3.0), v)


def k1_t1_expansion(s: float, x: float, J0: float, t1: float = 0.0) -> K1Breakdown:
    """k = 1 expansion with the t1 terms and explicit rational coefficients.

    J0 = int_x^inf (h - h_Asy(., t1)).  J1 is the primitive of the power terms
    of h_Asy(., t1); its x^(1/3) term pairs with the x^(-2/3) term there.
    """
    c = 0.8 ** (1.0 / 3.0)
    x13 = _cbrt(x)
    J1 = (
        9.0 / 56.0 * c * x13**7
        - 0.3 * t1 * c * c * x13**5
        + 4.0 * t1 * t1 / 15.0 * x
        - 8.0 / 45.0 * c * t1**3 * x13
    )
    terms = {
        "s7": 25.0 / 448.0 * s**7,
        "s5": t1 / 4.0 * s**5,
        "s4": 5.0 * x / 32.0 * s**4,
        "s3": t1 * t1 / 3.0 * s**3,
        "s2": t1 * x / 2.0 * s**2,
        "s1": x * x / 4.0 * s,
        "log": -math.log(abs(1.25 * s**3 + x + 2 * t1 * s)) / 8.0,
        "J0": -J0,
        "J1": J1,
        "log_x": math.log(x * x + 1.0) / 72.0,
        "const": math.log(3.0) / 24.0 + math.log(1.25) / 72.0 + chi0(),
    }
    return K1Breakdown(terms=terms, total=math.fsum(terms.values()))


def _Ih_for(k: int, x: float) -> tuple:
    if k == 1:
        from .pi2k_profile import I_h_tail

        return I_h_tail(x).value, ()
    return 0.0, ("Ih_neglected",)


def transition_eval(
    k: int, s: float, stilde: float, Ih_value: Optional[float] = None, simplify_log: bool = False
) -> float:
    """Expansion at x = alpha|s|^(2k+1) + (2k+1)^(1/3) alpha^(1/3) stilde |s|^(2k/3)
    minus the Tracy-Widom asymptote -|stilde|^3/12 - log|stilde|/8 + chi0.

    For k = 1 and no explicit ``Ih_value`` the tail of the algebraic expansion
    of h supplies I_h(x); for other k, I_h (which is o(1) there) is dropped.
    """
    k = _check_k(k, 1)
    if not s < 0:
        raise ValueError("s must be negative")
    S = abs(s)
    if not (stilde < 0 and -stilde < S ** (k / 3.0 + 0.25)):
        raise ValueError("scaling window violated: need 0 < -stilde < |s|^(k/3 + 1/4)")
    A = _mpq(alpha(k))
    n = 2 * k + 1
    Sm = _HP.mpf(S)
    x = A * Sm**n + _HP.cbrt(n) * _HP.cbrt(A) * _HP.mpf(stilde) * Sm ** (_HP.mpf(2 * k) / 3)
    if Ih_value is None:
        Ih_value, _ = _Ih_for(k, float(x))
    t = _theorem_terms_hp(k, _HP.mpf(s), x, Ih_value, simplify_log)
    F = _HP.fsum(t.values())
    st = _HP.mpf(stilde)
    tw = -abs(st) ** 3 / 12 - _HP.log(abs(st)) / 8 + _HP.mpf(chi0())
    return float(F - tw)


# ---------------------------------------------------------------- proof scaffold


@dataclass(frozen=True)
class ScaffoldRecord:
    k: int
    s: float
    x0: float
    s0: float
    s1: float
    s2: float
    J2_s1: float
    chi_s1: float
    relation_defect_s1: float  # relative error of alpha s1^(2k+1) + x0 = -|s|^(k+1/6)
    relation_defect_s2: float
    cancellation: float


def proof_scaffold(k: int, s: float, x0sign: int) -> ScaffoldRecord:
    """s1, s2, J2(s1; x0) and the combination that must be O(|s|^(-1/3)).

    The combination is c_k alpha^(-1/(2k+1)) x0^((4k+3)/(2k+1)) + J2(s1; x0)
    - chi(s1; x0)^3/12, all evaluated with 256-bit arithmetic.
    """
    k = _check_k(k, 1)
    if not s < 0:
        raise ValueError("s must be negative")
    if x0sign not in (1, -1):
        raise ValueError("x0sign must be +1 or -1")
    n = 2 * k + 1
    A = _mpq(alpha(k))
    S = _HP.mpf(-s)
    x0 = x0sign * S**n
    base = -_HP.sign(x0) * _HP.power(abs(x0) / A, _HP.mpf(1) / n)  # -(x0/alpha)^(1/n), real root
    e = S ** (-k - _HP.mpf(5) / 6)
    s1 = base * _HP.power(1 + x0sign * e, _HP.mpf(1) / n)
    s2 = base * _HP.power(1 - x0sign * e, _HP.mpf(1) / n)
    target = S ** (k + _HP.mpf(1) / 6)
    rel1 = abs((A * s1**n + x0 + target) / target)
    rel2 = abs((A * s2**n + x0 - target) / target)
    J2 = A**2 / (4 * (4 * k + 3)) * s1 ** (4 * k + 3) + A / (4 * k + 4) * x0 * s1 ** (2 * k + 2) + x0**2 * s1 / 4
    chi1 = _chi_rational(k, s1, x0)
    x0root = _HP.sign(x0) * _HP.power(abs(x0), _HP.mpf(1) / n)
    lead = _HP.mpf(n**2) / (2 * (2 * k + 2) * (4 * k + 3)) * _HP.power(A, -_HP.mpf(1) / n) * x0root ** (4 * k + 3)
    comb = lead + J2 - chi1**3 / 12
    return ScaffoldRecord(
        k=k,
        s=float(s),
        x0=float(x0),
        s0=float(base),
        s1=float(s1),
        s2=float(s2),
        J2_s1=float(J2),
        chi_s1=float(chi1),
        relation_defect_s1=float(rel1),
        relation_defect_s2=float(rel2),
        cancellation=float(comb),
    )


def s1_four_term(k: int, s: float) -> float:
    """Four-term large-|s| expansion of s1 for x0 = |s|^(2k+1) > 0."""
    k = _check_k(k, 1)
    S = abs(s)
    n = 2 * k + 1
    val = -S - S ** (-k + 1.0 / 6.0) / n + k * S ** (-2 * k - 2.0 / 3.0) / n**2 - k * (4 * k + 1) / (3.0 * n**3) * S ** (
        -3 * k - 1.5
    )
    return val / float(alpha(k)) ** (1.0 / n)


def s1_expansion_remainder(k: int, s: float) -> float:
    """|alpha^(1/(2k+1)) s1 - four-term expansion| for x0 > 0, in 256-bit arithmetic."""
    k = _check_k(k, 1)
    n = 2 * k + 1
    S = _HP.mpf(abs(s))
    e = S ** (-k - _HP.mpf(5) / 6)
    exact = -S * _HP.power(1 + e, _HP.mpf(1) / n)
    series = (
        -S
        - S ** (-k + _HP.mpf(1) / 6) / n
        + k * S ** (-2 * k - _HP.mpf(2) / 3) / n**2
        - _HP.mpf(k * (4 * k + 1)) / (3 * n**3) * S ** (-3 * k - _HP.mpf(3) / 2)
    )
    return float(abs(exact - series))


# ---------------------------------------------------------------- lemma approximants


@dataclass(frozen=True)
class LemmaApproximant:
    which: str
    value: float
    leading: float
    correction: float
    tags: tuple = ()


@lru_cache(maxsize=1)
def _default_hm_profile():
    from .painleve2 import solve_hastings_mcleod

    return solve_hastings_mcleod()


def _hamiltonian_pII(chi: float, profile=None) -> tuple:
    from .painleve2 import hamiltonian_pII

    prof = profile if profile is not None else _default_hm_profile()
    if chi < -prof.L:
        # log F_TW ~ -|chi|^3/12 - log|chi|/8 gives H ~ chi^2/4 - 1/(8 chi)
        return chi * chi / 4.0 - 1.0 / (8.0 * chi), ("hm_asymptote",)
    if chi > prof.L:
        return 0.0, ("hm_asymptote",)
    return hamiltonian_pII(prof, chi), ()


def lemma_approximants(
    k: int,
    s: float,
    x: float,
    which: str,
    h: Optional[Callable[[float], float]] = None,
    hm_profile=None,
    C: float = 1.0,
    M: float = 10.0,
) -> LemmaApproximant:
    """Leading-order value of dF/dx or dF/ds (error terms dropped).

    which: 'dFdx', 'dFds_algebraic' or 'dFds_transition'.  For 'dFdx' an h
    supplier may be passed; without it h_Asy is used and the result is tagged.
    """
    k = _check_k(k, 0)
    a = float(alpha(k))
    n = 2 * k + 1
    v = a * s**n + x
    tags = []
    if which == "dFdx":
        lo, hi = theorem_window(k, s) if k >= 1 else (-abs(s) ** n, a * abs(s) ** n)
        if not lo <= x <= hi:
            tags.append("outside_region")
        if h is None:
            from .pi2k_profile import h_asy

            hx = h_asy(k, x) if k >= 1 else 0.0
            tags.append("h_asy_fallback")
        else:
            hx = float(h(x))
        leading = hx + a * s ** (2 * k + 2) / (4 * k + 4) + x * s / 2.0
        correction = -1.0 / (8.0 * v)
        return LemmaApproximant(which, leading + correction, leading, correction, tuple(tags))
    if which == "dFds_algebraic":
        scale = C * abs(x) ** ((k + 1.0 / 6.0) / n)
        if not -M * abs(x) <= v <= -scale:
            tags.append("outside_region")
        leading = 0.25 * v * v
        correction = -n * a * s ** (2 * k) / (8.0 * v)
        return LemmaApproximant(which, leading + correction, leading, correction, tuple(tags))
    if which == "dFds_transition":
        if not x > 0:
            raise ValueError("the transition approximant needs x > 0")
        scale = C * abs(x) ** ((k + 1.0 / 6.0) / n)
        if abs(v) > scale:
            tags.append("outside_region")
        chi = chi_variable(k, s, x)
        H, more = _hamiltonian_pII(chi, hm_profile)
        tags.extend(more)
        value = chi_derivative(k, s, x) * H
        return LemmaApproximant(which, value, value, 0.0, tuple(tags))
    raise ValueError("which must be 'dFdx', 'dFds_algebraic' or 'dFds_transition'")

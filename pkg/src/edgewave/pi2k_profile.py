"""Real pole-free (tritronquee) solution of the k = 1 even Painleve I member.

The equation solved is

    q'''' = 4x - 40 q^3 + 10 q'^2 + 20 q q'' - 16 t1 q,

i.e. x + L_2(q) + t1 L_0(q) = 0.  Both ends carry the algebraic expansion

    q(x) ~ sum_m a_m w^(1-m),   w = x^(1/3) (real cube root),

with a_0 = 10^(-1/3).  The coefficients are produced here by formal
substitution; for t1 = 0 the first correction is a_7 = -1/36, i.e.
q ~ a_0 x^(1/3) - 1/(36 x^2).  The same series (with real cube roots) closes
the problem at x = -L and at x = +L.

The Hamiltonian h obeys h' = q and is normalized so that h - h_Asy vanishes
as x -> +infinity.  Fractional powers x^(p/(2k+1)) always mean the real root
raised to the p-th power, so even p gives an even function of x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.sparse
import scipy.sparse.linalg
from scipy.interpolate import BPoly

from . import hierarchy
from .specfun import alpha

__all__ = [
    "NewtonDivergence",
    "Pi2Profile",
    "TailEstimate",
    "TotalIntegral",
    "CkScan",
    "series_coefficients",
    "series_q",
    "series_h_minus_hasy",
    "odd_root_power",
    "h_asy",
    "h_asy_antiderivative",
    "h_asy_free_term_shift",
    "solve_tritronquee",
    "I_h",
    "I_h_tail",
    "total_integral",
    "constant_Ck",
    "constant_Ck_scan",
]


class NewtonDivergence(RuntimeError):
    def __init__(self, message: str, trace):
        super().__init__(f"{message}; residual trace {['%.2e' % r for r in trace]}")
        self.trace = list(trace)


def odd_root_power(x, p: int, q: int):
    """x^(p/q) for odd q using the real q-th root."""
    xa = np.asarray(x, dtype=float)
    root = np.sign(xa) * np.abs(xa) ** (1.0 / q)
    with np.errstate(divide="ignore"):
        out = root**p
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------- formal series


def _laurent_mul(a: dict, b: dict, floor: int) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            if e >= floor:
                out[e] = out.get(e, 0.0) + ca * cb
    return out


def _laurent_dx(a: dict) -> dict:
    # d/dx w^e = (e/3) w^(e-3) with x = w^3
    return {e - 3: c * e / 3.0 for e, c in a.items() if e != 0}


@lru_cache(maxsize=32)
def series_coefficients(t1: float = 0.0, terms: int = 36) -> tuple:
    """Coefficients a_0..a_{terms-1} of q ~ sum a_m w^(1-m)."""
    a = [0.0] * terms
    a[0] = 10.0 ** (-1.0 / 3.0)
    for M in range(1, terms):
        # equation collected at exponent w^(3-M); a_M enters only via -120 a_0^2 a_M
        q = {1 - m: a[m] for m in range(M)}
        floor = 3 - M
        q3 = _laurent_mul(_laurent_mul(q, q, floor - 10), q, floor)
        d1 = _laurent_dx(q)
        d2 = _laurent_dx(d1)
        d4 = _laurent_dx(_laurent_dx(d2))
        rest = -40.0 * q3.get(floor, 0.0)
        rest += 10.0 * _laurent_mul(d1, d1, floor).get(floor, 0.0)
        rest += 20.0 * _laurent_mul(q, d2, floor).get(floor, 0.0)
        rest -= 16.0 * t1 * q.get(floor, 0.0)
        rest -= d4.get(floor, 0.0)
        a[M] = rest / (120.0 * a[0] ** 2)
    return tuple(a)


def _series_terms(t1: float, x: float, order: int = 0) -> list:
    a = series_coefficients(t1)
    w = math.copysign(abs(x) ** (1.0 / 3.0), x)
    out = []
    for m, c in enumerate(a):
        if c == 0.0:
            continue
        e = 1 - m
        coef = c
        for _ in range(order):
            coef *= e / 3.0
            e -= 3
        out.append(coef * w**e)
    return out


def _optimal(terms: list) -> float:
    total, prev = 0.0, math.inf
    for i, t in enumerate(terms):
        if i > 2 and abs(t) > prev:
            break
        total += t
        prev = abs(t) if t != 0 else prev
    return total


def series_q(x: float, t1: float = 0.0, order: int = 0) -> float:
    """Algebraic expansion of q^(order)(x), optimally truncated."""
    return _optimal(_series_terms(t1, x, order))


def series_h_minus_hasy(x: float, t1: float = 0.0) -> float:
    """h - h_Asy predicted by term-wise integration of the q expansion."""
    a = series_coefficients(t1)
    w = math.copysign(abs(x) ** (1.0 / 3.0), x)
    # h_Asy reproduces the terms with m <= 6 and the 1/(36x) part of x/(36(x^2+1))
    total = 0.0
    for m, c in enumerate(a):
        if m <= 7 or c == 0.0:
            continue
        total += c * 3.0 / (4 - m) * w ** (4 - m)
    a7 = a[7] if len(a) > 7 else 0.0
    # term-wise integral of a_7 w^-6 is -a_7/x; h_Asy carries x/(36(x^2+1))
    total += -a7 / x - x / (36.0 * (x * x + 1.0))
    return total


# ---------------------------------------------------------------- h_Asy


def h_asy(k: int, x, t1: float = 0.0):
    """Large-|x| form of the Hamiltonian h.

    For t1 = 0 and any k: (2k+1)/(2(2k+2)) alpha_k^(-1/(2k+1)) x^((2k+2)/(2k+1))
    + k x/(12(2k+1)(x^2+1)).  For k = 1 and t1 != 0 the four-term form with
    t1-dependent powers is used (its last power is x^(-2/3)).
    """
    xa = np.asarray(x, dtype=float)
    if t1 != 0.0:
        if k != 1:
            raise ValueError("t1-dependent h_Asy is available for k = 1 only")
        c = 0.8 ** (1.0 / 3.0)
        out = (
            0.375 * c * odd_root_power(xa, 4, 3)
            - 0.5 * t1 * c * c * odd_root_power(xa, 2, 3)
            + 4.0 * t1 * t1 / 15.0
            - 8.0 / 135.0 * c * t1**3 * odd_root_power(xa, -2, 3)
            + xa / (36.0 * (xa * xa + 1.0))
        )
    else:
        al = float(alpha(k))
        n = 2 * k + 1
        out = (2 * k + 1) / (2.0 * (2 * k + 2)) * al ** (-1.0 / n) * odd_root_power(xa, 2 * k + 2, n) + k * xa / (
            12.0 * n * (xa * xa + 1.0)
        )
    return float(out) if np.ndim(out) == 0 else out


def h_asy_leading_coefficient(k: int) -> Fraction:
    """(2k+1)/(2(2k+2)) as an exact rational; multiply by alpha_k^(-1/(2k+1))."""
    return Fraction(2 * k + 1, 2 * (2 * k + 2))


def h_asy_antiderivative(k: int, x, t1: float = 0.0):
    """Antiderivative of h_Asy vanishing at x = 0."""
    xa = np.asarray(x, dtype=float)
    if t1 != 0.0:
        if k != 1:
            raise ValueError("t1-dependent h_Asy is available for k = 1 only")
        c = 0.8 ** (1.0 / 3.0)
        out = (
            9.0 / 56.0 * c * odd_root_power(xa, 7, 3)
            - 0.3 * t1 * c * c * odd_root_power(xa, 5, 3)
            + 4.0 * t1 * t1 / 15.0 * xa
            - 8.0 / 45.0 * c * t1**3 * odd_root_power(xa, 1, 3)
            + np.log1p(xa * xa) / 72.0
        )
    else:
        al = float(alpha(k))
        n = 2 * k + 1
        out = (2 * k + 1) ** 2 / (2.0 * (2 * k + 2) * (4 * k + 3)) * al ** (-1.0 / n) * odd_root_power(
            xa, 4 * k + 3, n
        ) + k / (24.0 * n) * np.log1p(xa * xa)
    return float(out) if np.ndim(out) == 0 else out


def h_asy_free_term_shift(k: int, x):
    """Difference between the 2k/(24(2k+1)x) free term and k x/(12(2k+1)(x^2+1)).

    Equals k/(12(2k+1) x (x^2+1)) = O(x^-3).
    """
    xa = np.asarray(x, dtype=float)
    out = k / (12.0 * (2 * k + 1) * xa * (xa * xa + 1.0))
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------- BVP solver


@dataclass(frozen=True)
class TailEstimate:
    value: float
    error: float


@dataclass(frozen=True)
class Pi2Profile:
    grid: np.ndarray
    q: np.ndarray
    h: np.ndarray
    t1: float
    L: float
    derivatives: np.ndarray = field(repr=False, default=None)  # rows q, q', ..., q''''
    interpolant: BPoly = field(repr=False, default=None)  # quintic Hermite for q
    h_interpolant: BPoly = field(repr=False, default=None)  # antiderivative of q
    hh_interpolant: BPoly = field(repr=False, default=None)  # antiderivative of h
    iterations: int = 0

    @property
    def k(self) -> int:
        return 1

    def __call__(self, x, nu: int = 0):
        return self.interpolant(x, nu)

    def h_at(self, x):
        return self.h_interpolant(x)

    def residual(self) -> np.ndarray:
        """Equation residual through the symbolic operators, at every grid point."""
        return hierarchy.residual(1, [self.t1], self.grid, list(self.derivatives))

    def direct_residual(self) -> np.ndarray:
        """The same residual written out by hand, scaled by -1/4 to match."""
        q, q1, q2, _, q4 = self.derivatives
        x = self.grid
        return -0.25 * (q4 - 4 * x - 20 * q * q2 - 10 * q1**2 + 40 * q**3 + 16 * self.t1 * q)


def _stencils(n: int, h: float):
    lil = scipy.sparse.lil_matrix
    D1, D2, D4 = lil((n, n)), lil((n, n)), lil((n, n))
    c1 = np.array([1, -8, 0, 8, -1]) / (12 * h)
    c2 = np.array([-1, 16, -30, 16, -1]) / (12 * h * h)
    c4 = np.array([-1 / 6, 2, -13 / 2, 28 / 3, -13 / 2, 2, -1 / 6]) / h**4
    c4low = np.array([1, -4, 6, -4, 1]) / h**4
    for i in range(2, n - 2):
        D1[i, i - 2 : i + 3] = c1
        D2[i, i - 2 : i + 3] = c2
        if 3 <= i <= n - 4:
            D4[i, i - 3 : i + 4] = c4
        else:
            D4[i, i - 2 : i + 3] = c4low
    return D1.tocsr(), D2.tocsr(), D4.tocsr()


def _derivative_rows(q: np.ndarray, h: float) -> np.ndarray:
    # fourth-order differences throughout, one-sided near the ends
    n = q.size
    out = np.empty((5, n))
    out[0] = q
    for order in (1, 2, 3, 4):
        out[order] = _fd_derivative(q, h, order)
    return out


def _fd_derivative(q: np.ndarray, h: float, order: int) -> np.ndarray:
    n = q.size
    width = (order + 4) | 1
    half = width // 2
    res = np.empty(n)
    cache: dict = {}
    for i in range(n):
        lo = min(max(i - half, 0), n - width)
        offs = np.arange(lo, lo + width) - i
        key = tuple(offs)
        if key not in cache:
            cache[key] = _fd_weights(offs, order)
        res[i] = cache[key] @ q[lo : lo + width] / h**order
    return res


def _fd_weights(offsets, order: int) -> np.ndarray:
    # Fornberg-style weights by solving the Vandermonde system
    offs = np.asarray(offsets, dtype=float)
    m = offs.size
    V = np.vander(offs, m, increasing=True).T
    rhs = np.zeros(m)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(V, rhs)


def _boundary_values(x: np.ndarray, t1: float) -> np.ndarray:
    return np.array([series_q(v, t1) for v in x])


def _newton(x, q, t1, fixed, tol, maxiter):
    n = x.size
    h = x[1] - x[0]
    D1, D2, D4 = _stencils(n, h)
    free = np.ones(n, dtype=bool)
    free[fixed] = False
    idx = np.flatnonzero(free)

    def res(q):
        q1, q2 = D1 @ q, D2 @ q
        r = D4 @ q - 4 * x + 40 * q**3 - 10 * q1**2 - 20 * q * q2 + 16 * t1 * q
        return r[idx]

    # rounding in D4 @ q alone is about 16 eps max|q| / h^4
    floor = 1e3 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(q)))) / h**4
    trace = []
    r = res(q)
    rn = float(np.max(np.abs(r)))
    trace.append(rn)
    for it in range(1, maxiter + 1):
        q1, q2 = D1 @ q, D2 @ q
        J = (
            D4
            + scipy.sparse.diags(120 * q**2 - 20 * q2 + 16 * t1)
            - scipy.sparse.diags(20 * q1) @ D1
            - scipy.sparse.diags(20 * q) @ D2
        )
        J = J.tocsr()[idx, :][:, idx].tocsc()
        dq = scipy.sparse.linalg.spsolve(J, -r)
        lam = 1.0
        while True:
            trial = q.copy()
            trial[idx] += lam * dq
            tr = res(trial)
            tn = float(np.max(np.abs(tr)))
            if tn <= rn or lam < 1e-3:
                break
            lam *= 0.5
        step = lam * float(np.max(np.abs(dq)))
        if not np.isfinite(tn):
            raise NewtonDivergence("Newton iteration diverged; shrink the initial window", trace)
        if tn > rn:
            # line search failed: fine at the roundoff floor of the D4 stencil, fatal otherwise
            if step < 1e3 * tol and rn < floor:
                return q, it, trace
            raise NewtonDivergence("Newton iteration diverged; shrink the initial window", trace)
        q, r, rn = trial, tr, tn
        trace.append(rn)
        if step < tol:
            return q, it, trace
    raise NewtonDivergence("Newton iteration did not converge; shrink the initial window", trace)


def _points_for(L: float, spacing: float) -> int:
    return int(round(2 * L / spacing)) + 1


def solve_tritronquee(
    L: float = 40.0,
    n: int = 8001,
    t1: float = 0.0,
    start_L: float = 20.0,
    tol: float = 1e-11,
    maxiter: int = 60,
) -> Pi2Profile:
    """Newton solution on [-L, L] with the algebraic expansion imposed at two
    points per end; continuation in L from ``start_L``."""
    if not 20.0 <= L <= 60.0:
        raise ValueError("window half-width L must lie in [20, 60]")
    if n < 2000:
        raise ValueError("need at least 2000 grid points")
    spacing = 2 * L / (n - 1)

    windows = [min(start_L, L)]
    while windows[-1] < L:
        windows.append(min(L, windows[-1] + 10.0))

    q_prev = x_prev = None
    total_it = 0
    for Lw in windows:
        m = _points_for(Lw, spacing)
        x = np.linspace(-Lw, Lw, m)
        if x_prev is None:
            # a smoothed cube root: right behaviour at both ends, regular at 0
            q0 = 10.0 ** (-1.0 / 3.0) * x / (x * x + 1.0) ** (1.0 / 3.0)
        else:
            inside = np.abs(x) <= x_prev[-1]
            q0 = np.interp(x, x_prev, q_prev)
            q0[~inside] = [series_q(v, t1) for v in x[~inside]]
        fixed = np.array([0, 1, m - 2, m - 1])
        q0[fixed] = _boundary_values(x[fixed], t1)
        q, it, trace = _newton(x, q0, t1, fixed, tol, maxiter)
        total_it += it
        q_prev, x_prev = q, x

    x, q = x_prev, q_prev
    h = x[1] - x[0]
    der = _derivative_rows(q, h)
    interp = BPoly.from_derivatives(x, np.column_stack([der[0], der[1], der[2]]))
    prim = interp.antiderivative()
    # normalization: h(L) = h_Asy(L) + (h - h_Asy)(L) from the expansion
    hL = h_asy(1, x[-1], t1) + series_h_minus_hasy(x[-1], t1)
    offset = hL - prim(x[-1])
    hvals = prim(x) + offset
    h_interp = BPoly(prim.c.copy(), prim.x.copy())
    h_interp.c += offset  # Bernstein basis sums to one
    hh = h_interp.antiderivative()
    return Pi2Profile(
        grid=x,
        q=q,
        h=hvals,
        t1=float(t1),
        L=float(x[-1]),
        derivatives=der,
        interpolant=interp,
        h_interpolant=h_interp,
        hh_interpolant=hh,
        iterations=total_it,
    )


# ---------------------------------------------------------------- I_h and friends


def I_h_tail(x: float, t1: float = 0.0, side: str = "right") -> TailEstimate:
    """int_x^inf (h - h_Asy) (side='right') or int_-inf^x (side='left') from the
    term-wise integrated expansion; the last retained term is the error bar."""
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")
    a = series_coefficients(t1)
    if abs(a[7] + 1.0 / 36.0) > 1e-14:
        raise ValueError("expansion carries a 1/x term in h - h_Asy; tail integral diverges")
    sgn = 1.0 if side == "right" else -1.0
    w = math.copysign(abs(x) ** (1.0 / 3.0), x)
    # 1/(36x) - x/(36(x^2+1)) = 1/(36 x (x^2+1)), primitive log(x^2/(x^2+1))/72
    pieces = [-sgn * math.log(x * x / (x * x + 1.0)) / 72.0]
    for m, c in enumerate(a):
        if m <= 7 or c == 0.0:
            continue
        p = 4 - m  # h carries w^p; its primitive w^(p+3) vanishes at infinity
        pieces.append(-sgn * c * 3.0 / p * 3.0 / (p + 3) * w ** (p + 3))
    total = _optimal(pieces)
    return TailEstimate(value=total, error=abs(pieces[-1]) if len(pieces) > 1 else abs(total))


def _check_window(profile: Pi2Profile, x: float, margin: float = 1.0) -> None:
    if not (-profile.L + margin <= x <= profile.L - margin):
        raise ValueError(f"x={x} too close to the window edge (L={profile.L})")


def _interior_integral(profile: Pi2Profile, a: float, b: float) -> float:
    """int_a^b (h - h_Asy) using exact antiderivatives on both parts."""
    hh = profile.hh_interpolant
    A = lambda v: h_asy_antiderivative(1, v, profile.t1)  # noqa: E731
    return float(hh(b) - hh(a)) - (A(b) - A(a))


def I_h(profile: Pi2Profile, x: float, side: str = "right") -> TailEstimate:
    """I_h(x) = int_x^inf (h - h_Asy); side='left' uses -int_-inf^x instead."""
    _check_window(profile, x, margin=0.5)
    L = profile.L
    if side == "right":
        tail = I_h_tail(L, profile.t1, "right")
        val = _interior_integral(profile, x, L) + tail.value
    else:
        tail = I_h_tail(-L, profile.t1, "left")
        val = -(_interior_integral(profile, -L, x) + tail.value)
    err = tail.error + _edge_defect(profile)
    return TailEstimate(value=val, error=err)


def _edge_defect(profile: Pi2Profile) -> float:
    # mismatch of h - h_Asy against its expansion at the left edge, times a unit length
    x = profile.grid[0]
    return abs(float(profile.h[0]) - h_asy(1, x, profile.t1) - series_h_minus_hasy(x, profile.t1))


@dataclass(frozen=True)
class TotalIntegral:
    value: float
    interior: float
    right_tail: float
    left_tail: float
    left_edge_defect: float
    error_budget: float


def total_integral(profile: Pi2Profile) -> TotalIntegral:
    """int_-inf^inf (h - h_Asy) with expansion tails beyond the window."""
    L = profile.L
    interior = _interior_integral(profile, -L, L)
    right = I_h_tail(L, profile.t1, "right")
    left = I_h_tail(-L, profile.t1, "left")
    defect = _edge_defect(profile)
    value = interior + right.value + left.value
    budget = right.error + left.error + defect * 1.0
    return TotalIntegral(value, interior, right.value, left.value, defect, budget)


def constant_Ck(profile: Pi2Profile, x: float, from_left: bool = True) -> float:
    """The C^(1) combination at x (k = 1, t1 = 0).

    int_-inf^x (h - h_Asy) + (9/56) alpha^(-1/3) x^(7/3) + log(x^2+1)/72
    + log(3)/24 - (4/36) log(alpha) + chi0.
    """
    from .specfun import chi0

    k = 1
    al = float(alpha(k))
    if from_left:
        integral = -I_h(profile, x, side="left").value
    else:
        integral = -I_h(profile, x, side="right").value
    return (
        integral
        + h_asy_antiderivative(k, x)
        + math.log(2 * k + 1) / 24.0
        - (1 + 3 * k) / (12.0 * (2 * k + 1)) * math.log(al)
        + chi0()
    )


@dataclass(frozen=True)
class CkScan:
    xs: tuple
    values: tuple
    spread: float
    control_values: tuple
    control_spread: float
    primitive_shifted: tuple
    primitive_shifted_spread: float


def constant_Ck_scan(profile: Pi2Profile, xs=(-5.0, 0.0, 5.0, 10.0)) -> CkScan:
    """Evaluate the C^(1) combination at several x and report its spread.

    Also reports the control (h replaced by h_Asy, i.e. the integral dropped)
    and the combination minus int_0^x h, which removes the x-dependence that
    the identity dC/dx = h forces.
    """
    if profile.t1 != 0.0:
        raise ValueError("the C^(1) combination is defined for t1 = 0")
    vals = tuple(constant_Ck(profile, x) for x in xs)
    ctrl = []
    shifted = []
    for x, v in zip(xs, vals):
        integral = -I_h(profile, x, side="left").value
        ctrl.append(v - integral)
        shifted.append(v - float(profile.h_interpolant.integrate(0.0, x)))
    spread = lambda seq: max(seq) - min(seq)  # noqa: E731
    return CkScan(tuple(xs), vals, spread(vals), tuple(ctrl), spread(ctrl), tuple(shifted), spread(shifted))

"""Hastings-McLeod solution of q'' = x q + 2 q^3 and its Hamiltonian.

The boundary-value problem is discretized on a uniform grid with fourth-order
central differences and solved by damped Newton iteration with a sparse
Jacobian.  Values between grid points come from a quintic Hermite interpolant
built from q, q' and q'' (the last one read off the equation itself).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
import scipy.sparse.linalg
from scipy.interpolate import BPoly

from .specfun import airy_pair

__all__ = [
    "NewtonDivergence",
    "HMProfile",
    "left_boundary_value",
    "solve_hastings_mcleod",
    "hamiltonian_pII",
    "tw_via_integral",
    "tw_via_hamiltonian",
]


class NewtonDivergence(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual norm {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class HMProfile:
    grid: np.ndarray
    q: np.ndarray
    qprime: np.ndarray
    L: float
    iterations: int = 0
    interpolant: BPoly = field(repr=False, default=None)

    def __call__(self, x, nu: int = 0):
        return self.interpolant(x, nu)


def left_boundary_value(x: float) -> float:
    """Two-term expansion sqrt(-x/2) (1 + 1/(8 x^3)) valid as x -> -infinity."""
    return math.sqrt(-x / 2.0) * (1.0 + 1.0 / (8.0 * x**3))


def _d1_matrix(n: int, h: float) -> scipy.sparse.csr_matrix:
    # fourth-order first derivative; one-sided five-point closures at the ends
    D = scipy.sparse.lil_matrix((n, n))
    for i in range(2, n - 2):
        D[i, i - 2 : i + 3] = np.array([1, -8, 0, 8, -1]) / (12 * h)
    fwd0 = np.array([-25, 48, -36, 16, -3]) / (12 * h)
    fwd1 = np.array([-3, -10, 18, -6, 1]) / (12 * h)
    D[0, 0:5] = fwd0
    D[1, 0:5] = fwd1
    D[n - 1, n - 5 :] = -fwd0[::-1]
    D[n - 2, n - 5 :] = -fwd1[::-1]
    return D.tocsr()


def _d2_matrix(n: int, h: float) -> scipy.sparse.csr_matrix:
    # fourth-order second derivative on interior rows 1..n-2
    D = scipy.sparse.lil_matrix((n, n))
    for i in range(2, n - 2):
        D[i, i - 2 : i + 3] = np.array([-1, 16, -30, 16, -1]) / (12 * h * h)
    edge = np.array([10, -15, -4, 14, -6, 1]) / (12 * h * h)
    D[1, 0:6] = edge
    D[n - 2, n - 6 :] = edge[::-1]
    return D.tocsr()


def _initial_guess(x: np.ndarray) -> np.ndarray:
    # smooth interpolation between sqrt(-x/2) and a decaying tail
    return np.sqrt(0.25 * (np.sqrt(x * x + 1.0) - x)) * 0.5 * (1.0 + np.tanh(-x))


def _build_interpolant(x, q, qp):
    qpp = x * q + 2 * q**3
    return BPoly.from_derivatives(x, np.column_stack([q, qp, qpp]))


def solve_hastings_mcleod(L: float = 12.0, n: int = 4000, tol: float = 1e-12, maxiter: int = 60) -> HMProfile:
    """Solve on [-L, L] with q(L) = Ai(L) and the two-term left closure.

    ``n`` is the number of grid points.
    """
    if not 6.0 <= L <= 14.0:
        raise ValueError("window half-width L must lie in [6, 14]")
    if n < 400:
        raise ValueError("need at least 400 grid points")
    x = np.linspace(-L, L, n)
    h = x[1] - x[0]
    D2 = _d2_matrix(n, h)
    qL = left_boundary_value(-L)
    qR = airy_pair(L)[0]

    q = _initial_guess(x)
    q[0], q[-1] = qL, qR
    interior = slice(1, n - 1)

    def residual(q):
        r = D2 @ q - x * q - 2 * q**3
        return r[interior]

    res = residual(q)
    rnorm = float(np.max(np.abs(res)))
    for it in range(1, maxiter + 1):
        J = D2 - scipy.sparse.diags(x + 6 * q**2)
        J = J.tocsr()[interior, :][:, interior]
        dq = scipy.sparse.linalg.spsolve(J.tocsc(), -res)
        lam = 1.0
        while True:
            trial = q.copy()
            trial[interior] += lam * dq
            tres = residual(trial)
            tnorm = float(np.max(np.abs(tres)))
            if tnorm <= rnorm or lam < 1e-4:
                break
            lam *= 0.5
        if lam < 1e-4 and tnorm > rnorm:
            raise NewtonDivergence(
                "Newton iteration stalled; restart with a smaller window and continue in L", rnorm
            )
        q, res, rnorm = trial, tres, tnorm
        if lam * float(np.max(np.abs(dq))) < tol:
            break
    else:
        raise NewtonDivergence(
            "Newton iteration did not converge; restart with a smaller window and continue in L", rnorm
        )

    qp = _d1_matrix(n, h) @ q
    return HMProfile(grid=x, q=q, qprime=qp, L=float(L), iterations=it, interpolant=_build_interpolant(x, q, qp))


def _check_inside(profile: HMProfile, x: float) -> None:
    if not -profile.L <= x <= profile.L:
        raise ValueError(f"x={x} outside the profile window [-{profile.L}, {profile.L}]")


def hamiltonian_pII(profile: HMProfile, x):
    """H(x) = q'(x)^2 - x q(x)^2 - q(x)^4; satisfies H' = -q^2 and H(+inf) = 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < -profile.L) or np.any(xa > profile.L):
        raise ValueError("x outside the profile window")
    q = profile(xa)
    qp = profile(xa, 1)
    H = qp**2 - xa * q**2 - q**4
    return float(H) if np.ndim(H) == 0 else H


def _panel_quadrature(f, a: float, b: float, panels: int, order: int = 10) -> float:
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    pts = 0.5 * (hi - lo) * t[None, :] + 0.5 * (hi + lo)
    return float(np.sum(0.5 * (hi - lo) * w[None, :] * f(pts)))


def _airy_tail(L: float, s: float) -> float:
    # int_L^inf (x - s) Ai(x)^2 dx, with Ai^2 standing in for q^2 beyond the window
    a, ap = airy_pair(L)
    i0 = ap * ap - L * a * a
    i1 = (L * ap * ap - L * L * a * a - a * ap) / 3.0
    return i1 - s * i0


def tw_via_integral(profile: HMProfile, s: float) -> float:
    """log F_TW(s) = -int_s^inf (x - s) q(x)^2 dx."""
    if s < -profile.L or s > profile.L - 4.0:
        raise ValueError("s must lie in the window with at least 4 units of right margin")
    panels = max(8, int(math.ceil((profile.L - s) / (profile.grid[1] - profile.grid[0]) / 4)))
    body = _panel_quadrature(lambda t: (t - s) * profile(t) ** 2, s, profile.L, panels)
    return -(body + _airy_tail(profile.L, s))


def tw_via_hamiltonian(profile: HMProfile, s: float) -> float:
    """log F_TW(s) = -int_s^inf H(x) dx."""
    if s < -profile.L or s > profile.L - 4.0:
        raise ValueError("s must lie in the window with at least 4 units of right margin")
    panels = max(8, int(math.ceil((profile.L - s) / (profile.grid[1] - profile.grid[0]) / 4)))
    body = _panel_quadrature(lambda t: hamiltonian_pII(profile, t), s, profile.L, panels)
    # beyond L: H(x) = int_x^inf q^2 ~ int_x^inf Ai^2, so int_L^inf H = int_L^inf (x - L) Ai^2
    return -(body + _airy_tail(profile.L, profile.L))

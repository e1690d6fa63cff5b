"""Nystrom discretization of det(I - K) for the Airy kernel on (s, infinity)."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .specfun import airy_pair

__all__ = [
    "OperatorNormError",
    "KernelDiscretization",
    "DEFAULT_NODES",
    "truncation",
    "airy_kernel",
    "discretize",
    "log_det",
    "dlog_det_ds",
    "tail_trace_bound",
]

DEFAULT_NODES = 120
DIAGONAL_GAP = 1e-4


class OperatorNormError(ArithmeticError):
    """det(I - M) <= 0: the discretized operator reached norm 1."""


@dataclass(frozen=True)
class KernelDiscretization:
    s: float
    truncation: float
    nodes: np.ndarray
    weights: np.ndarray
    matrix: np.ndarray


def truncation(s: float) -> float:
    return max(s, 0.0) + 14.0


def tail_trace_bound(T: float) -> float:
    """Trace of the discarded part, int_T^inf K(x,x) dx, in closed form."""
    a, ap = airy_pair(T)
    # antiderivative of Ai'^2 - x Ai^2 is (2/3) x Ai'^2 - (2/3) x^2 Ai^2 + (1/3) Ai Ai'
    return (2.0 / 3.0) * T * T * a * a - (2.0 / 3.0) * T * ap * ap - a * ap / 3.0


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("EDGEWAVE_THREADS", "1")))
    except ValueError:
        return 1


def _airy_table(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = _workers()
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as ex:
            pairs = list(ex.map(airy_pair, x.tolist()))
    else:
        pairs = [airy_pair(v) for v in x.tolist()]
    arr = np.array(pairs, dtype=float)
    return arr[:, 0], arr[:, 1]


def _kernel_from_values(x, a, ap, y, b, bp):
    x = np.asarray(x, dtype=float)[:, None]
    y = np.asarray(y, dtype=float)[None, :]
    a, ap = np.asarray(a)[:, None], np.asarray(ap)[:, None]
    b, bp = np.asarray(b)[None, :], np.asarray(bp)[None, :]
    d = x - y
    near = np.abs(d) < DIAGONAL_GAP
    with np.errstate(divide="ignore", invalid="ignore"):
        off = (a * bp - ap * b) / d
    # K(x, x+h) = Ai'(x)^2 - x Ai(x)^2 - h Ai(x)^2 / 2 + O(h^2)
    diag = ap**2 - x * a**2 + 0.5 * d * a**2
    return np.where(near, diag, off)


def airy_kernel(x: float, y: float) -> float:
    """Airy kernel (Ai(x)Ai'(y) - Ai'(x)Ai(y))/(x - y) with its diagonal limit."""
    a, ap = airy_pair(x)
    b, bp = airy_pair(y)
    return float(_kernel_from_values([x], [a], [ap], [y], [b], [bp])[0, 0])


def discretize(s: float, nodes: int = DEFAULT_NODES, T: float | None = None) -> KernelDiscretization:
    if nodes < 8:
        raise ValueError("at least 8 quadrature nodes are required")
    if T is None:
        T = truncation(s)
    t, w = np.polynomial.legendre.leggauss(nodes)
    x = 0.5 * (T - s) * t + 0.5 * (T + s)
    w = 0.5 * (T - s) * w
    a, ap = _airy_table(x)
    K = _kernel_from_values(x, a, ap, x, a, ap)
    K = 0.5 * (K + K.T)
    sw = np.sqrt(w)
    M = sw[:, None] * K * sw[None, :]
    return KernelDiscretization(s=float(s), truncation=float(T), nodes=x, weights=w, matrix=M)


def log_det(s: float, nodes: int = DEFAULT_NODES) -> float:
    """log det(I - K_Ai) on (s, infinity); this is log F_TW(s)."""
    disc = discretize(s, nodes)
    A = np.eye(nodes) - disc.matrix
    lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    diag = np.diag(lu)
    swaps = int(np.sum(piv != np.arange(nodes)))
    sign = (-1) ** swaps * int(np.prod(np.sign(diag)))
    if sign <= 0 or np.any(diag == 0):
        raise OperatorNormError(
            f"operator norm reached 1 at s={s}: det(I - M) <= 0; increase nodes or the truncation"
        )
    return float(np.sum(np.log(np.abs(diag))))


def dlog_det_ds(s: float, nodes: int = DEFAULT_NODES, step: float = 1e-3) -> float:
    """d/ds log det(I - K_Ai): central differences with one Richardson step."""
    def central(h):
        return (log_det(s + h, nodes) - log_det(s - h, nodes)) / (2 * h)

    d1 = central(step)
    d2 = central(step / 2)
    return (4 * d2 - d1) / 3

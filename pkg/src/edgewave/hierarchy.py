"""Exact differential polynomials in q and the Lenard-Magri recursion.

A monomial is a sorted tuple of derivative orders: ``(0, 0, 2)`` is q^2 q_xx and
the empty tuple is the constant 1.  Coefficients are ``fractions.Fraction``.

The operators L_j are generated by

    d/dx L_{j+1} = (1/4 D^3 - 2 q D - q_x) L_j,    L_0 = -4 q,    L_j(0) = 0,

and the even members of the Painleve I hierarchy read

    x + L_{2k}(q) + sum_{j=1}^{2k-1} t_j L_{j-1}(q) = 0.

Note on the k = 1 member: the recursion gives q_xxxx = 4x - 40q^3 + 10q_x^2
+ 20 q q_xx.  A q q_x term in place of q q_xx would break the scaling weight.
"""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "NotExactDerivative",
    "DifferentialPolynomial",
    "HierarchyEquation",
    "Q",
    "apply_lenard_operator",
    "integrate_in_x",
    "lenard_L",
    "hierarchy_equation",
    "residual",
]

Monomial = tuple


class NotExactDerivative(ValueError):
    def __init__(self, remainder: "DifferentialPolynomial"):
        super().__init__(f"not an exact derivative; irreducible remainder: {remainder}")
        self.remainder = remainder


def _canon(m) -> Monomial:
    return tuple(sorted(m))


@dataclass(frozen=True)
class DifferentialPolynomial:
    terms: Mapping[Monomial, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for m, c in self.terms.items():
            c = Fraction(c)
            if c != 0:
                key = _canon(m)
                clean[key] = clean.get(key, Fraction(0)) + c
        clean = {m: c for m, c in clean.items() if c != 0}
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def constant(cls, c) -> "DifferentialPolynomial":
        return cls({(): Fraction(c)})

    @classmethod
    def derivative_of_q(cls, order: int, coeff=1) -> "DifferentialPolynomial":
        return cls({(order,): Fraction(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "DifferentialPolynomial") -> "DifferentialPolynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return DifferentialPolynomial(out)

    def __neg__(self) -> "DifferentialPolynomial":
        return DifferentialPolynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "DifferentialPolynomial") -> "DifferentialPolynomial":
        return self + (-other)

    def scale(self, c) -> "DifferentialPolynomial":
        c = Fraction(c)
        return DifferentialPolynomial({m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, DifferentialPolynomial):
            return self.scale(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                key = _canon(m1 + m2)
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return DifferentialPolynomial(out)

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        return isinstance(other, DifferentialPolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def diff(self, times: int = 1) -> "DifferentialPolynomial":
        p = self
        for _ in range(times):
            out: dict = {}
            for m, c in p.terms.items():
                for i in range(len(m)):
                    bumped = _canon(m[:i] + (m[i] + 1,) + m[i + 1 :])
                    out[bumped] = out.get(bumped, Fraction(0)) + c
            p = DifferentialPolynomial(out)
        return p

    def weight(self, m: Monomial) -> int:
        # q carries weight 2, each x-derivative weight 1
        return sum(2 + a for a in m)

    def weights(self) -> set:
        return {self.weight(m) for m in self.terms}

    def max_order(self) -> int:
        return max((max(m) for m in self.terms if m), default=-1)

    def evaluate(self, derivs: Sequence):
        """Evaluate with derivs[i] standing for the i-th derivative of q.

        Entries may be floats or numpy arrays (broadcast together).
        """
        total = 0.0
        for m, c in self.terms.items():
            term = float(c)
            for a in m:
                term = term * derivs[a]
            total = total + term
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda kv: (-max(kv[0], default=-1), kv[0])):
            coeff = f"{c.numerator}" if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
            factors = []
            for order, mult in sorted(Counter(m).items()):
                name = "q" if order == 0 else "q_" + "x" * order
                factors.append(name if mult == 1 else f"{name}^{mult}")
            body = "*".join(factors)
            if not body:
                parts.append(coeff)
            elif coeff == "1":
                parts.append(body)
            elif coeff == "-1":
                parts.append("-" + body)
            else:
                parts.append(f"{coeff}*{body}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")


Q = DifferentialPolynomial.derivative_of_q(0)
QX = DifferentialPolynomial.derivative_of_q(1)


def apply_lenard_operator(p: DifferentialPolynomial) -> DifferentialPolynomial:
    """(1/4 D^3 - 2 q D - q_x) p."""
    return p.diff(3).scale(Fraction(1, 4)) - (Q * p.diff()).scale(2) - QX * p


def integrate_in_x(p: DifferentialPolynomial) -> DifferentialPolynomial:
    """Antiderivative with zero constant term, or NotExactDerivative.

    Repeatedly take the lexicographically leading monomial (orders sorted
    descending).  An exact derivative has a leading monomial whose top order is
    at least 1 and occurs once; its generator is that monomial with the top order
    lowered by one.
    """
    remaining = p
    result = DifferentialPolynomial()
    while not remaining.is_zero():
        lead = max(remaining.terms, key=lambda m: tuple(sorted(m, reverse=True)))
        c = remaining.terms[lead]
        top = max(lead) if lead else -1
        if top < 1 or lead.count(top) != 1:
            raise NotExactDerivative(remaining)
        gen = list(lead)
        gen.remove(top)
        gen.append(top - 1)
        gen = _canon(gen)
        mult = gen.count(top - 1)
        g = DifferentialPolynomial({gen: c / mult})
        result = result + g
        remaining = remaining - g.diff()
    return result


_memo: dict = {0: DifferentialPolynomial({(0,): Fraction(-4)})}
_memo_lock = threading.Lock()


def lenard_L(j: int) -> DifferentialPolynomial:
    """L_j(q) with exact rational coefficients (memoized)."""
    if j < 0:
        raise ValueError("j must be non-negative")
    if j > 8:
        raise ValueError("j > 8 is beyond the supported symbolic range")
    cached = _memo.get(j)
    if cached is not None:
        return cached
    with _memo_lock:
        for i in range(1, j + 1):
            if i in _memo:
                continue
            prev = _memo[i - 1]
            nxt = integrate_in_x(apply_lenard_operator(prev))
            if nxt.weights() != {2 * i + 2} or nxt.max_order() != 2 * i:
                raise AssertionError(f"L_{i} violates weight homogeneity")
            _memo[i] = nxt
    return _memo[j]


@dataclass(frozen=True)
class HierarchyEquation:
    """x + L_{2k}(q) + sum_j t_j L_{j-1}(q) = 0, stored as x + lhs."""

    k: int
    t: tuple
    lhs: DifferentialPolynomial
    lhs_by_t: tuple = ()

    @property
    def order(self) -> int:
        return 4 * self.k

    def evaluate(self, x, derivs: Sequence):
        val = x + self.lhs.evaluate(derivs)
        for tj, Lj in zip(self.t, self.lhs_by_t):
            val = val + tj * Lj.evaluate(derivs)
        return val


def hierarchy_equation(k: int, t: Sequence = ()) -> HierarchyEquation:
    if k < 1:
        raise ValueError("k must be positive")
    t = tuple(float(v) for v in t) + (0.0,) * (2 * k - 1 - len(t))
    if len(t) != 2 * k - 1:
        raise ValueError(f"expected {2 * k - 1} parameters t_j")
    return HierarchyEquation(
        k=k, t=t, lhs=lenard_L(2 * k), lhs_by_t=tuple(lenard_L(j - 1) for j in range(1, 2 * k))
    )


def residual(k: int, t: Sequence, x, q_values: Sequence):
    """Value of x + L_{2k} + sum t_j L_{j-1} at a point.

    ``q_values`` holds q, q', ..., q^(4k); entries may be numpy arrays.
    """
    if len(q_values) != 4 * k + 1:
        raise ValueError(f"expected {4 * k + 1} derivative values, got {len(q_values)}")
    eq = hierarchy_equation(k, t)
    out = eq.evaluate(x, q_values)
    return float(out) if np.ndim(out) == 0 else out

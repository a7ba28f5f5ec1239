"""Bernoulli polynomials, periodic Bernoulli functions, and the
sign-corrected Bernoulli products that evaluate Dedekind sums.

The sign correction takes only the sign data of the tuple of linear forms,
not the forms themselves; extracting exact signs is the caller's job.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import comb, floor
from typing import Sequence

from .exact import MultiPoly

_BERN_COEFFS: list[list[Fraction]] = [[Fraction(1)]]  # b_0 = 1
_BERN_LOCK = threading.Lock()


def _bern_coeffs(k: int) -> list[Fraction]:
    """Ascending coefficients of b_k, from the generating-function
    recurrence sum_{j<=k} C(k+1, j) b_j(x) = (k+1) x^k."""
    if len(_BERN_COEFFS) > k:
        return _BERN_COEFFS[k]
    with _BERN_LOCK:
        while len(_BERN_COEFFS) <= k:
            d = len(_BERN_COEFFS)
            coeffs = [Fraction(0)] * (d + 1)
            coeffs[d] = Fraction(1)
            for j in range(d):
                cj = Fraction(comb(d + 1, j), d + 1)
                for i, a in enumerate(_BERN_COEFFS[j]):
                    coeffs[i] -= cj * a
            _BERN_COEFFS.append(coeffs)
    return _BERN_COEFFS[k]


def bernoulli_poly(k: int) -> MultiPoly:
    """The Bernoulli polynomial b_k as a univariate polynomial."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return MultiPoly(1, {(i,): c for i, c in enumerate(_bern_coeffs(k))})


def _bern_eval(k: int, x: Fraction) -> Fraction:
    total = Fraction(0)
    for c in reversed(_bern_coeffs(k)):
        total = total * x + c
    return total


def periodic_B(k: int, x) -> Fraction:
    """B_k(x) = b_k({x}) for k != 1; B_1 vanishes on the integers."""
    x = Fraction(x)
    frac = x - floor(x)
    if k == 1:
        return Fraction(0) if frac == 0 else frac - Fraction(1, 2)
    return _bern_eval(k, frac)


def B_e(e: Sequence[int], x: Sequence) -> Fraction:
    if len(e) != len(x):
        raise ValueError("length mismatch")
    total = Fraction(1)
    for ej, xj in zip(e, x):
        total *= periodic_B(ej, xj)
        if total == 0:
            return total
    return total


def _validate_signs(s: Sequence[Sequence[int]], n: int) -> None:
    for row in s:
        if len(row) != n or any(v not in (1, -1) for v in row):
            raise ValueError("sign matrix must be +-1 with n columns")


def defect_set(e: Sequence[int], v: Sequence) -> tuple[int, ...]:
    """J = indices j with e_j = 1 and v_j integral."""
    return tuple(j for j, (ej, vj) in enumerate(zip(e, v))
                 if ej == 1 and Fraction(vj).denominator == 1)


def B_e_Q(e: Sequence[int], v: Sequence, s: Sequence[Sequence[int]]) -> Fraction:
    """Bernoulli product corrected at integral coordinates by half the
    signs of the linear forms, averaged over the m forms."""
    n = len(e)
    if any(ej < 1 for ej in e):
        raise ValueError("exponents must be positive")
    _validate_signs(s, n)
    J = defect_set(e, v)
    rest = Fraction(1)
    for j in range(n):
        if j not in J:
            rest *= periodic_B(e[j], v[j])
    if not J:
        return rest
    if rest == 0:
        return rest
    m = len(s)
    total = Fraction(0)
    for row in s:
        prod = Fraction(1)
        for j in J:
            prod *= Fraction(row[j], 2)
        total += prod
    return total * rest / m


def B_e_Q_plus(e: Sequence[int], v: Sequence, s: Sequence[Sequence[int]]) -> Fraction:
    """Projection onto the even part in the signs: equals B_e_Q when the
    defect set has even size and 0 otherwise."""
    J = defect_set(e, v)
    if len(J) % 2:
        _validate_signs(s, len(e))
        return Fraction(0)
    return B_e_Q(e, v, s)

"""Totally real number fields with exact arithmetic.

A field is Q[t]/(f) for a monic irreducible integer polynomial f with all
roots real.  Real embeddings are ordered by ascending root and carried as
isolating rational intervals, refined on demand; every sign decision is
certified, never floated.  Ideals are O-module lattices given by rational
column bases in Hermite normal form, where O is the maximal order for
quadratic fields and Z[theta] (or a user-supplied integral basis) above.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import gcd, isqrt
from typing import Sequence

from .exact import (Matrix, SingularMatrix, hnf, identity, lattice_hnf,
                    mat_det, mat_inv, mat_mul, mat_vec, snf)


class NotMonic(ValueError):
    pass


class NotIrreducible(ValueError):
    pass


class NotTotallyReal(ValueError):
    pass


class SingularGram(ValueError):
    pass


class NoDegreeOnePrime(ValueError):
    pass


class IndexDivisor(ValueError):
    pass


class IndexNotPrime(ValueError):
    pass


class UnitsRequired(ValueError):
    pass


class NotTotallyPositive(ValueError):
    pass


class NotCongruentOne(ValueError):
    pass


class DependentUnits(ValueError):
    pass


class NotFoundWithinBound(ValueError):
    pass


class ZeroIdeal(ValueError):
    pass


class RefinementBudgetExceeded(RuntimeError):
    pass


# --- dense univariate helpers (ascending coefficient lists) ------------------

def poly_eval(coeffs: Sequence, x) -> Fraction:
    total = Fraction(0)
    for c in reversed(coeffs):
        total = total * x + c
    return total


def poly_deriv(coeffs: Sequence) -> list[Fraction]:
    return [Fraction(i * c) for i, c in enumerate(coeffs)][1:]


def _poly_rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while len(a) >= len(b) and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) < len(b):
            break
        q = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] -= q * c
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def sturm_sequence(coeffs: Sequence) -> list[list[Fraction]]:
    seq = [[Fraction(c) for c in coeffs]]
    d = poly_deriv(seq[0])
    if d:
        seq.append(d)
    while len(seq[-1]) > 1:
        r = _poly_rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return seq


def _sign_changes(values: Sequence[Fraction]) -> int:
    signs = [1 if v > 0 else -1 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_count(seq, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in (lo, hi]."""
    return (_sign_changes([poly_eval(p, lo) for p in seq])
            - _sign_changes([poly_eval(p, hi) for p in seq]))


def real_root_count(coeffs: Sequence) -> int:
    seq = sturm_sequence(coeffs)
    lead = [p[-1] for p in seq]
    at_inf = _sign_changes(lead)
    at_minf = _sign_changes([c if (len(p) - 1) % 2 == 0 else -c
                             for p, c in zip(seq, lead)])
    return at_minf - at_inf


# --- mod-p polynomial helpers for the irreducibility certificate --------------

def _pmod_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod_rem(a: list[int], b: list[int], p: int) -> list[int]:
    a = [x % p for x in a]
    binv = pow(b[-1], -1, p)
    while len(a) >= len(b):
        q = a[-1] * binv % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - q * c) % p
        a.pop()
        _pmod_trim(a)
        if not a:
            break
    return a


def _pmod_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _pmod_trim([x % p for x in a]), _pmod_trim([x % p for x in b])
    while b:
        a, b = b, _pmod_rem(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def _pmod_mulmod(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pmod_rem(out, f, p) or [0]


def _pmod_xpow(e: int, f: list[int], p: int) -> list[int]:
    """x^e mod (f, p) by square and multiply."""
    result = [1]
    base = _pmod_rem([0, 1], f, p) or [0]
    while e:
        if e & 1:
            result = _pmod_mulmod(result, base, f, p)
        base = _pmod_mulmod(base, base, f, p)
        e >>= 1
    return result


def factor_degree_pattern(f: Sequence[int], p: int) -> list[int] | None:
    """Degrees (with multiplicity... none allowed) of the irreducible
    factors of f mod p, or None if f mod p is not squarefree."""
    fp = _pmod_trim([c % p for c in f])
    if len(fp) != len(f):
        return None  # leading coefficient vanished; skip this p
    if len(_pmod_gcd(fp, _pmod_trim([i * c % p for i, c in enumerate(fp)][1:]
                                    or [0]), p)) > 1:
        return None
    degrees: list[int] = []
    g = fp
    d = 0
    while len(g) > 1:
        d += 1
        if 2 * d > len(g) - 1:
            degrees.append(len(g) - 1)
            break
        xp = _pmod_xpow(p ** d, g, p)
        xp = list(xp)
        if len(xp) < 2:
            xp += [0] * (2 - len(xp))
        xp[1] = (xp[1] - 1) % p
        h = _pmod_gcd(g, _pmod_trim(xp) or [0], p)
        if len(h) > 1:
            degrees.extend([d] * ((len(h) - 1) // d))
            g = _pmod_quot(g, h, p)
    return degrees


def _pmod_quot(a: list[int], b: list[int], p: int) -> list[int]:
    a = [x % p for x in a]
    out = [0] * (len(a) - len(b) + 1)
    binv = pow(b[-1], -1, p)
    while len(a) >= len(b) and any(a):
        q = a[-1] * binv % p
        out[len(a) - len(b)] = q
        for i, c in enumerate(b):
            a[len(a) - len(b) + i] = (a[len(a) - len(b) + i] - q * c) % p
        _pmod_trim(a)
        if not a:
            break
    return _pmod_trim(out) or [1]


_CERT_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def certify_irreducible(f: Sequence[int]) -> bool:
    """Degree-pattern sieve over a fixed prime list: the subset sums of the
    factor degrees mod p bound the degrees of rational factors."""
    n = len(f) - 1
    possible = set(range(1, n))
    for p in _CERT_PRIMES:
        pattern = factor_degree_pattern(f, p)
        if pattern is None:
            continue
        sums = {0}
        for d in pattern:
            sums |= {s + d for s in sums}
        possible &= sums
        if not possible:
            return True
    return False


# --- interval arithmetic ------------------------------------------------------

Interval = tuple[Fraction, Fraction]


def _iv_add(a: Interval, b: Interval) -> Interval:
    return (a[0] + b[0], a[1] + b[1])


def _iv_mul(a: Interval, b: Interval) -> Interval:
    prods = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(prods), max(prods))


def poly_eval_interval(coeffs: Sequence[Fraction], x: Interval) -> Interval:
    total: Interval = (Fraction(0), Fraction(0))
    for c in reversed(coeffs):
        total = _iv_add(_iv_mul(total, x), (Fraction(c), Fraction(c)))
    return total


def ln_interval(x: Fraction, terms: int = 24) -> Interval:
    """Rational lower/upper bounds for ln(x), x > 0, via the atanh series."""
    if x <= 0:
        raise ValueError("ln of nonpositive value")
    if x == 1:
        return (Fraction(0), Fraction(0))
    if x < 1:
        lo, hi = ln_interval(1 / x, terms)
        return (-hi, -lo)
    # scale into [1, 2) by halving; ln 2 bounds folded in afterwards
    k = 0
    while x >= 2:
        x /= 2
        k += 1
    y = (x - 1) / (x + 1)
    s = Fraction(0)
    ypow = y
    y2 = y * y
    for i in range(terms):
        s += ypow / (2 * i + 1)
        ypow *= y2
    rem = 2 * ypow / ((2 * terms + 1) * (1 - y2))
    lo, hi = 2 * s, 2 * s + rem
    if k:
        l2lo, l2hi = _LN2
        lo, hi = lo + k * l2lo, hi + k * l2hi
    return (lo, hi)


def _ln2_bounds() -> Interval:
    y = Fraction(1, 3)  # ln 2 = 2 atanh(1/3)
    s = Fraction(0)
    ypow = y
    y2 = y * y
    for i in range(40):
        s += ypow / (2 * i + 1)
        ypow *= y2
    rem = 2 * ypow / (81 * (1 - y2))
    return (2 * s, 2 * s + rem)


_LN2 = _ln2_bounds()


# --- the field ----------------------------------------------------------------

class NumberField:
    """Totally real field presented by a monic irreducible integer
    polynomial, with isolated ordered real roots."""

    def __init__(self, f: Sequence[int], *, trusted: bool = False,
                 integral_basis: Sequence[Sequence] | None = None):
        f = [int(c) for c in f]
        if len(f) < 3:
            raise ValueError("degree must be >= 2")
        if f[-1] != 1:
            raise NotMonic("defining polynomial must be monic")
        n = len(f) - 1
        if not trusted and not certify_irreducible(f):
            raise NotIrreducible(
                "could not certify irreducibility mod the fixed prime list; "
                "pass trusted=True if the polynomial is known irreducible")
        if real_root_count(f) != n:
            raise NotTotallyReal("polynomial does not have n real roots")
        self.f = tuple(f)
        self.n = n
        self._sturm = sturm_sequence(f)
        self._roots = self._isolate_roots()
        self._lock = threading.Lock()
        # reduction table: theta^(n+k) in the power basis, k = 0..n-2
        red = []
        cur = [Fraction(-c) for c in f[:-1]]
        red.append(tuple(cur))
        for _ in range(n - 2):
            cur = [Fraction(0)] + cur
            top = cur.pop()
            cur = [c + top * r for c, r in zip(cur, red[0])]
            red.append(tuple(cur))
        self._reduction = red
        if integral_basis is not None:
            ob = tuple(tuple(Fraction(x) for x in col) for col in integral_basis)
            self.order_basis = lattice_hnf(ob)
        elif n == 2:
            self.order_basis = self._quadratic_maximal_order()
        else:
            self.order_basis = identity(n)
        self.order_index = Fraction(1) / abs(Fraction(mat_det(self.order_basis)))
        if self.order_index.denominator != 1:
            raise ValueError("integral basis must contain Z[theta]")
        self.order_index = int(self.order_index)

    def _quadratic_maximal_order(self) -> Matrix:
        b, c = self.f[1], self.f[0]
        disc = b * b - 4 * c
        s, d0 = 1, disc
        k = 2
        while k * k <= abs(d0):
            while d0 % (k * k) == 0:
                d0 //= k * k
                s *= k
            k += 1
        if d0 % 4 != 1:
            d0, s = 4 * d0, s // 2
        # omega = (s*d0 + b + 2*theta) / (2s) spans the maximal order with 1
        omega = (Fraction(s * d0 + b, 2 * s), Fraction(2, 2 * s))
        return lattice_hnf([(Fraction(1), Fraction(0)), omega])

    def _isolate_roots(self) -> list[Interval]:
        bound = Fraction(1) + max(abs(Fraction(c)) for c in self.f[:-1])
        stack = [(-bound, bound, real_root_count(self.f))]
        found: list[Interval] = []
        while stack:
            lo, hi, cnt = stack.pop()
            if cnt == 0:
                continue
            if cnt == 1:
                found.append((lo, hi))
                continue
            mid = (lo + hi) / 2
            while poly_eval(self.f, mid) == 0:  # cannot happen, f irreducible
                mid = (lo + mid) / 2
            left = sturm_count(self._sturm, lo, mid)
            stack.append((lo, mid, left))
            stack.append((mid, hi, cnt - left))
        found.sort()
        return found

    def refine_root(self, i: int) -> Interval:
        """Halve the i-th isolating interval (thread-safe)."""
        with self._lock:
            lo, hi = self._roots[i]
            mid = (lo + hi) / 2
            flo = poly_eval(self.f, lo)
            fmid = poly_eval(self.f, mid)
            if flo == 0 or fmid == 0:  # endpoints are never roots for deg >= 2
                raise RuntimeError("rational root encountered")
            if (flo > 0) != (fmid > 0):
                self._roots[i] = (lo, mid)
            else:
                self._roots[i] = (mid, hi)
            return self._roots[i]

    def root_interval(self, i: int) -> Interval:
        with self._lock:
            return self._roots[i]

    # -- elements --------------------------------------------------------------

    def element(self, coords: Sequence) -> "FieldElement":
        return FieldElement(self, coords)

    def zero(self) -> "FieldElement":
        return FieldElement(self, (0,) * self.n)

    def one(self) -> "FieldElement":
        return FieldElement(self, (1,) + (0,) * (self.n - 1))

    def theta(self) -> "FieldElement":
        return FieldElement(self, (0, 1) + (0,) * (self.n - 2))

    def from_rational(self, c) -> "FieldElement":
        return FieldElement(self, (Fraction(c),) + (0,) * (self.n - 1))

    def embed_interval(self, x: "FieldElement", i: int) -> Interval:
        return poly_eval_interval(x.coords, self.root_interval(i))

    def sign_at(self, x: "FieldElement", i: int, *, budget: int = 400) -> int:
        """Exact sign of the i-th real embedding of x."""
        if x.is_zero():
            return 0
        for _ in range(budget):
            lo, hi = self.embed_interval(x, i)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            self.refine_root(i)
        raise RefinementBudgetExceeded("sign refinement did not separate from 0")

    def log_embed_interval(self, x: "FieldElement", i: int, *,
                           width: Fraction = Fraction(1, 10 ** 8),
                           budget: int = 400) -> Interval:
        """Certified rational bounds on log tau_i(x) for totally positive x."""
        if self.sign_at(x, i) <= 0:
            raise ValueError("log of a nonpositive embedding")
        for _ in range(budget):
            lo, hi = self.embed_interval(x, i)
            if lo > 0:
                llo = ln_interval(lo)[0]
                lhi = ln_interval(hi)[1]
                if lhi - llo < width:
                    return (llo, lhi)
            self.refine_root(i)
        raise RefinementBudgetExceeded("log interval did not reach target width")

    def interval_det_sign(self, entries: Sequence[Sequence[Interval]], *,
                          refine) -> int:
        """Sign of a determinant of interval entries, refining until the
        determinant interval excludes zero."""
        for _ in range(60):
            det = _interval_det(entries)
            if det[0] > 0:
                return 1
            if det[1] < 0:
                return -1
            entries = refine()
        raise RefinementBudgetExceeded("determinant sign undecided")


def embedding_matrix_det_sign(field: NumberField,
                              elements: Sequence["FieldElement"]) -> int:
    """Sign of det(tau_i(x_j)) for the full square matrix of embeddings,
    certified by root-interval refinement."""
    n = field.n
    for _ in range(200):
        entries = [[field.embed_interval(elements[j], i) for j in range(n)]
                   for i in range(n)]
        det = _interval_det(entries)
        if det[0] > 0:
            return 1
        if det[1] < 0:
            return -1
        for i in range(n):
            field.refine_root(i)
    raise RefinementBudgetExceeded("embedding determinant sign undecided")


def _interval_det(entries: Sequence[Sequence[Interval]]) -> Interval:
    m = len(entries)
    if m == 1:
        return entries[0][0]
    total: Interval = (Fraction(0), Fraction(0))
    for j in range(m):
        minor = [[entries[i][k] for k in range(m) if k != j] for i in range(1, m)]
        term = _iv_mul(entries[0][j], _interval_det(minor))
        if j % 2:
            term = (-term[1], -term[0])
        total = _iv_add(total, term)
    return total


class FieldElement:
    """Element in the power basis 1, theta, ..., theta^(n-1)."""

    __slots__ = ("field", "coords")

    def __init__(self, field: NumberField, coords: Sequence):
        if len(coords) != field.n:
            raise ValueError("coordinate length mismatch")
        self.field = field
        self.coords = tuple(Fraction(c) for c in coords)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __eq__(self, other) -> bool:
        return (isinstance(other, FieldElement) and self.field is other.field
                and self.coords == other.coords)

    def __hash__(self):
        return hash((id(self.field), self.coords))

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.field, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.field, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field, [-a for a in self.coords])

    def __mul__(self, other) -> "FieldElement":
        if not isinstance(other, FieldElement):
            c = Fraction(other)
            return FieldElement(self.field, [a * c for a in self.coords])
        n = self.field.n
        raw = [Fraction(0)] * (2 * n - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        raw[i + j] += a * b
        out = raw[:n]
        for k in range(n - 1):
            c = raw[n + k]
            if c:
                red = self.field._reduction[k]
                out = [o + c * r for o, r in zip(out, red)]
        return FieldElement(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "FieldElement":
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mult_matrix(self) -> Matrix:
        """Matrix of multiplication by self on the power basis (columns are
        images of basis vectors)."""
        n = self.field.n
        cols = []
        cur = self
        theta = self.field.theta()
        for _ in range(n):
            cols.append(cur.coords)
            cur = cur * theta
        return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))

    def trace(self) -> Fraction:
        m = self.mult_matrix()
        return sum(m[i][i] for i in range(self.field.n))

    def norm(self) -> Fraction:
        return mat_det(self.mult_matrix())

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        inv = mat_inv(self.mult_matrix())
        e0 = (Fraction(1),) + (Fraction(0),) * (self.field.n - 1)
        return FieldElement(self.field, mat_vec(inv, e0))

    def is_totally_positive(self) -> bool:
        return all(self.field.sign_at(self, i) > 0 for i in range(self.field.n))

    def __repr__(self):
        return f"FieldElement{self.coords}"


# --- ideals --------------------------------------------------------------------

class Ideal:
    """Fractional ideal as an O-module lattice; basis columns in HNF."""

    __slots__ = ("field", "basis")

    def __init__(self, field: NumberField, basis: Matrix, *, check: bool = True):
        self.field = field
        self.basis = basis
        if check and not self._is_module():
            raise ValueError("lattice is not stable under the order")

    @classmethod
    def from_columns(cls, field: NumberField, cols: Sequence[Sequence], *,
                     check: bool = True) -> "Ideal":
        return cls(field, lattice_hnf(cols), check=check)

    @classmethod
    def from_generators(cls, field: NumberField, gens: Sequence[FieldElement]) -> "Ideal":
        if all(g.is_zero() for g in gens):
            raise ZeroIdeal("zero ideal")
        omegas = [field.element(col) for col in zip(*field.order_basis)]
        cols = [(g * w).coords for g in gens for w in omegas]
        return cls.from_columns(field, cols, check=False)

    @classmethod
    def unit_ideal(cls, field: NumberField) -> "Ideal":
        return cls(field, field.order_basis, check=False)

    def _is_module(self) -> bool:
        omegas = [self.field.element(col) for col in zip(*self.field.order_basis)]
        for j in range(self.field.n):
            b = self.field.element([self.basis[i][j] for i in range(self.field.n)])
            for w in omegas:
                if not self.contains(b * w):
                    return False
        return True

    def contains(self, x: FieldElement) -> bool:
        coords = list(x.coords)
        for i in range(self.field.n):
            q, r = divmod(coords[i], self.basis[i][i])
            if r != 0:
                return False
            for k in range(i, self.field.n):
                coords[k] -= q * self.basis[k][i]
        return True

    def contains_lattice(self, other: "Ideal") -> bool:
        n = self.field.n
        return all(self.contains(self.field.element([other.basis[i][j] for i in range(n)]))
                   for j in range(n))

    def norm(self) -> Fraction:
        return abs(Fraction(mat_det(self.basis)) / mat_det(self.field.order_basis))

    def __eq__(self, other) -> bool:
        return (isinstance(other, Ideal) and self.field is other.field
                and self.basis == other.basis)

    def __hash__(self):
        return hash((id(self.field), self.basis))

    def __mul__(self, other: "Ideal") -> "Ideal":
        n = self.field.n
        cols = []
        for j in range(n):
            b = self.field.element([self.basis[i][j] for i in range(n)])
            for k in range(n):
                c = self.field.element([other.basis[i][k] for i in range(n)])
                cols.append((b * c).coords)
        return Ideal.from_columns(self.field, cols, check=False)

    def inverse(self) -> "Ideal":
        """(O : I) = {x : x I contained in O}, computed as the dual of the
        lattice of multiplication constraints."""
        n = self.field.n
        order_inv = mat_inv(self.field.order_basis)
        # x = sum y_k omega_k lies in the inverse iff for every basis
        # element b_j of I the order coordinates of x*b_j are integral,
        # i.e. T_j y in Z^n with T_j[:, k] = coords_O(omega_k b_j).
        rows = []
        omegas = [self.field.element(col) for col in zip(*self.field.order_basis)]
        for j in range(n):
            b = self.field.element([self.basis[i][j] for i in range(n)])
            prod_cols = [mat_vec(order_inv, (w * b).coords) for w in omegas]
            for i in range(n):
                rows.append([prod_cols[k][i] for k in range(n)])
        # {y : <r, y> in Z for all constraint rows r} = (S^t)^-1 Z^n where
        # the columns of S are an HNF basis of the lattice the rows span
        s = lattice_hnf(rows)
        st_inv = mat_inv(tuple(zip(*s)))
        cols = []
        for j in range(n):
            y = [st_inv[i][j] for i in range(n)]
            cols.append(mat_vec(self.field.order_basis, y))
        return Ideal.from_columns(self.field, cols, check=False)

    def is_integral(self) -> bool:
        return Ideal.unit_ideal(self.field).contains_lattice(self)

    def is_coprime(self, other: "Ideal") -> bool:
        n = self.field.n
        cols = ([[self.basis[i][j] for i in range(n)] for j in range(n)]
                + [[other.basis[i][j] for i in range(n)] for j in range(n)])
        return lattice_hnf(cols) == Ideal.unit_ideal(self.field).basis

    def scale(self, c) -> "Ideal":
        c = Fraction(c)
        if c == 0:
            raise ZeroIdeal("zero ideal")
        return Ideal(self.field,
                     lattice_hnf([[c * self.basis[i][j] for i in range(self.field.n)]
                                  for j in range(self.field.n)]), check=False)

    def basis_elements(self) -> list[FieldElement]:
        n = self.field.n
        return [self.field.element([self.basis[i][j] for i in range(n)])
                for j in range(n)]

    def __repr__(self):
        return f"Ideal(basis={self.basis})"


def congruent_mod_ideal(x: FieldElement, y: FieldElement, I: Ideal) -> bool:
    return I.contains(x - y)


def dual_basis(ws: Sequence[FieldElement]) -> list[FieldElement]:
    """Trace-dual basis: Tr(w_i w*_j) = delta_ij."""
    n = ws[0].field.n
    gram = tuple(tuple((wi * wj).trace() for wj in ws) for wi in ws)
    try:
        ginv = mat_inv(gram)
    except SingularMatrix:
        raise SingularGram("elements are linearly dependent")
    out = []
    for j in range(n):
        acc = ws[0].field.zero()
        for k in range(n):
            acc = acc + ginv[k][j] * ws[k]
        out.append(acc)
    return out


def prime_over(field: NumberField, ell: int) -> Ideal:
    """Degree-one prime (ell, theta - c) above ell, requiring ell prime to
    the index of Z[theta] in the working order."""
    if field.order_index % ell == 0:
        raise IndexDivisor(f"{ell} divides the order index; supply the ideal")
    roots = [c for c in range(ell) if poly_eval(field.f, c) % ell == 0]
    if not roots:
        raise NoDegreeOnePrime(f"defining polynomial has no root mod {ell}")
    c = roots[0]
    gen = field.theta() - field.from_rational(c)
    ideal = Ideal.from_generators(field, [field.from_rational(ell), gen])
    if ideal.norm() != ell:
        raise IndexDivisor(f"(ell, theta - c) does not have norm {ell}")
    return ideal


def adapted_basis(a: Ideal, f: Ideal, c: Ideal, ell: int) -> list[FieldElement]:
    """Basis w of a^-1 f with (w_1/ell, w_2, ..., w_n) a basis of
    a^-1 c^-1 f, from the Smith form of the index-ell inclusion."""
    field = a.field
    n = field.n
    L1 = a.inverse() * f
    L2 = a.inverse() * c.inverse() * f
    rel = mat_mul(mat_inv(L2.basis), L1.basis)
    relz = tuple(tuple(int(x) if Fraction(x).denominator == 1 else None
                       for x in row) for row in rel)
    if any(x is None for row in relz for x in row):
        raise IndexNotPrime("lattices are not nested")
    d, u, v = snf(relz)
    if abs(d[n - 1][n - 1]) != ell or any(d[i][i] != 1 for i in range(n - 1)):
        raise IndexNotPrime("inclusion index is not ell")
    newb1 = mat_mul(L1.basis, v)
    cols = [[newb1[i][n - 1] for i in range(n)]] + \
           [[newb1[i][j] for i in range(n)] for j in range(n - 1)]
    ws = [field.element(col) for col in cols]
    # fail-fast checks: w spans L1 and (w1/ell, w2, ...) spans L2
    if lattice_hnf([w.coords for w in ws]) != L1.basis:
        raise IndexNotPrime("adapted basis does not span a^-1 f")
    half = [tuple(x / ell for x in ws[0].coords)] + [w.coords for w in ws[1:]]
    if lattice_hnf(half) != L2.basis:
        raise IndexNotPrime("w_1/ell does not complete a basis of a^-1 c^-1 f")
    return ws


# --- units ----------------------------------------------------------------------

def fundamental_unit_quadratic(field: NumberField) -> FieldElement:
    """Fundamental unit (> 1 in the larger embedding) of a real quadratic
    field, from the continued fraction of the maximal-order generator."""
    b, cc = field.f[1], field.f[0]
    disc = b * b - 4 * cc
    s, d0 = 1, disc
    k = 2
    while k * k <= abs(d0):
        while d0 % (k * k) == 0:
            d0 //= k * k
            s *= k
        k += 1
    if d0 % 4 != 1:
        d0 = 4 * d0
    D = d0  # discriminant of the maximal order
    # continued fraction of (P0 + sqrt(D)) / Q0 with the integer recurrence;
    # the invariant Q | D - P^2 holds throughout
    sqD = isqrt(D)

    def cf_floor(p: int, q: int) -> int:
        num = p + sqD
        if q > 0:
            return num // q
        return -(num // (-q)) - 1  # sqrt(D) irrational, never exact

    state = (1, 2) if D % 4 == 1 else (0, 2)
    seen: dict[tuple[int, int], int] = {}
    quotients: list[int] = []
    while state not in seen:
        seen[state] = len(quotients)
        P, Q = state
        aq = cf_floor(P, Q)
        quotients.append(aq)
        P2 = aq * Q - P
        state = (P2, (D - P2 * P2) // Q)
    start = seen[state]
    # Moebius matrix of the cycle fixes alpha = (P + sqrt(D)) / Q at the
    # cycle start; the unit is the denominator C*alpha + D0 of that action
    A, B, C, D0_ = 1, 0, 0, 1
    for aq in quotients[start:]:
        A, B, C, D0_ = A * aq + B, A, C * aq + D0_, C
    P, Q = state
    # sqrt(disc) = 2*theta + b and sqrt(D) = sqrt(disc)/m with disc = m^2 D
    m = isqrt(disc // D)
    sqrtD = field.element((Fraction(b, m), Fraction(2, m)))
    alpha = (field.from_rational(P) + sqrtD) * Fraction(1, Q)
    unit = Fraction(C) * alpha + field.from_rational(D0_)
    assert abs(unit.norm()) == 1, "continued fraction did not produce a unit"
    assert Ideal.unit_ideal(field).contains(unit), "unit not in the order"
    # normalize to be > 1 in the larger embedding
    if field.sign_at(unit, field.n - 1) < 0:
        unit = -unit
    while field.embed_interval(unit, field.n - 1)[1] < 1:
        unit = unit.inverse()
    if field.embed_interval(unit, field.n - 1)[0] <= 1:
        # interval still straddles 1: refine until it decides
        for _ in range(200):
            lo, hi = field.embed_interval(unit, field.n - 1)
            if lo > 1:
                break
            if hi < 1:
                unit = unit.inverse()
            field.refine_root(field.n - 1)
    return unit


def totally_positive_unit(field: NumberField, f: Ideal, *,
                          bound: int | None = None) -> FieldElement:
    """Smallest power of the fundamental unit that is totally positive and
    congruent to 1 modulo f (n = 2 only)."""
    if field.n != 2:
        raise UnitsRequired("units must be supplied for degree >= 3")
    u = fundamental_unit_quadratic(field)
    one = field.one()
    if bound is None:
        bound = 4 * int(f.norm()) ** 2 + 8
    cur = u
    for _ in range(1, bound + 1):
        if cur.is_totally_positive() and congruent_mod_ideal(cur, one, f):
            return cur
        cur = cur * u
    raise NotFoundWithinBound("no totally positive unit = 1 mod f within bound")


def validate_units(field: NumberField, f: Ideal,
                   units: Sequence[FieldElement]) -> None:
    """Check the supplied units: totally positive, = 1 mod f, independent."""
    one = field.one()
    for eps in units:
        if abs(eps.norm()) != 1:
            raise ValueError("supplied element is not a unit")
        if not eps.is_totally_positive():
            raise NotTotallyPositive("unit is not totally positive")
        if not congruent_mod_ideal(eps, one, f):
            raise NotCongruentOne("unit is not congruent to 1 mod f")
    if len(units) != field.n - 1:
        raise DependentUnits("need exactly n - 1 units")
    regulator_det_sign(field, units)  # raises DependentUnits if undecidable


def regulator_det_sign(field: NumberField, units: Sequence[FieldElement]) -> int:
    """Sign of det(log tau_i(eps_j)) over the first n-1 embeddings,
    certified by interval refinement.

    Independence is certified exactly (the determinant interval separates
    from zero); when certification fails at the finest width the units are
    reported dependent.
    """
    n1 = len(units)
    width = Fraction(1, 10 ** 6)
    for _ in range(4):
        try:
            entries = [[field.log_embed_interval(units[j], i, width=width)
                        for j in range(n1)] for i in range(n1)]
        except RefinementBudgetExceeded:
            break
        det = _interval_det(entries)
        if det[0] > 0:
            return 1
        if det[1] < 0:
            return -1
        width /= 10 ** 4
    raise DependentUnits("regulator sign undecided (units may be dependent)")


def unit_basis(field: NumberField, f: Ideal,
               supplied: Sequence[FieldElement] | None = None) -> list[FieldElement]:
    """Basis of totally positive units congruent to 1 mod f; computed for
    quadratic fields, validated pass-through otherwise."""
    if supplied is not None:
        validate_units(field, f, list(supplied))
        return list(supplied)
    if field.n != 2:
        raise UnitsRequired("units must be supplied for degree >= 3")
    return [totally_positive_unit(field, f)]


def totally_positive_generator(I: Ideal, f: Ideal, *, bound: int = 6,
                               coeff_bound: int = 60) -> tuple[int, FieldElement]:
    """Search (e, pi) with (pi) = I^e, pi totally positive and = 1 mod f.

    Enumerates small coordinate combinations of the ideal basis, then
    repairs signs/congruence with totally positive unit powers.
    """
    field = I.field
    one = field.one()
    unit = totally_positive_unit(field, f) if field.n == 2 else None
    power = Ideal.unit_ideal(field)
    for e in range(1, bound + 1):
        power = power * I
        target = power.norm()
        basis = power.basis_elements()
        for radius in range(1, coeff_bound + 1):
            for coeffs in _shell(field.n, radius):
                alpha = field.zero()
                for cf, b in zip(coeffs, basis):
                    if cf:
                        alpha = alpha + cf * b
                if alpha.is_zero() or abs(alpha.norm()) != target:
                    continue
                for cand in (alpha, -alpha):
                    fixed = _fix_generator(cand, f, unit, one)
                    if fixed is not None:
                        return e, fixed
    raise NotFoundWithinBound("no totally positive generator within bounds")


def _fix_generator(alpha: FieldElement, f: Ideal, unit: FieldElement | None,
                   one: FieldElement):
    field = alpha.field
    if not alpha.is_totally_positive():
        return None
    if congruent_mod_ideal(alpha, one, f):
        return alpha
    if unit is None:
        return None
    cur = alpha
    for _ in range(4 * int(f.norm()) ** 2 + 8):
        cur = cur * unit
        if congruent_mod_ideal(cur, one, f):
            return cur
    return None


def _shell(n: int, radius: int):
    """Integer vectors with max-norm exactly radius."""
    def rec(prefix):
        if len(prefix) == n:
            if max(abs(c) for c in prefix) == radius:
                yield tuple(prefix)
            return
        for c in range(-radius, radius + 1):
            yield from rec(prefix + [c])
    yield from rec([])

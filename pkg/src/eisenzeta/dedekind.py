"""Generalized Dedekind sums, their prime smoothings, and the restricted
Bernoulli distributions with a cyclotomic-trace fast path.

Conventions: sigma is an integer n x n matrix of first columns; forms enter
only through the exact signs of the transformed matrix (sigma^-1 applied to
the tuple of forms); v is a rational column vector.
"""

from __future__ import annotations

import hashlib
import os
import threading
from fractions import Fraction
from math import floor, gcd
from typing import Sequence

from .bernoulli import B_e_Q, B_e_Q_plus
from .cyclotomic import CycloElement
from .exact import Matrix, coset_reps, mat_det, mat_inv, mat_vec


class ShapeError(ValueError):
    pass


class LinearFormModL:
    """Linear form Z^n -> F_ell with all values on the standard basis
    nonzero mod ell."""

    __slots__ = ("ell", "a")

    def __init__(self, ell: int, a: Sequence[int]):
        a = tuple(int(x) % ell for x in a)
        if any(x == 0 for x in a):
            raise ValueError("form must be nonzero on every basis vector")
        self.ell = ell
        self.a = a

    def __call__(self, y: Sequence[int]) -> int:
        return sum(ai * yi for ai, yi in zip(self.a, y)) % self.ell


class RationalForms:
    """m x n tuple of linear forms with rational coefficients.

    Every sign the computation requests must be of a nonzero entry; a zero
    entry means the form tuple is inadmissible for that matrix and raises.
    """

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence]):
        self.rows = tuple(tuple(Fraction(x) for x in row) for row in rows)

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0])

    def transform(self, m: Matrix) -> "RationalForms":
        """The action of m on the tuple: matrix becomes Q * m^t."""
        return RationalForms(
            [[sum(row[k] * m[j][k] for k in range(self.n)) for j in range(self.n)]
             for row in self.rows])

    def negate(self) -> "RationalForms":
        return RationalForms([[-x for x in row] for row in self.rows])

    def scale_row(self, i: int, c) -> "RationalForms":
        c = Fraction(c)
        if c <= 0:
            raise ValueError("row scaling must be positive")
        rows = [list(r) for r in self.rows]
        rows[i] = [c * x for x in rows[i]]
        return RationalForms(rows)

    def sign_matrix(self, sigma: Matrix | None = None) -> tuple[tuple[int, ...], ...]:
        """Signs of sigma^-1 Q (of Q itself when sigma is None)."""
        q = self if sigma is None else self.transform(mat_inv(sigma))
        out = []
        for row in q.rows:
            srow = []
            for x in row:
                if x == 0:
                    raise ValueError("form vanishes on a lattice direction")
                srow.append(1 if x > 0 else -1)
            out.append(tuple(srow))
        return tuple(out)

    def digest(self) -> str:
        return hashlib.sha256(repr(self.rows).encode()).hexdigest()[:16]


# --- cyclotomic Dedekind sum -------------------------------------------------

def b1_exp(x, r: int, ell: int) -> CycloElement:
    """Closed form of the cyclotomic Dedekind sum attached to x and the
    nonzero residue r: e(-r[x]/ell)/(e(r/ell)-1) + (delta_x/2) e(-rx/ell)."""
    x = Fraction(x)
    if r % ell == 0:
        raise ValueError("r must be nonzero mod ell")
    fx = floor(x)
    inv = (CycloElement.zeta_pow(ell, r) - CycloElement.one(ell)).inverse()
    main = CycloElement.zeta_pow(ell, -r * fx) * inv
    if x.denominator == 1:
        main = main + Fraction(1, 2) * CycloElement.zeta_pow(ell, -r * int(x))
    return main


def b1_exp_sum(x, r: int, ell: int) -> CycloElement:
    """The defining ell-term sum, kept as an independent check."""
    from .bernoulli import periodic_B
    x = Fraction(x)
    total = CycloElement.zero(ell)
    for m in range(1, ell + 1):
        total = total + periodic_B(1, (x + m) / ell) * CycloElement.zeta_pow(ell, r * m)
    return total


_INV_TABLES: dict[int, list[tuple[int, ...] | None]] = {}
_BETA_CACHE: dict[tuple, tuple[int, ...]] = {}
_lock = threading.Lock()


def _inv_int_table(ell: int) -> list:
    """Integer power-basis coordinates of ell * (zeta^a - 1)^-1; integral
    because (zeta^a - 1) divides ell in Z[zeta]."""
    table = _INV_TABLES.get(ell)
    if table is None:
        with _lock:
            table = _INV_TABLES.get(ell)
            if table is None:
                table = [None] * ell
                for a in range(1, ell):
                    inv = (CycloElement.zeta_pow(ell, a)
                           - CycloElement.one(ell)).inverse()
                    coords = tuple(c * ell for c in inv.coords)
                    assert all(c.denominator == 1 for c in coords)
                    table[a] = tuple(int(c) for c in coords)
                _INV_TABLES[ell] = table
    return table


def _conv_int(u: Sequence[int], v: Sequence[int], ell: int) -> tuple[int, ...]:
    """Product in Z[zeta] on integer coordinate vectors of length ell-1."""
    raw = [0] * ell
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                if b:
                    raw[(i + j) % ell] += a * b
    top = raw[ell - 1]
    return tuple(raw[i] - top for i in range(ell - 1))


def _rotate_int(u: Sequence[int], k: int, ell: int) -> tuple[int, ...]:
    """Coordinates of zeta^k times the element with coordinates u."""
    raw = [0] * ell
    k %= ell
    for i, a in enumerate(u):
        if a:
            raw[(i + k) % ell] += a
    top = raw[ell - 1]
    return tuple(raw[i] - top for i in range(ell - 1))


def _beta_for(ell: int, a: Sequence[int], j0: tuple[int, ...],
              sign_row: tuple[int, ...] | None) -> tuple[int, ...]:
    """Integer coordinates of ell^n * prod_j alpha_j (zeta^{a_j} - 1)^-1,
    with alpha_j = zeta^{a_j} at positive-sign defect positions and 1
    otherwise."""
    key = (ell, tuple(sorted(a[j] for j in range(len(a)) if j not in j0)),
           tuple(sorted((a[j], sign_row[j]) for j in j0)) if j0 else ())
    got = _BETA_CACHE.get(key)
    if got is not None:
        return got
    inv = _inv_int_table(ell)
    beta = (1,) + (0,) * (ell - 2)
    for j, aj in enumerate(a):
        beta = _conv_int(beta, inv[aj], ell)
        if j in j0 and sign_row[j] == 1:
            beta = _rotate_int(beta, aj, ell)
    _BETA_CACHE[key] = beta
    return beta


def _trace_shift_int(beta: Sequence[int], t: int, ell: int) -> int:
    """Trace of zeta^t * beta, O(ell) via Tr(zeta^s) = ell*[s=0] - 1."""
    s = sum(beta)
    idx = (-t) % ell
    lead = beta[idx] if idx < ell - 1 else 0
    return ell * lead - s


def b1_L_z_fast(L: LinearFormModL, z: int, x: Sequence,
                signs: Sequence[Sequence[int]]) -> Fraction:
    """Cyclotomic-trace evaluation of the restricted distribution at e = 1.

    Agrees exactly with b_L_z_direct for e = (1, ..., 1); cost is
    O(ell * m * n) instead of O(ell^n), in integer arithmetic on vectors
    scaled by ell^n.
    """
    ell = L.ell
    n = len(L.a)
    floors = []
    j0 = []
    for j, t in enumerate(x):
        tq = Fraction(t)
        floors.append(floor(tq))
        if tq.denominator == 1:
            j0.append(j)
    j0 = tuple(j0)
    t = (-z - sum(a * f for a, f in zip(L.a, floors))) % ell
    scale = ell ** n
    if not j0:
        beta = _beta_for(ell, L.a, (), None)
        return Fraction(-_trace_shift_int(beta, t, ell), scale)
    total = 0
    for row in signs:
        beta = _beta_for(ell, L.a, j0, tuple(row))
        total += _trace_shift_int(beta, t, ell)
    return Fraction(-total, scale * len(signs))


def b_L_z_direct(e: Sequence[int], L: LinearFormModL, z: int, x: Sequence,
                 signs: Sequence[Sequence[int]]) -> Fraction:
    """Restricted distribution by direct summation over the level set
    {y in F_ell^n : L(y) = z}."""
    ell = L.ell
    n = len(e)
    z %= ell
    lead = B_e_Q(e, x, signs)
    ebar = sum(e)
    a1_inv = pow(L.a[0], -1, ell)
    total = Fraction(0)
    free = [0] * (n - 1)
    while True:
        y1 = (a1_inv * (z - sum(L.a[j + 1] * free[j] for j in range(n - 1)))) % ell
        y = (y1, *free)
        total += B_e_Q(e, [(xj + yj) / ell for xj, yj in zip(x, y)], signs)
        # odometer over the free coordinates
        for pos in range(n - 1):
            free[pos] += 1
            if free[pos] < ell:
                break
            free[pos] = 0
        else:
            break
    return lead - Fraction(ell) ** (1 - n + ebar) * total


def b_L_z(e: Sequence[int], L: LinearFormModL, z: int, x: Sequence,
          signs: Sequence[Sequence[int]]) -> Fraction:
    if all(ej == 1 for ej in e):
        return b1_L_z_fast(L, z, x, signs)
    return b_L_z_direct(e, L, z, x, signs)


# --- Dedekind sums -----------------------------------------------------------

def _coset_sum(sigma: Matrix, e: Sequence[int], v: Sequence,
               signs, plus: bool) -> Fraction:
    inv = mat_inv(sigma)
    B = B_e_Q_plus if plus else B_e_Q
    total = Fraction(0)
    for x in coset_reps(sigma):
        arg = mat_vec(inv, [xi + vi for xi, vi in zip(x, v)])
        total += B(e, arg, signs)
    return total


def d_plus(sigma: Matrix, e: Sequence[int], Q, v: Sequence, *,
           plus: bool = True) -> Fraction:
    """The Dedekind sum over Z^n / sigma Z^n; vanishes when sigma is
    singular by convention."""
    if mat_det(sigma) == 0:
        return Fraction(0)
    signs = Q.sign_matrix(sigma)
    return _coset_sum(sigma, e, v, signs, plus)


def sigma_ell(sigma: Matrix, ell: int) -> Matrix:
    """Divide rows 2..n of sigma by ell; ShapeError if not integral or the
    first row is not prime to ell."""
    n = len(sigma)
    if n < 2:
        raise ShapeError("need n >= 2")
    for j in range(n):
        if gcd(int(sigma[0][j]), ell) != 1:
            raise ShapeError("first row must be prime to ell")
    out = [list(sigma[0])]
    for i in range(1, n):
        row = []
        for x in sigma[i]:
            if x % ell:
                raise ShapeError("rows 2..n must be divisible by ell")
            row.append(x // ell)
        out.append(row)
    return tuple(tuple(r) for r in out)


def _pi_ell_vec(v: Sequence, ell: int) -> tuple:
    return (Fraction(v[0]) * ell, *[Fraction(t) for t in v[1:]])


def d_ell(sigma: Matrix, e: Sequence[int], Q, v: Sequence, ell: int, *,
          plus: bool = False, cache: "DedekindCache | None" = None) -> Fraction:
    """ell-smoothed Dedekind sum.

    Equals D(sigma_ell, e, pi Q, pi v) - ell^(1-n+ebar) D(sigma, e, Q, v);
    evaluated through the level-set decomposition with the cyclotomic fast
    path when e = (1,...,1), and directly otherwise.
    """
    n = len(sigma)
    sl = sigma_ell(sigma, ell)  # validates the shape even for det 0
    if mat_det(sigma) == 0:
        return Fraction(0)
    signs = Q.sign_matrix(sigma)
    key = None
    if cache is not None:
        key = cache.key(sigma, e, v, signs, ell, plus)
        got = cache.get(key)
        if got is not None:
            return got
    if plus:
        val = (_smoothed_decomposed(sigma, sl, e, v, signs, ell)
               + _smoothed_decomposed(sigma, sl, e, v,
                                      tuple(tuple(-s for s in row) for row in signs),
                                      ell)) / 2
    else:
        val = _smoothed_decomposed(sigma, sl, e, v, signs, ell)
    if cache is not None:
        cache.put(key, val)
    return val


def d_ell_plus(sigma: Matrix, e: Sequence[int], Q, v: Sequence, ell: int,
               **kw) -> Fraction:
    return d_ell(sigma, e, Q, v, ell, plus=True, **kw)


def _smoothed_decomposed(sigma: Matrix, sl: Matrix, e: Sequence[int],
                         v: Sequence, signs, ell: int) -> Fraction:
    L = LinearFormModL(ell, [int(t) for t in sigma[0]])
    inv = mat_inv(sl)
    pv = _pi_ell_vec(v, ell)
    total = Fraction(0)
    for x in coset_reps(sl):
        arg = mat_vec(inv, [xi + vi for xi, vi in zip(x, pv)])
        total += b_L_z(e, L, (-x[0]) % ell, arg, signs)
    return total


def d_ell_direct(sigma: Matrix, e: Sequence[int], Q, v: Sequence, ell: int, *,
                 plus: bool = False) -> Fraction:
    """Two-sum form of the smoothing, kept as the independent oracle for
    the decomposition identity."""
    sl = sigma_ell(sigma, ell)
    if mat_det(sigma) == 0:
        return Fraction(0)
    signs = Q.sign_matrix(sigma)
    ebar = sum(e)
    n = len(sigma)
    first = _coset_sum(sl, e, _pi_ell_vec(v, ell), signs, plus)
    second = _coset_sum(sigma, e, v, signs, plus)
    return first - Fraction(ell) ** (1 - n + ebar) * second


class DedekindCache:
    """Memo for smoothed Dedekind sums, persistable as versioned
    line-delimited records "digest<TAB>num/den"."""

    FORMAT = "eisenzeta-dedekind-cache-v1"

    def __init__(self, path: str | None = None):
        self.path = path
        self.data: dict[str, Fraction] = {}
        self._lock = threading.Lock()
        if path and os.path.exists(path):
            self.load(path)

    @staticmethod
    def key(sigma, e, v, signs, ell: int, plus: bool) -> str:
        vred = tuple(Fraction(t) - floor(t) for t in v)
        raw = repr((tuple(map(tuple, sigma)), tuple(e), vred, signs, ell, plus))
        return hashlib.sha256(raw.encode()).hexdigest()

    def get(self, key: str) -> Fraction | None:
        return self.data.get(key)

    def put(self, key: str, val: Fraction) -> None:
        with self._lock:
            self.data[key] = val

    def load(self, path: str) -> None:
        with open(path, "r", encoding="ascii") as fh:
            header = fh.readline().strip()
            if header != self.FORMAT:
                raise ValueError(f"unknown cache format: {header!r}")
            for line in fh:
                k, _, frac = line.strip().partition("\t")
                num, _, den = frac.partition("/")
                self.data[k] = Fraction(int(num), int(den or 1))

    def save(self, path: str | None = None) -> None:
        path = path or self.path
        if not path:
            raise ValueError("no cache path configured")
        with self._lock:
            with open(path, "w", encoding="ascii") as fh:
                fh.write(self.FORMAT + "\n")
                for k, val in sorted(self.data.items()):
                    fh.write(f"{k}\t{val.numerator}/{val.denominator}\n")

"""Exact integer/rational linear algebra and multivariate polynomials.

Everything here is pure and exact: scalars are `fractions.Fraction` (or int),
matrices are tuples of tuples, and no floating point ever enters.  Matrices
are small (n <= 8), so dense quadratic/cubic algorithms are used throughout.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


class SingularMatrix(ValueError):
    pass


class DegreeError(ValueError):
    pass


class NotHomogeneous(ValueError):
    pass


Matrix = tuple[tuple, ...]


def mat_from_rows(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(r) for r in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0])
    assert len(a[0]) == k
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m))
        for i in range(n)
    )


def mat_vec(a: Matrix, v: Sequence) -> tuple:
    return tuple(sum(a[i][j] * v[j] for j in range(len(v))) for i in range(len(a)))


def mat_transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def mat_scale(a: Matrix, c) -> Matrix:
    return tuple(tuple(c * x for x in row) for row in a)


def mat_det(a: Matrix) -> Fraction:
    """Determinant by fraction-free forward elimination."""
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            if m[r][c] != 0:
                f = m[r][c] * inv
                for j in range(c, n):
                    m[r][j] -= f * m[c][j]
    return det


def mat_inv(a: Matrix) -> Matrix:
    """Exact inverse over the rationals via Gauss-Jordan."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise SingularMatrix("matrix is singular")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return tuple(tuple(row[n:]) for row in m)


def hnf(mat: Matrix) -> tuple[Matrix, Matrix]:
    """Column Hermite normal form H = M*U with U unimodular.

    H is lower triangular with nonnegative diagonal; in every row the
    entries left of the diagonal are reduced into [0, H[i][i]).  Zero
    diagonal entries occur exactly when M is singular.  Works for integer
    or rational input (rational input is scaled to integers and back).
    """
    n = len(mat)
    den = 1
    for row in mat:
        for x in row:
            if isinstance(x, Fraction):
                den = den * x.denominator // gcd(den, x.denominator)
    h = [[int(x * den) for x in row] for row in mat]
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop_sub(dst: int, src: int, q: int) -> None:
        for i in range(n):
            h[i][dst] -= q * h[i][src]
            u[i][dst] -= q * u[i][src]

    def colswap(a: int, b: int) -> None:
        for i in range(n):
            h[i][a], h[i][b] = h[i][b], h[i][a]
            u[i][a], u[i][b] = u[i][b], u[i][a]

    for r in range(n):
        # gcd-eliminate row r across columns r..n-1, pivot lands at (r, r)
        while True:
            nz = [j for j in range(r + 1, n) if h[r][j] != 0]
            if not nz:
                break
            if h[r][r] == 0:
                colswap(r, nz[0])
                continue
            for j in nz:
                q = h[r][j] // h[r][r]
                colop_sub(j, r, q)
                if h[r][j] != 0:
                    colswap(r, j)
                    break
        if h[r][r] < 0:
            for i in range(n):
                h[i][r] = -h[i][r]
                u[i][r] = -u[i][r]
        if h[r][r] != 0:
            for j in range(r):
                q = h[r][j] // h[r][r]
                if q:
                    colop_sub(j, r, q)
    if den != 1:
        hq = tuple(tuple(Fraction(x, den) for x in row) for row in h)
    else:
        hq = tuple(tuple(row) for row in h)
    return hq, tuple(tuple(row) for row in u)


def lattice_hnf(cols: Sequence[Sequence]) -> Matrix:
    """HNF basis (n x n, lower triangular) of the full-rank lattice spanned
    by the given columns; accepts m >= n integer or rational columns."""
    if not cols:
        raise SingularMatrix("no generators")
    n = len(cols[0])
    den = 1
    for col in cols:
        for x in col:
            if isinstance(x, Fraction):
                den = den * x.denominator // gcd(den, x.denominator)
    h = [[int(x * den) for x in col] for col in cols]  # h[j] is a column
    m = len(h)

    for r in range(n):
        while True:
            nz = [j for j in range(r + 1, m) if h[j][r] != 0]
            if not nz:
                break
            if h[r][r] == 0:
                h[r], h[nz[0]] = h[nz[0]], h[r]
                continue
            for j in nz:
                q = h[j][r] // h[r][r]
                h[j] = [a - q * b for a, b in zip(h[j], h[r])]
                if h[j][r] != 0:
                    h[r], h[j] = h[j], h[r]
                    break
        if h[r][r] == 0:
            raise SingularMatrix("generators do not span a full-rank lattice")
        if h[r][r] < 0:
            h[r] = [-a for a in h[r]]
        for j in range(r):
            q = h[j][r] // h[r][r]
            if q:
                h[j] = [a - q * b for a, b in zip(h[j], h[r])]
    basis = h[:n]
    if den != 1:
        return tuple(tuple(Fraction(basis[j][i], den) for j in range(n))
                     for i in range(n))
    return tuple(tuple(basis[j][i] for j in range(n)) for i in range(n))


def snf(mat: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form D = U*M*V over the integers, U, V unimodular."""
    n, m = len(mat), len(mat[0])
    d = [[int(x) for x in row] for row in mat]
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    v = [[int(i == j) for j in range(m)] for i in range(m)]

    def rowop(dst, src, q):
        for j in range(m):
            d[dst][j] -= q * d[src][j]
        for j in range(n):
            u[dst][j] -= q * u[src][j]

    def colop(dst, src, q):
        for i in range(n):
            d[i][dst] -= q * d[i][src]
        for i in range(m):
            v[i][dst] -= q * v[i][src]

    def rowswap(a, b):
        d[a], d[b] = d[b], d[a]
        u[a], u[b] = u[b], u[a]

    def colswap(a, b):
        for i in range(n):
            d[i][a], d[i][b] = d[i][b], d[i][a]
        for i in range(m):
            v[i][a], v[i][b] = v[i][b], v[i][a]

    k = 0
    while k < min(n, m):
        # move a nonzero pivot to (k, k)
        piv = next(((i, j) for j in range(k, m) for i in range(k, n) if d[i][j]), None)
        if piv is None:
            break
        rowswap(k, piv[0])
        colswap(k, piv[1])
        while True:
            done = True
            for i in range(k + 1, n):
                if d[i][k]:
                    q = d[i][k] // d[k][k]
                    rowop(i, k, q)
                    if d[i][k]:
                        rowswap(k, i)
                        done = False
            for j in range(k + 1, m):
                if d[k][j]:
                    q = d[k][j] // d[k][k]
                    colop(j, k, q)
                    if d[k][j]:
                        colswap(k, j)
                        done = False
            if done:
                break
        # enforce divisibility d_k | d[i][j] for the trailing block: fold the
        # offending row into row k so the gcd elimination shrinks the pivot
        bad = next(((i, j) for i in range(k + 1, n) for j in range(k + 1, m)
                    if d[i][j] % d[k][k]), None)
        if bad is not None:
            rowop(k, bad[0], -1)
            continue
        if d[k][k] < 0:
            for j in range(m):
                d[k][j] = -d[k][j]
            for j in range(n):
                u[k][j] = -u[k][j]
        k += 1
    return (tuple(tuple(r) for r in d), tuple(tuple(r) for r in u),
            tuple(tuple(r) for r in v))


def reduce_mod_lattice(w: Sequence, h: Matrix) -> tuple:
    """Canonical representative of w modulo the column lattice of the
    lower-triangular HNF matrix h: coordinates land in [0, h[i][i])."""
    n = len(h)
    x = [Fraction(t) if isinstance(t, Fraction) else t for t in w]
    for i in range(n):
        if h[i][i] == 0:
            raise SingularMatrix("lattice not full rank")
        q = x[i] // h[i][i]
        if q:
            for r in range(i, n):
                x[r] -= q * h[r][i]
    return tuple(x)


def coset_reps(mat: Matrix) -> list[tuple[int, ...]]:
    """Representatives of Z^n / M Z^n, one per class.

    Canonical rule: 0 <= x_i < H[i][i] where H is the column HNF of M.
    """
    n = len(mat)
    h, _ = hnf(mat)
    if any(h[i][i] == 0 for i in range(n)):
        raise SingularMatrix("det M = 0 has no finite coset system")
    reps: list[tuple[int, ...]] = [()]
    for i in range(n):
        reps = [r + (x,) for r in reps for x in range(int(h[i][i]))]
    return reps


class MultiPoly:
    """Multivariate polynomial with Fraction coefficients.

    Stored as {exponent tuple: coefficient}; zero coefficients are never
    kept.  Instances are treated as immutable.
    """

    __slots__ = ("nvars", "coeffs")

    def __init__(self, nvars: int, coeffs: dict | None = None):
        self.nvars = nvars
        clean = {}
        if coeffs:
            for mono, c in coeffs.items():
                c = Fraction(c)
                if c:
                    assert len(mono) == nvars
                    clean[tuple(mono)] = c
        self.coeffs = clean

    @classmethod
    def constant(cls, nvars: int, c) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: Fraction(c)})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MultiPoly":
        mono = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(nvars, {mono: Fraction(1)})

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return max((sum(m) for m in self.coeffs), default=0)

    def is_homogeneous(self) -> bool:
        degs = {sum(m) for m in self.coeffs}
        return len(degs) <= 1

    def homogeneous_components(self) -> dict[int, "MultiPoly"]:
        parts: dict[int, dict] = {}
        for mono, c in self.coeffs.items():
            parts.setdefault(sum(mono), {})[mono] = c
        return {d: MultiPoly(self.nvars, cs) for d, cs in parts.items()}

    def __eq__(self, other) -> bool:
        return (isinstance(other, MultiPoly) and self.nvars == other.nvars
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.coeffs.items())))

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        out = dict(self.coeffs)
        for mono, c in other.coeffs.items():
            out[mono] = out.get(mono, Fraction(0)) + c
        return MultiPoly(self.nvars, out)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.nvars, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            return MultiPoly(self.nvars,
                             {m: c * Fraction(other) for m, c in self.coeffs.items()})
        out: dict[tuple, Fraction] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                out[mono] = out.get(mono, Fraction(0)) + c1 * c2
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MultiPoly":
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for mono, c in self.coeffs.items():
            term = c
            for x, e in zip(point, mono):
                if e:
                    term *= Fraction(x) ** e
            total += term
        return total

    def compose_matrix(self, rows: Matrix) -> "MultiPoly":
        """Substitute X_i -> sum_j rows[i][j] * X_j."""
        n = self.nvars
        forms = [MultiPoly(n, {tuple(int(k == j) for k in range(n)): Fraction(rows[i][j])
                               for j in range(n) if rows[i][j] != 0})
                 for i in range(n)]
        out = MultiPoly(n)
        for mono, c in self.coeffs.items():
            term = MultiPoly.constant(n, c)
            for i, e in enumerate(mono):
                for _ in range(e):
                    term = term * forms[i]
            out = out + term
        return out

    def leading(self) -> tuple[tuple, Fraction]:
        mono = max(self.coeffs)  # lex order on exponent tuples
        return mono, self.coeffs[mono]

    def divexact(self, other: "MultiPoly") -> "MultiPoly":
        """Exact division; raises ValueError if other does not divide self."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = self
        quot: dict[tuple, Fraction] = {}
        lm, lc = other.leading()
        while not rem.is_zero():
            rm, rc = rem.leading()
            qm = tuple(a - b for a, b in zip(rm, lm))
            if any(e < 0 for e in qm):
                raise ValueError("division is not exact")
            qc = rc / lc
            quot[qm] = quot.get(qm, Fraction(0)) + qc
            rem = rem - MultiPoly(self.nvars, {qm: qc}) * other
        return MultiPoly(self.nvars, quot)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for mono in sorted(self.coeffs, reverse=True):
            c = self.coeffs[mono]
            vars_ = "*".join(f"X{i+1}^{e}" if e > 1 else f"X{i+1}"
                             for i, e in enumerate(mono) if e)
            parts.append(f"{c}" + (f"*{vars_}" if vars_ else ""))
        return " + ".join(parts)


def poly_det(mat: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    """Determinant over the polynomial ring by fraction-free (Bareiss)
    elimination; exactness of the interior divisions is a theorem."""
    m = len(mat)
    nvars = mat[0][0].nvars
    a = [list(row) for row in mat]
    sign = 1
    prev = MultiPoly.constant(nvars, 1)
    for k in range(m - 1):
        piv = next((r for r in range(k, m) if not a[r][k].is_zero()), None)
        if piv is None:
            return MultiPoly(nvars)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num.divexact(prev)
            a[i][k] = MultiPoly(nvars)
        prev = a[k][k]
    det = a[m - 1][m - 1]
    return det if sign == 1 else -det


def resultant_norm(f: Sequence[int], g: Sequence[MultiPoly]) -> MultiPoly:
    """prod over the roots theta_i of f of g(theta_i; X), via the Sylvester
    determinant of f and g over the polynomial ring.

    f is a monic integer polynomial given by ascending coefficients
    (f[0] + f[1] t + ... + t^n); g is given by its ascending t-coefficients,
    each a MultiPoly in the auxiliary variables, with deg_t(g) < n.
    """
    n = len(f) - 1
    if n < 1 or f[-1] != 1:
        raise DegreeError("f must be monic of degree >= 1")
    gc = list(g)
    while gc and gc[-1].is_zero():
        gc.pop()
    if not gc:
        return MultiPoly(g[0].nvars if g else 1)
    d = len(gc) - 1
    if d >= n:
        raise DegreeError("deg_t(g) must be < deg(f)")
    nvars = gc[0].nvars
    if d == 0:
        return gc[0] ** n
    size = n + d
    const = lambda c: MultiPoly.constant(nvars, c)
    rows: list[list[MultiPoly]] = []
    for i in range(d):  # d shifted copies of f (descending coefficients)
        row = [const(0)] * size
        for j, c in enumerate(reversed(f)):
            row[i + j] = const(c)
        rows.append(row)
    for i in range(n):  # n shifted copies of g
        row = [const(0)] * size
        for j, cpoly in enumerate(reversed(gc)):
            row[i + j] = cpoly
        rows.append(row)
    return poly_det(rows)

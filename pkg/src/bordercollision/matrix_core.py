"""Dense square matrices over exact rationals or binary64 floats.

Every real number in this package is a *scalar* living in one of two
backends:

``rational``
    ``gmpy2.mpq`` values (always in lowest terms with a positive
    denominator).  All sign decisions are exact.
``float``
    Python floats.  Sign decisions use a zero band; a value inside the
    band is reported as sign ``0``, which callers treat as a degeneracy.

Matrices are immutable and carry their backend tag.  Vectors are plain
tuples of scalars.
"""

from __future__ import annotations

import math
from fractions import Fraction
from decimal import Decimal
from itertools import permutations
from operator import mul
from typing import Iterable, Sequence, Union

import gmpy2
import numpy as np
from gmpy2 import mpq

RATIONAL = "rational"
FLOAT = "float"
BACKENDS = (RATIONAL, FLOAT)

#: absolute zero tolerance for the float backend, before scaling
ZERO_TOL = 1e-10
#: largest dimension accepted unless the caller raises it
MAX_DIM = 12

Scalar = Union[mpq, float]
Vector = tuple


def to_scalar(value, backend: str = RATIONAL) -> Scalar:
    """Convert ``value`` to a scalar of ``backend``.

    Strings may be integers, decimals (``"0.4"``) or fractions (``"-3/2"``);
    under the rational backend decimals are read exactly.
    """
    if backend == RATIONAL:
        if isinstance(value, type(mpq())):
            return value
        if isinstance(value, str):
            fr = Fraction(value.strip())
            return mpq(fr.numerator, fr.denominator)
        if isinstance(value, Decimal):
            fr = Fraction(value)
            return mpq(fr.numerator, fr.denominator)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"non-finite entry {value!r}")
            return mpq(value)
        if isinstance(value, Fraction):
            return mpq(value.numerator, value.denominator)
        return mpq(value)
    if backend == FLOAT:
        if isinstance(value, str):
            value = Fraction(value.strip())
        out = float(value)
        if not math.isfinite(out):
            raise ValueError(f"non-finite entry {value!r}")
        return out
    raise ValueError(f"unknown backend {backend!r}")


def strict_sign(value: Scalar, band: float = 0.0) -> int:
    """Sign of ``value``; ``0`` if it is zero or inside ``[-band, band]``."""
    if isinstance(value, float):
        if abs(value) <= band:
            return 0
        return 1 if value > 0 else -1
    return int(gmpy2.sign(value))


def vector(values: Iterable, backend: str = RATIONAL) -> Vector:
    return tuple(to_scalar(v, backend) for v in values)


def dot(p: Sequence[Scalar], q: Sequence[Scalar]) -> Scalar:
    return sum(map(mul, p[1:], q[1:]), p[0] * q[0])


def unit(n: int, i: int, backend: str = RATIONAL) -> Vector:
    one, zero = to_scalar(1, backend), to_scalar(0, backend)
    return tuple(one if k == i else zero for k in range(n))


class Matrix:
    """Immutable N x N matrix of scalars sharing one backend."""

    __slots__ = ("rows", "backend", "n")

    def __init__(self, rows, backend: str = RATIONAL, *, max_dim: int = MAX_DIM):
        if backend not in BACKENDS:
            raise ValueError(f"unknown backend {backend!r}")
        rows = tuple(tuple(to_scalar(v, backend) for v in r) for r in rows)
        n = len(rows)
        if n < 1 or any(len(r) != n for r in rows):
            raise ValueError("matrix must be square with N >= 1")
        if n > max_dim:
            raise ValueError(f"dimension {n} exceeds cap {max_dim}")
        self.rows = rows
        self.backend = backend
        self.n = n

    @classmethod
    def _raw(cls, rows, backend: str) -> Matrix:
        # trusted constructor: entries already converted
        m = object.__new__(cls)
        m.rows = rows
        m.backend = backend
        m.n = len(rows)
        return m

    @classmethod
    def identity(cls, n: int, backend: str = RATIONAL) -> Matrix:
        return cls._raw(tuple(unit(n, i, backend) for i in range(n)), backend)

    @classmethod
    def zeros(cls, n: int, backend: str = RATIONAL) -> Matrix:
        z = to_scalar(0, backend)
        return cls._raw(tuple((z,) * n for _ in range(n)), backend)

    @classmethod
    def outer(cls, p: Sequence[Scalar], q: Sequence[Scalar], backend: str) -> Matrix:
        return cls._raw(tuple(tuple(a * b for b in q) for a in p), backend)

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(v) for v in r) + "]" for r in self.rows)
        return f"Matrix([{body}], backend={self.backend!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.backend == other.backend and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.rows, self.backend))

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def _check(self, other: Matrix) -> None:
        if other.n != self.n or other.backend != self.backend:
            raise ValueError("dimension or backend mismatch")

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        return Matrix._raw(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.backend,
        )

    def __sub__(self, other: Matrix) -> Matrix:
        self._check(other)
        return Matrix._raw(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.backend,
        )

    def __neg__(self) -> Matrix:
        return Matrix._raw(tuple(tuple(-a for a in r) for r in self.rows), self.backend)

    def scale(self, c: Scalar) -> Matrix:
        return Matrix._raw(tuple(tuple(c * a for a in r) for r in self.rows), self.backend)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            self._check(other)
            cols = tuple(zip(*other.rows))
            return Matrix._raw(
                tuple(tuple(dot(r, c) for c in cols) for r in self.rows), self.backend
            )
        return tuple(dot(r, other) for r in self.rows)

    def rmatvec(self, v: Sequence[Scalar]) -> Vector:
        """Row vector times matrix, ``vᵀ M``."""
        return tuple(dot(v, c) for c in zip(*self.rows))

    def transpose(self) -> Matrix:
        return Matrix._raw(tuple(zip(*self.rows)), self.backend)

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def trace(self) -> Scalar:
        total = self.rows[0][0]
        for i in range(1, self.n):
            total += self.rows[i][i]
        return total

    def with_backend(self, backend: str) -> Matrix:
        if backend == self.backend:
            return self
        return Matrix(self.rows, backend)

    def max_row_norm(self) -> float:
        return max(sum(abs(float(v)) for v in r) for r in self.rows)

    def zero_band(self, power: int | None = None) -> float:
        """Float-backend zero band for quantities of degree ``power`` in the entries.

        Determinants use ``power = N``.  The rational backend has no band.
        """
        if self.backend == RATIONAL:
            return 0.0
        p = self.n if power is None else power
        return ZERO_TOL * max(1.0, self.max_row_norm()) ** p

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.rows], dtype=float)


# ---------------------------------------------------------------------------
# determinant
# ---------------------------------------------------------------------------

def _integer_rows(m: Matrix) -> tuple[list[list[int]], int]:
    """Clear denominators row by row; returns integer rows and the product of multipliers."""
    out = []
    scale = 1
    for r in m.rows:
        d = 1
        for v in r:
            d = gmpy2.lcm(d, v.denominator)
        out.append([int(v.numerator * (d // v.denominator)) for v in r])
        scale *= int(d)
    return out, scale


def _bareiss(a: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination; returns the exact integer determinant."""
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (rowi[j] * akk - aik * rowk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def det(m: Matrix) -> Scalar:
    """Determinant: exact Bareiss (rational) or partial-pivot LU (float)."""
    if m.backend == RATIONAL:
        if m.n == 1:
            return m.rows[0][0]
        if m.n == 2:
            (a, b), (c, d) = m.rows
            return a * d - b * c
        ints, scale = _integer_rows(m)
        return mpq(_bareiss(ints), scale)
    if m.n == 1:
        return m.rows[0][0]
    return float(np.linalg.det(m.to_numpy()))


def det_cofactor(m: Matrix) -> Scalar:
    """Recursive Laplace expansion along the first row (brute force, small N only)."""
    rows = m.rows
    zero = to_scalar(0, m.backend)

    def rec(rs: tuple) -> Scalar:
        if len(rs) == 1:
            return rs[0][0]
        total = zero
        for j, v in enumerate(rs[0]):
            minor = tuple(r[:j] + r[j + 1:] for r in rs[1:])
            term = v * rec(minor)
            total = total + term if j % 2 == 0 else total - term
        return total

    return rec(rows)


def det_leibniz(m: Matrix) -> Scalar:
    """Permutation-sum determinant; an independent oracle for N <= 6."""
    n = m.n
    total = to_scalar(0, m.backend)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = to_scalar(1, m.backend)
        for i, p in enumerate(perm):
            prod = prod * m.rows[i][p]
        total = total - prod if inv % 2 else total + prod
    return total


# ---------------------------------------------------------------------------
# inverse, solve, adjugate
# ---------------------------------------------------------------------------

def _gauss_jordan(m: Matrix, rhs: list[list]) -> list[list] | None:
    """Exact elimination of ``m X = rhs``; ``None`` when ``m`` is singular."""
    n = m.n
    a = [list(r) + list(b) for r, b in zip(m.rows, rhs)]
    width = len(a[0])
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return None
        a[k], a[piv] = a[piv], a[k]
        inv = 1 / a[k][k]
        a[k] = [v * inv for v in a[k]]
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k]
                ak = a[k]
                a[i] = [x - f * y for x, y in zip(a[i], ak)]
    return [row[n:width] for row in a]


def inverse(m: Matrix) -> Matrix:
    """Inverse; raises ``ZeroDivisionError`` for singular input."""
    if m.backend == RATIONAL:
        ident = Matrix.identity(m.n).rows
        out = _gauss_jordan(m, [list(r) for r in ident])
        if out is None:
            raise ZeroDivisionError("singular matrix")
        return Matrix._raw(tuple(tuple(r) for r in out), RATIONAL)
    if strict_sign(det(m), m.zero_band()) == 0:
        raise ZeroDivisionError("matrix singular within tolerance")
    inv = np.linalg.inv(m.to_numpy())
    return Matrix._raw(tuple(tuple(float(v) for v in r) for r in inv), FLOAT)


def solve(m: Matrix, b: Sequence[Scalar]) -> Vector:
    """Solve ``m x = b``; raises ``ZeroDivisionError`` for singular ``m``."""
    if m.backend == RATIONAL:
        out = _gauss_jordan(m, [[v] for v in b])
        if out is None:
            raise ZeroDivisionError("singular matrix")
        return tuple(r[0] for r in out)
    if strict_sign(det(m), m.zero_band()) == 0:
        raise ZeroDivisionError("matrix singular within tolerance")
    x = np.linalg.solve(m.to_numpy(), np.array([float(v) for v in b]))
    return tuple(float(v) for v in x)


def _minor(m: Matrix, i: int, j: int) -> Matrix:
    return Matrix._raw(
        tuple(r[:j] + r[j + 1:] for k, r in enumerate(m.rows) if k != i), m.backend
    )


def adjugate_cofactor(m: Matrix) -> Matrix:
    """Transpose of the cofactor matrix, every entry from its own minor."""
    n = m.n
    if n == 1:
        return Matrix.identity(1, m.backend)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            c = det(_minor(m, j, i))
            row.append(c if (i + j) % 2 == 0 else -c)
        rows.append(tuple(row))
    return Matrix._raw(tuple(rows), m.backend)


def adjugate(m: Matrix) -> Matrix:
    """Adjugate; cofactors for N <= 4 or singular input, ``det * inverse`` otherwise."""
    if m.n <= 4:
        return adjugate_cofactor(m)
    d = det(m)
    if strict_sign(d, m.zero_band()) == 0:
        return adjugate_cofactor(m)
    return inverse(m).scale(d)


def first_row_adjugate(m: Matrix) -> Vector:
    """``e₁ᵀ adj(m)`` without forming the full adjugate.

    Entry ``j`` is the cofactor of position ``(j, 0)``.
    """
    if m.n == 1:
        return (to_scalar(1, m.backend),)
    out = []
    for j in range(m.n):
        c = det(_minor(m, j, 0))
        out.append(c if j % 2 == 0 else -c)
    return tuple(out)


# ---------------------------------------------------------------------------
# characteristic polynomial
# ---------------------------------------------------------------------------

class Poly:
    """Real polynomial with ascending coefficients ``c_0 .. c_d``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar]):
        cs = list(coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def derivative(self) -> Poly:
        if len(self.coeffs) == 1:
            return Poly([self.coeffs[0] * 0])
        return Poly([k * c for k, c in enumerate(self.coeffs) if k > 0])

    @classmethod
    def from_roots(cls, roots: Iterable[Scalar]) -> Poly:
        cs = [mpq(1)]
        for r in roots:
            nxt = [mpq(0)] * (len(cs) + 1)
            for k, c in enumerate(cs):
                nxt[k + 1] += c
                nxt[k] -= r * c
            cs = nxt
        return cls(cs)


def _faddeev_leverrier(rows, n: int, one, exact_int: bool) -> list:
    coeffs = [None] * (n + 1)
    coeffs[n] = one
    am = rows  # A M_1 with M_1 = I
    for k in range(1, n + 1):
        tr = am[0][0]
        for i in range(1, n):
            tr += am[i][i]
        # integer matrices have integer coefficients, so the division is exact
        c = -(tr // k) if exact_int else -tr / k
        coeffs[n - k] = c
        if k == n:
            break
        # A M_{k+1} = A (A M_k + c I)
        mk = [list(r) for r in am]
        for i in range(n):
            mk[i][i] += c
        cols = tuple(zip(*mk))
        am = tuple(tuple(sum(map(mul, r, col)) for col in cols) for r in rows)
    return coeffs


def char_poly(m: Matrix) -> Poly:
    """``det(λI - m)`` by the Faddeev-LeVerrier recurrence (monic).

    Rational input is scaled to an integer matrix ``D m`` first; the
    coefficients are rescaled by powers of ``D`` afterwards.
    """
    n = m.n
    if m.backend == FLOAT:
        return Poly(_faddeev_leverrier(m.rows, n, 1.0, False))
    d = 1
    for r in m.rows:
        for v in r:
            d = gmpy2.lcm(d, v.denominator)
    d = int(d)
    ints = tuple(tuple(int(v.numerator * (d // v.denominator)) for v in r) for r in m.rows)
    cs = _faddeev_leverrier(ints, n, 1, True)
    # p_m(λ) = d^-n p_{dm}(dλ)
    return Poly([mpq(c, d ** (n - j)) for j, c in enumerate(cs)])


def det_lemma_check(a: Matrix, p: Sequence[Scalar], q: Sequence[Scalar]) -> bool:
    """Matrix determinant lemma: ``det(a + p qᵀ) == det(a) + qᵀ adj(a) p``."""
    lhs = det(a + Matrix.outer(p, q, a.backend))
    d = det(a)
    corr = dot(q, adjugate(a) @ tuple(p))
    rhs = d + corr
    if a.backend == RATIONAL:
        return lhs == rhs
    scale = max(1.0, abs(lhs), abs(d), abs(corr))
    return abs(lhs - rhs) <= 1e-9 * scale

"""Exact complex-rational scalars and the linear algebra the cohomology code needs.

Matrices in EXACT mode are numpy object arrays whose entries are :class:`CQ`.
Ranks are computed by fraction-free (Bareiss) elimination over the integers
after realifying: a complex matrix ``B + iC`` has complex rank equal to half
the rational rank of ``[[B, -C], [C, B]]``.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from numbers import Rational

import numpy as np

from .errors import ModeError, ParseError


class CQ:
    """Gaussian rational ``re + i*im`` with :class:`~fractions.Fraction` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, CQ):
            re, im = re.re, re.im + Fraction(im)
        self.re = _frac(re)
        self.im = _frac(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, CQ):
            return other
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            return CQ(other)
        if isinstance(other, bool):
            return CQ(int(other))
        raise ModeError(f"cannot mix exact scalar with {type(other).__name__}")

    def __add__(self, other):
        o = self._coerce(other)
        return CQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return CQ(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return CQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("exact division by zero")
        num = self * o.conjugate()
        return CQ(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __neg__(self):
        return CQ(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self):
        return CQ(self.re, -self.im)

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except ModeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __abs__(self):
        return abs(complex(self))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return f"CQ({self.re})"
        return f"CQ({self.re}, {self.im})"


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise ModeError(f"exact scalar part must be rational, got {type(x).__name__}")


ZERO = CQ(0)
ONE = CQ(1)
I = CQ(0, 1)


def parse_rational(text: str, where: str = "") -> Fraction:
    """Parse ``"num/den"`` or ``"num"``; zero denominators are a parse error."""
    if not isinstance(text, str):
        raise ParseError(f"{where}: expected a rational string, got {text!r}", field=where)
    num, sep, den = text.strip().partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ParseError(f"{where}: malformed rational {text!r}", field=where) from None
    if d == 0:
        raise ParseError(f"{where}: zero denominator in {text!r}", field=where)
    return Fraction(n, d)


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# -- matrices -----------------------------------------------------------------

def zeros(rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=object)
    for idx in np.ndindex(rows, cols):
        out[idx] = ZERO
    return out


def identity(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = ONE
    return out


def asexact(a) -> np.ndarray:
    """Convert a nested sequence of ints/Fractions/CQ to an exact object array."""
    arr = np.array(a, dtype=object)
    if arr.ndim != 2:
        arr = arr.reshape((arr.shape[0], -1)) if arr.size else arr.reshape((0, 0))
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = CQ._coerce(arr[idx])
    return out


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    out = zeros(a.shape[0], b.shape[1])
    if a.shape[1] == 0:
        return out
    for i in range(a.shape[0]):
        row = a[i]
        nz = [k for k in range(a.shape[1]) if row[k]]
        if not nz:
            continue
        for j in range(b.shape[1]):
            acc = ZERO
            for k in nz:
                bkj = b[k, j]
                if bkj:
                    acc = acc + row[k] * bkj
            out[i, j] = acc
    return out


def conj_transpose(a: np.ndarray) -> np.ndarray:
    out = np.empty((a.shape[1], a.shape[0]), dtype=object)
    for i, j in np.ndindex(a.shape):
        out[j, i] = a[i, j].conjugate()
    return out


def to_complex(a: np.ndarray) -> np.ndarray:
    out = np.zeros(a.shape, dtype=complex)
    for idx in np.ndindex(a.shape):
        v = a[idx]
        if v:
            out[idx] = complex(v)
    return out


def max_abs(a: np.ndarray) -> Fraction:
    """Max of ``max(|re|, |im|)`` over entries; exact and tolerance-free."""
    best = Fraction(0)
    for v in a.flat:
        best = max(best, abs(v.re), abs(v.im))
    return best


def is_zero(a: np.ndarray) -> bool:
    return not any(bool(v) for v in a.flat)


def _realify_int_rows(a: np.ndarray) -> list[list[int]]:
    r, c = a.shape
    rows = []
    for i in range(r):
        re = [a[i, j].re for j in range(c)]
        im = [a[i, j].im for j in range(c)]
        # [B, -C] and [C, B]
        for vals in (re + [-x for x in im], im + re):
            if not any(vals):
                continue
            scale = lcm(*(v.denominator for v in vals))
            rows.append([int(v * scale) for v in vals])
    return rows


def _bareiss_rank(rows: list[list[int]]) -> int:
    if not rows:
        return 0
    m, ncols = len(rows), len(rows[0])
    rank, prev = 0, 1
    for col in range(ncols):
        piv = next((i for i in range(rank, m) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        for i in range(rank + 1, m):
            ri = rows[i]
            a = ri[col]
            for j in range(col + 1, ncols):
                ri[j] = (p * ri[j] - a * rows[rank][j]) // prev
            ri[col] = 0
        prev = p
        rank += 1
        if rank == m:
            break
    return rank


def rank(a: np.ndarray) -> int:
    """Exact complex rank via fraction-free elimination."""
    if a.size == 0:
        return 0
    real_rank = _bareiss_rank(_realify_int_rows(a))
    assert real_rank % 2 == 0
    return real_rank // 2


def rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over Q(i) and the pivot columns."""
    m = a.copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i, c]), None)
        if piv is None:
            continue
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        inv = ONE / m[r, c]
        m[r] = [v * inv for v in m[r]]
        for i in range(rows):
            if i != r and m[i, c]:
                f = m[i, c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def nullspace(a: np.ndarray) -> np.ndarray:
    """Basis of the right null space as columns (canonical rref basis)."""
    rows, cols = a.shape
    red, pivots = rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = zeros(cols, len(free))
    for k, f in enumerate(free):
        basis[f, k] = ONE
        for r, p in enumerate(pivots):
            basis[p, k] = -red[r, f]
    return basis


def inverse(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    aug = np.concatenate([a, identity(n)], axis=1)
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return red[:, n:]

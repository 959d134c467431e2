"""Exterior algebra on a complex coframe.

Generators ``0..n-1`` are the (1,0)-forms w1..wn and ``n..2n-1`` their
conjugates wb1..wbn. A monomial is a strictly increasing tuple of generator
indices, so (1,0) factors always precede (0,1) factors. Basis of A^{p,q} is
ordered lexicographically: first by the (1,0) index set, then by the (0,1) set.
A form is a dict ``monomial -> coefficient``.
"""

from __future__ import annotations

from itertools import combinations

from .exact import ZERO


def monomials(n: int, p: int, q: int) -> list[tuple[int, ...]]:
    if not (0 <= p <= n and 0 <= q <= n):
        return []
    return [
        left + right
        for left in combinations(range(n), p)
        for right in combinations(range(n, 2 * n), q)
    ]


def bidegree(n: int, mono: tuple[int, ...]) -> tuple[int, int]:
    p = sum(1 for g in mono if g < n)
    return p, len(mono) - p


def conjugate_generator(n: int, g: int) -> int:
    return g + n if g < n else g - n


def wedge(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """Sign and sorted monomial of ``a ^ b``; None if they share a generator."""
    if set(a) & set(b):
        return None
    seq = list(a + b)
    # parity of the sorting permutation
    inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return (-1 if inversions % 2 else 1), tuple(sorted(seq))


def wedge_forms(x: dict, y: dict) -> dict:
    out: dict = {}
    for ma, ca in x.items():
        for mb, cb in y.items():
            w = wedge(ma, mb)
            if w is None:
                continue
            sign, m = w
            out[m] = out.get(m, ZERO) + ca * cb * sign
    return {m: c for m, c in out.items() if c}


def add_forms(x: dict, y: dict, scale=1) -> dict:
    out = dict(x)
    for m, c in y.items():
        out[m] = out.get(m, ZERO) + c * scale
    return {m: c for m, c in out.items() if c}


def conjugate_form(n: int, form: dict) -> dict:
    """Complex conjugate: swap w <-> wb, conjugate coefficients, re-sort with sign."""
    out: dict = {}
    for mono, c in form.items():
        seq = [conjugate_generator(n, g) for g in mono]
        inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
        m = tuple(sorted(seq))
        sign = -1 if inversions % 2 else 1
        out[m] = out.get(m, ZERO) + c.conjugate() * sign
    return {m: c for m, c in out.items() if c}


def label(n: int, mono: tuple[int, ...]) -> str:
    if not mono:
        return "1"
    return "^".join(f"w{g + 1}" if g < n else f"wb{g - n + 1}" for g in mono)


def extend_derivation(n: int, dgen: dict[int, dict], mono: tuple[int, ...]) -> dict:
    """Apply the graded derivation defined on generators to a monomial (Leibniz)."""
    out: dict = {}
    for pos, g in enumerate(mono):
        sign = -1 if pos % 2 else 1
        before, after = mono[:pos], mono[pos + 1:]
        for m2, c in dgen.get(g, {}).items():
            w1 = wedge(before, m2)
            if w1 is None:
                continue
            s1, mid = w1
            w2 = wedge(mid, after)
            if w2 is None:
                continue
            s2, m = w2
            out[m] = out.get(m, ZERO) + c * (sign * s1 * s2)
    return {m: c for m, c in out.items() if c}

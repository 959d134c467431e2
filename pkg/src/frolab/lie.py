"""Complexes of invariant forms on nilpotent Lie algebras with a complex structure."""

from __future__ import annotations

import numpy as np

from . import exact, forms
from .complex import EXACT, BigradedComplex, validate_complex
from .errors import JacobiViolation, NonIntegrable, ShapeMismatch
from .exact import CQ, ZERO


def _normalize_two_form(raw) -> dict:
    out: dict = {}
    for pair, coeff in dict(raw).items():
        i, j = pair
        w = forms.wedge((i,), (j,))
        if w is None:
            continue
        sign, m = w
        out[m] = out.get(m, ZERO) + CQ._coerce(coeff) * sign
    return {m: c for m, c in out.items() if c}


def from_structure_equations(n: int, equations, name: str | None = None) -> BigradedComplex:
    """Build the complex from d of the (1,0)-coframe.

    ``equations`` maps a generator index ``a`` in ``0..n-1`` to the 2-form
    d(w_{a+1}) as ``{(i, j): coeff}``; indices ``>= n`` denote conjugates
    (``n + a`` is wb_{a+1}). Generators not listed are closed. d of the
    conjugates is the conjugate form.
    """
    dgen: dict[int, dict] = {}
    for a in range(n):
        two = _normalize_two_form(equations.get(a, {}))
        for m in two:
            if any(g < 0 or g >= 2 * n for g in m):
                raise ShapeMismatch(f"generator index out of range in d(w{a + 1})")
            if forms.bidegree(n, m) == (0, 2):
                raise NonIntegrable(
                    f"d(w{a + 1}) has a (0,2) component {forms.label(n, m)}", generator=a)
        dgen[a] = two
        dgen[a + n] = forms.conjugate_form(n, two)

    for g in range(2 * n):
        dd: dict = {}
        for m, c in dgen[g].items():
            dd = forms.add_forms(dd, forms.extend_derivation(n, dgen, m), c)
        if dd:
            raise JacobiViolation(f"d^2 != 0 on generator {forms.label(n, (g,))}", generator=g)

    dims, labels, index = {}, {}, {}
    for p in range(n + 1):
        for q in range(n + 1):
            basis = forms.monomials(n, p, q)
            dims[(p, q)] = len(basis)
            labels[(p, q)] = [forms.label(n, m) for m in basis]
            index[(p, q)] = {m: i for i, m in enumerate(basis)}

    dl, dbar = {}, {}
    for (p, q), basis in ((pq, forms.monomials(n, *pq)) for pq in dims):
        m_del = exact.zeros(dims.get((p + 1, q), 0), len(basis))
        m_dbar = exact.zeros(dims.get((p, q + 1), 0), len(basis))
        for col, mono in enumerate(basis):
            for out, c in forms.extend_derivation(n, dgen, mono).items():
                bd = forms.bidegree(n, out)
                if bd == (p + 1, q):
                    m_del[index[bd][out], col] = c
                elif bd == (p, q + 1):
                    m_dbar[index[bd][out], col] = c
                else:
                    raise NonIntegrable(f"d has a component of bidegree {bd} on A^{{{p},{q}}}")
        dl[(p, q)] = m_del
        dbar[(p, q)] = m_dbar

    C = BigradedComplex(n, dims, dl, dbar, mode=EXACT, labels=labels, name=name, coframe=True)
    validate_complex(C)
    return C


def _structure_tensor(structure, m: int) -> dict:
    """{(i, j): {k: c}} from (i, j, k, c) tuples, completed antisymmetrically."""
    table: dict = {}
    for i, j, k, c in structure:
        if not (0 <= i < m and 0 <= j < m and 0 <= k < m):
            raise ShapeMismatch(f"structure index out of range: {(i, j, k)}")
        c = CQ._coerce(c)
        if i == j:
            if c:
                raise ValueError(f"c^{k}_{{{i}{j}}} must vanish (antisymmetry)")
            continue
        for (a, b), s in (((i, j), c), ((j, i), -c)):
            prev = table.setdefault((a, b), {}).get(k)
            if prev is not None and prev != s:
                raise ValueError(f"structure constants not antisymmetric at {(i, j, k)}")
            table[(a, b)][k] = s
    return table


def from_lie_algebra(structure, J, name: str | None = None) -> BigradedComplex:
    """Complex of invariant forms of a real Lie algebra with complex structure ``J``.

    ``structure`` lists tuples ``(i, j, k, c)`` meaning ``[e_i, e_j] = ... + c e_k``
    (0-based; the antisymmetric partner is implied). ``J`` is a rational
    ``2n x 2n`` matrix acting on the algebra with ``J^2 = -1``. The dual
    coframe satisfies ``de^k = -sum_{i<j} c^k_ij e^i ^ e^j``; (1,0)-forms are
    the covectors ``a`` with ``a J = i a``.
    """
    Jm = exact.asexact(J)
    m = Jm.shape[0]
    if Jm.shape != (m, m) or m % 2:
        raise ShapeMismatch(f"J must be square of even size, got {Jm.shape}")
    n = m // 2
    sq = exact.matmul(Jm, Jm)
    if any(sq[i, j] != (-1 if i == j else 0) for i in range(m) for j in range(m)):
        raise ValueError("J does not square to -1")

    table = _structure_tensor(structure, m)
    de: dict[int, dict] = {k: {} for k in range(m)}
    for (i, j), row in table.items():
        if i < j:
            for k, c in row.items():
                de[k][(i, j)] = de[k].get((i, j), ZERO) - c
    de = {k: {m2: c for m2, c in v.items() if c} for k, v in de.items()}
    for k in range(m):
        dd: dict = {}
        for mono, c in de[k].items():
            dd = forms.add_forms(dd, forms.extend_derivation(n, de, mono), c)
        if dd:
            raise JacobiViolation(f"d^2 e^{k + 1} != 0 (Jacobi identity fails)")

    shifted = exact.conj_transpose(Jm)  # J real, so this is J^T
    for i in range(m):
        shifted[i, i] = shifted[i, i] - exact.I
    kernel = exact.nullspace(shifted)   # columns a^T with J^T a^T = i a^T
    if kernel.shape[1] != n:
        raise ValueError("J has no n-dimensional +i eigenspace")
    P = exact.zeros(m, m)
    for a in range(n):
        for k in range(m):
            P[a, k] = kernel[k, a]
            P[a + n, k] = kernel[k, a].conjugate()
    Q = exact.inverse(P)                # e^k = sum_g Q[k, g] theta^g

    def to_theta(two: dict) -> dict:
        out: dict = {}
        for (i, j), c in two.items():
            for g in range(m):
                if not Q[i, g]:
                    continue
                for h in range(m):
                    if Q[j, h]:
                        out = forms.add_forms(out, _normalize_two_form({(g, h): c * Q[i, g] * Q[j, h]}))
        return out

    equations = {}
    for a in range(n):
        acc: dict = {}
        for k in range(m):
            if P[a, k]:
                acc = forms.add_forms(acc, to_theta(de[k]), P[a, k])
        equations[a] = acc
    return from_structure_equations(n, equations, name=name)


def standard_J(n: int) -> np.ndarray:
    """J e_{2a} = e_{2a+1}, J e_{2a+1} = -e_{2a} (0-based), so w_a = e^{2a} + i e^{2a+1}."""
    J = [[0] * (2 * n) for _ in range(2 * n)]
    for a in range(n):
        J[2 * a + 1][2 * a] = 1
        J[2 * a][2 * a + 1] = -1
    return exact.asexact(J)

"""Finite-dimensional bigraded complexes (A^{p,q}, del, dbar) and their total complex."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exact
from .errors import ModeError, RelationViolation, ShapeMismatch

EXACT = "exact"
FLOAT = "float"
DEFAULT_FLOAT_TOL = 1e-12

RELATIONS = ("del∘del", "dbar∘dbar", "del∘dbar+dbar∘del")


def _zeros(mode: str, rows: int, cols: int) -> np.ndarray:
    return exact.zeros(rows, cols) if mode == EXACT else np.zeros((rows, cols), dtype=complex)


def _mm(mode: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return exact.matmul(a, b) if mode == EXACT else a @ b


def _scale(mode: str, a: np.ndarray, s) -> np.ndarray:
    if mode == EXACT:
        s = exact.CQ._coerce(s)
        out = np.empty(a.shape, dtype=object)
        for idx in np.ndindex(a.shape):
            out[idx] = a[idx] * s
        return out
    return a * s


def _add(mode: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if mode == EXACT:
        out = np.empty(a.shape, dtype=object)
        for idx in np.ndindex(a.shape):
            out[idx] = a[idx] + b[idx]
        return out
    return a + b


def _maxabs(mode: str, a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    if mode == EXACT:
        return float(exact.max_abs(a))
    return float(np.max(np.abs(a)))


def _conj(mode: str, a: np.ndarray) -> np.ndarray:
    if mode == EXACT:
        out = np.empty(a.shape, dtype=object)
        for idx in np.ndindex(a.shape):
            out[idx] = a[idx].conjugate()
        return out
    return a.conj()


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class RelationCheck:
    relation: str
    p: int
    q: int
    residual: float


@dataclass
class ValidationReport:
    mode: str
    tolerance: float
    checks: list[RelationCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.residual <= self.tolerance for c in self.checks)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def failures(self) -> list[RelationCheck]:
        return [c for c in self.checks if c.residual > self.tolerance]


class BigradedComplex:
    """Bigraded spaces A^{p,q}, 0 <= p,q <= n, with del of bidegree (1,0) and dbar of (0,1).

    ``dl[(p, q)]`` maps A^{p,q} -> A^{p+1,q}; ``dbar[(p, q)]`` maps A^{p,q} -> A^{p,q+1}.
    Missing matrices are zero maps; maps out of the top row/column are 0 x dim.
    ``coframe`` is True when the basis is the canonical exterior-algebra basis
    on n (1,0) generators (see :mod:`frolab.forms`).
    """

    def __init__(self, n, dims, dl=None, dbar=None, mode=EXACT, labels=None,
                 name=None, coframe=False):
        if n < 1:
            raise ShapeMismatch(f"complex dimension must be positive, got {n}")
        if mode not in (EXACT, FLOAT):
            raise ModeError(f"unknown scalar mode {mode!r}")
        self.n = n
        self.mode = mode
        self.name = name
        self.coframe = coframe
        self.dims = {(p, q): int(dims.get((p, q), 0)) for p in range(n + 1) for q in range(n + 1)}
        if any(d < 0 for d in self.dims.values()):
            raise ShapeMismatch("negative dimension")
        self.labels = dict(labels or {})
        self._del = self._complete(dl or {}, (1, 0), "del")
        self._dbar = self._complete(dbar or {}, (0, 1), "dbar")
        self.validation: ValidationReport | None = None
        self._cache: dict = {}

    def _complete(self, table, shift, what):
        out = {}
        for (p, q), mat in table.items():
            if (p, q) not in self.dims:
                raise ShapeMismatch(f"{what} given at invalid bidegree ({p},{q})")
        for p in range(self.n + 1):
            for q in range(self.n + 1):
                rows = self.dim(p + shift[0], q + shift[1])
                cols = self.dims[(p, q)]
                mat = table.get((p, q))
                if mat is None:
                    mat = _zeros(self.mode, rows, cols)
                else:
                    mat = np.asarray(mat)
                    if self.mode == EXACT and mat.dtype != object:
                        raise ModeError(f"{what}({p},{q}) is not an exact matrix")
                    if self.mode == FLOAT:
                        if mat.dtype == object:
                            raise ModeError(f"{what}({p},{q}) is exact in a float complex")
                        mat = mat.astype(complex)
                    if mat.shape != (rows, cols):
                        raise ShapeMismatch(
                            f"{what}({p},{q}) has shape {mat.shape}, expected {(rows, cols)}",
                            bidegree=(p, q))
                    mat = mat.copy()
                out[(p, q)] = _freeze(mat)
        return out

    # -- accessors -----------------------------------------------------------

    def dim(self, p: int, q: int) -> int:
        return self.dims.get((p, q), 0)

    def del_(self, p: int, q: int) -> np.ndarray:
        if (p, q) in self._del:
            return self._del[(p, q)]
        return _zeros(self.mode, self.dim(p + 1, q), self.dim(p, q))

    def dbar(self, p: int, q: int) -> np.ndarray:
        if (p, q) in self._dbar:
            return self._dbar[(p, q)]
        return _zeros(self.mode, self.dim(p, q + 1), self.dim(p, q))

    def ddbar(self, p: int, q: int) -> np.ndarray:
        """del∘dbar : A^{p,q} -> A^{p+1,q+1}."""
        key = ("ddbar", p, q)
        if key not in self._cache:
            self._cache[key] = _mm(self.mode, self.del_(p, q + 1), self.dbar(p, q))
        return self._cache[key]

    @property
    def sealed(self) -> bool:
        return self.validation is not None and self.validation.passed

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def bidegrees(self):
        return [(p, q) for p in range(self.n + 1) for q in range(self.n + 1)]

    def matrices(self, which: str) -> dict:
        return dict(self._del if which == "del" else self._dbar)

    def scale(self) -> float:
        return max([_maxabs(self.mode, m) for m in self._del.values()]
                   + [_maxabs(self.mode, m) for m in self._dbar.values()] + [0.0])

    # -- derived complexes ---------------------------------------------------

    def to_float(self) -> "BigradedComplex":
        if self.mode == FLOAT:
            return self
        key = "float"
        if key not in self._cache:
            c = BigradedComplex(
                self.n, self.dims,
                {k: exact.to_complex(v) for k, v in self._del.items()},
                {k: exact.to_complex(v) for k, v in self._dbar.items()},
                mode=FLOAT, labels=self.labels, name=self.name, coframe=self.coframe)
            c.validation = self.validation
            self._cache[key] = c
        return self._cache[key]

    def conjugate_complex(self) -> "BigradedComplex":
        """A'^{p,q} = A^{q,p} with del' = conj(dbar), dbar' = conj(del)."""
        dims = {(p, q): self.dims[(q, p)] for (p, q) in self.dims}
        dl = {(p, q): _conj(self.mode, self._dbar[(q, p)]) for (p, q) in self.dims}
        db = {(p, q): _conj(self.mode, self._del[(q, p)]) for (p, q) in self.dims}
        labels = {(p, q): self.labels[(q, p)] for (p, q) in self.dims if (q, p) in self.labels}
        return BigradedComplex(self.n, dims, dl, db, mode=self.mode, labels=labels,
                               name=f"conj({self.name})" if self.name else None)

    def __repr__(self):
        return f"BigradedComplex(name={self.name!r}, n={self.n}, mode={self.mode}, total_dim={self.total_dim})"


def direct_sum(parts: list[BigradedComplex], name=None) -> BigradedComplex:
    """Block-diagonal direct sum of complexes with equal n and mode."""
    if not parts:
        raise ValueError("empty direct sum")
    n, mode = parts[0].n, parts[0].mode
    if any(c.n != n or c.mode != mode for c in parts):
        raise ModeError("direct sum needs equal n and scalar mode")
    dims = {pq: sum(c.dims[pq] for c in parts) for pq in parts[0].dims}

    def block(getter, shift):
        out = {}
        for (p, q) in dims:
            rows = dims.get((p + shift[0], q + shift[1]), 0)
            mat = _zeros(mode, rows, dims[(p, q)])
            r0 = c0 = 0
            for c in parts:
                m = getter(c, p, q)
                mat[r0:r0 + m.shape[0], c0:c0 + m.shape[1]] = m
                r0 += m.shape[0]
                c0 += m.shape[1]
            out[(p, q)] = mat
        return out

    return BigradedComplex(n, dims, block(lambda c, p, q: c.del_(p, q), (1, 0)),
                           block(lambda c, p, q: c.dbar(p, q), (0, 1)), mode=mode, name=name)


def validate_complex(C: BigradedComplex, tolerance: float = DEFAULT_FLOAT_TOL) -> ValidationReport:
    """Check del^2 = dbar^2 = del dbar + dbar del = 0 on every bidegree; seal on success.

    EXACT complexes are checked exactly. FLOAT complexes pass when every residual
    is at most ``tolerance * max(s, s^2)`` with ``s`` the largest matrix entry.
    """
    if C.mode == EXACT:
        tol = 0.0
    else:
        s = C.scale()
        tol = tolerance * max(s, s * s)
    report = ValidationReport(mode=C.mode, tolerance=tol)
    mode = C.mode
    for p, q in C.bidegrees():
        dd = _mm(mode, C.del_(p + 1, q), C.del_(p, q))
        bb = _mm(mode, C.dbar(p, q + 1), C.dbar(p, q))
        mixed = _add(mode, _mm(mode, C.del_(p, q + 1), C.dbar(p, q)),
                     _mm(mode, C.dbar(p + 1, q), C.del_(p, q)))
        for rel, mat in zip(RELATIONS, (dd, bb, mixed)):
            report.checks.append(RelationCheck(rel, p, q, _maxabs(mode, mat)))
    if not report.passed:
        bad = report.failures()[0]
        raise RelationViolation(
            f"{bad.relation} fails at bidegree ({bad.p},{bad.q}) with residual {bad.residual:g}",
            bidegree=(bad.p, bad.q), relation=bad.relation, report=report)
    C.validation = report
    return report


@dataclass
class TotalComplexView:
    """Total degree spaces ⊕_{p+q=k} A^{p,q} and block differentials d^k = del + dbar."""

    complex: BigradedComplex
    slots: dict[int, list[tuple[int, int, int, int]]]   # k -> [(p, q, offset, dim)]
    dl: dict[int, np.ndarray]
    dbar: dict[int, np.ndarray]
    d: dict[int, np.ndarray]

    @property
    def degrees(self) -> range:
        return range(2 * self.complex.n + 1)

    def dim(self, k: int) -> int:
        return sum(s[3] for s in self.slots.get(k, []))

    def slot(self, k: int, p: int, q: int) -> slice:
        for pp, qq, off, dim in self.slots[k]:
            if (pp, qq) == (p, q):
                return slice(off, off + dim)
        raise KeyError((k, p, q))

    def d_h(self, k: int, h):
        """dbar + h del on degree k, in the complex's scalar mode."""
        mode = self.complex.mode
        return _add(mode, self.dbar[k], _scale(mode, self.dl[k], h))


def degree_slots(C: BigradedComplex, k: int) -> list[tuple[int, int, int, int]]:
    out, off = [], 0
    for p in range(max(0, k - C.n), min(k, C.n) + 1):
        q = k - p
        dim = C.dim(p, q)
        out.append((p, q, off, dim))
        off += dim
    return out


def total_view(C: BigradedComplex) -> TotalComplexView:
    key = "total_view"
    if key in C._cache:
        return C._cache[key]
    mode = C.mode
    top = 2 * C.n
    slots = {k: degree_slots(C, k) for k in range(-1, top + 2)}
    dl, db, d = {}, {}, {}
    for k in range(-1, top + 1):
        src, tgt = slots[k], slots[k + 1]
        rows = sum(s[3] for s in tgt)
        cols = sum(s[3] for s in src)
        m_del = _zeros(mode, rows, cols)
        m_dbar = _zeros(mode, rows, cols)
        toff = {(p, q): (off, dim) for p, q, off, dim in tgt}
        for p, q, off, dim in src:
            if (p + 1, q) in toff:
                ro, rd = toff[(p + 1, q)]
                m_del[ro:ro + rd, off:off + dim] = C.del_(p, q)
            if (p, q + 1) in toff:
                ro, rd = toff[(p, q + 1)]
                m_dbar[ro:ro + rd, off:off + dim] = C.dbar(p, q)
        dl[k], db[k] = _freeze(m_del), _freeze(m_dbar)
        d[k] = _freeze(_add(mode, m_del, m_dbar))
    view = TotalComplexView(C, slots, dl, db, d)
    C._cache[key] = view
    return view


def check_total(view: TotalComplexView, tolerance: float = DEFAULT_FLOAT_TOL) -> float:
    """Largest |d^{k+1} d^k| entry; exact zero expected in EXACT mode."""
    mode = view.complex.mode
    worst = 0.0
    for k in range(2 * view.complex.n):
        worst = max(worst, _maxabs(mode, _mm(mode, view.d[k + 1], view.d[k])))
    return worst

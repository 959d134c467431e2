"""Metrics, adjoints, the D_h family, harmonic forms and cohomology dimensions.

All spectral objects live in orthonormalized coordinates: with the Cholesky
factorization G = L L^† of each bidegree Gram matrix, a form x is represented
by y = L^† x, and a map A: V -> W by L_W^† A L_V^{-†}. In these coordinates
the L^2 adjoint is the conjugate transpose.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import exact
from .complex import EXACT, BigradedComplex, total_view
from .errors import NotPositiveDefinite, ShapeMismatch, TolAmbiguous

KERNEL_RTOL = 1e-9          # kernel cut: eigenvalues <= KERNEL_RTOL * lambda_max
FLOAT_RANK_RTOL = 1e-9      # numeric rank for FLOAT-mode complexes
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True)
class HermitianMetric:
    """Gram matrix per bidegree; ``grams[(p, q)]`` is Hermitian positive definite."""

    grams: dict
    seed: int | None = None

    @classmethod
    def identity(cls, C: BigradedComplex) -> "HermitianMetric":
        return cls({pq: np.eye(d, dtype=complex) for pq, d in C.dims.items()})

    def gram(self, p: int, q: int) -> np.ndarray:
        return self.grams[(p, q)]

    @property
    def is_identity(self) -> bool:
        return all(np.array_equal(G, np.eye(G.shape[0])) for G in self.grams.values())


def cholesky(G: np.ndarray) -> np.ndarray:
    G = np.asarray(G, dtype=complex)
    if G.shape[0] != G.shape[1]:
        raise ShapeMismatch(f"Gram matrix must be square, got {G.shape}")
    if G.size and np.max(np.abs(G - G.conj().T)) > HERMITIAN_TOL * max(1.0, np.max(np.abs(G))):
        raise NotPositiveDefinite("Gram matrix is not Hermitian")
    try:
        return np.linalg.cholesky(G) if G.size else G.copy()
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("Cholesky factorization failed") from None


def adjoint(A, G_src, G_tgt) -> np.ndarray:
    """A* = G_src^{-1} A^† G_tgt, so that <Ax, y>_tgt = <x, A* y>_src."""
    A = np.asarray(A, dtype=complex)
    if G_src.shape[0] != A.shape[1] or G_tgt.shape[0] != A.shape[0]:
        raise ShapeMismatch(f"adjoint: {A.shape} against Grams {G_src.shape}, {G_tgt.shape}")
    L = cholesky(G_src)
    cholesky(G_tgt)
    if L.size == 0:
        return np.zeros((A.shape[1], A.shape[0]), dtype=complex)
    return sla.cho_solve((L, True), A.conj().T @ G_tgt)


def inner(x, y, G) -> complex:
    """<x, y>_G = y^† G x."""
    return complex(np.vdot(y, G @ x))


class _Frame:
    """Cholesky factors per bidegree and the block coordinate changes per degree."""

    def __init__(self, C: BigradedComplex, g: HermitianMetric | None):
        self.C = C
        self.g = g or HermitianMetric.identity(C)
        for pq, d in C.dims.items():
            if self.g.gram(*pq).shape != (d, d):
                raise ShapeMismatch(f"metric block {pq} has shape {self.g.gram(*pq).shape}, expected {(d, d)}")
        self.up = {}     # L^†
        self.down = {}   # L^{-†}
        for pq in C.dims:
            L = cholesky(self.g.gram(*pq))
            self.up[pq] = L.conj().T
            self.down[pq] = sla.solve_triangular(L.conj().T, np.eye(L.shape[0]), lower=False) if L.size else L
        self.view = total_view(C.to_float())

    def block(self, k: int, table: dict) -> np.ndarray:
        slots = self.view.slots[k]
        size = sum(s[3] for s in slots)
        out = np.zeros((size, size), dtype=complex)
        for p, q, off, dim in slots:
            out[off:off + dim, off:off + dim] = table[(p, q)]
        return out

    def ortho(self, k: int, mat: np.ndarray) -> np.ndarray:
        """Degree-k -> degree-(k+1) map in orthonormal coordinates."""
        return self.block(k + 1, self.up) @ mat @ self.block(k, self.down)

    def ortho_bidegree(self, src, tgt, mat: np.ndarray) -> np.ndarray:
        return self.up[tgt] @ mat @ self.down[src]


def _frame(C, g) -> _Frame:
    return _Frame(C, g)


def _hermitize(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.conj().T)


@dataclass
class DhOperator:
    """D_h = dbar + dbar* + h del + h del* and its degree blocks, orthonormal coordinates.

    ``d_h[k]`` maps degree k to k+1; ``laplacian[k]`` is (D_h^2) restricted to
    degree k; ``D`` is the full operator on the total space, degrees stacked
    in order with offsets ``offsets[k]``.
    """

    h: float
    complex: BigradedComplex
    metric: HermitianMetric
    dbar: dict
    dl: dict
    d_h: dict
    laplacian: dict
    D: np.ndarray
    offsets: dict
    down: dict = field(repr=False)
    checks: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.complex.n

    def degree_slice(self, k: int) -> slice:
        start = self.offsets[k]
        return slice(start, start + self.laplacian[k].shape[0])

    def to_original(self, k: int, vectors: np.ndarray) -> np.ndarray:
        """Map orthonormal coordinates back to the declared basis."""
        return self.down[k] @ vectors


def build_dh(C: BigradedComplex, g: HermitianMetric | None = None, h: float = 1.0) -> DhOperator:
    if not 0.0 <= float(h) <= 1.0:
        raise ValueError(f"h must lie in [0, 1], got {h}")
    h = float(h)
    fr = _frame(C, g)
    view = fr.view
    top = 2 * C.n
    dbar = {k: fr.ortho(k, view.dbar[k]) for k in range(-1, top + 1)}
    dl = {k: fr.ortho(k, view.dl[k]) for k in range(-1, top + 1)}
    d_h = {k: dbar[k] + h * dl[k] for k in range(-1, top + 1)}
    lap = {}
    for k in range(top + 1):
        raw = d_h[k].conj().T @ d_h[k] + d_h[k - 1] @ d_h[k - 1].conj().T
        lap[k] = raw

    offsets, off = {}, 0
    for k in range(top + 1):
        offsets[k] = off
        off += view.dim(k)
    total = off
    dbar_t = np.zeros((total, total), dtype=complex)
    del_t = np.zeros((total, total), dtype=complex)
    for k in range(top):
        r, c = offsets[k + 1], offsets[k]
        dbar_t[r:r + view.dim(k + 1), c:c + view.dim(k)] = dbar[k]
        del_t[r:r + view.dim(k + 1), c:c + view.dim(k)] = dl[k]
    D = dbar_t + dbar_t.conj().T + h * (del_t + del_t.conj().T)
    dh_t = dbar_t + h * del_t
    D2 = D @ D
    scale = max(1.0, float(np.max(np.abs(D2))) if D2.size else 1.0)

    checks = {
        "assembly": float(np.max(np.abs(D - (dh_t + dh_t.conj().T)))) if total else 0.0,
        "hermitian": max((float(np.max(np.abs(L - L.conj().T))) for L in lap.values() if L.size), default=0.0),
    }
    mixed = 0.0
    block_err = 0.0
    for k in range(top + 1):
        sk = slice(offsets[k], offsets[k] + view.dim(k))
        for j in range(top + 1):
            if j == k:
                continue
            sj = slice(offsets[j], offsets[j] + view.dim(j))
            blk = D2[sj, sk]
            if blk.size:
                mixed = max(mixed, float(np.max(np.abs(blk))))
        if view.dim(k):
            block_err = max(block_err, float(np.max(np.abs(D2[sk, sk] - lap[k]))))
    checks["mixed_degree"] = mixed
    checks["square_vs_blocks"] = block_err
    checks["scale"] = scale
    for name in ("assembly", "hermitian", "mixed_degree", "square_vs_blocks"):
        if checks[name] > HERMITIAN_TOL * scale:
            raise AssertionError(f"D_h invariant {name} violated: {checks[name]:g}")
    lap = {k: _hermitize(L) for k, L in lap.items()}
    down = {k: fr.block(k, fr.down) for k in range(top + 1)}
    return DhOperator(h, C, fr.g, dbar, dl, d_h, lap, D, offsets, down, checks)


# -- kernels -----------------------------------------------------------------

def kernel_tolerance(eigenvalues: np.ndarray) -> float:
    lam_max = float(np.max(np.abs(eigenvalues))) if len(eigenvalues) else 0.0
    return KERNEL_RTOL * lam_max


def audit_gap(eigenvalues: np.ndarray, tol: float) -> None:
    """Raise TolAmbiguous if an eigenvalue sits in [tol/10, 10 tol]."""
    if tol <= 0:
        return
    near = [float(v) for v in eigenvalues if tol / 10 <= v <= 10 * tol]
    if near:
        raise TolAmbiguous(f"eigenvalue(s) {near} within a decade of the kernel cut {tol:g}", tol=tol)


def kernel_basis(L: np.ndarray, tol: float | None = None, audit: bool = True) -> tuple[np.ndarray, float]:
    """Orthonormal basis (columns) of the numerical kernel of Hermitian PSD ``L``."""
    if L.shape[0] == 0:
        return np.zeros((0, 0), dtype=complex), 0.0
    w, U = np.linalg.eigh(_hermitize(L))
    if tol is None:
        tol = kernel_tolerance(w)
    if audit:
        audit_gap(w, tol)
    return U[:, w <= tol], tol


def harmonic_basis(Dh: DhOperator, k: int, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis of ker Δ_h^k, verified against d_h and d_h^†."""
    B, tol = kernel_basis(Dh.laplacian[k], tol)
    if B.shape[1]:
        bound = np.sqrt(tol) * (1 + 1e-6) + 1e-12
        fwd = np.linalg.norm(Dh.d_h[k] @ B, axis=0)
        back = np.linalg.norm(Dh.d_h[k - 1].conj().T @ B, axis=0)
        if np.any(fwd > bound) or np.any(back > bound):
            raise AssertionError("harmonic vector not annihilated by d_h and d_h^*")
    return B


def kernel_dim(Dh: DhOperator, k: int, tol: float | None = None) -> int:
    return harmonic_basis(Dh, k, tol).shape[1]


# -- exact cohomology --------------------------------------------------------

def _rank(C: BigradedComplex, key, mat: np.ndarray) -> int:
    ck = ("rank",) + key
    if ck not in C._cache:
        if mat.size == 0:
            r = 0
        elif C.mode == EXACT:
            r = exact.rank(mat)
        else:
            s = np.linalg.svd(mat, compute_uv=False)
            r = int(np.sum(s > FLOAT_RANK_RTOL * max(1.0, C.scale())))
        C._cache[ck] = r
    return C._cache[ck]


def _stack(C, mats, axis):
    mats = [m for m in mats]
    if C.mode == EXACT:
        return np.concatenate(mats, axis=axis) if mats else exact.zeros(0, 0)
    return np.concatenate(mats, axis=axis)


def betti(C: BigradedComplex, k: int) -> int:
    if not 0 <= k <= 2 * C.n:
        return 0
    view = total_view(C)
    return view.dim(k) - _rank(C, ("d", k), view.d[k]) - _rank(C, ("d", k - 1), view.d[k - 1])


def hodge_dbar(C: BigradedComplex, p: int, q: int) -> int:
    if C.dim(p, q) == 0:
        return 0
    return C.dim(p, q) - _rank(C, ("dbar", p, q), C.dbar(p, q)) - _rank(C, ("dbar", p, q - 1), C.dbar(p, q - 1))


def hodge_del(C: BigradedComplex, p: int, q: int) -> int:
    if C.dim(p, q) == 0:
        return 0
    return C.dim(p, q) - _rank(C, ("del", p, q), C.del_(p, q)) - _rank(C, ("del", p - 1, q), C.del_(p - 1, q))


def bott_chern(C: BigradedComplex, p: int, q: int) -> int:
    """dim (ker del ∩ ker dbar) / im del dbar on A^{p,q}."""
    if C.dim(p, q) == 0:
        return 0
    both = _stack(C, [C.del_(p, q), C.dbar(p, q)], axis=0)
    closed = C.dim(p, q) - _rank(C, ("del|dbar", p, q), both)
    return closed - _rank(C, ("ddbar", p - 1, q - 1), C.ddbar(p - 1, q - 1))


def aeppli(C: BigradedComplex, p: int, q: int) -> int:
    """dim ker del dbar / (im del + im dbar) on A^{p,q}."""
    if C.dim(p, q) == 0:
        return 0
    closed = C.dim(p, q) - _rank(C, ("ddbar", p, q), C.ddbar(p, q))
    images = _stack(C, [C.del_(p - 1, q), C.dbar(p, q - 1)], axis=1)
    return closed - _rank(C, ("del+dbar", p, q), images)


def hodge_table(C: BigradedComplex) -> dict:
    """{(p, q): {"dbar", "del", "bc", "a"}} for every bidegree."""
    return {
        (p, q): {
            "dbar": hodge_dbar(C, p, q),
            "del": hodge_del(C, p, q),
            "bc": bott_chern(C, p, q),
            "a": aeppli(C, p, q),
        }
        for p, q in C.bidegrees()
    }


# -- Hodge decompositions ----------------------------------------------------

@dataclass
class HodgeDecomposition:
    """Orthogonal splitting ker Δ ⊕ im A_prev ⊕ im A_next^† (orthonormal coordinates)."""

    operator: str
    where: object
    P_ker: np.ndarray
    P_im_prev: np.ndarray
    P_im_adj: np.ndarray
    harmonic: np.ndarray
    tol: float
    residuals: dict

    @property
    def kernel_dim(self) -> int:
        return self.harmonic.shape[1]


def _range_projector(A: np.ndarray, cut: float, left: bool) -> np.ndarray:
    size = A.shape[0] if left else A.shape[1]
    if A.size == 0:
        return np.zeros((size, size), dtype=complex)
    U, s, Vh = np.linalg.svd(A)
    r = int(np.sum(s * s > cut))
    V = U[:, :r] if left else Vh[:r].conj().T
    return V @ V.conj().T


def hodge_decomposition(C: BigradedComplex, g: HermitianMetric | None, operator: str, where,
                        h: float | None = None, tol: float | None = None) -> HodgeDecomposition:
    """L^2-orthogonal decomposition for d (degree k), d_h (degree k) or dbar (bidegree (p,q))."""
    fr = _frame(C, g)
    view = fr.view
    if operator in ("d", "dh"):
        k = int(where)
        hh = 1.0 if operator == "d" else float(h)
        if operator == "dh" and h is None:
            raise ValueError("operator 'dh' needs h")
        prev = fr.ortho(k - 1, view.dbar[k - 1] + hh * view.dl[k - 1])
        nxt = fr.ortho(k, view.dbar[k] + hh * view.dl[k])
    elif operator == "dbar":
        p, q = where
        fc = C.to_float()
        prev = fr.ortho_bidegree((p, q - 1), (p, q), fc.dbar(p, q - 1)) if q >= 1 else np.zeros((C.dim(p, q), 0), complex)
        nxt = fr.ortho_bidegree((p, q), (p, q + 1), fc.dbar(p, q)) if q < C.n else np.zeros((0, C.dim(p, q)), complex)
    else:
        raise ValueError(f"unknown operator {operator!r}")
    L = nxt.conj().T @ nxt + prev @ prev.conj().T
    H, tol = kernel_basis(L, tol)
    size = L.shape[0]
    P_ker = H @ H.conj().T if size else np.zeros((0, 0), complex)
    P_prev = _range_projector(prev, tol, left=True)
    P_adj = _range_projector(nxt, tol, left=False)
    eye = np.eye(size)

    def mx(a):
        return float(np.max(np.abs(a))) if a.size else 0.0

    residuals = {
        "sum": mx(P_ker + P_prev + P_adj - eye),
        "ker_prev": mx(P_ker @ P_prev),
        "ker_adj": mx(P_ker @ P_adj),
        "prev_adj": mx(P_prev @ P_adj),
        "kernel": mx(L @ P_ker),
    }
    bad = {k: v for k, v in residuals.items() if k != "kernel" and v > 1e-10}
    if bad or residuals["kernel"] > max(tol, 1e-10) * 10:
        raise AssertionError(f"Hodge decomposition invariants violated: {residuals}")
    return HodgeDecomposition(operator, where, P_ker, P_prev, P_adj, H, tol, residuals)

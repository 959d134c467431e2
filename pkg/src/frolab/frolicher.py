"""Frölicher-type inequalities, the ∂∂̄-lemma detector, θ_h and the explicit injection Q."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from . import exact
from .complex import EXACT, BigradedComplex, total_view
from .errors import HZero, ModeError
from .exact import CQ
from .hodge import (HermitianMetric, betti, bott_chern, build_dh, harmonic_basis, hodge_table,
                    kernel_basis)

INJECTION_TOL = 1e-8


def _require_exact(C: BigradedComplex, what: str) -> None:
    if C.mode != EXACT:
        raise ModeError(f"{what} needs an EXACT complex, got {C.mode}")


def _rk(C: BigradedComplex, mat: np.ndarray) -> int:
    if mat.size == 0:
        return 0
    if C.mode == EXACT:
        return exact.rank(mat)
    s = np.linalg.svd(np.asarray(mat, dtype=complex), compute_uv=False)
    return int(np.sum(s > 1e-9 * max(1.0, C.scale())))


def render(x):
    """Fractions with denominator 1 as int, otherwise as the string "p/q"."""
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x


# -- θ_h -----------------------------------------------------------------------

def theta_matrix(C: BigradedComplex, k: int, h):
    """Matrix of θ_h on degree k: the (p,q) slot is scaled by h^p.

    Exact (object array) when C is EXACT and h is an int or Fraction.
    """
    if h == 0:
        raise HZero("θ_h is not invertible at h = 0")
    slots = total_view(C).slots[k]
    dim = sum(s[3] for s in slots)
    if C.mode == EXACT and isinstance(h, (int, Fraction)):
        T = exact.zeros(dim, dim)
        for p, _, off, d in slots:
            s = CQ(Fraction(h) ** p)
            for i in range(off, off + d):
                T[i, i] = s
        return T
    diag = np.zeros(dim)
    for p, _, off, d in slots:
        diag[off:off + d] = float(h) ** p
    return np.diag(diag).astype(complex)


def theta_h(C: BigradedComplex, h, form, k: int):
    """Apply θ_h to a degree-k vector laid out by bidegree slots."""
    T = theta_matrix(C, k, h)
    v = np.asarray(form, dtype=T.dtype)
    if v.shape[0] != T.shape[0]:
        raise ValueError(f"degree-{k} vector must have length {T.shape[0]}")
    if T.dtype == object:
        return exact.matmul(T, v.reshape(-1, 1)).reshape(-1)
    return T @ v


def intertwining_residual(C: BigradedComplex, k: int, h):
    """Largest entry of d_h θ_h - θ_h d on degree k (exact zero for EXACT C and rational h)."""
    view = total_view(C)
    T0, T1 = theta_matrix(C, k, h), theta_matrix(C, k + 1, h)
    if T0.dtype == object:
        dh = view.d_h(k, CQ(Fraction(h)))
        diff = exact.matmul(dh, T0) - exact.matmul(T1, view.d[k])
        return exact.max_abs(diff) if diff.size else Fraction(0)
    Cf = C.to_float()
    vf = total_view(Cf)
    diff = vf.d_h(k, float(h)) @ T0 - T1 @ vf.d[k]
    return float(np.max(np.abs(diff))) if diff.size else 0.0


# -- explicit injection --------------------------------------------------------

@dataclass
class InjectionWitness:
    """Q_{g,h}: Δ_1-harmonic basis of degree k -> ⊕_{p+q=k} Δ_∂̄-harmonic bases.

    ``sigma_min`` is scale-free: the smallest singular value of the projection
    onto ker Δ_0 restricted to ker Δ_h, which is the image of θ_h-transported
    de Rham classes. ``raw_sigma_min`` is that of the matrix Q itself, which
    carries the h^p factors of θ_h.
    """

    h: float
    k: int
    matrix: np.ndarray
    sigma_min: float
    rank: int
    betti: int
    dolbeault_dims: dict
    raw_sigma_min: float
    metric_seed: int | None = None
    tolerance: float = INJECTION_TOL

    @property
    def injective(self) -> bool:
        return self.rank == self.betti

    @property
    def dolbeault_total(self) -> int:
        return sum(self.dolbeault_dims.values())


def _bidegree_harmonic(D0, k: int) -> tuple[np.ndarray, dict]:
    """Block-diagonal orthonormal basis of ker Δ_0^k, one block per bidegree slot."""
    view = total_view(D0.complex)
    L = D0.laplacian[k]
    cols, dims = [], {}
    for p, q, off, d in view.slots[k]:
        if d == 0:
            dims[(p, q)] = 0
            continue
        B, _ = kernel_basis(L[off:off + d, off:off + d])
        full = np.zeros((L.shape[0], B.shape[1]), dtype=complex)
        full[off:off + d] = B
        cols.append(full)
        dims[(p, q)] = B.shape[1]
    V = np.hstack(cols) if cols else np.zeros((L.shape[0], 0), dtype=complex)
    return V, dims


def q_injection(C: BigradedComplex, g: HermitianMetric | None, h: float, k: int,
                tol: float = INJECTION_TOL) -> InjectionWitness:
    if not 0.0 < float(h) <= 1.0:
        if h == 0:
            raise HZero("q_injection needs h > 0")
        raise ValueError(f"h must lie in (0, 1], got {h}")
    D1 = build_dh(C, g, 1.0)
    Dh = build_dh(C, g, float(h))
    D0 = build_dh(C, g, 0.0)
    H1 = harmonic_basis(D1, k)
    Hh = harmonic_basis(Dh, k)
    V, dims = _bidegree_harmonic(D0, k)
    # θ_h commutes with the Cholesky change of basis (metric is block diagonal by bidegree)
    T = theta_matrix(C.to_float(), k, float(h))
    Q = V.conj().T @ (Hh @ (Hh.conj().T @ (T @ H1)))
    b = H1.shape[1]
    raw = np.linalg.svd(Q, compute_uv=False) if Q.size else np.zeros(0)
    raw_min = float(raw[-1]) if b and len(raw) >= b else (0.0 if b else float("inf"))
    if b == 0:
        smin, rank = float("inf"), 0
    else:
        s = np.linalg.svd(V.conj().T @ Hh, compute_uv=False) if V.shape[1] else np.zeros(0)
        smin = float(s[-1]) if len(s) >= b else 0.0
        rank = int(np.sum(s > tol))
    seed = getattr(g, "seed", None) if g is not None else None
    return InjectionWitness(float(h), k, Q, smin, rank, b, dims, raw_min, seed, tol)


# -- inequality report ---------------------------------------------------------

@dataclass
class DegreeRow:
    k: int
    b: Fraction
    sum_dbar: Fraction
    frolicher: str
    slack: Fraction
    two_b: Fraction
    sum_a_bc: Fraction
    ddbar_equal: bool


@dataclass
class BidegreeRow:
    p: int
    q: int
    dbar: Fraction
    dl: Fraction
    bc: Fraction
    a: Fraction
    angella_tomassini: str


@dataclass
class KodairaSpencer:
    """Dimensions in 0 -> K -> H^{1,1}_BC -> H^2_dR -> H^{2,0}_∂ ⊕ H^{0,2}_∂̄ -> coker -> 0.

    K is the space of d-exact Bott-Chern (1,1)-classes.
    """

    b2: Fraction
    h02_dbar: Fraction
    h20_del: Fraction
    h11_bc: Fraction
    kernel: Fraction
    rank_u: Fraction
    coker: Fraction
    alternating_sum: Fraction
    bound: Fraction
    verdict: str
    equality: bool


@dataclass
class InequalityReport:
    model: str | None
    n: int
    degrees: list[DegreeRow]
    bidegrees: list[BidegreeRow]
    ddbar_lemma: str
    first_strict_k: int | None
    euler_residual: Fraction
    kodaira_spencer: KodairaSpencer
    gamma_order: int = 1
    notes: list[str] = field(default_factory=list)

    @property
    def frolicher_ok(self) -> bool:
        return all(r.frolicher == "PASS" for r in self.degrees)

    @property
    def angella_tomassini_ok(self) -> bool:
        return all(r.angella_tomassini == "PASS" for r in self.bidegrees)

    @property
    def ddbar_inequality_ok(self) -> bool:
        return all(r.two_b <= r.sum_a_bc for r in self.degrees)

    @property
    def verdict(self) -> str:
        ks = self.kodaira_spencer
        ok = (self.frolicher_ok and self.angella_tomassini_ok and self.ddbar_inequality_ok
              and self.euler_residual == 0 and ks.verdict == "PASS" and ks.alternating_sum == 0)
        return "PASS" if ok else "FAILED"

    def to_dict(self) -> dict:
        ks = self.kodaira_spencer
        return {
            "model": self.model,
            "n": self.n,
            "gammaOrder": self.gamma_order,
            "verdict": self.verdict,
            "degrees": [
                {"k": r.k, "b": render(r.b), "sum_h_dbar": render(r.sum_dbar), "frolicher": r.frolicher,
                 "slack": render(r.slack), "two_b": render(r.two_b), "sum_h_a_plus_h_bc": render(r.sum_a_bc),
                 "ddbar_equality": r.ddbar_equal}
                for r in self.degrees
            ],
            "bidegrees": [
                {"p": r.p, "q": r.q, "h_dbar": render(r.dbar), "h_del": render(r.dl), "h_bc": render(r.bc),
                 "h_a": render(r.a), "angella_tomassini": r.angella_tomassini}
                for r in self.bidegrees
            ],
            "ddbar_lemma": self.ddbar_lemma,
            "first_strict_k": self.first_strict_k,
            "euler_residual": render(self.euler_residual),
            "kodaira_spencer": {
                "b2": render(ks.b2), "h02_dbar": render(ks.h02_dbar), "h20_del": render(ks.h20_del),
                "h11_bc": render(ks.h11_bc), "exact_bc_classes": render(ks.kernel),
                "rank_u": render(ks.rank_u), "coker": render(ks.coker),
                "alternating_sum": render(ks.alternating_sum), "bound": render(ks.bound),
                "verdict": ks.verdict, "equality": ks.equality,
            },
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["model", "gammaOrder", "k", "b", "sum_h_dbar", "frolicher", "slack", "two_b",
                    "sum_h_a_plus_h_bc", "ddbar_equality"])
        for r in self.degrees:
            w.writerow([self.model, self.gamma_order, r.k, render(r.b), render(r.sum_dbar), r.frolicher,
                        render(r.slack), render(r.two_b), render(r.sum_a_bc), r.ddbar_equal])
        return buf.getvalue()


def build_report(name, n: int, b: dict, table: dict, ks: KodairaSpencer, gamma_order: int = 1,
                 notes=None) -> InequalityReport:
    """Assemble verdicts from recorded dimensions only (exact rationals)."""
    degrees = []
    first_strict = None
    for k in range(2 * n + 1):
        cells = [table[(p, k - p)] for p in range(max(0, k - n), min(k, n) + 1)]
        s_dbar = sum((Fraction(c["dbar"]) for c in cells), Fraction(0))
        s_abc = sum((Fraction(c["a"]) + Fraction(c["bc"]) for c in cells), Fraction(0))
        bk = Fraction(b[k])
        equal = 2 * bk == s_abc
        if not equal and first_strict is None:
            first_strict = k
        degrees.append(DegreeRow(k, bk, s_dbar, "PASS" if bk <= s_dbar else "FAILED", s_dbar - bk,
                                 2 * bk, s_abc, equal))
    bidegrees = []
    for (p, q) in sorted(table):
        c = {key: Fraction(v) for key, v in table[(p, q)].items()}
        ok = c["dbar"] + c["del"] <= c["a"] + c["bc"]
        bidegrees.append(BidegreeRow(p, q, c["dbar"], c["del"], c["bc"], c["a"], "PASS" if ok else "FAILED"))
    euler = (sum(((-1) ** k * Fraction(b[k]) for k in range(2 * n + 1)), Fraction(0))
             - sum(((-1) ** (p + q) * Fraction(c["dbar"]) for (p, q), c in table.items()), Fraction(0)))
    lemma = "LEMMA_HOLDS" if first_strict is None else "LEMMA_FAILS"
    return InequalityReport(name, n, degrees, bidegrees, lemma, first_strict, euler, ks, gamma_order,
                            list(notes or []))


# -- individual checks ---------------------------------------------------------

def euler_relation_check(C: BigradedComplex) -> int:
    """Σ(-1)^k b^k - Σ(-1)^{p+q} h^{p,q}_∂̄; zero on every valid complex."""
    _require_exact(C, "euler_relation_check")
    lhs = sum((-1) ** k * betti(C, k) for k in range(2 * C.n + 1))
    from .hodge import hodge_dbar
    rhs = sum((-1) ** (p + q) * hodge_dbar(C, p, q) for p, q in C.bidegrees())
    return lhs - rhs


@dataclass
class DdbarResult:
    verdict: str
    first_strict_k: int | None
    rows: list[tuple[int, int, int]]    # (k, 2 b^k, Σ h_A + h_BC)

    @property
    def inequality_ok(self) -> bool:
        return all(two_b <= s for _, two_b, s in self.rows)


def ddbar_detect(C: BigradedComplex) -> DdbarResult:
    _require_exact(C, "ddbar_detect")
    table = hodge_table(C)
    rows, first = [], None
    for k in range(2 * C.n + 1):
        s = sum(table[(p, k - p)]["a"] + table[(p, k - p)]["bc"]
                for p in range(max(0, k - C.n), min(k, C.n) + 1))
        two_b = 2 * betti(C, k)
        rows.append((k, two_b, s))
        if two_b != s and first is None:
            first = k
    return DdbarResult("LEMMA_HOLDS" if first is None else "LEMMA_FAILS", first, rows)


def _nullspace(C: BigradedComplex, mat: np.ndarray) -> np.ndarray:
    if C.mode == EXACT:
        if mat.shape[0] == 0:
            return exact.identity(mat.shape[1])
        return exact.nullspace(mat)
    if mat.shape[0] == 0:
        return np.eye(mat.shape[1], dtype=complex)
    return scipy.linalg.null_space(mat, rcond=1e-9)


def _hstack(C, mats):
    mats = [m for m in mats if m.shape[1]]
    if not mats:
        return None
    return np.concatenate(mats, axis=1)


def _blockdiag(C, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    make = exact.zeros if C.mode == EXACT else (lambda r, c: np.zeros((r, c), dtype=complex))
    out = make(a.shape[0] + b.shape[0], a.shape[1] + b.shape[1])
    out[:a.shape[0], :a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


def kodaira_spencer_check(C: BigradedComplex) -> KodairaSpencer:
    """b^2 <= 2 h^{0,2}_∂̄ + h^{1,1}_BC and exactness bookkeeping of the five-term sequence.

    Each term is computed from its own matrices, so a zero alternating sum is a
    genuine consistency check.
    """
    _require_exact(C, "kodaira_spencer_check")
    return kodaira_spencer_dims(C)


def kodaira_spencer_dims(C: BigradedComplex) -> KodairaSpencer:
    """Mode-agnostic body of :func:`kodaira_spencer_check` (FLOAT uses numerical ranks)."""
    view = total_view(C)
    make = exact.zeros if C.mode == EXACT else (lambda r, c: np.zeros((r, c), dtype=complex))
    b2 = betti(C, 2)
    h02 = hodge_table(C)[(0, 2)]["dbar"] if C.n >= 2 else 0
    h20 = hodge_table(C.conjugate_complex())[(0, 2)]["dbar"] if C.n >= 2 else 0
    h11 = bott_chern(C, 1, 1)

    # K = (A^{1,1} ∩ im d^1) / ∂∂̄ A^{0,0}
    d1 = view.d[1]
    dim2 = view.dim(2)
    s11 = view.slot(2, 1, 1)
    iota = make(dim2, C.dim(1, 1))
    for i in range(C.dim(1, 1)):
        iota[s11.start + i, i] = exact.ONE if C.mode == EXACT else 1.0
    joined = _hstack(C, [d1, iota])
    meet = _rk(C, d1) + C.dim(1, 1) - (_rk(C, joined) if joined is not None else 0)
    kernel = meet - _rk(C, C.ddbar(0, 0))

    # u : H^2_dR -> H^{2,0}_∂ ⊕ H^{0,2}_∂̄ through the (2,0) and (0,2) components
    Z = _nullspace(C, view.d[2])
    d20, d02 = C.dim(2, 0), C.dim(0, 2)
    S = make(d20 + d02, dim2)
    if d20:
        s = view.slot(2, 2, 0)
        for i in range(d20):
            S[i, s.start + i] = exact.ONE if C.mode == EXACT else 1.0
    if d02:
        s = view.slot(2, 0, 2)
        for i in range(d02):
            S[d20 + i, s.start + i] = exact.ONE if C.mode == EXACT else 1.0
    SZ = exact.matmul(S, Z) if C.mode == EXACT else S @ Z
    exact_part = _blockdiag(C, C.del_(1, 0), C.dbar(0, 1))
    both = _hstack(C, [SZ, exact_part])
    rank_u = (_rk(C, both) if both is not None else 0) - _rk(C, exact_part)

    coker = h20 + h02 - rank_u
    alt = kernel - h11 + b2 - (h20 + h02) + coker
    bound = 2 * h02 + h11
    return KodairaSpencer(
        Fraction(b2), Fraction(h02), Fraction(h20), Fraction(h11), Fraction(kernel), Fraction(rank_u),
        Fraction(coker), Fraction(alt), Fraction(bound), "PASS" if b2 <= bound else "FAILED", b2 == bound)


def frolicher_check(C: BigradedComplex) -> InequalityReport:
    _require_exact(C, "frolicher_check")
    b = {k: betti(C, k) for k in range(2 * C.n + 1)}
    return build_report(C.name, C.n, b, hodge_table(C), kodaira_spencer_check(C))

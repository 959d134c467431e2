"""Spectral families of the Laplacians Δ_h^k, projector injectivity, resolvents, h-sweeps."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .complex import BigradedComplex
from .errors import LambdaNearEigenvalue
from .hodge import KERNEL_RTOL, DhOperator, HermitianMetric, build_dh

LAMBDA_RTOL = 1e-9          # rejection radius around eigenvalues, relative to ||Δ||
CERTIFICATE_TOL = 1e-8      # sigma_min above this certifies injectivity
# sup over ||φ|| + ||D0 φ|| = 1 versus the quadratic graph norm: equal up to this factor
GRAPH_NORM_FACTOR = math.sqrt(2.0)


@dataclass
class SpectralData:
    """Ascending eigenvalues and unitary eigenbasis of a Hermitian PSD matrix.

    Eigenvalues at or below ``tol`` are stored as exactly 0 (the kernel).
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    tol: float
    norm: float
    h: float | None = None
    k: int | None = None
    raw_eigenvalues: np.ndarray | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    @property
    def kernel_dim(self) -> int:
        return int(np.sum(self.eigenvalues == 0.0))

    def basis(self, lam: float) -> np.ndarray:
        """Orthonormal basis of im E_λ, after the eigenvalue-collision check."""
        mu = self.eigenvalues
        radius = LAMBDA_RTOL * self.norm
        close = np.abs(mu - lam)
        if np.any((close > 0) & (close <= radius)):
            raise LambdaNearEigenvalue(f"λ = {lam!r} lies within {radius:g} of an eigenvalue", lam=lam)
        return self.vectors[:, mu <= lam]


def spectral_data_from_matrix(A: np.ndarray, tol: float | None = None, h=None, k=None) -> SpectralData:
    A = np.asarray(A, dtype=complex)
    if A.shape[0] == 0:
        return SpectralData(np.zeros(0), np.zeros((0, 0), complex), 0.0, 0.0, h, k, np.zeros(0))
    A = 0.5 * (A + A.conj().T)
    w, U = np.linalg.eigh(A)
    norm = float(np.max(np.abs(w)))
    if w[0] < -1e-10 * max(norm, 1e-300):
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:g})")
    recon = np.max(np.abs(U @ np.diag(w) @ U.conj().T - A))
    orth = np.max(np.abs(U.conj().T @ U - np.eye(len(w))))
    if recon > 1e-10 * max(norm, 1.0) or orth > 1e-10:
        raise AssertionError(f"eigendecomposition residuals too large: {recon:g}, {orth:g}")
    if tol is None:
        tol = KERNEL_RTOL * norm
    mu = np.where(w <= tol, 0.0, w)
    return SpectralData(mu, U, float(tol), norm, h, k, w)


def spectral_data(Dh: DhOperator, k: int, tol: float | None = None) -> SpectralData:
    return spectral_data_from_matrix(Dh.laplacian[k], tol=tol, h=Dh.h, k=k)


def spectral_projector(S: SpectralData, lam: float) -> np.ndarray:
    """E_λ = sum over eigenvalues <= λ of u u^†."""
    B = S.basis(lam)
    return B @ B.conj().T


def spectral_density(S: SpectralData, lam: float, gamma_order: int = 1) -> Fraction:
    """N(λ) = rank E_λ / |Γ|."""
    if gamma_order < 1:
        raise ValueError("gamma order must be positive")
    return Fraction(S.basis(lam).shape[1], gamma_order)


def spectral_gap(S: SpectralData) -> float | None:
    """Smallest nonzero eigenvalue, or None for the zero operator.

    At finite dimension every nonzero PSD operator has a gap, hence closed image.
    """
    positive = S.eigenvalues[S.eigenvalues > 0]
    return float(positive[0]) if positive.size else None


@dataclass
class InjectivityCertificate:
    h: float | None
    sigma: float
    tau: float
    dim_h_sigma: int
    dim_0_tau: int
    sigma_min: float
    verdict: str            # INJECTIVE | DEGENERATE
    note: str = ""          # "DIM_ZERO" when im E_{h,σ} is trivial
    tolerance: float = CERTIFICATE_TOL

    @property
    def injective(self) -> bool:
        return self.verdict == "INJECTIVE"


def projector_injectivity(S_h: SpectralData, sigma: float, S_0: SpectralData, tau: float,
                          tol: float = CERTIFICATE_TOL) -> InjectivityCertificate:
    """Certify that E_{0,τ} restricted to im E_{h,σ} is injective via its smallest singular value."""
    if not 0 <= sigma < tau:
        raise ValueError(f"need 0 <= sigma < tau, got {sigma}, {tau}")
    if S_h.size != S_0.size:
        raise ValueError("spectral data live on different spaces")
    B = S_h.basis(sigma)
    C = S_0.basis(tau)
    rh, r0 = B.shape[1], C.shape[1]
    if rh == 0:
        return InjectivityCertificate(S_h.h, sigma, tau, 0, r0, math.inf, "INJECTIVE", "DIM_ZERO", tol)
    if rh > r0:
        smin = 0.0
    else:
        # E_{0,τ} B = C (C^† B), and C has orthonormal columns
        smin = float(np.linalg.svd(C.conj().T @ B, compute_uv=False)[-1])
    verdict = "INJECTIVE" if smin > tol and rh <= r0 else "DEGENERATE"
    return InjectivityCertificate(S_h.h, sigma, tau, rh, r0, smin, verdict, "", tol)


def resolvent(A: np.ndarray, shift: float = 1.0) -> np.ndarray:
    """(A + shift I)^{-1}."""
    return np.linalg.inv(A + shift * np.eye(A.shape[0]))


def _same_setting(a: DhOperator, b: DhOperator) -> None:
    if a.complex is not b.complex and a.complex.dims != b.complex.dims:
        raise ValueError("operators act on different complexes")


def resolvent_distance(Dh_a: DhOperator, Dh_b: DhOperator, k: int, mode: str = "shift") -> float:
    """||(Δ_a^k + I)^{-1} - (Δ_b^k + I)^{-1}||_2.

    ``mode="imaginary"`` computes the same blocks as (D+i)^{-1}(D-i)^{-1} from the
    full first-order operators, as a cross-check.
    """
    _same_setting(Dh_a, Dh_b)
    if Dh_a.laplacian[k].shape[0] == 0:
        return 0.0
    if mode == "shift":
        Ra = resolvent(Dh_a.laplacian[k])
        Rb = resolvent(Dh_b.laplacian[k])
    elif mode == "imaginary":
        sl = Dh_a.degree_slice(k)

        def via_d(Dh):
            D = Dh.D
            eye = np.eye(D.shape[0])
            R = np.linalg.inv(D + 1j * eye) @ np.linalg.inv(D - 1j * eye)
            return R[sl, sl]

        Ra, Rb = via_d(Dh_a), via_d(Dh_b)
    else:
        raise ValueError(f"unknown resolvent mode {mode!r}")
    return float(np.linalg.norm(Ra - Rb, 2))


def reed_simon_criterion(Dh: DhOperator, D0: DhOperator, k: int) -> float:
    """Largest singular value of (D_h - D_0)(I + Δ_0^k)^{-1/2} on degree-k inputs.

    This is the sup of ||(D_h - D_0)φ|| over the quadratic graph norm of D_0; the
    sup over ||φ|| + ||D_0 φ|| = 1 differs by at most ``GRAPH_NORM_FACTOR``.
    """
    _same_setting(Dh, D0)
    sl = Dh.degree_slice(k)
    if sl.stop == sl.start:
        return 0.0
    w, U = np.linalg.eigh(D0.laplacian[k])
    w = np.clip(w, 0.0, None)
    inv_sqrt = U @ np.diag(1.0 / np.sqrt(1.0 + w)) @ U.conj().T
    M = (Dh.D - D0.D)[:, sl] @ inv_sqrt
    if not M.size:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])


def resolvent_bound_margins(S_0: SpectralData, tau: float, S_h: SpectralData, sigma: float,
                            rng: np.random.Generator, samples: int = 4) -> tuple[float, float]:
    """Worst slack in the two resolvent inequalities on random admissible unit vectors.

    Returns (max of ||R_0 u|| - 1/(1+τ) over unit u ⊥ im E_{0,τ},
             min of ||R_h u|| - 1/(1+σ) over unit u ∈ im E_{h,σ}).
    The first must be <= 0 and the second >= 0 up to rounding.
    """
    R0 = S_0.vectors @ np.diag(1.0 / (1.0 + S_0.eigenvalues)) @ S_0.vectors.conj().T
    Rh = S_h.vectors @ np.diag(1.0 / (1.0 + S_h.eigenvalues)) @ S_h.vectors.conj().T
    perp = S_0.vectors[:, S_0.eigenvalues > tau]
    inside = S_h.basis(sigma)
    upper, lower = -math.inf, math.inf
    for _ in range(samples):
        if perp.shape[1]:
            c = rng.standard_normal(perp.shape[1]) + 1j * rng.standard_normal(perp.shape[1])
            u = perp @ c
            u /= np.linalg.norm(u)
            upper = max(upper, float(np.linalg.norm(R0 @ u)) - 1.0 / (1.0 + tau))
        if inside.shape[1]:
            c = rng.standard_normal(inside.shape[1]) + 1j * rng.standard_normal(inside.shape[1])
            u = inside @ c
            u /= np.linalg.norm(u)
            lower = min(lower, float(np.linalg.norm(Rh @ u)) - 1.0 / (1.0 + sigma))
    return upper, lower


# -- sweeps ------------------------------------------------------------------

@dataclass
class SweepRow:
    h: float
    N_h_sigma: int
    N_0_tau: int
    sigma_min: float
    resolvent_dist: float
    rs_criterion: float
    verdict: str


@dataclass
class SweepRecord:
    k: int
    sigma: float
    tau: float
    rows: list[SweepRow]
    tau_auto: bool = False
    model: str | None = None
    h_star: float | None = None
    monotone: bool = True
    resolvent_monotone: bool = True
    warnings: list[str] = field(default_factory=list)

    @property
    def density_ok(self) -> bool:
        return all(r.N_h_sigma <= r.N_0_tau for r in self.rows)

    @property
    def stabilizes(self) -> bool:
        return self.h_star is not None


def auto_tau(C: BigradedComplex, g: HermitianMetric | None, k: int, D0: DhOperator | None = None) -> float:
    """Half the spectral gap of Δ_0^k; 1.0 when Δ_0^k vanishes."""
    D0 = D0 or build_dh(C, g, 0.0)
    gap = spectral_gap(spectral_data(D0, k))
    return 0.5 * gap if gap is not None else 1.0


def h_star(verdicts: list[tuple[float, bool]]) -> tuple[float | None, bool]:
    """Largest grid h below which every certificate is injective, and monotonicity.

    ``verdicts`` is ordered by strictly decreasing h.
    """
    first = next((i for i, (_, ok) in enumerate(verdicts) if ok), None)
    if first is None:
        return None, True
    monotone = all(ok for _, ok in verdicts[first:])
    star = None
    for hval, ok in reversed(verdicts):
        if not ok:
            break
        star = hval
    return star, monotone


def check_grid(grid) -> list[float]:
    grid = [float(h) for h in grid]
    if not grid:
        raise ValueError("empty h grid")
    if any(not 0.0 < h <= 1.0 for h in grid):
        raise ValueError("grid values must lie in (0, 1]")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly decreasing")
    return grid


def h_sweep(C: BigradedComplex, g: HermitianMetric | None, k: int, grid, sigma: float = 0.0,
            tau: float | None = None) -> SweepRecord:
    grid = check_grid(grid)
    D0 = build_dh(C, g, 0.0)
    tau_auto = tau is None
    if tau_auto:
        tau = auto_tau(C, g, k, D0)
    if not 0 <= sigma < tau:
        raise ValueError(f"need 0 <= sigma < tau, got {sigma}, {tau}")
    S0 = spectral_data(D0, k)
    n0 = S0.basis(tau).shape[1]
    rows = []
    for h in grid:
        Dh = build_dh(C, g, h)
        Sh = spectral_data(Dh, k)
        cert = projector_injectivity(Sh, sigma, S0, tau)
        rows.append(SweepRow(
            h=h,
            N_h_sigma=cert.dim_h_sigma,
            N_0_tau=n0,
            sigma_min=cert.sigma_min,
            resolvent_dist=resolvent_distance(Dh, D0, k),
            rs_criterion=reed_simon_criterion(Dh, D0, k),
            verdict=cert.verdict,
        ))
    star, monotone = h_star([(r.h, r.verdict == "INJECTIVE") for r in rows])
    dists = [r.resolvent_dist for r in rows]
    res_mono = all(b <= a + 1e-10 for a, b in zip(dists, dists[1:]))
    rec = SweepRecord(k, float(sigma), float(tau), rows, tau_auto, C.name, star, monotone, res_mono)
    if not monotone:
        msg = "NONMONOTONE: injectivity verdict does not stay INJECTIVE below its first occurrence"
        rec.warnings.append(msg)
        warnings.warn(msg, stacklevel=2)
    return rec

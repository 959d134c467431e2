"""Finite abelian normal coverings as character-twisted sector families.

A character χ of Γ with flat connection form θ = θ^{1,0} + θ^{0,1} (constant
coefficients on the coframe) gives the sector complex with
∂_χ = ∂ + θ^{1,0}∧ and ∂̄_χ = ∂̄ + θ^{0,1}∧. The invariant forms on the cover
decompose as the direct sum of the sectors; Γ-dimensions are dimensions
divided by |Γ|.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact, forms
from .complex import EXACT, FLOAT, BigradedComplex, direct_sum, validate_complex
from .errors import MissingTrivial, RelationViolation, SectorInvalid, ShapeMismatch
from .exact import CQ
from .frolicher import InequalityReport, KodairaSpencer, build_report, kodaira_spencer_dims
from .hodge import HermitianMetric, betti, build_dh, hodge_table, kernel_dim
from .spectral import InjectivityCertificate, projector_injectivity, spectral_data


def gamma_dim(v_dim: int, m: int) -> Fraction:
    if m < 1:
        raise ValueError(f"gamma order must be >= 1, got {m}")
    if v_dim < 0:
        raise ValueError("dimension must be nonnegative")
    return Fraction(v_dim, m)


@dataclass
class TwistData:
    """One sector: character label, θ coefficients and the twisted complex."""

    character: str
    theta10: tuple
    theta01: tuple
    complex: BigradedComplex = field(repr=False)

    @property
    def trivial(self) -> bool:
        return not any(self.theta10) and not any(self.theta01)


@dataclass
class CoveringComplex:
    base: BigradedComplex
    gamma_order: int
    sectors: list[TwistData]

    @property
    def trivial_sector(self) -> TwistData:
        return next(s for s in self.sectors if s.trivial)

    def total_space(self) -> BigradedComplex:
        return direct_sum([s.complex for s in self.sectors], name=f"cover({self.base.name})")


def wedge_operator(C: BigradedComplex, p: int, q: int, theta10, theta01):
    """Matrices of θ^{1,0}∧ : A^{p,q} -> A^{p+1,q} and θ^{0,1}∧ : A^{p,q} -> A^{p,q+1}."""
    n = C.n
    mode = C.mode
    zero = (lambda r, c: exact.zeros(r, c)) if mode == EXACT else (lambda r, c: np.zeros((r, c), complex))
    basis = forms.monomials(n, p, q)
    out = []
    for shift, coeffs, gen0 in (((1, 0), theta10, 0), ((0, 1), theta01, n)):
        tp, tq = p + shift[0], q + shift[1]
        target = forms.monomials(n, tp, tq) if tp <= n and tq <= n else []
        index = {m: i for i, m in enumerate(target)}
        M = zero(len(target), len(basis))
        for col, mono in enumerate(basis):
            for a, c in enumerate(coeffs):
                if not c:
                    continue
                w = forms.wedge((gen0 + a,), mono)
                if w is None:
                    continue
                sign, res = w
                M[index[res], col] = M[index[res], col] + c * sign
        out.append(M)
    return out[0], out[1]


def _coerce_theta(C: BigradedComplex, theta) -> tuple:
    theta = tuple(theta or ())
    if len(theta) == 0:
        theta = (0,) * C.n
    if len(theta) != C.n:
        raise ShapeMismatch(f"θ needs {C.n} coefficients, got {len(theta)}")
    if C.mode == EXACT:
        return tuple(CQ._coerce(c) for c in theta)
    return tuple(complex(c) for c in theta)


def twist(base: BigradedComplex, character: str, theta10=None, theta01=None) -> TwistData:
    """Sector complex for one character; raises SectorInvalid if the relations fail."""
    if not base.coframe:
        raise SectorInvalid("twisting needs a complex in the canonical coframe basis", character=character)
    t10 = _coerce_theta(base, theta10)
    t01 = _coerce_theta(base, theta01)
    dl, db = {}, {}
    for p, q in base.bidegrees():
        w10, w01 = wedge_operator(base, p, q, t10, t01)
        dl[(p, q)] = base.del_(p, q) + w10
        db[(p, q)] = base.dbar(p, q) + w01
    C = BigradedComplex(base.n, base.dims, dl, db, mode=base.mode, labels=base.labels,
                        name=f"{base.name}[{character}]", coframe=True)
    try:
        validate_complex(C)
    except RelationViolation as e:
        raise SectorInvalid(f"sector {character!r}: {e}", character=character) from e
    return TwistData(str(character), t10, t01, C)


def build_cover(base: BigradedComplex, m: int, twists=()) -> CoveringComplex:
    """Cover of order m from twists given as (character, theta10, theta01) or TwistData.

    With no twists and m = 1 the cover is the base itself.
    """
    if m < 1:
        raise ValueError(f"gamma order must be >= 1, got {m}")
    sectors = []
    for t in twists:
        sectors.append(t if isinstance(t, TwistData) else twist(base, *t))
    if not sectors and m == 1:
        sectors = [TwistData("trivial", _coerce_theta(base, None), _coerce_theta(base, None), base)]
    if not any(s.trivial for s in sectors):
        raise MissingTrivial("the trivial character must be among the sectors")
    if len(sectors) != m:
        raise SectorInvalid(f"{len(sectors)} sectors for a group of order {m}")
    triv = next(s for s in sectors if s.trivial)
    for side in ("del", "dbar"):
        a, b = triv.complex.matrices(side), base.matrices(side)
        if any(not np.array_equal(a[k], b[k]) for k in a):
            raise SectorInvalid("trivial sector differs from the base complex")
    return CoveringComplex(base, m, sectors)


def torus_theta(n: int, j: int, m: int, exact_mode: bool = True):
    """θ of the character j of ℤ/m acting by translation along the first real direction.

    θ = i (2π j/m) dx_1 with dx_1 = (ω_1 + ω̄_1)/2, so both components have
    coefficient iπj/m on the first generator. In exact mode π is replaced by 1;
    all ranks depend only on whether θ vanishes.
    """
    if exact_mode:
        c = CQ(0, Fraction(j, m))
    else:
        c = 1j * cmath.pi * j / m
    theta = [c] + [0] * (n - 1)
    return tuple(theta), tuple(theta)


def torus_cover(n: int, m: int, exact_mode: bool = True) -> CoveringComplex:
    from .catalog import torus
    base = torus(n)
    if not exact_mode:
        base = base.to_float()
    twists = []
    for j in range(m):
        t10, t01 = torus_theta(n, j, m, exact_mode)
        twists.append(twist(base, str(j), t10, t01))
    return build_cover(base, m, twists)


def sector_dims(C: BigradedComplex) -> tuple[dict, dict, KodairaSpencer]:
    b = {k: betti(C, k) for k in range(2 * C.n + 1)}
    return b, hodge_table(C), kodaira_spencer_dims(C)


def l2_report(cov: CoveringComplex, g: HermitianMetric | None = None) -> InequalityReport:
    """Γ-normalized inequality report: every dimension summed over sectors, divided by m.

    With a metric, the Γ-Betti numbers are cross-checked against the kernels of
    Δ_1 on every sector, the same metric being used on each sector.
    """
    m = cov.gamma_order
    n = cov.base.n
    b_tot = {k: 0 for k in range(2 * n + 1)}
    tab_tot = {pq: {"dbar": 0, "del": 0, "bc": 0, "a": 0} for pq in cov.base.bidegrees()}
    ks_fields = ("b2", "h02_dbar", "h20_del", "h11_bc", "kernel", "rank_u", "coker", "alternating_sum", "bound")
    ks_tot = dict.fromkeys(ks_fields, Fraction(0))
    notes = ["finite abelian Γ only; sectors indexed by characters"]
    for s in cov.sectors:
        b, tab, ks = sector_dims(s.complex)
        for k in b_tot:
            b_tot[k] += b[k]
        for pq in tab_tot:
            for key in tab_tot[pq]:
                tab_tot[pq][key] += tab[pq][key]
        for f in ks_fields:
            ks_tot[f] += getattr(ks, f)
        if g is not None:
            D1 = build_dh(s.complex, g, 1.0)
            spectral = [kernel_dim(D1, k) for k in range(2 * n + 1)]
            if spectral != [b[k] for k in range(2 * n + 1)]:
                raise AssertionError(f"sector {s.character}: spectral kernels {spectral} disagree with Betti numbers")
    if g is not None:
        notes.append(f"spectral cross-check with metric seed {g.seed} agrees on every sector")
    b_gamma = {k: gamma_dim(v, m) for k, v in b_tot.items()}
    tab_gamma = {pq: {key: gamma_dim(v, m) for key, v in cell.items()} for pq, cell in tab_tot.items()}
    ksg = {f: v / m for f, v in ks_tot.items()}
    ks = KodairaSpencer(**ksg, verdict="PASS" if ksg["b2"] <= ksg["bound"] else "FAILED",
                        equality=ksg["b2"] == ksg["bound"])
    return build_report(cov.base.name, n, b_gamma, tab_gamma, ks, gamma_order=m, notes=notes)


@dataclass
class SectorInjectivity:
    certificates: list[InjectivityCertificate]
    characters: list[str]
    N_h_gamma: Fraction
    N_0_gamma: Fraction
    gamma_inequality: bool | None    # None when some sector is not certified

    @property
    def all_injective(self) -> bool:
        return all(c.injective for c in self.certificates)


def sector_injectivity(cov: CoveringComplex, g: HermitianMetric | None, k: int, sigma: float, tau: float,
                       h: float) -> SectorInjectivity:
    certs, rh, r0 = [], 0, 0
    for s in cov.sectors:
        Sh = spectral_data(build_dh(s.complex, g, h), k)
        S0 = spectral_data(build_dh(s.complex, g, 0.0), k)
        c = projector_injectivity(Sh, sigma, S0, tau)
        certs.append(c)
        rh += c.dim_h_sigma
        r0 += c.dim_0_tau
    m = cov.gamma_order
    Nh, N0 = gamma_dim(rh, m), gamma_dim(r0, m)
    ok = None
    if all(c.injective for c in certs):
        ok = Nh <= N0
        if not ok:
            raise AssertionError("Γ-density inequality fails although every sector is injective")
    return SectorInjectivity(certs, [s.character for s in cov.sectors], Nh, N0, ok)


__all__ = [
    "TwistData", "CoveringComplex", "gamma_dim", "twist", "build_cover", "torus_theta", "torus_cover",
    "l2_report", "sector_injectivity", "SectorInjectivity", "wedge_operator", "FLOAT",
]

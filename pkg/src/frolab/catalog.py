"""Built-in models: flat tori, the Iwasawa manifold, the Kodaira-Thurston surface.

Cohomology dimensions of the nilmanifold models are not stored; the exact
elimination in :mod:`frolab.hodge` is the authority. For human cross-checking,
the commonly quoted values are b = (1,4,8,10,8,4,1) for Iwasawa and
b = (1,3,4,3,1) for Kodaira-Thurston.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable

import numpy as np

from .complex import BigradedComplex
from .hodge import HermitianMetric
from .lie import from_structure_equations


def torus(n: int) -> BigradedComplex:
    if n < 1:
        raise ValueError("torus dimension must be positive")
    return from_structure_equations(n, {}, name=f"torus{n}")


def iwasawa() -> BigradedComplex:
    # dw3 = -w1^w2; conjugates follow
    return from_structure_equations(3, {2: {(0, 1): -1}}, name="iwasawa")


def kodaira_thurston() -> BigradedComplex:
    # dw2 = w1^wb1, which is purely (1,1): del w2 = 0, dbar w2 = w1^wb1
    return from_structure_equations(2, {1: {(0, 2): 1}}, name="kodaira_thurston")


def random_metric(C: BigradedComplex, seed: int) -> HermitianMetric:
    """G = I + B B^† / 2 per bidegree, B with standard complex normal entries.

    Entries come from ``numpy.random.Generator(PCG64(seed))`` drawn bidegree by
    bidegree in (p, q) lexicographic order, real parts then imaginary parts.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    grams = {}
    for pq in sorted(C.dims):
        d = C.dims[pq]
        B = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        G = np.eye(d) + 0.5 * (B @ B.conj().T)
        grams[pq] = 0.5 * (G + G.conj().T)
    return HermitianMetric(grams, seed=seed)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    build: Callable[[], BigradedComplex]
    params: dict = field(default_factory=dict)
    expected_betti: tuple | None = None
    expected_hodge: dict | None = None
    notes: str = ""


def _torus_entry(n: int) -> CatalogEntry:
    return CatalogEntry(
        name=f"torus{n}",
        build=lambda: torus(n),
        params={"n": n},
        expected_betti=tuple(comb(2 * n, k) for k in range(2 * n + 1)),
        expected_hodge={(p, q): comb(n, p) * comb(n, q) for p in range(n + 1) for q in range(n + 1)},
        notes="flat torus; zero differentials, Kahler reference model",
    )


CATALOG: dict[str, CatalogEntry] = {
    e.name: e
    for e in (
        _torus_entry(1),
        _torus_entry(2),
        _torus_entry(3),
        CatalogEntry("iwasawa", iwasawa, notes="complex Heisenberg nilmanifold, dw3 = -w1^w2"),
        CatalogEntry("kodaira_thurston", kodaira_thurston, notes="nilmanifold surface, dw2 = w1^wb1"),
    )
}


def get(name: str) -> BigradedComplex:
    try:
        return CATALOG[name].build()
    except KeyError:
        raise KeyError(f"unknown catalog model {name!r}; known: {', '.join(CATALOG)}") from None

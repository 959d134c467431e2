from math import comb

import numpy as np
import pytest

from frolab import exact, forms
from frolab.catalog import iwasawa, torus
from frolab.complex import (EXACT, FLOAT, BigradedComplex, check_total, direct_sum, total_view,
                            validate_complex)
from frolab.errors import (JacobiViolation, ModeError, NonIntegrable, RelationViolation,
                           ShapeMismatch)
from frolab.hodge import betti, hodge_table
from frolab.lie import from_lie_algebra, from_structure_equations, standard_J

from conftest import model


# -- forms ---------------------------------------------------------------------

def test_monomials_and_dims():
    for n in (1, 2, 3):
        for p in range(n + 1):
            for q in range(n + 1):
                assert len(forms.monomials(n, p, q)) == comb(n, p) * comb(n, q)


def test_wedge_signs():
    assert forms.wedge((0,), (1,)) == (1, (0, 1))
    assert forms.wedge((1,), (0,)) == (-1, (0, 1))
    assert forms.wedge((0,), (0, 1)) is None
    assert forms.wedge((2,), (0, 1)) == (1, (0, 1, 2))


def test_labels():
    assert forms.label(2, ()) == "1"
    assert forms.label(2, (0, 3)) == "w1^wb2"


# -- complexes -----------------------------------------------------------------

def test_torus_dims_and_zero_maps():
    C = torus(1)
    assert C.dims == {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1}
    rep = validate_complex(C)
    assert rep.passed and rep.max_residual == 0


def test_iwasawa_relations_exact():
    rep = validate_complex(model("iwasawa"))
    assert rep.passed
    assert all(c.residual == 0 for c in rep.checks)


def _corrupted_iwasawa(entry):
    C = iwasawa()
    dbar = {pq: m.copy() for pq, m in C.matrices("dbar").items()}
    A = exact.zeros(C.dim(1, 1), C.dim(1, 0))
    mono = forms.monomials(3, 1, 1).index(entry)
    A[mono, 2] = exact.ONE          # dbar w3 := entry
    dbar[(1, 0)] = A
    return BigradedComplex(3, C.dims, C.matrices("del"), dbar, labels=C.labels)


def test_corruption_named_at_bidegree():
    # dbar w3 := w1^wb3 breaks dbar∘dbar on A^{1,0}: dbar(w1^wb3) = -w1^dbar(wb3) != 0
    with pytest.raises(RelationViolation) as err:
        validate_complex(_corrupted_iwasawa((0, 5)))
    assert err.value.context["bidegree"] == (1, 0)
    assert err.value.context["relation"] == "dbar∘dbar"


def test_corruption_by_closed_form_is_not_a_violation():
    # w1^wb1 is killed by both del and dbar on A^{1,1}, so setting dbar w3 := w1^wb1
    # in the single matrix dbar^{1,0} leaves all three relations intact
    assert validate_complex(_corrupted_iwasawa((0, 3))).passed


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        BigradedComplex(1, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1},
                        dbar={(0, 0): exact.zeros(2, 1)})


def test_mode_mixing_rejected():
    with pytest.raises(ModeError):
        BigradedComplex(1, {(0, 0): 1, (0, 1): 1}, dbar={(0, 0): np.zeros((1, 1))})
    with pytest.raises(ModeError):
        BigradedComplex(1, {(0, 0): 1, (0, 1): 1}, dbar={(0, 0): exact.zeros(1, 1)}, mode=FLOAT)


def test_float_tolerance_scales():
    C = model("iwasawa").to_float()
    assert validate_complex(C).passed
    dbar = {pq: m.copy() for pq, m in C.matrices("dbar").items()}
    dbar[(1, 0)][forms.monomials(3, 1, 1).index((0, 5)), 2] += 1e-3
    bad = BigradedComplex(3, C.dims, C.matrices("del"), dbar, mode=FLOAT)
    with pytest.raises(RelationViolation):
        validate_complex(bad)


def test_total_complex_squares_to_zero(any_model):
    assert check_total(total_view(any_model)) == 0


def test_direct_sum_adds_dimensions():
    A, B = model("torus2"), model("kodaira_thurston")
    S = direct_sum([A, B])
    validate_complex(S)
    for k in range(5):
        assert betti(S, k) == betti(A, k) + betti(B, k)


def test_conjugate_complex_swaps_theories():
    C = model("kodaira_thurston")
    Cc = C.conjugate_complex()
    validate_complex(Cc)
    t, tc = hodge_table(C), hodge_table(Cc)
    for (p, q) in C.bidegrees():
        assert tc[(p, q)]["dbar"] == t[(q, p)]["del"]
        assert tc[(p, q)]["bc"] == t[(q, p)]["bc"]


def test_catalog_models_validate(any_model):
    assert any_model.sealed
    assert any_model.mode == EXACT


# -- structure equations / Lie algebras ----------------------------------------

def test_non_integrable_rejected():
    with pytest.raises(NonIntegrable):
        from_structure_equations(2, {1: {(2, 3): 1}})


def test_jacobi_violation_rejected():
    # d w2 = w1^wb3 with w3 not closed: d^2 w2 = -w1^d(wb3) != 0
    with pytest.raises(JacobiViolation):
        from_structure_equations(3, {1: {(0, 5): 1}, 2: {(0, 1): 1}})


def test_abelian_algebra_gives_torus():
    C = from_lie_algebra([], standard_J(2))
    assert all(exact.is_zero(m) for m in C.matrices("del").values())
    assert all(exact.is_zero(m) for m in C.matrices("dbar").values())


def test_real_heisenberg_times_line_matches_kodaira_thurston():
    # w1 = e1 + i e2, w2 = e3 + i e4, de4 = -2 e12 gives d w2 = w1^wb1
    C = from_lie_algebra([(0, 1, 3, 2)], standard_J(2))
    ref = model("kodaira_thurston")
    assert [betti(C, k) for k in range(5)] == [betti(ref, k) for k in range(5)]
    assert hodge_table(C) == hodge_table(ref)


def test_real_iwasawa_matches_complex_equations():
    structure = [(0, 2, 4, 1), (1, 3, 4, -1), (0, 3, 5, 1), (1, 2, 5, 1)]
    C = from_lie_algebra(structure, standard_J(3))
    ref = model("iwasawa")
    assert [betti(C, k) for k in range(7)] == [betti(ref, k) for k in range(7)]
    assert hodge_table(C) == hodge_table(ref)


def test_lie_algebra_jacobi_checked():
    # [e1,e2] = e3 together with [e3,e4] = e1 breaks the Jacobi identity
    with pytest.raises(JacobiViolation):
        from_lie_algebra([(0, 1, 2, 1), (2, 3, 0, 1)], standard_J(2))


def test_bad_complex_structure():
    with pytest.raises(ValueError):
        from_lie_algebra([], exact.identity(2))

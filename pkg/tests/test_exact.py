from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from frolab import exact
from frolab.errors import ModeError, ParseError
from frolab.exact import CQ, I, ONE, ZERO


def test_cq_field_operations():
    a = CQ(Fraction(1, 2), 3)
    b = CQ(-2, Fraction(1, 3))
    assert a + b == CQ(Fraction(-3, 2), Fraction(10, 3))
    assert a * b == CQ(Fraction(1, 2) * -2 - 3 * Fraction(1, 3), Fraction(1, 6) - 6)
    assert (a / b) * b == a
    assert I * I == -ONE
    assert a.conjugate() == CQ(Fraction(1, 2), -3)
    assert not ZERO and bool(I)
    assert complex(a) == complex(0.5, 3)


def test_cq_refuses_floats():
    with pytest.raises(ModeError):
        CQ(1) + 0.5


@pytest.mark.parametrize("text,value", [("3", Fraction(3)), ("-1/2", Fraction(-1, 2)), (" 4/6 ", Fraction(2, 3))])
def test_parse_rational(text, value):
    assert exact.parse_rational(text) == value


@pytest.mark.parametrize("text", ["1/0", "a", "1.5", "", "1//2"])
def test_parse_rational_rejects(text):
    with pytest.raises(ParseError):
        exact.parse_rational(text, "entry")


def test_format_round_trip():
    x = Fraction(-7, 3)
    assert exact.parse_rational(exact.format_rational(x)) == x


gauss = st.builds(lambda a, b: CQ(a, b), st.integers(-3, 3), st.integers(-3, 3))


@st.composite
def exact_matrices(draw, max_dim=6):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    # low-rank products make rank deficiency common
    k = draw(st.integers(1, min(r, c)))
    A = [[draw(gauss) for _ in range(k)] for _ in range(r)]
    B = [[draw(gauss) for _ in range(c)] for _ in range(k)]
    return exact.matmul(exact.asexact(A), exact.asexact(B))


def _sympy(mat):
    return sympy.Matrix(mat.shape[0], mat.shape[1],
                        lambda i, j: sympy.Rational(mat[i, j].re) + sympy.I * sympy.Rational(mat[i, j].im))


@settings(max_examples=60, deadline=None)
@given(exact_matrices())
def test_rank_matches_sympy(m):
    assert exact.rank(m) == _sympy(m).rank(simplify=True)


@settings(max_examples=40, deadline=None)
@given(exact_matrices())
def test_nullspace_is_kernel(m):
    N = exact.nullspace(m)
    assert N.shape[1] == m.shape[1] - exact.rank(m)
    if N.shape[1]:
        assert exact.is_zero(exact.matmul(m, N))
        assert exact.rank(N) == N.shape[1]


def test_inverse():
    A = exact.asexact([[1, I], [CQ(0, -1), 3]])
    assert exact.matmul(A, exact.inverse(A)).tolist() == exact.identity(2).tolist()


def test_rank_of_gaussian_rational_matrix():
    # rows differ by a factor i: rank 1 over the Gaussian rationals, 2 if treated as real
    A = exact.asexact([[1, I], [I, -1]])
    assert exact.rank(A) == 1


def test_to_complex():
    A = exact.asexact([[CQ(Fraction(1, 4), -1)]])
    assert np.allclose(exact.to_complex(A), [[0.25 - 1j]])

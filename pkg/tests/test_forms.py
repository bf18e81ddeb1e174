from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicdecoupling import CubicForm, nondegeneracy_rank, partials, psi, psi_prime, taylor_decomposition
from cubicdecoupling.errors import DomainError, RangeBoundError
from cubicdecoupling.forms import normalize_variant

from sympy_oracle import to_sympy

coeffs = st.fractions(min_value=-20, max_value=20, max_denominator=9)
forms = st.builds(CubicForm, coeffs, coeffs, coeffs, coeffs)


def test_parse_and_str_round_trip():
    phi = CubicForm.parse("1, -2, 3/4, 0")
    assert phi.coefficients == (1, -2, Fraction(3, 4), 0)
    assert CubicForm.parse(str(phi)) == phi


@pytest.mark.parametrize("text", ["1,2,3", "a,b,c,d", "1,2,3,4,5", ""])
def test_parse_rejects_garbage(text):
    with pytest.raises(DomainError):
        CubicForm.parse(text)


def test_evaluation_and_partials(sum_of_cubes):
    phi = CubicForm(1, 2, 3, 4)
    assert phi(2, 1) == 8 + 2 * 4 + 3 * 2 + 4
    assert phi.phi_t(1, 1) == 3 + 4 + 3
    assert phi.phi_s(1, 1) == 2 + 6 + 12
    assert (phi.phi_tt(1, 1), phi.phi_ts(1, 1), phi.phi_ss(1, 1)) == (10, 10, 30)
    assert psi(sum_of_cubes, 2, 3) == (2, 3, 12, 27, 35)
    assert psi_prime(sum_of_cubes, 2, 3) == (12, 0, 18, 12, 27, 35)


@pytest.mark.parametrize(
    "form, rank",
    [
        ((1, 0, 0, 1), 2),
        ((0, 1, 1, 0), 2),
        ((1, 0, 0, 0), 1),  # t^3
        ((1, 3, 3, 1), 1),  # (t+s)^3
        ((8, -12, 6, -1), 1),  # (2t-s)^3
        ((0, 0, 0, 0), 0),
        ((1, 1, 0, 0), 2),
    ],
)
def test_nondegeneracy_rank(form, rank):
    assert nondegeneracy_rank(CubicForm(*form)) == rank


@settings(max_examples=50, deadline=None)
@given(st.integers(-4, 4), st.integers(-4, 4), st.integers(-3, 3))
def test_perfect_cubes_are_degenerate(mu, nu, scale):
    phi = CubicForm(scale * mu**3, 3 * scale * mu**2 * nu, 3 * scale * mu * nu**2, scale * nu**3)
    assert not phi.is_nondegenerate


@settings(max_examples=50, deadline=None)
@given(forms)
def test_partials_match_sympy(phi):
    t, s = sympy.symbols("t s")
    a, b, c, d = (sympy.Rational(x.numerator, x.denominator) for x in phi.coefficients)
    expr = a * t**3 + b * t**2 * s + c * t * s**2 + d * s**3
    pt, ps = partials(phi)
    for x, y in [(1, 2), (Fraction(-1, 3), 5)]:
        sub = {t: sympy.Rational(x), s: sympy.Rational(y)}
        assert sympy.Rational(str(pt(x, y))) == sympy.diff(expr, t).subs(sub)
        assert sympy.Rational(str(ps(x, y))) == sympy.diff(expr, s).subs(sub)


def test_counting_bounds():
    CubicForm(1000, 0, 0, -1000).check_counting_bounds(10**4)
    with pytest.raises(RangeBoundError):
        CubicForm(1001, 0, 0, 1).check_counting_bounds(4)
    with pytest.raises(RangeBoundError):
        CubicForm(1, 0, 0, 1).check_counting_bounds(10**4 + 1)
    with pytest.raises(DomainError):
        CubicForm(Fraction(1, 2), 0, 0, 1).check_counting_bounds(4)


def test_variant_names():
    assert normalize_variant("s") == "S"
    assert normalize_variant("sprime") == "Sprime"
    assert normalize_variant("S'") == "Sprime"
    with pytest.raises(DomainError):
        normalize_variant("T")


def _sympy_taylor_pieces(phi):
    t, s, h, k, lam = sympy.symbols("t s h k lam")
    a, b, c, d = (sympy.Rational(x.numerator, x.denominator) for x in phi.coefficients)
    f = lambda u, v: a * u**3 + b * u**2 * v + c * u * v**2 + d * v**3  # noqa: E731
    grow = sympy.Poly(sympy.expand(f(t + lam * h, s + lam * k) - f(t, s)), lam)
    return [sympy.expand(grow.coeff_monomial(lam**j)) for j in (1, 2, 3)], (t, s, h, k)


@settings(max_examples=20, deadline=None)
@given(forms)
def test_taylor_pieces_match_sympy(phi):
    pieces, syms = _sympy_taylor_pieces(phi)
    dec = taylor_decomposition(phi)
    for mine, want in zip((dec.linear, dec.bilinear, dec.remainder), pieces):
        assert sympy.expand(to_sympy(mine, syms) - want) == 0
    assert dec.identity


def test_taylor_checks_all_true():
    checks = taylor_decomposition(CubicForm(1, 2, 3, 4)).checks()
    assert set(checks) == {"linear", "bilinear", "remainder", "partition", "remainder_homogeneous"}
    assert all(checks.values())

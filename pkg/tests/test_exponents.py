import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicdecoupling import decoupling_exponent, diophantine_exponents, lambda0, series_sums, solve_interpolation, weights
from cubicdecoupling.errors import DivergenceError, DomainError, PoleError
from cubicdecoupling.exponents import (
    admissible_lower_bound,
    as_rational,
    closed_form_sum_btau,
    closed_form_sum_bw,
    constraint_report,
    critical_exponent,
    exponent_report,
    is_admissible,
)

# p strictly above 5 + sqrt(10) ~ 8.1623
admissible_p = st.fractions(min_value=Fraction(8163, 1000), max_value=200, max_denominator=1000)


def sympy_interpolation(p):
    a1, a2, b2 = sympy.symbols("a1 a2 b2")
    P = sympy.Rational(p.numerator, p.denominator)
    sol = sympy.solve(
        [
            sympy.Eq(1 / (2 * P / 5), a1 / (4 * P / 5) + (1 - a1) / 2),
            sympy.Eq(1 / (4 * P / 5), a2 / P + (1 - a2) / 6),
            sympy.Eq(sympy.Rational(1, 6), (1 - b2) / 2 + b2 / (4 * P / 5)),
        ],
        [a1, a2, b2],
        dict=True,
    )[0]
    return tuple(Fraction(int(sol[x].p), int(sol[x].q)) for x in (a1, a2, b2))


def test_interpolation_at_nine():
    ip = solve_interpolation(9)
    assert (ip.alpha1, ip.alpha2, ip.beta2) == (Fraction(8, 13), Fraction(1, 2), Fraction(12, 13))
    assert all(ip.identities().values())


@settings(max_examples=30, deadline=None)
@given(admissible_p)
def test_interpolation_matches_sympy(p):
    ip = solve_interpolation(p)
    assert (ip.alpha1, ip.alpha2, ip.beta2) == sympy_interpolation(p)
    assert all(ip.identities().values())


@settings(max_examples=30, deadline=None)
@given(admissible_p)
def test_closed_forms_match_sympy_series(p):
    ip = solve_interpolation(p)
    j = sympy.symbols("j", integer=True, nonnegative=True)
    a1, a2 = (sympy.Rational(x.numerator, x.denominator) for x in (ip.alpha1, ip.alpha2))
    rho = sympy.Rational(3, 2) * sympy.Rational(ip.ratio.numerator, ip.ratio.denominator)
    tau_sum = sympy.summation(2 * a1 * a2 * rho**j, (j, 0, sympy.oo))
    w_sum = sympy.summation(a1 * (1 - a2) * rho**j, (j, 0, sympy.oo))
    assert sympy.Rational(str(closed_form_sum_btau(ip.p))) == tau_sum
    assert sympy.Rational(str(closed_form_sum_bw(ip.p))) == w_sum


def test_series_at_nine():
    sums = series_sums(9, depth=200)
    assert sums.S_w == 1 and sums.S_tau == 2
    assert sums.effective_ratio == Fraction(9, 13)
    assert sums.validated
    assert 0 < sums.S_w - sums.partial_w <= sums.tail_w


def test_exponent_at_nine():
    assert lambda0(9) == Fraction(7, 9)
    assert decoupling_exponent(9) == Fraction(7, 9) == 2 * (Fraction(1, 2) - Fraction(1, 9))
    assert critical_exponent(9) == Fraction(7, 9)


@settings(max_examples=30, deadline=None)
@given(admissible_p)
def test_exponent_equals_one_minus_two_over_p(p):
    assert decoupling_exponent(p) == 1 - 2 / p


@settings(max_examples=20, deadline=None)
@given(admissible_p, st.integers(1, 50))
def test_partition_of_unity(p, r):
    w = weights(p, r)
    assert w.partition_sum() == 1
    assert len(w.gamma) == len(w.b) == len(w.tau) == r + 1 and len(w.w) == r


def test_weights_at_nine():
    w = weights(9, 3)
    assert w.b == (2, 3, Fraction(9, 2), Fraction(27, 4))
    assert w.tau[0] == Fraction(4, 13) and w.w[0] == Fraction(2, 13)


@pytest.mark.parametrize("p", ["8", "8.162", "81622/10000", "76/10"])
def test_pole_below_threshold(p):
    with pytest.raises(PoleError):
        series_sums(p)
    assert issubclass(PoleError, DivergenceError) and issubclass(PoleError, DomainError)


@pytest.mark.parametrize("p", ["7", "6", "15/2"])
def test_interpolation_leaves_unit_interval(p):
    # alpha2 = (2p - 15) / (2(p - 6)) is not in (0, 1) for p <= 15/2
    with pytest.raises(DomainError) as info:
        series_sums(p)
    assert not isinstance(info.value, PoleError)


@pytest.mark.parametrize("p", [5, 4, "-3"])
def test_p_at_most_five_rejected(p):
    with pytest.raises(DomainError):
        solve_interpolation(p)


def test_float_rejected():
    with pytest.raises(DomainError):
        as_rational(9.0)
    with pytest.raises(DomainError):
        as_rational("nine")


def test_admissible_interval_left_end():
    lo, hi = admissible_lower_bound()
    root = 5 + sympy.sqrt(10)
    assert lo < root < hi
    assert not is_admissible(lo) and is_admissible(hi)
    assert constraint_report(9) == {
        "p_gt_5": True, "alphas_in_unit_interval": True, "series_converge": True, "denominator_nonzero": True
    }
    assert constraint_report(8)["series_converge"] is False


def test_near_nine_close_to_critical():
    for p in (Fraction(899, 100), Fraction(901, 100)):
        assert abs(decoupling_exponent(p) - Fraction(7, 9)) < Fraction(1, 1000)


def test_report_strings():
    rep = exponent_report("9")
    assert rep["exponent"] == "7/9" and rep["equals_critical"] is True
    assert rep["alpha1"] == "8/13" and rep["S_w"] == "1/1"


@pytest.mark.parametrize("r, want", [(1, (2, -5, 2)), (4, (8, 7, 8)), (5, (10, 11, 11)), (9, (18, 27, 27))])
def test_diophantine_exponents(r, want):
    assert diophantine_exponents(r) == want


def test_closed_forms_agree_with_partial_sums_for_sampled_p():
    rng = random.Random(20)
    for _ in range(20):
        p = Fraction(rng.randint(8200, 50000), 1000)
        sums = series_sums(p, depth=200)
        assert sums.validated, p

from fractions import Fraction

import pytest
import sympy

from cubicdecoupling import (
    CubicForm,
    Subspace,
    bl_condition_sample,
    degenerate_witness_search,
    frame_at,
    generic_dimension_check,
    projection_dim,
)
from cubicdecoupling.errors import DomainError, SearchBudgetExceeded
from cubicdecoupling.transversality import (
    dyadic_squares,
    generic_inequality_holds,
    random_subspace,
    rref_subspaces,
    trial_rng,
)

from conftest import random_nondegenerate_cubics

T_CUBED = CubicForm(1, 0, 0, 0)
T_PLUS_S_CUBED = CubicForm(1, 3, 3, 1)


def sympy_projection_dim(V, frame, iota):
    M = sympy.Matrix([[sympy.Rational(str(x)) for x in v] for v in V.basis])
    F = sympy.Matrix([[sympy.Rational(str(x)) for x in n] for n in frame.vectors(iota)])
    return (M * F.T).rank()


def test_subspace_equality_is_basis_independent():
    a = Subspace.span((1, 0, 0, 0, 0), (0, 1, 0, 0, 0))
    b = Subspace.span((1, 1, 0, 0, 0), (1, -1, 0, 0, 0))
    assert a == b and hash(a) == hash(b)
    assert Subspace.coordinate(1, 2) == a
    with pytest.raises(DomainError):
        Subspace.span((1, 0, 0, 0, 0), (2, 0, 0, 0, 0))


def test_frame_spans_expected_dims():
    frame = frame_at(CubicForm(1, 0, 0, 1), (Fraction(1, 3), Fraction(2, 5)))
    whole = Subspace.coordinate(1, 2, 3, 4, 5)
    assert projection_dim(whole, frame, 1) == 2
    assert projection_dim(whole, frame, 2) == 4


def test_projection_dim_matches_sympy():
    phi = CubicForm(2, -1, 0, 3)
    for trial in range(30):
        rng = trial_rng(5, trial)
        V = random_subspace(rng, 1 + trial % 4)
        xi = (Fraction(trial + 1, 7), Fraction(3, trial + 2))
        frame = frame_at(phi, xi)
        for iota in (1, 2):
            assert projection_dim(V, frame, iota) == sympy_projection_dim(V, frame, iota)


def test_generic_inequality():
    assert generic_inequality_holds(2, 1, 1)  # 2*2 <= 5
    assert not generic_inequality_holds(3, 1, 1)
    assert generic_inequality_holds(4, 4, 2)
    assert not generic_inequality_holds(2, 1, 2)


@pytest.mark.parametrize("iota", [1, 2])
def test_generic_check_no_violations(iota):
    for phi in random_nondegenerate_cubics(2, seed=3):
        for dim_v in (1, 2, 3, 4):
            report = generic_dimension_check(phi, dim_v, iota, trials=100, seed=1)
            assert report.violations == 0 and report.samples == 100


def test_generic_check_is_seeded():
    phi = CubicForm(1, 0, 0, 1)
    a = generic_dimension_check(phi, 3, 2, 50, seed=7).as_dict()
    b = generic_dimension_check(phi, 3, 2, 50, seed=7).as_dict()
    assert a == b


def test_generic_check_rejects_degenerate():
    with pytest.raises(DomainError):
        generic_dimension_check(T_CUBED, 2, 1, 10)


def test_rref_enumeration_counts_and_uniqueness():
    bases = list(rref_subspaces(1, 1))
    # pivot in column k leaves 4-k free entries, each in {-1, 0, 1}
    assert len(bases) == sum(3 ** (4 - k) for k in range(5))
    assert len({Subspace(b) for b in rref_subspaces(2, 1)}) == len(list(rref_subspaces(2, 1)))


@pytest.mark.parametrize("phi, iota", [(T_CUBED, 1), (T_CUBED, 2), (T_PLUS_S_CUBED, 1), (T_PLUS_S_CUBED, 2)])
def test_degenerate_forms_have_witness(phi, iota):
    V = degenerate_witness_search(phi, iota)
    assert V is not None
    d = 2 if iota == 1 else 4
    for trial in range(10):
        rng = trial_rng(99, trial)
        xi = (Fraction(int(rng.integers(1, 100)), 101), Fraction(int(rng.integers(1, 100)), 103))
        assert d * V.dim > 5 * projection_dim(V, frame_at(phi, xi), iota)


def test_known_witness_for_t_cubed():
    # span{e3, e4, e5} projects onto a line for every xi when phi = t^3
    V = Subspace.coordinate(3, 4, 5)
    for xi in [(Fraction(1, 2), Fraction(1, 3)), (Fraction(5, 7), Fraction(2, 9))]:
        assert projection_dim(V, frame_at(T_CUBED, xi), 1) == 1
        assert not generic_inequality_holds(3, 1, 1)


@pytest.mark.parametrize("form", [(1, 0, 0, 1), (0, 1, 1, 0)])
def test_nondegenerate_forms_have_no_small_witness(form):
    assert degenerate_witness_search(CubicForm(*form), 1, max_coeff=1) is None


def test_witness_search_budget():
    with pytest.raises(SearchBudgetExceeded):
        degenerate_witness_search(CubicForm(1, 0, 0, 1), 1, budget=10)


def test_bl_condition_sample():
    phi = CubicForm(1, 0, 0, 1)
    report = bl_condition_sample(phi, 2, dyadic_squares(2), 2, trials=40, seed=0)
    assert report.violations == 0 and report.squares == 4
    bad = bl_condition_sample(T_CUBED, 2, dyadic_squares(2), 1, trials=3, subspaces=[Subspace.coordinate(3, 4, 5)])
    assert bad.violations == 3
    with pytest.raises(DomainError):
        bl_condition_sample(phi, 2, [(0, 0), (0, 0)], 1, 1)
    with pytest.raises(DomainError):
        bl_condition_sample(phi, 2, [(2, 0)], 1, 1)

"""Exact verification tools for decoupling on two-dimensional cubic surfaces in R^5.

Solution counts for the associated Diophantine system, exact transversality
checks for the tangent frames, and the exponent calculus of the iteration.
"""

from ._backend import DEFAULT as BACKEND
from .counting import (
    Packing,
    RepTable,
    brute_force_J,
    convolve,
    count_J,
    cross_check_S_prime,
    dump_rep_table,
    load_rep_table,
    rep_table,
    rep_table_base,
)
from .errors import (
    BudgetError,
    DivergenceError,
    DomainError,
    EnumerationBudgetError,
    MemoryBudgetError,
    PoleError,
    RangeBoundError,
    SearchBudgetExceeded,
)
from .exponents import (
    decoupling_exponent,
    diophantine_exponents,
    lambda0,
    series_sums,
    solve_interpolation,
    weights,
)
from .forms import CubicForm, nondegeneracy_rank, partials, psi, psi_prime, taylor_decomposition
from .harness import ExperimentConfig, FitResult, fit_growth, run_experiment
from .poly import Poly
from .transversality import (
    Subspace,
    TangentFrame,
    bl_condition_sample,
    degenerate_witness_search,
    frame_at,
    generic_dimension_check,
    projection_dim,
)

__version__ = "0.1.0"

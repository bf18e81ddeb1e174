"""Exact checks of the Brascamp-Lieb transversality inequalities for tangent frames.

At a point xi = (t0, s0) the surface has first-order frame n1, n2 and
second-order frame n1..n4. For a subspace V of Q^5 the dimension of its
orthogonal projection onto span{n_j} equals the rank of the Gram-type matrix
``[<v_i, n_j>]``; everything here computes that rank exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, SearchBudgetExceeded
from .forms import CubicForm
from .linalg import dot, int_rank, integer_rows, rank, rref

AMBIENT_DIM = 5
FRAME_DIMS = {1: 2, 2: 4}
ENTRY_RANGE = 9
XI_MAX_DENOMINATOR = 10**4

Vector = tuple[Fraction, ...]


def frame_dim(iota: int) -> int:
    try:
        return FRAME_DIMS[iota]
    except KeyError:
        raise DomainError(f"iota must be 1 or 2, got {iota}") from None


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of Q^5 given by a basis of full rank."""

    basis: tuple[Vector, ...]

    def __post_init__(self):
        basis = tuple(tuple(Fraction(x) for x in v) for v in self.basis)
        if not basis:
            raise DomainError("a subspace needs at least one basis vector")
        if any(len(v) != AMBIENT_DIM for v in basis):
            raise DomainError("basis vectors must have 5 coordinates")
        if rank(basis) != len(basis):
            raise DomainError("basis vectors are linearly dependent")
        object.__setattr__(self, "basis", basis)

    @classmethod
    def span(cls, *vectors: Sequence) -> Subspace:
        return cls(tuple(tuple(v) for v in vectors))

    @classmethod
    def coordinate(cls, *indices: int) -> Subspace:
        """Span of standard basis vectors, 1-based (``coordinate(3, 4, 5)`` is span{e3, e4, e5})."""
        return cls(tuple(unit_vector(i) for i in indices))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def canonical(self) -> tuple[Vector, ...]:
        return rref(self.basis)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def as_lists(self) -> list[list[str]]:
        return [[_fmt(x) for x in v] for v in self.basis]


def unit_vector(index: int) -> Vector:
    v = [Fraction(0)] * AMBIENT_DIM
    v[index - 1] = Fraction(1)
    return tuple(v)


@dataclass(frozen=True)
class TangentFrame:
    xi: tuple[Fraction, Fraction]
    n1: Vector
    n2: Vector
    n3: Vector
    n4: Vector

    def vectors(self, iota: int) -> tuple[Vector, ...]:
        return (self.n1, self.n2, self.n3, self.n4)[: frame_dim(iota)]


def frame_at(phi: CubicForm, xi: Sequence) -> TangentFrame:
    t0, s0 = (Fraction(x) for x in xi)
    one, zero = Fraction(1), Fraction(0)
    return TangentFrame(
        xi=(t0, s0),
        n1=(one, zero, phi.phi_tt(t0, s0), phi.phi_ts(t0, s0), phi.phi_t(t0, s0)),
        n2=(zero, one, phi.phi_ts(t0, s0), phi.phi_ss(t0, s0), phi.phi_s(t0, s0)),
        n3=(zero, zero, one, zero, t0),
        n4=(zero, zero, zero, one, s0),
    )


def projection_dim(V: Subspace, frame: TangentFrame, iota: int) -> int:
    """dim of the orthogonal projection of V onto span{n_1..n_d}, d = 2 or 4."""
    ns = frame.vectors(iota)
    return rank([[dot(v, n) for n in ns] for v in V.basis])


def generic_inequality_holds(dim_v: int, dim_pi: int, iota: int) -> bool:
    """dim V <= (5 / d) dim pi, compared in integers."""
    return frame_dim(iota) * dim_v <= AMBIENT_DIM * dim_pi


# -- sampling -----------------------------------------------------------------


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Per-trial generator so results do not depend on evaluation order."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))


def random_rational(rng: np.random.Generator, max_den: int = XI_MAX_DENOMINATOR) -> Fraction:
    den = int(rng.integers(1, max_den + 1))
    return Fraction(int(rng.integers(0, den + 1)), den)


def random_xi(rng: np.random.Generator, square: tuple[int, int] | None = None, K: int = 1) -> tuple[Fraction, Fraction]:
    u, v = random_rational(rng), random_rational(rng)
    if square is None:
        return u, v
    i, j = square
    return (i + u) / K, (j + v) / K


def random_subspace(rng: np.random.Generator, dim: int, entry_range: int = ENTRY_RANGE) -> Subspace:
    if not 1 <= dim <= AMBIENT_DIM:
        raise DomainError(f"subspace dimension must be in 1..5, got {dim}")
    while True:
        rows = rng.integers(-entry_range, entry_range + 1, size=(dim, AMBIENT_DIM)).tolist()
        if rank(rows) == dim:
            return Subspace(tuple(tuple(r) for r in rows))


@dataclass
class Witness:
    subspace: Subspace
    xis: list[tuple[Fraction, Fraction]]
    dims: list[int]

    def as_dict(self) -> dict:
        return {
            "V": self.subspace.as_lists(),
            "xi": [[_fmt(t), _fmt(s)] for t, s in self.xis],
            "dims": self.dims,
        }


@dataclass
class TransversalityReport:
    form: str
    iota: int
    dim: int | str
    trials: int
    seed: int
    violations: int = 0
    samples: int = 0
    witnesses: list[Witness] = field(default_factory=list)
    K: int | None = None
    squares: int | None = None

    def as_dict(self) -> dict:
        out = {
            "form": self.form,
            "iota": self.iota,
            "dimV": self.dim,
            "trials": self.trials,
            "samples": self.samples,
            "violations": self.violations,
            "seed": self.seed,
            "witnesses": [w.as_dict() for w in self.witnesses],
        }
        if self.K is not None:
            out["K"] = self.K
            out["squares"] = self.squares
        return out


def _require_nondegenerate(phi: CubicForm) -> None:
    if not phi.is_nondegenerate:
        raise DomainError(f"form {phi} is degenerate")


def generic_dimension_check(phi: CubicForm, dim_v: int, iota: int, trials: int, seed: int = 0) -> TransversalityReport:
    """Sample (V, xi) pairs and count failures of dim V <= (5/d) dim pi(V).

    A failing draw gets one fresh xi before it is reported, since the
    exceptional points form a measure-zero set.
    """
    _require_nondegenerate(phi)
    frame_dim(iota)
    report = TransversalityReport(str(phi), iota, dim_v, trials, seed)
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        V = random_subspace(rng, dim_v)
        xi = random_xi(rng)
        d = projection_dim(V, frame_at(phi, xi), iota)
        report.samples += 1
        if not generic_inequality_holds(dim_v, d, iota):
            xi = random_xi(rng)
            d = projection_dim(V, frame_at(phi, xi), iota)
            if not generic_inequality_holds(dim_v, d, iota):
                report.violations += 1
                report.witnesses.append(Witness(V, [xi], [d]))
    return report


def dyadic_squares(K: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(K) for j in range(K)]


def bl_condition_sample(
    phi: CubicForm,
    K: int,
    squares: Iterable[tuple[int, int]],
    iota: int,
    trials: int,
    seed: int = 0,
    dim_v: int | None = None,
    subspaces: Sequence[Subspace] | None = None,
) -> TransversalityReport:
    """Sampled check of dim V <= 5/(d m) * sum_j dim pi_{xi_j}(V) over m K-squares.

    One point xi_j is drawn inside each square per trial. V is random (dimension
    ``dim_v``, or uniform in 1..4 when None) unless ``subspaces`` is given, in
    which case every listed V is checked in each trial. This is a consistency
    check by sampling, not a certificate over all subspaces.
    """
    d = frame_dim(iota)
    squares = [tuple(int(x) for x in sq) for sq in squares]
    if len(set(squares)) != len(squares):
        raise DomainError("duplicate K-squares")
    if not squares:
        raise DomainError("need at least one K-square")
    for i, j in squares:
        if not (0 <= i < K and 0 <= j < K):
            raise DomainError(f"square {(i, j)} is not a K-square for K={K}")
    m = len(squares)
    label: int | str = dim_v if dim_v is not None else ("given" if subspaces else "mixed")
    report = TransversalityReport(str(phi), iota, label, trials, seed, K=K, squares=m)

    def failing(V: Subspace, xis) -> tuple[bool, list[int]]:
        dims = [projection_dim(V, frame_at(phi, xi), iota) for xi in xis]
        return d * m * V.dim > AMBIENT_DIM * sum(dims), dims

    for trial in range(trials):
        rng = trial_rng(seed, trial)
        if subspaces:
            candidates = list(subspaces)
        else:
            k = dim_v if dim_v is not None else int(rng.integers(1, 5))
            candidates = [random_subspace(rng, k)]
        for V in candidates:
            xis = [random_xi(rng, sq, K) for sq in squares]
            report.samples += 1
            bad, dims = failing(V, xis)
            if bad:
                xis = [random_xi(rng, sq, K) for sq in squares]
                bad, dims = failing(V, xis)
                if bad:
                    report.violations += 1
                    report.witnesses.append(Witness(V, xis, dims))
    return report


# -- witness search -----------------------------------------------------------


def rref_subspaces(dim: int, max_coeff: int) -> Iterable[tuple[tuple[int, ...], ...]]:
    """Every reduced row-echelon basis of the given dimension with free entries in [-c, c].

    Distinct RREF matrices span distinct subspaces, so no deduplication pass is needed.
    """
    values = range(-max_coeff, max_coeff + 1)
    for pivots in itertools.combinations(range(AMBIENT_DIM), dim):
        free_slots = [
            (row, col)
            for row, p in enumerate(pivots)
            for col in range(p + 1, AMBIENT_DIM)
            if col not in pivots
        ]
        for assignment in itertools.product(values, repeat=len(free_slots)):
            rows = [[0] * AMBIENT_DIM for _ in pivots]
            for row, p in enumerate(pivots):
                rows[row][p] = 1
            for (row, col), val in zip(free_slots, assignment):
                rows[row][col] = val
            yield tuple(tuple(r) for r in rows)


def degenerate_witness_search(
    phi: CubicForm,
    iota: int,
    max_coeff: int = 2,
    samples: int = 20,
    seed: int = 0,
    threshold: float = 0.9,
    budget: int = 500_000,
) -> Subspace | None:
    """Look for V with dim V > (5/d) dim pi_xi(V) at >= ``threshold`` of sampled xi.

    Searches small-integer reduced bases of dimension 1..4. Returns the first
    witness, or None after an exhaustive search. Raises SearchBudgetExceeded
    (inconclusive) if more than ``budget`` subspaces would be examined.
    """
    d = frame_dim(iota)
    rng = trial_rng(seed, 0)
    frames = [frame_at(phi, random_xi(rng)) for _ in range(samples)]
    # columns of the inner-product matrix may be rescaled freely, so use integer frames
    scaled = [integer_rows(f.vectors(iota)) for f in frames]
    needed_fails = math.ceil(threshold * samples)
    allowed_passes = samples - needed_fails
    examined = 0
    for dim_v in range(1, AMBIENT_DIM):
        for basis in rref_subspaces(dim_v, max_coeff):
            examined += 1
            if examined > budget:
                raise SearchBudgetExceeded(
                    f"examined {budget} subspaces without finishing (max_coeff={max_coeff})"
                )
            passes = 0
            for ns in scaled:
                m = [[sum(a * b for a, b in zip(v, n)) for n in ns] for v in basis]
                if d * dim_v <= AMBIENT_DIM * int_rank(m):
                    passes += 1
                    if passes > allowed_passes:
                        break
            if passes <= allowed_passes:
                return Subspace(basis)
    return None


def _fmt(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"

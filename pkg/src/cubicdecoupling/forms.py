"""Binary cubic forms and the lattice maps onto the surfaces S and S'.

A cubic form is ``phi(t, s) = a t^3 + b t^2 s + c t s^2 + d s^3``. The
surface S is the image of ``(t, s) -> (t, s, phi_t, phi_s, phi)`` and S' the
image of ``(t, s) -> (phi_tt, phi_ts, phi_ss, phi_t, phi_s, phi)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import DomainError, RangeBoundError
from .linalg import rank
from .poly import Poly

# Limits keeping every psi coordinate of an r-fold sum inside int64 headroom.
MAX_COEFF = 10**3
MAX_N = 10**4

T, S = 0, 1


@dataclass(frozen=True)
class CubicForm:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in "abcd":
            value = getattr(self, name)
            if not isinstance(value, Fraction):
                object.__setattr__(self, name, Fraction(value))

    @classmethod
    def parse(cls, text: str) -> CubicForm:
        """Parse ``"a,b,c,d"`` (integers or rationals like ``1/2``)."""
        parts = [p.strip() for p in str(text).split(",")]
        if len(parts) != 4 or not all(parts):
            raise DomainError(f"cubic form must be 'a,b,c,d', got {text!r}")
        try:
            return cls(*(Fraction(p) for p in parts))
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"bad coefficient in {text!r}: {exc}") from None

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.coefficients)

    @property
    def coefficients(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    @property
    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.coefficients)

    def integer_coefficients(self) -> tuple[int, int, int, int]:
        if not self.is_integral:
            raise DomainError(f"form {self} does not have integer coefficients")
        return tuple(int(x) for x in self.coefficients)

    def check_counting_bounds(self, N: int) -> None:
        """Enforce the integer coefficient and range limits used for counting."""
        self.integer_coefficients()
        if N < 0:
            raise DomainError(f"N must be non-negative, got {N}")
        if N > MAX_N:
            raise RangeBoundError(f"N={N} exceeds the limit {MAX_N}")
        worst = max(abs(x) for x in self.coefficients)
        if worst > MAX_COEFF:
            raise RangeBoundError(f"coefficient {worst} exceeds the limit {MAX_COEFF}")

    @cached_property
    def poly(self) -> Poly:
        return Poly(2, {(3, 0): self.a, (2, 1): self.b, (1, 2): self.c, (0, 3): self.d})

    @cached_property
    def second_partials(self) -> tuple[Poly, Poly, Poly]:
        pt, ps = partials(self)
        return pt.diff(T), pt.diff(S), ps.diff(S)

    def __call__(self, t, s):
        a, b, c, d = self.coefficients
        return a * t**3 + b * t**2 * s + c * t * s**2 + d * s**3

    def phi_t(self, t, s):
        a, b, c, _ = self.coefficients
        return 3 * a * t * t + 2 * b * t * s + c * s * s

    def phi_s(self, t, s):
        _, b, c, d = self.coefficients
        return b * t * t + 2 * c * t * s + 3 * d * s * s

    def phi_tt(self, t, s):
        return 6 * self.a * t + 2 * self.b * s

    def phi_ts(self, t, s):
        return 2 * self.b * t + 2 * self.c * s

    def phi_ss(self, t, s):
        return 2 * self.c * t + 6 * self.d * s

    @property
    def is_nondegenerate(self) -> bool:
        return nondegeneracy_rank(self) == 2


def nondegeneracy_matrix(phi: CubicForm) -> list[list[Fraction]]:
    a, b, c, d = phi.coefficients
    return [[3 * a, 2 * b, c], [b, 2 * c, 3 * d]]


def nondegeneracy_rank(phi: CubicForm) -> int:
    """Rank of [[3a, 2b, c], [b, 2c, 3d]]; 2 exactly when phi is not a cube of a linear form."""
    return rank(nondegeneracy_matrix(phi))


def partials(phi: CubicForm) -> tuple[Poly, Poly]:
    return phi.poly.diff(T), phi.poly.diff(S)


def _int_coeffs(phi: CubicForm) -> tuple[int, int, int, int]:
    return phi.integer_coefficients()


def psi(phi: CubicForm, x: int, y: int) -> tuple[int, int, int, int, int]:
    """Lattice point of S above (x, y)."""
    a, b, c, d = _int_coeffs(phi)
    return (
        x,
        y,
        3 * a * x * x + 2 * b * x * y + c * y * y,
        b * x * x + 2 * c * x * y + 3 * d * y * y,
        a * x**3 + b * x * x * y + c * x * y * y + d * y**3,
    )


def psi_prime(phi: CubicForm, x: int, y: int) -> tuple[int, int, int, int, int, int]:
    """Lattice point of S' above (x, y)."""
    a, b, c, d = _int_coeffs(phi)
    return (
        6 * a * x + 2 * b * y,
        2 * b * x + 2 * c * y,
        2 * c * x + 6 * d * y,
        3 * a * x * x + 2 * b * x * y + c * y * y,
        b * x * x + 2 * c * x * y + 3 * d * y * y,
        a * x**3 + b * x * x * y + c * x * y * y + d * y**3,
    )


VARIANTS = {"S": (psi, 5), "Sprime": (psi_prime, 6)}


def variant_map(variant: str):
    """Return ``(map, dim)`` for a surface variant name ("S" or "Sprime")."""
    try:
        return VARIANTS[normalize_variant(variant)]
    except KeyError:
        raise DomainError(f"unknown variant {variant!r}") from None


def normalize_variant(variant: str) -> str:
    v = str(variant).strip().lower().replace("'", "prime").replace("′", "prime")
    if v == "s":
        return "S"
    if v == "sprime":
        return "Sprime"
    raise DomainError(f"unknown variant {variant!r}; expected 'S' or 'Sprime'")


@dataclass(frozen=True)
class TaylorDecomposition:
    """Graded pieces of phi(t+dt, s+ds) - phi(t, s) in the ring Q[t, s, dt, ds].

    ``linear``, ``bilinear`` and ``remainder`` collect the terms of degree 1, 2
    and 3 in (dt, ds). The ``expected_*`` fields are the closed forms each
    piece should equal.
    """

    difference: Poly
    linear: Poly
    bilinear: Poly
    remainder: Poly
    expected_linear: Poly
    expected_bilinear: Poly
    expected_remainder: Poly

    def checks(self) -> dict[str, bool]:
        return {
            "linear": self.linear == self.expected_linear,
            "bilinear": self.bilinear == self.expected_bilinear,
            "remainder": self.remainder == self.expected_remainder,
            "partition": self.linear + self.bilinear + self.remainder == self.difference,
            "remainder_homogeneous": self.remainder.is_homogeneous(3, (2, 3))
            and self.remainder.is_homogeneous(0, (0, 1)),
        }

    @property
    def identity(self) -> bool:
        return all(self.checks().values())


def taylor_decomposition(phi: CubicForm) -> TaylorDecomposition:
    # ring variables: t, s, dt, ds
    t, s, dt, ds = (Poly.variable(4, i) for i in range(4))
    base = phi.poly.embed(4, (0, 1))
    shifted = phi.poly.compose([t + dt, s + ds])
    difference = shifted - base
    delta = (2, 3)

    pt, ps = partials(phi)
    at_ts = (pt.embed(4, (0, 1)), ps.embed(4, (0, 1)))
    at_delta = (pt.embed(4, (2, 3)), ps.embed(4, (2, 3)))
    return TaylorDecomposition(
        difference=difference,
        linear=difference.graded_part(1, delta),
        bilinear=difference.graded_part(2, delta),
        remainder=difference.graded_part(3, delta),
        expected_linear=at_ts[0] * dt + at_ts[1] * ds,
        expected_bilinear=t * at_delta[0] + s * at_delta[1],
        expected_remainder=phi.poly.embed(4, (2, 3)),
    )

"""Sparse multivariate polynomials with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Monomial = tuple[int, ...]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


class Poly:
    """Polynomial in ``nvars`` variables stored as ``{exponents: coefficient}``.

    Zero coefficients are never stored, so two polynomials are equal exactly
    when their term dictionaries are equal.
    """

    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars: int, terms: Mapping[Monomial, object] | None = None):
        self.nvars = nvars
        clean: dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            mono = tuple(mono)
            if len(mono) != nvars or any(e < 0 for e in mono):
                raise ValueError(f"bad monomial {mono} for {nvars} variables")
            c = _as_fraction(coeff)
            if c:
                clean[mono] = clean.get(mono, Fraction(0)) + c
                if not clean[mono]:
                    del clean[mono]
        self._terms = clean

    @classmethod
    def constant(cls, nvars: int, value) -> Poly:
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int) -> Poly:
        mono = [0] * nvars
        mono[index] = 1
        return cls(nvars, {tuple(mono): 1})

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def coefficient(self, mono: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in different rings")
            return other
        return Poly.constant(self.nvars, other)

    def __add__(self, other) -> Poly:
        other = self._coerce(other)
        out = dict(self._terms)
        for mono, c in other._terms.items():
            out[mono] = out.get(mono, Fraction(0)) + c
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(self.nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> Poly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> Poly:
        return self._coerce(other) - self

    def __mul__(self, other) -> Poly:
        other = self._coerce(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = Poly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._terms == other._terms
        return self == Poly.constant(self.nvars, other)

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def diff(self, index: int) -> Poly:
        out = {}
        for mono, c in self._terms.items():
            e = mono[index]
            if e:
                m = list(mono)
                m[index] = e - 1
                out[tuple(m)] = c * e
        return Poly(self.nvars, out)

    def __call__(self, *values):
        """Evaluate at a point; exact for ints and Fractions."""
        if len(values) != self.nvars:
            raise ValueError(f"expected {self.nvars} values")
        total = 0
        for mono, c in self._terms.items():
            term = c
            for v, e in zip(values, mono):
                if e:
                    term = term * v**e
            total = total + term
        return total

    def compose(self, substitutions: Sequence[Poly]) -> Poly:
        """Substitute variable ``i`` by ``substitutions[i]`` (all in one target ring)."""
        if len(substitutions) != self.nvars:
            raise ValueError("need one substitution per variable")
        target = substitutions[0].nvars
        result = Poly(target)
        for mono, c in self._terms.items():
            term = Poly.constant(target, c)
            for sub, e in zip(substitutions, mono):
                if e:
                    term = term * sub**e
            result = result + term
        return result

    def embed(self, nvars: int, positions: Sequence[int]) -> Poly:
        """Re-express in a larger ring, sending variable ``i`` to ``positions[i]``."""
        out = {}
        for mono, c in self._terms.items():
            m = [0] * nvars
            for e, pos in zip(mono, positions):
                m[pos] += e
            out[tuple(m)] = c
        return Poly(nvars, out)

    def graded_part(self, degree: int, indices: Iterable[int]) -> Poly:
        """Terms whose total degree in the variables ``indices`` equals ``degree``."""
        idx = tuple(indices)
        return Poly(
            self.nvars,
            {m: c for m, c in self._terms.items() if sum(m[i] for i in idx) == degree},
        )

    def is_homogeneous(self, degree: int, indices: Iterable[int] | None = None) -> bool:
        idx = tuple(range(self.nvars)) if indices is None else tuple(indices)
        return all(sum(m[i] for i in idx) == degree for m in self._terms)

    def __repr__(self):
        if not self._terms:
            return f"Poly({self.nvars}, 0)"
        parts = []
        for mono in sorted(self._terms, reverse=True):
            parts.append(f"{self._terms[mono]}*x^{mono}")
        return f"Poly({self.nvars}, " + " + ".join(parts) + ")"

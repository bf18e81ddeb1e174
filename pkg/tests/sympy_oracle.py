"""Conversion of package polynomials to sympy expressions (test oracle only)."""

import sympy


def to_sympy(p, syms):
    return sum(
        (sympy.Rational(c.numerator, c.denominator) * sympy.prod([s**e for s, e in zip(syms, m)])
         for m, c in p.terms.items()),
        sympy.Integer(0),
    )

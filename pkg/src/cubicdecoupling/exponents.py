"""Exact exponent bookkeeping for the decoupling iteration.

Every quantity is a Fraction; equalities are exact, never up to tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, PoleError

SERIES_DEPTH = 200
ONE = Fraction(1)
HALF = Fraction(1, 2)


def as_rational(p) -> Fraction:
    if isinstance(p, Fraction):
        return p
    if isinstance(p, float):
        raise DomainError("p must be exact (int, Fraction or 'num/den' string), not float")
    try:
        return Fraction(str(p).strip())
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"cannot read {p!r} as a rational number") from None


def _solve_affine(value: Fraction, coeff: Fraction, const: Fraction, name: str, p: Fraction) -> Fraction:
    """Solve ``value = coeff * x + const`` for x."""
    if coeff == 0:
        raise DomainError(f"{name} is undefined at p={p}: its defining identity degenerates")
    return (value - const) / coeff


@dataclass(frozen=True)
class InterpolationParams:
    p: Fraction
    alpha1: Fraction
    alpha2: Fraction
    beta2: Fraction

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "beta2"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise DomainError(f"{name} = {value} lies outside (0, 1) at p = {self.p}")

    def identities(self) -> dict[str, bool]:
        """Re-substitute each defining Holder identity."""
        p, a1, a2, b2 = self.p, self.alpha1, self.alpha2, self.beta2
        return {
            "alpha1": 1 / (2 * p / 5) == a1 / (4 * p / 5) + (1 - a1) / 2,
            "alpha2": 1 / (4 * p / 5) == a2 / p + (1 - a2) / 6,
            "beta2": Fraction(1, 6) == (1 - b2) / 2 + b2 / (4 * p / 5),
        }

    @property
    def ratio(self) -> Fraction:
        """Geometric ratio (1 - alpha2) beta2 of the weight sequences."""
        return (1 - self.alpha2) * self.beta2


def solve_interpolation(p) -> InterpolationParams:
    p = as_rational(p)
    if p <= 5:
        raise DomainError(f"p must exceed 5 so that 2p/5 > 2, got p = {p}")
    # each identity is affine in its unknown: 1/q = x * (1/q1 - 1/q0) + 1/q0
    alpha1 = _solve_affine(5 / (2 * p), 5 / (4 * p) - HALF, HALF, "alpha1", p)
    alpha2 = _solve_affine(5 / (4 * p), 1 / p - Fraction(1, 6), Fraction(1, 6), "alpha2", p)
    beta2 = _solve_affine(Fraction(1, 6), 5 / (4 * p) - HALF, HALF, "beta2", p)
    return InterpolationParams(p, alpha1, alpha2, beta2)


@dataclass(frozen=True)
class IterationWeights:
    params: InterpolationParams
    r: int
    gamma: tuple[Fraction, ...]  # gamma_0 .. gamma_r
    b: tuple[Fraction, ...]  # b_0 .. b_r
    tau: tuple[Fraction, ...]  # tau_0 .. tau_r
    w: tuple[Fraction, ...]  # w_0 .. w_{r-1}

    def partition_sum(self) -> Fraction:
        """Sum of all Holder exponents; equals 1 exactly."""
        return sum(self.gamma) + sum(self.tau)


def weights(p, r: int) -> IterationWeights:
    if r < 1:
        raise DomainError("r must be at least 1")
    ip = solve_interpolation(p)
    a1, a2, b2 = ip.alpha1, ip.alpha2, ip.beta2
    q = ip.ratio
    gamma = (1 - a1,) + tuple(a1 * (1 - a2) * (1 - b2) * q ** (i - 1) for i in range(1, r + 1))
    b = tuple(2 * Fraction(3, 2) ** i for i in range(r + 1))
    tau = tuple(a1 * a2 * q**i for i in range(r)) + (a1 * q**r,)
    w = tuple((1 - a2) / (2 * a2) * tau[i] for i in range(r))
    return IterationWeights(ip, r, gamma, b, tau, w)


def closed_form_sum_bw(p: Fraction) -> Fraction:
    return 3 * (p - 5) / (2 * (15 - 10 * p + p * p))


def closed_form_sum_btau(p: Fraction) -> Fraction:
    return (75 - 25 * p + 2 * p * p) / (15 - 10 * p + p * p)


@dataclass(frozen=True)
class SeriesSums:
    p: Fraction
    S_w: Fraction
    S_tau: Fraction
    effective_ratio: Fraction
    partial_w: Fraction
    partial_tau: Fraction
    tail_w: Fraction
    tail_tau: Fraction
    depth: int

    @property
    def validated(self) -> bool:
        return 0 <= self.S_w - self.partial_w <= self.tail_w and 0 <= self.S_tau - self.partial_tau <= self.tail_tau


def series_sums(p, depth: int = SERIES_DEPTH) -> SeriesSums:
    """Closed forms of sum b_j w_j and sum b_j tau_j, checked against partial sums.

    With b_j growing like (3/2)^j the terms decay at rate (3/2)(1 - alpha2) beta2.
    Below p = 5 + sqrt(10) that rate reaches 1; that is exactly where the
    closed-form denominator 15 - 10p + p^2 vanishes, so divergence and the pole
    are reported together as a PoleError.
    """
    ip = solve_interpolation(p)
    p = ip.p
    q = ip.ratio
    if not 0 < q < 1:
        raise DomainError(f"ratio (1-alpha2)*beta2 = {q} is not in (0, 1)")
    rho = Fraction(3, 2) * q
    denom = 15 - 10 * p + p * p
    if denom == 0 or rho >= 1:
        raise PoleError(
            f"series diverge at p = {p}: effective ratio {rho} >= 1 and 15-10p+p^2 = {denom} <= 0"
        )
    # the infinite sequences: b_j w_j = alpha1 (1-alpha2) rho^j, b_j tau_j = 2 alpha1 alpha2 rho^j
    first_w = 2 * ((1 - ip.alpha2) / (2 * ip.alpha2)) * ip.alpha1 * ip.alpha2
    first_tau = 2 * ip.alpha1 * ip.alpha2
    partial_w = Fraction(0)
    partial_tau = Fraction(0)
    b_j = Fraction(2)
    q_j = Fraction(1)
    for _ in range(depth + 1):
        tau_j = ip.alpha1 * ip.alpha2 * q_j
        w_j = (1 - ip.alpha2) / (2 * ip.alpha2) * tau_j
        partial_w += b_j * w_j
        partial_tau += b_j * tau_j
        b_j *= Fraction(3, 2)
        q_j *= q
    tail_factor = rho ** (depth + 1) / (1 - rho)
    result = SeriesSums(
        p=p,
        S_w=closed_form_sum_bw(p),
        S_tau=closed_form_sum_btau(p),
        effective_ratio=rho,
        partial_w=partial_w,
        partial_tau=partial_tau,
        tail_w=first_w * tail_factor,
        tail_tau=first_tau * tail_factor,
        depth=depth,
    )
    if not result.validated:
        raise ArithmeticError(f"closed forms disagree with partial sums at p = {p}")
    return result


def lambda0(p) -> Fraction:
    sums = series_sums(p)
    return 2 * (HALF - 5 / (2 * sums.p)) + (HALF - Fraction(1, 6)) * sums.S_w


def decoupling_exponent(p) -> Fraction:
    """lambda0(p) / (sum b_j tau_j / 2); equals 2(1/2 - 1/9) = 7/9 at p = 9."""
    sums = series_sums(p)
    if sums.S_tau == 0:
        raise DomainError(f"sum b_j tau_j vanishes at p = {sums.p}")
    return lambda0(sums.p) / (sums.S_tau / 2)


def critical_exponent(p) -> Fraction:
    """2(1/2 - 1/p), the sharp l^p decoupling exponent for this surface at p = 9."""
    p = as_rational(p)
    return 2 * (HALF - 1 / p)


def diophantine_exponents(r: int) -> tuple[int, int, int]:
    """(2r, 4r - 9, max) for the bound N^{2r} + N^{4r-9}."""
    if r < 1:
        raise DomainError("r must be at least 1")
    low, high = 2 * r, 4 * r - 9
    return low, high, max(low, high)


def is_admissible(p) -> bool:
    try:
        series_sums(p, depth=0)
    except DomainError:
        return False
    return True


def constraint_report(p) -> dict[str, bool]:
    """Which of the domain constraints hold at p."""
    p = as_rational(p)
    out = {"p_gt_5": p > 5}
    try:
        ip = solve_interpolation(p)
    except DomainError:
        out.update(alphas_in_unit_interval=False, series_converge=False, denominator_nonzero=(15 - 10 * p + p * p) != 0)
        return out
    out["alphas_in_unit_interval"] = True
    out["series_converge"] = Fraction(3, 2) * ip.ratio < 1
    out["denominator_nonzero"] = (15 - 10 * p + p * p) != 0
    return out


def admissible_lower_bound(tol=Fraction(1, 10**12)) -> tuple[Fraction, Fraction]:
    """Bracket the left end of the admissible p-interval by exact bisection.

    Starts from a known inadmissible point (p = 5) and the admissible p = 9.
    The bracket converges to 5 + sqrt(10); above it every constraint holds and
    all three exponents tend to limits inside (0, 1) as p grows.
    """
    lo, hi = Fraction(5), Fraction(9)
    if not is_admissible(hi):
        raise ArithmeticError("p = 9 should be admissible")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if is_admissible(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def domain_check(p) -> dict:
    p = as_rational(p)
    lo, hi = admissible_lower_bound()
    return {
        "constraints": constraint_report(p),
        "admissible": is_admissible(p),
        "interval": {"lower_bracket": [fmt(lo), fmt(hi)], "lower_approx": float(hi), "upper": "inf"},
    }


def fmt(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def exponent_report(p) -> dict:
    """Everything the ``exponents`` command prints."""
    p = as_rational(p)
    ip = solve_interpolation(p)
    sums = series_sums(p)
    lam = lambda0(p)
    expo = decoupling_exponent(p)
    crit = critical_exponent(p)
    return {
        "p": fmt(p),
        "alpha1": fmt(ip.alpha1),
        "alpha2": fmt(ip.alpha2),
        "beta2": fmt(ip.beta2),
        "S_w": fmt(sums.S_w),
        "S_tau": fmt(sums.S_tau),
        "series_validated": sums.validated,
        "effective_ratio": fmt(sums.effective_ratio),
        "lambda0": fmt(lam),
        "exponent": fmt(expo),
        "critical_exponent": fmt(crit),
        "equals_critical": expo == crit,
        "domain_check": domain_check(p),
    }

"""Cubic Gauss and Jacobi sums, the Hasse-Davenport pipeline for the prime
constants c_varpi, closed-form diagonal-cubic point counts, and the
small-solution-free modulus certificate.

Exact quantities (Jacobi sums, c_varpi, per-prime density factors) never
touch floating point; Gauss sums are evaluated in complex doubles only to
check the |g|^2 = m and g^3 = m*J identities numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import NotFoundWithin, TooLarge
from .gf import (EisensteinInt, FieldCtx, CubicCharacter, cubic_character,
                 embedding, e_p, field_build, is_prime_int, norm_to_subfield,
                 trace_to_prime)
from .polyring import count_primes_of_degree

GAUSS_FIELD_CAP = 1 << 20


def split_prime_power(q: int) -> tuple[int, int]:
    """q = p^e with p prime."""
    for p in range(2, q + 1):
        if q % p == 0:
            e = 0
            while q % p == 0:
                q //= p
                e += 1
            if q != 1:
                raise TooLarge("q is not a prime power")
            if not is_prime_int(p):
                raise TooLarge("q is not a prime power")  # pragma: no cover
            return p, e
    raise TooLarge(f"bad q = {q}")


@dataclass(frozen=True)
class GaussSumValue:
    complex: complex
    m: int

    def modulus_residual(self) -> float:
        """| |g|^2 - m |, which must be tiny."""
        return abs(abs(self.complex) ** 2 - self.m)


def gauss_sum(chi: CubicCharacter) -> GaussSumValue:
    """g(chi) = sum over u of chi(u) e_p(Tr(u)), as a complex double."""
    ctx = chi.ctx
    # tally chi-class x trace-class, then one short exact-to-float sum
    counts = [[0] * ctx.p for _ in range(3)]
    for u in ctx.units():
        counts[ctx.log[u] % 3][trace_to_prime(ctx, u)] += 1
    total = 0j
    for j in range(3):
        wj = (EisensteinInt(1, 0) if j == 0 else
              EisensteinInt(0, 1) if j == 1 else EisensteinInt(-1, -1))
        for a, n in enumerate(counts[j]):
            if n:
                total += n * wj.to_complex() * e_p(a, ctx.p)
    return GaussSumValue(total, ctx.q)


def jacobi_sum(chi: CubicCharacter) -> EisensteinInt:
    """J(chi, chi) = sum over u of chi(u) chi(1-u), exactly in Z[omega]."""
    ctx = chi.ctx
    total = EisensteinInt(0, 0)
    for u in ctx.units():
        v = ctx.sub(1, u)
        if v:
            total = total + chi(u) * chi(v)
    return total


@lru_cache(maxsize=None)
def jacobi_two_re(q: int) -> int:
    """two_re of J(chi, chi) over F_q (q == 1 mod 3); character-choice free."""
    p, e = split_prime_power(q)
    ctx = field_build(p, e)
    return jacobi_sum(cubic_character(ctx)).two_re()


@lru_cache(maxsize=None)
def _jacobi_base(q: int) -> EisensteinInt:
    """J(chi, chi) over F_{q^2}, the base object of the Hasse-Davenport chain."""
    p, e = split_prime_power(q)
    ctx = field_build(p, 2 * e)
    return jacobi_sum(cubic_character(ctx))


def c_varpi(q: int, d: int) -> int:
    """The integer c shared by every prime of degree 2d over F_q:
    c = -two_re((-J)^d) with J the Jacobi sum over F_{q^2}."""
    J = _jacobi_base(q)
    return -((-J) ** d).two_re()


def hasse_davenport_check(q: int, d: int, cap: int = GAUSS_FIELD_CAP) -> float:
    """|g~(chi o N) + (-g~(chi))^d| over F_{(q^2)^d}; should vanish."""
    p, e = split_prime_power(q)
    if (q * q) ** d > cap:
        raise TooLarge(f"(q^2)^d = {(q * q) ** d} exceeds cap {cap}")
    base = field_build(p, 2 * e)
    big = field_build(p, 2 * e * d)
    chi = cubic_character(base)
    emb = embedding(base, big)
    # chi_varpi = chi o N as a character of the big field
    counts = [[0] * big.p for _ in range(3)]
    for u in big.units():
        nu = norm_to_subfield(big, base, u, emb)
        counts[base.log[nu] % 3][trace_to_prime(big, u)] += 1
    g_big = 0j
    for j in range(3):
        wj = (EisensteinInt(1, 0) if j == 0 else
              EisensteinInt(0, 1) if j == 1 else EisensteinInt(-1, -1))
        for a, n in enumerate(counts[j]):
            if n:
                g_big += n * wj.to_complex() * e_p(a, big.p)
    g_tilde_big = g_big / math.sqrt(big.q)
    g_tilde = gauss_sum(chi).complex / math.sqrt(base.q)
    return abs(g_tilde_big + (-g_tilde) ** d)


def diagonal_cubic_count(ctx: FieldCtx, k: int) -> int:
    """nu(r) = #{(x,y,z) in F_r^3 : x^3+y^3+z^3 = k}, closed form.

    r == 2 mod 3: r^2 for every k.  r == 1 mod 3: the Jacobi-sum formulas,
    with the k = 0 branch through two_re(J) rather than the chi-formula.
    """
    r = ctx.q
    if r % 3 == 2 or r % 3 == 0:
        # char 3 is rejected at field build, so r % 3 != 0 here
        return r * r
    j2 = jacobi_two_re(r)
    if k == 0:
        return r * r + j2 * (r - 1)
    s = 2 if ctx.is_cube(k) else -1
    return r * r + 3 * s * r - j2


def lemma21_search(q: int, d_max: int) -> int:
    """Least d >= 1 with Re((-g~^3)^d) >= 9/10, i.e. exactly
    10 * two_re((-J)^d) >= 18 * q^d over the base field F_{q^2}."""
    J = _jacobi_base(q)
    power = EisensteinInt(1, 0)
    minusJ = -J
    for d in range(1, d_max + 1):
        power = power * minusJ
        if 10 * power.two_re() >= 18 * q**d:
            return d
    raise NotFoundWithin(d_max, f"no qualifying d <= {d_max} (raise d_max)")


# -- rigorous log2 interval helper -------------------------------------------


def log2_bounds(x: Fraction, prec: int = 80) -> tuple[Fraction, Fraction]:
    """lo <= log2(x) <= hi for x > 0, by repeated squaring with directed
    integer rounding (floor run for lo, ceil run for hi)."""
    if x <= 0:
        raise ValueError("log2 of a nonpositive value")
    num, den = x.numerator, x.denominator
    e = num.bit_length() - den.bit_length()
    nn, dd = (num, den << e) if e >= 0 else (num << -e, den)
    if nn < dd:
        nn <<= 1
        e -= 1
    # now nn/dd in [1, 2)
    two = 1 << (prec + 1)

    def run(round_up: bool) -> int:
        if round_up:
            m = -((-nn << prec) // dd)
        else:
            m = (nn << prec) // dd
        bits = 0
        for _ in range(prec):
            m = m * m
            m = -((-m) >> prec) if round_up else m >> prec
            bits <<= 1
            if m >= two:
                bits |= 1
                m = -((-m) >> 1) if round_up else m >> 1
        return bits

    lo = e + Fraction(run(False) - 1, 1 << prec)
    hi = e + Fraction(run(True) + 1, 1 << prec)
    return lo, hi


@dataclass
class Certificate12:
    """Witness that rho(r_d)/|r_d|^2 < 1/C_A for the product modulus r_d of
    all monic primes of degree 2d; r_d itself is never materialized."""

    q: int
    A: float
    d: int
    C_A: Fraction
    m: int  # number of primes of degree 2d
    per_prime_factor: Fraction
    bound: Fraction  # exact upper bound for rho(r_d)/|r_d|^2
    log_bound: tuple[float, float]  # natural-log interval of factor^m
    passed: bool
    trail: list[dict] = field(default_factory=list)

    def to_report(self) -> dict:
        return {
            "q": self.q,
            "A": self.A,
            "d": self.d,
            "C_A": f"{self.C_A.numerator}/{self.C_A.denominator}",
            "m": self.m,
            "factor": f"{self.per_prime_factor.numerator}/{self.per_prime_factor.denominator}",
            "log_bound": [self.log_bound[0], self.log_bound[1]],
            "pass": self.passed,
        }


EXACT_POW_BIT_LIMIT = 200_000


def _certificate_at(q: int, A, d: int, C_A: Fraction) -> tuple[bool, Fraction, tuple[float, float], int, Fraction, int]:
    """Evaluate the certificate quantities at a fixed d."""
    c = c_varpi(q, d)
    Q = q ** (2 * d)
    factor = 1 + Fraction(c, Q) - Fraction(c, Q * Q)
    m = count_primes_of_degree(q, 2 * d)
    lo2, hi2 = log2_bounds(factor)
    ln2 = math.log(2.0)
    log_bound = (float(m * lo2) * ln2, float(m * hi2) * ln2)
    bits = factor.numerator.bit_length() * m
    if bits <= EXACT_POW_BIT_LIMIT:
        bound = factor**m
    else:
        # rigorous power-of-two upper bound from the hi log2 estimate
        bound = Fraction(2) ** math.ceil(m * hi2)
    passed = bound * C_A < 1
    return passed, bound, log_bound, m, factor, c


def theorem12_certificate(q: int, A, d_override: int | None = None,
                          d_max: int = 64) -> Certificate12:
    """Search d (even-degree prime blocks, Lemma-2.1-qualifying) until the
    product bound falls below 1/C_A with C_A = q^ceil(3(A+2))."""
    exponent = math.ceil(Fraction(3) * (Fraction(A) + 2))
    C_A = Fraction(q**exponent)
    J = _jacobi_base(q)
    minusJ = -J
    trail: list[dict] = []
    power = EisensteinInt(1, 0)
    for d in range(1, d_max + 1):
        power = power * minusJ
        if d_override is not None and d != d_override:
            continue
        if d_override is None and 10 * power.two_re() < 18 * q**d:
            continue  # not a Lemma 2.1 d; c_varpi not negative enough
        passed, bound, log_bound, m, factor, c = _certificate_at(q, A, d, C_A)
        trail.append({"d": d, "c": c, "m": m, "factor": factor, "pass": passed})
        if passed or d_override is not None:
            return Certificate12(q, A, d, C_A, m, factor, bound, log_bound,
                                 passed, trail)
    raise NotFoundWithin(d_max, f"certificate did not pass by d = {d_max}")

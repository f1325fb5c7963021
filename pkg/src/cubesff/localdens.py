"""Local densities at the finite places: solution counts rho(r, k) for
x^3 + y^3 + z^3 = k over O/rO, their normalized forms, the smooth modulus
N(M), complete exponential sums S_r(0), and partial singular series.

Counting strategy: factor the modulus, count each prime power by smooth
Hensel strata plus an explicit recursion into the all-divisible stratum,
and recombine by CRT multiplicativity.  Six-variable counts go through
exact histogram convolutions; S_r(0) has two independent exact routes
(character orthogonality in Z[zeta_p] versus count differences) that are
compared in the tests rather than trusted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .charsums import jacobi_two_re
from .errors import ZeroDensityClass, ZeroModulus
from .gf import FieldCtx, e_p, field_build
from .groups import CoeffGroup, convolve
from .polyring import (Poly, ResidueRing, ext_gcd, factorize, polys_up_to_degree,
                       primes_of_degree, psi_arg)


# -- closed-form counts over residue fields ----------------------------------


def _nu_residue_field(pi: Poly, kbar: Poly) -> int:
    """nu for O/(pi) via the Jacobi-sum closed forms; kbar reduced mod pi."""
    r = pi.abs_q()
    if r % 3 == 2:
        return r * r
    j2 = jacobi_two_re(r)
    if kbar.is_zero():
        return r * r + j2 * (r - 1)
    is_cube = kbar.pow_mod((r - 1) // 3, pi) == Poly.one(pi.ctx)
    s = 2 if is_cube else -1
    return r * r + 3 * s * r - j2


def rho_prime_power(pi: Poly, e: int, k: Poly) -> int:
    """#{(x,y,z) mod pi^e : x^3+y^3+z^3 = k}.

    Smooth stratum (not all coordinates divisible by pi) lifts by Hensel
    with multiplicity |pi|^2 per level; the all-divisible stratum recurses
    after dividing the equation by pi^3.
    """
    if e == 0:
        return 1
    r = pi.abs_q()
    mod = pi if e == 1 else _poly_pow(pi, e)
    k = k % mod
    kbar = k % pi
    star1 = _nu_residue_field(pi, kbar) - (1 if kbar.is_zero() else 0)
    total = star1 * r ** (2 * (e - 1))
    if e <= 3:
        if k.is_zero():
            total += r ** (3 * (e - 1))
    else:
        pi3 = _poly_pow(pi, 3)
        quot, rem = k.divmod(pi3)
        if rem.is_zero():
            total += r**6 * rho_prime_power(pi, e - 3, quot)
    return total


def _poly_pow(f: Poly, n: int) -> Poly:
    out = Poly.one(f.ctx)
    for _ in range(n):
        out = out * f
    return out


def rho(r: Poly, k: Poly, cap: int | None = None) -> int:
    """rho(r, k) for arbitrary nonzero r by CRT multiplicativity."""
    if r.is_zero():
        raise ZeroModulus("rho needs a nonzero modulus")
    if r.deg == 0:
        return 1
    total = 1
    kwargs = {} if cap is None else {"cap": cap}
    for pi, e in factorize(r, **kwargs):
        total *= rho_prime_power(pi, e, k)
    return total


def rho_star(pi: Poly, e: int, k: Poly) -> int:
    """Count excluding pi | gcd(x,y,z); Hensel-invariant after normalization."""
    r = pi.abs_q()
    kbar = k % pi
    return (_nu_residue_field(pi, kbar) - (1 if kbar.is_zero() else 0)) * r ** (2 * (e - 1))


# -- the smooth modulus N(M) --------------------------------------------------


@dataclass(frozen=True)
class ModulusN:
    M: int
    factorization: tuple[tuple[Poly, int], ...]
    value: Poly

    @property
    def ctx(self) -> FieldCtx:
        return self.value.ctx

    def abs_q(self) -> int:
        return self.value.abs_q()

    def deg(self) -> int:
        return int(self.value.deg) if not self.value.is_zero() else 0


def modulus_N(ctx: FieldCtx, M: int) -> ModulusN:
    """N = prod over primes of degree <= M of pi^floor(M/deg pi)."""
    fact = []
    value = Poly.one(ctx)
    for dd in range(1, M + 1):
        for pi in primes_of_degree(ctx, dd):
            e = M // dd
            fact.append((pi, e))
            value = value * _poly_pow(pi, e)
    expected_deg = sum(dd * (M // dd) * len(primes_of_degree(ctx, dd))
                       for dd in range(1, M + 1))
    assert (int(value.deg) if M > 0 else 0) == expected_deg
    return ModulusN(M, tuple(fact), value)


def _as_factors(N) -> tuple[tuple[Poly, int], ...]:
    if isinstance(N, ModulusN):
        return N.factorization
    return tuple(factorize(N))


def _value_of(N) -> Poly:
    return N.value if isinstance(N, ModulusN) else N


def rho_tilde(N, k: Poly) -> Fraction:
    """rho(N, k) / |N|^2 as an exact rational."""
    value = _value_of(N)
    if value.deg == 0:
        return Fraction(1)
    total = 1
    for pi, e in _as_factors(N):
        total *= rho_prime_power(pi, e, k)
    return Fraction(total, value.abs_q() ** 2)


def l_A(params, k: Poly, N) -> Fraction:
    """The local model sigma_{infty,A}(k) * rho_tilde(N, k)."""
    from .archdens import sigma_infty_A

    return sigma_infty_A(params, k) * rho_tilde(N, k)


def recip_rho_average(N) -> Fraction:
    """|N|^{-1} sum over k mod N of 1/rho_tilde(N, k), exactly; factors over
    prime powers by CRT."""
    total = Fraction(1)
    for pi, e in _as_factors(N):
        re = pi.abs_q() ** e
        mod = _poly_pow(pi, e)
        acc = Fraction(0)
        for k in polys_up_to_degree(pi.ctx, int(mod.deg) - 1):
            cnt = rho_prime_power(pi, e, k)
            if cnt == 0:
                raise ZeroDensityClass(
                    f"rho({mod.serialize()}, {k.serialize()}) = 0")
            acc += Fraction(re * re, cnt)
        total *= acc / re
    return total


# -- complete exponential sums S_r(0) -----------------------------------------


@dataclass(frozen=True)
class WeylSum:
    """T(a, r) = sum over x mod r of psi(a x^3 / r), held as exact counts of
    each F_p argument class (an element of Z[zeta_p])."""

    counts: tuple[int, ...]
    p: int

    def to_complex(self) -> complex:
        return sum(n * e_p(j, self.p) for j, n in enumerate(self.counts))

    def as_rational(self) -> int:
        """The integer value if the class sums force rationality."""
        tail = set(self.counts[1:])
        if len(tail) != 1:
            raise ValueError("value is irrational in Z[zeta_p]")
        return self.counts[0] - self.counts[1]


def _zeta_convolve(u: tuple[int, ...], v: tuple[int, ...], p: int) -> tuple[int, ...]:
    out = [0] * p
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                if b:
                    out[(i + j) % p] += a * b
    return tuple(out)


def _zeta_pow(u: tuple[int, ...], n: int, p: int) -> tuple[int, ...]:
    out = tuple([1] + [0] * (p - 1))
    base = u
    while n:
        if n & 1:
            out = _zeta_convolve(out, base, p)
        base = _zeta_convolve(base, base, p)
        n >>= 1
    return out


def weyl_sum_T(a: Poly, r: Poly) -> WeylSum:
    if r.is_zero():
        raise ZeroModulus("weyl sum needs a nonzero modulus")
    ctx = r.ctx
    counts = [0] * ctx.p
    ring = ResidueRing(r)
    for x in ring.elements():
        v = (a * x * x * x) % r
        counts[psi_arg(v, r)] += 1
    return WeylSum(tuple(counts), ctx.p)


def _unit_cube_classes(r: Poly) -> list[tuple[Poly, int]]:
    """Representatives (a, class_size) of units mod r up to unit cubes."""
    ring = ResidueRing(r)
    units = [u for u in ring.elements() if u.gcd(r).deg == 0]
    cubes = {(u * u * u) % r for u in units}
    reps: list[Poly] = []
    for u in units:
        new = True
        for rep in reps:
            g, s, _ = ext_gcd(rep, r)
            assert g.deg == 0
            inv = s.scale(rep.ctx.inv(g.coeff(0)))
            if (u * inv) % r in cubes:
                new = False
                break
        if new:
            reps.append(u)
        if len(reps) * len(cubes) == len(units):
            break
    size = len(cubes)
    assert len(reps) * size == len(units)
    return [(rep, size) for rep in reps]


def s_r0_character(r: Poly) -> tuple[int, complex]:
    """S_r(0) = sum over units a of T(a,r)^6, exactly in Z[zeta_p].

    T(a u^3, r) = T(a, r), so one Weyl sum per unit cube class suffices.
    """
    if r.deg == 0:
        return 1, 1 + 0j
    p = r.ctx.p
    total = [0] * p
    cval = 0j
    for rep, size in _unit_cube_classes(r):
        T = weyl_sum_T(rep, r)
        T6 = _zeta_pow(T.counts, 6, p)
        for j in range(p):
            total[j] += size * T6[j]
        cval += size * T.to_complex() ** 6
    return WeylSum(tuple(total), p).as_rational(), cval


# -- six-variable counts and the counting route -------------------------------


@lru_cache(maxsize=None)
def rho6_prime_power(pi: Poly, j: int) -> int:
    """#{x in (O/pi^j)^6 : x_1^3 + ... + x_6^3 = 0} by exact convolution."""
    if j == 0:
        return 1
    ctx = pi.ctx
    n = int(pi.deg) * j
    group = CoeffGroup(ctx, n)
    mod = _poly_pow(pi, j)
    hist = [0] * group.size
    for x in polys_up_to_degree(ctx, n - 1):
        hist[((x * x * x) % mod).enc()] += 1
    h2 = convolve(group, hist, hist)
    h3 = convolve(group, h2, hist)
    return sum(a * b for a, b in zip(h3, group.negate_vector(h3)))


def rho6_tilde(N) -> Fraction:
    """|N|^{-5} #{x in (O/N)^6 : F(x) = 0}, multiplicative over prime powers."""
    value = _value_of(N)
    if value.deg == 0:
        return Fraction(1)
    total = 1
    for pi, e in _as_factors(N):
        total *= rho6_prime_power(pi, e)
    return Fraction(total, value.abs_q() ** 5)


@lru_cache(maxsize=None)
def s_r0_prime_power(pi: Poly, j: int) -> int:
    """S_{pi^j}(0) = |pi|^{6j} (rho6~(pi^j) - rho6~(pi^{j-1})), exact."""
    if j == 0:
        return 1
    r6j = Fraction(rho6_prime_power(pi, j), pi.abs_q() ** (5 * j))
    r6jm = Fraction(rho6_prime_power(pi, j - 1), pi.abs_q() ** (5 * (j - 1)))
    val = pi.abs_q() ** (6 * j) * (r6j - r6jm)
    assert val.denominator == 1
    return int(val)


def s_r0(r: Poly) -> int:
    """S_r(0) by the counting route, multiplicatively over prime powers."""
    if r.deg == 0:
        return 1
    total = 1
    for pi, e in factorize(r):
        total *= s_r0_prime_power(pi, e)
    return total


# -- partial singular series --------------------------------------------------


@dataclass
class SingularSeriesPartial:
    M_max: int
    partial: Fraction
    per_degree: list[Fraction]       # signed sums, index = degree
    per_degree_tail: list[Fraction]  # absolute-value sums
    identity_checks: list[tuple[int, bool]]  # (M, rho6~(N(M)) == divisor sum)


def singular_series(ctx: FieldCtx, M_max: int) -> SingularSeriesPartial:
    """Partial sums of the singular series over monic r with deg r <= M_max,
    plus the divisor-sum identity checks at every N(M), M <= M_max."""
    per_degree = [Fraction(0)] * (M_max + 1)
    per_tail = [Fraction(0)] * (M_max + 1)
    per_degree[0] = Fraction(1)
    per_tail[0] = Fraction(1)
    # generating-function product over primes, truncated at degree M_max
    terms = [per_degree[:], per_tail[:]]
    for dd in range(1, M_max + 1):
        for pi in primes_of_degree(ctx, dd):
            local_signed = [Fraction(0)] * (M_max + 1)
            local_abs = [Fraction(0)] * (M_max + 1)
            local_signed[0] = local_abs[0] = Fraction(1)
            j = 1
            while j * dd <= M_max:
                s = s_r0_prime_power(pi, j)
                w = Fraction(s, pi.abs_q() ** (6 * j))
                local_signed[j * dd] = w
                local_abs[j * dd] = abs(w)
                j += 1
            for vec, local in zip(terms, (local_signed, local_abs)):
                new = [Fraction(0)] * (M_max + 1)
                for i, a in enumerate(vec):
                    if a:
                        for jdeg, b in enumerate(local):
                            if b and i + jdeg <= M_max:
                                new[i + jdeg] += a * b
                vec[:] = new
    per_degree, per_tail = terms
    checks = []
    for M in range(M_max + 1):
        N = modulus_N(ctx, M)
        divisor_sum = Fraction(1)
        for pi, e in N.factorization:
            divisor_sum *= sum(Fraction(s_r0_prime_power(pi, j), pi.abs_q() ** (6 * j))
                               for j in range(e + 1))
        checks.append((M, divisor_sum == rho6_tilde(N)))
    return SingularSeriesPartial(M_max, sum(per_degree, Fraction(0)),
                                 per_degree, per_tail, checks)

"""Archimedean (place at infinity) densities: the scaling-adapted weights,
their finite coset decomposition, and exact evaluation of sigma_{infty,A}(k)
and the singular integral sigma_infty as rationals with q-power denominators.

Three interchangeable evaluation routes are kept:

* closed   -- valuation-stratified Hensel reduction to finite-field counts
              (the default; handles every parameter size exactly),
* histogram -- cube-value histograms on F_q[s]/(s^L) combined by exact
              group convolution (the discretized-volume picture),
* brute    -- direct lattice enumeration (small cases only; the oracle).

All routes agree exactly; the tests insist on it.

Convention pinned by the exactness of the downstream averaging identities:
the theta-integral executes to q^{4A~+1} * vol{ |F| <= q^{-4A~-2} }, so both
sigma engines discretize at s-precision 7A~+2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import ConfigInvalid, InsufficientPrecision, SizeMismatch, TooLarge
from .gf import FieldCtx
from .groups import CoeffGroup, convolve, group_cap_bits
from .polyring import NEG_INF, Poly, polys_up_to_degree


@dataclass(frozen=True)
class WeightParams:
    """Parameters of the weight: degree slack A >= 0, residue alpha of the
    target degree mod 3, and the scale exponent d (P = t^d, B = 3d+alpha)."""

    ctx: FieldCtx
    A: float
    alpha: int
    d: int

    def __post_init__(self):
        if self.A < 0:
            raise ConfigInvalid("A must be >= 0")
        if self.alpha not in (0, 1, 2):
            raise ConfigInvalid("alpha must be in {0, 1, 2}")
        if self.d < 1:
            raise ConfigInvalid("d must be >= 1")
        if self.alpha > 0 and self.Atilde < self.alpha:
            raise ConfigInvalid(
                f"alpha = {self.alpha} needs floor(alpha/3 + A) >= alpha; "
                f"got A~ = {self.Atilde}")

    @property
    def Atilde(self) -> int:
        return math.floor(Fraction(self.alpha, 3) + Fraction(self.A))

    @property
    def B(self) -> int:
        return 3 * self.d + self.alpha

    @property
    def q(self) -> int:
        return self.ctx.q

    @property
    def P(self) -> Poly:
        return Poly.t_pow(self.ctx, self.d)

    @property
    def L(self) -> int:
        """s-precision of the sigma engines."""
        return 7 * self.Atilde + 2


# -- finite-field base counts -------------------------------------------------


@lru_cache(maxsize=None)
def _u2_table(ctx: FieldCtx) -> tuple[int, ...]:
    """U2[mu] = #{(a,b) in (F_q^x)^2 : a^3 + b^3 = mu}."""
    out = [0] * ctx.q
    cubes = [ctx.pow(a, 3) for a in ctx.units()]
    for ca in cubes:
        for cb in cubes:
            out[ctx.add(ca, cb)] += 1
    return tuple(out)


@lru_cache(maxsize=None)
def _n0_table(ctx: FieldCtx) -> tuple[int, ...]:
    """N0[mu] = #{(a,b,c) in (F_q^x)^3 : a^3 + b^3 + c^3 = mu}."""
    u2 = _u2_table(ctx)
    out = [0] * ctx.q
    for c in ctx.units():
        cc = ctx.pow(c, 3)
        for mu in ctx.elements():
            out[mu] += u2[ctx.sub(mu, cc)]
    return tuple(out)


def _stratum_count(ctx: FieldCtx, j_cond: int, j_amb: int, mubar: int) -> int:
    """#{x in (F_q[s]/(s^{j_amb}))^3 : F0(x) = mu mod s^{j_cond},
    v(x1) = v(x2) = 0, v(x3) in {0, 1}} for any mu with mu mod s = mubar.

    Smooth Hensel lifting makes this depend on mu only through mubar:
    q^{3*j_amb - j_cond - 2} N0(mubar) + (q-1) q^{3*j_amb - j_cond - 3} U2(mubar).
    """
    assert j_cond >= 1 and j_amb >= max(j_cond, 2)
    q = ctx.q
    return (q ** (3 * j_amb - j_cond - 2) * _n0_table(ctx)[mubar]
            + (q - 1) * q ** (3 * j_amb - j_cond - 3) * _u2_table(ctx)[mubar])


# -- sigma_{infty,A}(k) --------------------------------------------------------


def m_series(params: WeightParams, k: Poly) -> Poly:
    """The reverse image m = P^{-3} t^{-3A~} k as a polynomial in s,
    truncated mod s^L; coefficient of s^i is k_{3(d+A~)-i}."""
    if k.deg != params.B:
        raise SizeMismatch(f"deg k = {k.deg}, need exactly B = {params.B}")
    rev = k.reverse(3 * (params.d + params.Atilde))
    return Poly(params.ctx, rev.coeffs[:params.L])


def _v_s(f: Poly) -> int | float:
    """s-valuation: index of the lowest nonzero coefficient (inf for 0)."""
    for i, c in enumerate(f.coeffs):
        if c:
            return i
    return math.inf


def sigma_infty_A(params: WeightParams, k: Poly, route: str = "closed",
                  cap_bits: int | None = None) -> Fraction:
    """sigma_{infty,A}(k) = q^{-14A~-2} * #{x in (F_q[s]/(s^L))^3 :
    F0(x) = m mod s^L, v(x1)=v(x2)=b<=A~, b <= v(x3) <= b+1}."""
    m = m_series(params, k)
    At, L, q = params.Atilde, params.L, params.q
    vm = _v_s(m)
    assert vm == 3 * At - params.alpha
    if route == "closed":
        total = 0
        for b in range(At + 1):
            if 3 * b > vm:
                continue
            total += q ** (6 * b) * _stratum_count(params.ctx, L - 3 * b,
                                                   L - 3 * b, m.coeff(3 * b))
        return Fraction(total, q ** (14 * At + 2))
    if route == "histogram":
        return Fraction(_sigma_A_count_histogram(params, m, cap_bits),
                        q ** (14 * At + 2))
    if route == "brute":
        return Fraction(_sigma_A_count_brute(params, m), q ** (14 * At + 2))
    raise ConfigInvalid(f"unknown route {route!r}")


def _sigma_A_count_histogram(params: WeightParams, m: Poly,
                             cap_bits: int | None = None) -> int:
    At, L = params.Atilde, params.L
    hs = cube_histograms(params.ctx, L, At + 1, cap_bits)
    target = m.enc()
    total = 0
    for b in range(At + 1):
        pair = group_convolve(hs[b], hs[b])
        third = hs[b] + hs[b + 1]
        total += group_convolve(pair, third).counts[target]
    return total


def _sigma_A_count_brute(params: WeightParams, m: Poly,
                         cap: int = 1 << 24) -> int:
    ctx, At, L = params.ctx, params.Atilde, params.L
    if ctx.q ** (3 * L) > cap:
        raise TooLarge(f"q^(3L) = {ctx.q ** (3 * L)} exceeds brute cap {cap}")
    sL = Poly.t_pow(ctx, L)
    elems = list(polys_up_to_degree(ctx, L - 1))
    cubes = {x: (x * x * x) % sL for x in elems}
    total = 0
    for x1 in elems:
        b = _v_s(x1)
        if b > At:
            continue
        for x2 in elems:
            if _v_s(x2) != b:
                continue
            c12 = cubes[x1] + cubes[x2]
            for x3 in elems:
                if not b <= _v_s(x3) <= b + 1:
                    continue
                if c12 + cubes[x3] == m:
                    total += 1
    return total


def prop32_sweep(params: WeightParams, ks: list[Poly]) -> dict:
    """Assert the exact lower bound sigma_{infty,A}(k) >= A~/q^2 on samples."""
    bound = Fraction(params.Atilde, params.q**2)
    rows = []
    ok = True
    for k in ks:
        s = sigma_infty_A(params, k)
        good = s >= bound
        ok = ok and good
        rows.append({"k": k.serialize(), "sigma": s, "bound": bound, "ok": good})
    return {"bound": bound, "all_pass": ok, "rows": rows}


# -- the singular integral ----------------------------------------------------


def sigma_infty(params: WeightParams, route: str = "closed",
                cutoff_bump: int = 0, cap_bits: int | None = None) -> Fraction:
    """sigma_infty = q^{c+1} vol{x in supp w : |F(x)| <= q^{-c-2}} with
    c = 4A~ + cutoff_bump; the bump must not change the value (tested)."""
    ctx, At, alpha, q = params.ctx, params.Atilde, params.alpha, params.q
    L = 7 * At + 2 + cutoff_bump
    v = 3 * At - alpha
    denom_exp = 6 * L - 10 * At - 7 - cutoff_bump

    def n_class(lam: int, nfun) -> int:
        return nfun(v, lam)

    if route == "closed":
        def nfun(vm, lam):
            total = 0
            for b in range(At + 1):
                if 3 * b > vm:
                    continue
                mubar = lam if 3 * b == vm else 0
                total += q ** (6 * b) * _stratum_count(ctx, L - 3 * b,
                                                       L - 3 * b, mubar)
            return total
        count = q ** (L - v - 1) * sum(
            n_class(lam, nfun) * n_class(ctx.neg(lam), nfun)
            for lam in ctx.units())
        return Fraction(count, q**denom_exp)
    if route == "histogram":
        hs = cube_histograms(ctx, L, At + 1, cap_bits)
        group = hs[0].group
        nvec = [0] * group.size
        for b in range(At + 1):
            pair = group_convolve(hs[b], hs[b])
            third = hs[b] + hs[b + 1]
            full = group_convolve(pair, third)
            for i, c in enumerate(full.counts):
                nvec[i] += c
        count = 0
        for i, c in enumerate(nvec):
            if c and _v_s(Poly.from_enc(ctx, i)) == v:
                count += c * nvec[group.neg(i)]
        return Fraction(count, q**denom_exp)
    if route == "brute":
        return Fraction(_sigma_count_brute6(params, L, v), q**denom_exp)
    raise ConfigInvalid(f"unknown route {route!r}")


def _sigma_count_brute6(params: WeightParams, L: int, v: int,
                        cap: int = 1 << 24) -> int:
    ctx, At = params.ctx, params.Atilde
    if ctx.q ** (6 * L) > cap:
        raise TooLarge(f"q^(6L) = {ctx.q ** (6 * L)} exceeds brute cap {cap}")
    sL = Poly.t_pow(ctx, L)
    elems = list(polys_up_to_degree(ctx, L - 1))
    cubes = {x: (x * x * x) % sL for x in elems}
    triples = []  # (F0 value, count) over the nu-pattern
    tally: dict[Poly, int] = {}
    for x1 in elems:
        b = _v_s(x1)
        if b > At:
            continue
        for x2 in elems:
            if _v_s(x2) != b:
                continue
            c12 = cubes[x1] + cubes[x2]
            for x3 in elems:
                if not b <= _v_s(x3) <= b + 1:
                    continue
                f = c12 + cubes[x3]
                tally[f] = tally.get(f, 0) + 1
    total = 0
    for f, c in tally.items():
        if _v_s(f) == v:
            total += c * tally.get(-f, 0)
    return total


# -- cube histograms and exact group convolution ------------------------------


class Histogram:
    """Exact integer function on the additive group of F_q[s]/(s^L)."""

    __slots__ = ("group", "counts")

    def __init__(self, group: CoeffGroup, counts: list[int]):
        assert len(counts) == group.size
        self.group = group
        self.counts = counts

    @property
    def L(self) -> int:
        return self.group.n

    def mass(self) -> int:
        return sum(self.counts)

    def value(self, f: Poly) -> int:
        return self.counts[f.enc()]

    def __add__(self, other: "Histogram") -> "Histogram":
        assert self.group is other.group
        return Histogram(self.group,
                         [a + b for a, b in zip(self.counts, other.counts)])


def cube_histograms(ctx: FieldCtx, L: int, b_max: int,
                    cap_bits: int | None = None) -> dict[int, Histogram]:
    """h_b(r) = #{x in F_q[s]/(s^L) : v_s(x) = b, x^3 = r mod s^L} for
    0 <= b <= b_max."""
    group = CoeffGroup(ctx, L, cap_bits)
    sL = Poly.t_pow(ctx, L)
    hs = {b: [0] * group.size for b in range(b_max + 1)}
    leftover = 0
    for x in polys_up_to_degree(ctx, L - 1):
        b = _v_s(x)
        if b > b_max:
            leftover += 1
            continue
        hs[b][((x * x * x) % sL).enc()] += 1
    out = {b: Histogram(group, v) for b, v in hs.items()}
    assert sum(h.mass() for h in out.values()) + leftover == ctx.q**L
    return out


def group_convolve(h1: Histogram, h2: Histogram, method: str = "auto") -> Histogram:
    assert h1.group is h2.group
    return Histogram(h1.group, convolve(h1.group, h1.counts, h2.counts, method))


# -- Laurent windows and the weight indicators --------------------------------


class LaurentWindow:
    """Finite Laurent series sum c_i t^i with exact coefficients at every
    exponent >= known_lo (None = exact everywhere below too)."""

    __slots__ = ("ctx", "lo", "coeffs", "known_lo")

    def __init__(self, ctx: FieldCtx, lo: int, coeffs, known_lo: int | None = None):
        cs = list(coeffs)
        # normalize: trim top zeros, advance lo over bottom zeros
        while cs and cs[-1] == 0:
            cs.pop()
        while cs and cs[0] == 0:
            cs.pop(0)
            lo += 1
        self.ctx = ctx
        self.lo = lo
        self.coeffs = tuple(cs)
        self.known_lo = known_lo

    @staticmethod
    def from_poly(f: Poly, shift: int = 0) -> "LaurentWindow":
        """f * t^shift as an exact window."""
        return LaurentWindow(f.ctx, shift, f.coeffs)

    def coeff(self, i: int) -> int:
        if not self.coeffs:
            return 0
        j = i - self.lo
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else 0

    def abs_exp(self) -> int | None:
        """Exponent of |.|: top nonzero exponent, or None when the known
        part vanishes (then |x| < q^known_lo if truncated, else x = 0)."""
        return self.lo + len(self.coeffs) - 1 if self.coeffs else None

    def __eq__(self, other):
        return (isinstance(other, LaurentWindow) and self.lo == other.lo
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.lo, self.coeffs))

    def __add__(self, other: "LaurentWindow") -> "LaurentWindow":
        ctx = self.ctx
        klo = _min_known(self.known_lo, other.known_lo)
        if not self.coeffs:
            return LaurentWindow(ctx, other.lo, other.coeffs, klo)
        if not other.coeffs:
            return LaurentWindow(ctx, self.lo, self.coeffs, klo)
        lo = min(self.lo, other.lo)
        hi = max(self.lo + len(self.coeffs), other.lo + len(other.coeffs))
        out = [ctx.add(self.coeff(i), other.coeff(i)) for i in range(lo, hi)]
        return LaurentWindow(ctx, lo, out, klo)

    def __neg__(self) -> "LaurentWindow":
        ctx = self.ctx
        return LaurentWindow(ctx, self.lo, [ctx.neg(c) for c in self.coeffs],
                             self.known_lo)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "LaurentWindow") -> "LaurentWindow":
        ctx = self.ctx
        if not self.coeffs or not other.coeffs:
            # product is 0 as far as anything known goes; precision tracking
            # for 0-windows keeps the weaker bound
            return LaurentWindow(ctx, 0, (), _min_known(self.known_lo, other.known_lo))
        lo = self.lo + other.lo
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = ctx.add(out[i + j], ctx.mul(a, b))
        klo = None
        for w1, w2 in ((self, other), (other, self)):
            if w1.known_lo is not None:
                top2 = w2.abs_exp()
                bound = w1.known_lo + (top2 if top2 is not None else w2.known_lo or 0)
                klo = bound if klo is None else max(klo, bound)
        return LaurentWindow(ctx, lo, out, klo)

    def cube(self) -> "LaurentWindow":
        return self * self * self


def _min_known(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)  # the *weaker* (higher) known_lo wins


def _abs_is(w: LaurentWindow, target: int) -> bool:
    """Decide |w| = q^target, raising if the window is too shallow."""
    top = w.abs_exp()
    if top is not None:
        return top == target
    if w.known_lo is None:
        return False  # exact zero
    if w.known_lo <= target:
        return False  # |w| < q^known_lo <= q^target
    raise InsufficientPrecision(
        f"window known only above exponent {w.known_lo}, need {target}")


def nu_indicator(params: WeightParams, x: LaurentWindow, y: LaurentWindow,
                 z: LaurentWindow) -> int:
    """Exact indicator: |x^3+y^3+z^3| = q^alpha, 1 <= |x| = |y| <= q^{A~},
    |y|/q <= |z| <= |y|."""
    ax, ay, az = x.abs_exp(), y.abs_exp(), z.abs_exp()
    for w, a in ((x, ax), (y, ay), (z, az)):
        if a is None:
            # zero or below the window; both fail |.| >= 1 resp. >= |y|/q
            if w.known_lo is not None and w.known_lo > params.Atilde - 1:
                raise InsufficientPrecision("coordinate window too shallow")
            return 0
    if not (ax == ay and 0 <= ax <= params.Atilde):
        return 0
    if not (ay - 1 <= az <= ay):
        return 0
    f = x.cube() + y.cube() + z.cube()
    return 1 if _abs_is(f, params.alpha) else 0


def w_indicator(params: WeightParams, coords: list[LaurentWindow]) -> int:
    assert len(coords) == 6
    return (nu_indicator(params, *coords[:3])
            * nu_indicator(params, *coords[3:]))


# -- the finite coset set R_{A,alpha} -----------------------------------------


@dataclass(frozen=True)
class RSetElem:
    """One coset center: a triple of exact Laurent windows supported on
    t-exponents alpha - 2A~ ... A~."""

    coords: tuple[LaurentWindow, LaurentWindow, LaurentWindow]


def r_set_enumerate(params: WeightParams, cap: int = 1 << 22) -> list[RSetElem]:
    """All members of R_{A,alpha}; every one satisfies the weight conditions
    and together they tile supp nu by radius-q^{alpha-2A~} boxes."""
    ctx, At, alpha = params.ctx, params.Atilde, params.alpha
    lo = alpha - 2 * At
    width = 3 * At + 1 - alpha
    if ctx.q ** (3 * width) > cap:
        raise TooLarge(f"R-set enumeration q^{3 * width} exceeds cap {cap}")
    windows = [LaurentWindow(ctx, lo, f.coeffs)
               for f in polys_up_to_degree(ctx, width - 1)]
    out = []
    for wx in windows:
        ax = wx.abs_exp()
        if ax is None or not 0 <= ax <= At:
            continue
        for wy in windows:
            if wy.abs_exp() != ax:
                continue
            for wz in windows:
                az = wz.abs_exp()
                if az is None or not ax - 1 <= az <= ax:
                    continue
                if nu_indicator(params, wx, wy, wz):
                    out.append(RSetElem((wx, wy, wz)))
    return out

"""Global counting: the weighted representation histogram r_A(k), membership
in S_A by meet-in-the-middle, density scans, the exact variance pipeline
(Sigma_1, Sigma_2, Sigma_3 and their closed-form identities), the linear
spaces on the Fermat sextic-variable cubic, and the decomposition report.

The heavy lattice scans have a bit-packed fast path in characteristic 2
(encodings add by XOR); everything else runs on exact Poly arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .archdens import WeightParams, sigma_infty, sigma_infty_A
from .errors import ConfigInvalid, ModulusTooLarge, TooLarge
from .gf import FieldCtx
from .localdens import ModulusN, modulus_N, rho6_tilde, rho_tilde, singular_series
from .polyring import Poly, polys_of_degree, polys_up_to_degree


# -- r_A histogram -------------------------------------------------------------


@dataclass
class RAHistogram:
    params: WeightParams
    counts: dict[Poly, int]
    support: int

    def sigma1(self) -> int:
        """N_w(P) = sum of r_A(k)^2."""
        return sum(c * c for c in self.counts.values())

    def r_A(self, k: Poly) -> int:
        return self.counts.get(k, 0)


def _shell_lists(ctx: FieldCtx, params: WeightParams) -> dict[int, list[Poly]]:
    d, At = params.d, params.Atilde
    return {m: list(polys_of_degree(ctx, m)) for m in range(d - 1, d + At + 1)}


def ra_histogram(params: WeightParams, cap: int = 1 << 30) -> RAHistogram:
    """Enumerate the nu-support once and bin by the value x^3+y^3+z^3."""
    ctx, d, At, B, q = params.ctx, params.d, params.Atilde, params.B, params.q
    work = sum(((q - 1) * q**m) ** 2 * (q - 1) * (q ** (m - 1) + q**m)
               for m in range(d, d + At + 1))
    if work > cap:
        raise TooLarge(f"support size ~{work} exceeds cap {cap}")
    shells = _shell_lists(ctx, params)
    lo_enc, hi_enc = q**B, q ** (B + 1)
    counts_enc: dict[int, int] = {}
    support = 0
    xor = ctx.p == 2
    for m in range(d, d + At + 1):
        xs = shells[m]
        zs = shells[m - 1] + shells[m]
        if xor:
            cx = [(x * x * x).enc() for x in xs]
            cz = [(z * z * z).enc() for z in zs]
            for a in cx:
                for b in cx:
                    ab = a ^ b
                    for c in cz:
                        f = ab ^ c
                        if lo_enc <= f < hi_enc:
                            counts_enc[f] = counts_enc.get(f, 0) + 1
                            support += 1
        else:
            cxp = [x * x * x for x in xs]
            czp = [z * z * z for z in zs]
            for a in cxp:
                for b in cxp:
                    ab = a + b
                    for c in czp:
                        f = ab + c
                        if f.deg == B:
                            e = f.enc()
                            counts_enc[e] = counts_enc.get(e, 0) + 1
                            support += 1
    counts = {Poly.from_enc(ctx, e): c for e, c in counts_enc.items()}
    return RAHistogram(params, counts, support)


def ra_brute_single(params: WeightParams, k: Poly) -> int:
    """Independent per-k count (oracle for the histogram)."""
    ctx, d, At, B = params.ctx, params.d, params.Atilde, params.B
    if k.deg != B:
        return 0
    shells = _shell_lists(ctx, params)
    total = 0
    for m in range(d, d + At + 1):
        xs = shells[m]
        zs = shells[m - 1] + shells[m]
        for x in xs:
            cx = x * x * x
            for y in xs:
                cxy = cx + y * y * y
                for z in zs:
                    if cxy + z * z * z == k:
                        total += 1
    return total


# -- S_A membership by meet-in-the-middle --------------------------------------


def _digit_matrix(ctx: FieldCtx, polys: list[Poly], ncoeff: int) -> np.ndarray:
    """F_p digit vectors (len e*ncoeff) of each poly, as a uint8 matrix."""
    p, e = ctx.p, ctx.e
    out = np.zeros((len(polys), e * ncoeff), dtype=np.uint8)
    for row, f in enumerate(polys):
        for i, c in enumerate(f.coeffs):
            for j, dgt in enumerate(ctx.coeffs(c)):
                out[row, e * i + j] = dgt
    return out


def _pack(digits: np.ndarray, p: int) -> np.ndarray:
    nd = digits.shape[-1]
    if nd * math.log2(p) > 62:
        raise TooLarge("digit vectors do not fit an int64 key")
    weights = (p ** np.arange(nd, dtype=object)).astype(object)
    # int64 is safe by the guard above
    w64 = np.array([int(x) for x in weights], dtype=np.int64)
    return digits.astype(np.int64) @ w64


class TwoCubeTable:
    """Sorted packed values of x^3 + y^3 over all x, y of degree <= mdeg."""

    def __init__(self, ctx: FieldCtx, mdeg: int, ncoeff: int):
        self.ctx = ctx
        self.mdeg = mdeg
        self.ncoeff = ncoeff
        xs = list(polys_up_to_degree(ctx, mdeg))
        self.cubes = [x * x * x for x in xs]
        self.xs = xs
        self.cube_digits = _digit_matrix(ctx, self.cubes, ncoeff)
        self.cube_by_key = {}
        keys = _pack(self.cube_digits, ctx.p)
        for x, key in zip(xs, keys.tolist()):
            self.cube_by_key.setdefault(key, x)
        sums = []
        chunk = max(1, (1 << 22) // max(len(xs), 1))
        for i0 in range(0, len(xs), chunk):
            block = (self.cube_digits[i0:i0 + chunk, None, :]
                     + self.cube_digits[None, :, :]) % ctx.p
            sums.append(np.unique(_pack(block.reshape(-1, block.shape[-1]), ctx.p)))
        self.sums_sorted = np.unique(np.concatenate(sums)) if sums else np.array([], dtype=np.int64)

    def contains(self, keys: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.sums_sorted, keys)
        idx = np.clip(idx, 0, len(self.sums_sorted) - 1)
        return self.sums_sorted[idx] == keys


@lru_cache(maxsize=8)
def _two_cube_table(ctx: FieldCtx, mdeg: int, ncoeff: int) -> TwoCubeTable:
    return TwoCubeTable(ctx, mdeg, ncoeff)


def sa_member(k: Poly, A, cap: int = 1 << 36,
              want_witness: bool = True):
    """Does x^3+y^3+z^3 = k admit a solution with all degrees <= deg k/3 + A?

    Returns (member, witness_or_None).  Sorted two-cube table against a loop
    over z (meet in the middle).
    """
    ctx = k.ctx
    if k.is_zero():
        return True, (Poly.zero(ctx),) * 3
    mdeg = math.floor(Fraction(int(k.deg), 3) + Fraction(A))
    if mdeg < 0:
        return False, None
    if ctx.q ** (3 * (mdeg + 1)) > cap:
        raise TooLarge(f"q^(3(mdeg+1)) exceeds cap {cap}")
    ncoeff = max(3 * mdeg, int(k.deg)) + 1
    table = _two_cube_table(ctx, mdeg, ncoeff)
    k_dig = _digit_matrix(ctx, [k], ncoeff)[0]
    targets = (k_dig[None, :].astype(np.int16) - table.cube_digits) % ctx.p
    keys = _pack(targets.astype(np.uint8), ctx.p)
    hits = table.contains(keys)
    if not hits.any():
        return False, None
    if not want_witness:
        return True, None
    zi = int(np.argmax(hits))
    z = table.xs[zi]
    s = k - table.cubes[zi]
    for x in table.xs:
        key = _pack(_digit_matrix(ctx, [s - x * x * x], ncoeff), ctx.p)[0]
        y = table.cube_by_key.get(int(key))
        if y is not None:
            assert x * x * x + y * y * y + z * z * z == k
            return True, (x, y, z)
    raise AssertionError("table hit without recoverable witness")  # pragma: no cover


def density_scan(ctx: FieldCtx, A_values, B_range, cap: int = 1 << 36,
                 ra_cap: int = 1 << 24) -> list[dict]:
    """Exact fraction of degree-B targets in S_A, plus (when the support box
    is within ra_cap) the fraction with r_A(k) > 0."""
    rows = []
    for B in B_range:
        ks = list(polys_of_degree(ctx, B))
        for A in A_values:
            mdeg = math.floor(Fraction(B, 3) + Fraction(A))
            if ctx.q ** (3 * (mdeg + 1)) > cap:
                raise TooLarge("membership box exceeds cap")
            ncoeff = max(3 * mdeg, B) + 1
            table = _two_cube_table(ctx, mdeg, ncoeff)
            k_dig = _digit_matrix(ctx, ks, ncoeff).astype(np.int16)
            found = np.zeros(len(ks), dtype=bool)
            for zi in range(table.cube_digits.shape[0]):
                targets = (k_dig - table.cube_digits[zi][None, :]) % ctx.p
                found |= table.contains(_pack(targets.astype(np.uint8), ctx.p))
            members = int(found.sum())
            row = {"B": B, "A": A, "members": members, "total": len(ks),
                   "fraction": Fraction(members, len(ks)),
                   "ra_positive_fraction": None}
            alpha = B % 3
            d = B // 3
            if d >= 1:
                try:
                    p = WeightParams(ctx, A, alpha, d)
                    hist = ra_histogram(p, cap=ra_cap)
                    row["ra_positive_fraction"] = Fraction(len(hist.counts), len(ks))
                except (ConfigInvalid, TooLarge):
                    pass  # weight undefined (A~ < alpha) or box too large
            rows.append(row)
    return rows


# -- variance pipeline ----------------------------------------------------------


@dataclass
class VarianceReport:
    params: WeightParams
    M: int
    sigma1: Fraction
    sigma2: Fraction
    sigma3: Fraction
    var: Fraction
    identity_rhs: Fraction           # sigma_infty * rho6~(N) * |P|^3
    sigma2_identity: bool
    sigma3_identity: bool
    hyp_sigma2: bool                 # |N| < |P| q^{-6A~}
    hyp_sigma3: bool                 # |N| < |P|^3 q^{-4A~}

    def to_report(self) -> dict:
        f = lambda x: f"{x.numerator}/{x.denominator}"
        return {
            "q": self.params.q, "A": self.params.A, "alpha": self.params.alpha,
            "d": self.params.d, "B": self.params.B, "M": self.M,
            "sigma1": f(self.sigma1), "sigma2": f(self.sigma2),
            "sigma3": f(self.sigma3), "var": f(self.var),
            "identity_rhs": f(self.identity_rhs),
            "sigma2_identity": self.sigma2_identity,
            "sigma3_identity": self.sigma3_identity,
            "hyp_sigma2": self.hyp_sigma2, "hyp_sigma3": self.hyp_sigma3,
        }


def _sigma_lead_table(params: WeightParams) -> dict[int, Fraction]:
    """sigma_{infty,A}(k) depends on k (of exact degree B) only through its
    leading coefficient; tabulate per lead."""
    ctx, B = params.ctx, params.B
    out = {}
    for lam in ctx.units():
        rep = Poly(ctx, (0,) * B + (lam,))
        out[lam] = sigma_infty_A(params, rep)
    return out


def _rho_tilde_table(N: ModulusN) -> dict[Poly, Fraction]:
    degN = N.deg()
    return {res: rho_tilde(N, res)
            for res in polys_up_to_degree(N.ctx, degN - 1)} if degN else {
        Poly.zero(N.ctx): Fraction(1)}


def variance(params: WeightParams, M: int, cap: int = 1 << 30) -> VarianceReport:
    ctx, q, B, d, At = params.ctx, params.q, params.B, params.d, params.Atilde
    N = modulus_N(ctx, M)
    degN = N.deg()
    hyp2 = degN < d - 6 * At
    hyp3 = degN < 3 * d - 4 * At
    hist = ra_histogram(params, cap)
    sigma1 = Fraction(hist.sigma1())
    slead = _sigma_lead_table(params)
    rtable = _rho_tilde_table(N)
    Nv = N.value
    sigma2 = Fraction(0)
    for k, c in hist.counts.items():
        sigma2 += c * slead[k.lead()] * rtable[k % Nv]
    # direct sum over all |k| = q^B, grouped exactly by (lead, k mod N)
    assert degN <= B
    mult = q**B // N.abs_q() if degN else q**B
    sigma3 = Fraction(0)
    rho_sq = sum(v * v for v in rtable.values())
    for lam, s in slead.items():
        sigma3 += s * s * mult * rho_sq
    var = sigma1 - 2 * sigma2 + sigma3
    rhs = sigma_infty(params) * rho6_tilde(N) * q ** (3 * d)
    return VarianceReport(params, M, sigma1, sigma2, sigma3, var, rhs,
                          sigma2 == rhs, sigma3 == rhs, hyp2, hyp3)


# -- Lemmas 4.1 and 4.2 as exact-identity checks --------------------------------


def lemma41_check(params: WeightParams, N: Poly, a: Poly) -> dict:
    """sum over |k| = q^B, k = a mod N of sigma_{infty,A}(k)^2
    against sigma_infty * |P|^3 / |N|."""
    ctx, q, B, d, At = params.ctx, params.q, params.B, params.d, params.Atilde
    N = N.monic()
    degN = int(N.deg) if not N.is_zero() else 0
    if not degN < 3 * d - 4 * At:
        raise ModulusTooLarge(f"need |N| < |P|^3 q^(-4A~); deg N = {degN}")
    a = a % N if degN else Poly.zero(ctx)
    lhs = Fraction(0)
    terms = 0
    for h in polys_of_degree(ctx, B - degN):
        k = a + N * h
        assert k.deg == B
        lhs += sigma_infty_A(params, k) ** 2
        terms += 1
    rhs = sigma_infty(params) * Fraction(q ** (3 * d), N.abs_q() if degN else 1)
    return {"lhs": lhs, "rhs": rhs, "equal": lhs == rhs, "terms": terms}


def lemma42_check(params: WeightParams, N: Poly, bvec: tuple[Poly, Poly, Poly]) -> dict:
    """sum over y = b mod N of nu(y/P) sigma_{infty,A}(F0(y)) against
    sigma_infty * |P|^3 / |N|^3."""
    ctx, q, B, d, At = params.ctx, params.q, params.B, params.d, params.Atilde
    N = N.monic()
    degN = int(N.deg) if not N.is_zero() else 0
    if not degN < d - 6 * At:
        raise ModulusTooLarge(f"need |N| < |P| q^(-6A~); deg N = {degN}")
    slead = _sigma_lead_table(params)
    # per-coordinate class members grouped by degree
    by_deg: list[dict[int, list[Poly]]] = []
    for b in bvec:
        b = b % N if degN else Poly.zero(ctx)
        members: dict[int, list[Poly]] = {}
        for h in polys_up_to_degree(ctx, d + At - degN):
            y = b + N * h
            dy = y.deg
            if dy >= d - 1:
                members.setdefault(int(dy), []).append(y)
        by_deg.append(members)
    xor = ctx.p == 2
    lo_enc, hi_enc = q**B, q ** (B + 1)
    lhs = Fraction(0)
    for m in range(d, d + At + 1):
        xs1 = by_deg[0].get(m, [])
        xs2 = by_deg[1].get(m, [])
        zs = by_deg[2].get(m - 1, []) + by_deg[2].get(m, [])
        if not xs1 or not xs2 or not zs:
            continue
        if xor:
            c1 = [(x * x * x).enc() for x in xs1]
            c2 = [(x * x * x).enc() for x in xs2]
            c3 = [(z * z * z).enc() for z in zs]
            for a1 in c1:
                for a2 in c2:
                    a12 = a1 ^ a2
                    for a3 in c3:
                        f = a12 ^ a3
                        if lo_enc <= f < hi_enc:
                            lhs += slead[f // lo_enc]
        else:
            c1 = [x * x * x for x in xs1]
            c2 = [x * x * x for x in xs2]
            c3 = [z * z * z for z in zs]
            for a1 in c1:
                for a2 in c2:
                    a12 = a1 + a2
                    for a3 in c3:
                        f = a12 + a3
                        if f.deg == B:
                            lhs += slead[f.lead()]
    rhs = sigma_infty(params) * Fraction(q ** (3 * d),
                                         (N.abs_q() if degN else 1) ** 3)
    return {"lhs": lhs, "rhs": rhs, "equal": lhs == rhs}


# -- linear spaces on the sextic-variable Fermat cubic ---------------------------


@dataclass(frozen=True)
class LinearSpace:
    """x_i + zeta_k x_j = 0 for each matched pair (i, j); F vanishes on it."""

    matching: tuple[tuple[int, int], ...]
    roots: tuple[int, ...]  # field encodings of cube roots of unity

    def verify_vanishes(self, ctx: FieldCtx) -> bool:
        # per pair: x_i = -zeta x_j gives x_i^3 + x_j^3 = (1 - zeta^3) x_j^3 = 0
        return all(ctx.pow(z, 3) == 1 for z in self.roots)

    def coords_from_free(self, ctx: FieldCtx, us: tuple[Poly, Poly, Poly]) -> list[Poly]:
        out: list[Poly | None] = [None] * 6
        for (i, j), z, u in zip(self.matching, self.roots, us):
            out[j] = u
            out[i] = u.scale(ctx.neg(z))
        return out  # type: ignore[return-value]


def _pair_matchings(items: tuple[int, ...]) -> list[tuple[tuple[int, int], ...]]:
    if not items:
        return [()]
    first, rest = items[0], items[1:]
    out = []
    for pick in range(len(rest)):
        pair = (first, rest[pick])
        remaining = rest[:pick] + rest[pick + 1:]
        for sub in _pair_matchings(remaining):
            out.append((pair,) + sub)
    return out


def upsilon_enumerate(ctx: FieldCtx) -> list[LinearSpace]:
    """The 15 * gcd(3, q-1)^3 coordinate-pairing spaces with F identically 0."""
    roots = [x for x in ctx.units() if ctx.pow(x, 3) == 1]
    spaces = []
    for matching in _pair_matchings(tuple(range(6))):
        for zs in product(roots, repeat=3):
            sp = LinearSpace(matching, zs)
            assert sp.verify_vanishes(ctx)
            spaces.append(sp)
    assert len(spaces) == 15 * len(roots) ** 3
    return spaces


def linear_space_count(space: LinearSpace, params: WeightParams,
                       cap: int = 1 << 28) -> int:
    """sum over x in L cap O^6 of w(x/P), exactly.

    Free variables are the second members of the pairs; pair relations give
    x_i^3 = -x_j^3, so F0(first block) = sum of signed cubes of the free
    variables and F0(block2) = -F0(block1) automatically.
    """
    ctx, d, At, B, q = params.ctx, params.d, params.Atilde, params.B, params.q
    # position -> (pair index); sign of u_k^3 in block-1 F0
    pos_pair = [None] * 6
    for kk, (i, j) in enumerate(space.matching):
        pos_pair[i] = kk
        pos_pair[j] = kk
    signs = [0, 0, 0]
    for kk, (i, j) in enumerate(space.matching):
        if i < 3:
            signs[kk] -= 1
        if j < 3:
            signs[kk] += 1
    shells = _shell_lists(ctx, params)
    degs = range(d - 1, d + At + 1)
    if (max(len(v) for v in shells.values()) ** 3) * 8 > cap:
        raise TooLarge("free-variable box exceeds cap")

    def block_ok(dd: list[int], block: range) -> bool:
        d0, d1, d2 = (dd[pos_pair[pos]] for pos in block)
        return d0 == d1 and d <= d0 <= d + At and d1 - 1 <= d2 <= d1

    total = 0
    for dtriple in product(degs, repeat=3):
        dd = list(dtriple)
        if not (block_ok(dd, range(0, 3)) and block_ok(dd, range(3, 6))):
            continue
        active = [kk for kk in range(3) if signs[kk] != 0]
        passive = [kk for kk in range(3) if signs[kk] == 0]
        passive_count = 1
        for kk in passive:
            passive_count *= len(shells[dtriple[kk]])
        # enumerate active variables and test deg(sum of signed cubes) == B
        lists = [shells[dtriple[kk]] for kk in active]
        if not active:
            continue  # F0 = 0 identically on the block; |F0| = q^B fails
        hits = 0
        if ctx.p == 2:
            encs = [[(u * u * u).enc() for u in lst] for lst in lists]
            lo_enc, hi_enc = q**B, q ** (B + 1)
            for combo in product(*encs):
                f = 0
                for c in combo:
                    f ^= c
                if lo_enc <= f < hi_enc:
                    hits += 1
        else:
            cubes = [[(u * u * u).scale(1 if signs[kk] > 0 else ctx.neg(1))
                      for u in lst] for kk, lst in zip(active, lists)]
            for combo in product(*cubes):
                f = combo[0]
                for c in combo[1:]:
                    f = f + c
                if f.deg == B:
                    hits += 1
        total += hits * passive_count
    return total


# -- intersections (for the overcount audit) ------------------------------------


def _space_relation_rows(space: LinearSpace, ctx: FieldCtx) -> list[list[int]]:
    rows = []
    for (i, j), z in zip(space.matching, space.roots):
        row = [0] * 6
        row[i] = 1
        row[j] = z
        rows.append(row)
    return rows


def _kernel_basis(rows: list[list[int]], ctx: FieldCtx) -> list[list[int]]:
    """Kernel of the row space over F_q (Gaussian elimination)."""
    m = [row[:] for row in rows]
    ncols = 6
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = ctx.inv(m[r][c])
        m[r] = [ctx.mul(inv, x) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [ctx.sub(x, ctx.mul(f, y)) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for ri, pc in enumerate(pivots):
            vec[pc] = ctx.neg(m[ri][fc])
        basis.append(vec)
    return basis


def _pairwise_overlap_count(s1: LinearSpace, s2: LinearSpace,
                            params: WeightParams) -> int:
    """sum of w(x/P) over x in (L1 cap L2) cap O^6."""
    ctx, d, At, B = params.ctx, params.d, params.Atilde, params.B
    rows = _space_relation_rows(s1, ctx) + _space_relation_rows(s2, ctx)
    basis = _kernel_basis(rows, ctx)
    if not basis:
        return 0
    us = list(polys_up_to_degree(ctx, d + At))
    total = 0
    for combo in product(us, repeat=len(basis)):
        coords = []
        for pos in range(6):
            acc = Poly.zero(ctx)
            for vec, u in zip(basis, combo):
                if vec[pos]:
                    acc = acc + u.scale(vec[pos])
            coords.append(acc)
        if _w_lattice(params, coords):
            total += 1
    return total


def _w_lattice(params: WeightParams, coords: list[Poly]) -> bool:
    """w(x/P) as pure degree tests on integral coordinates."""
    d, At, B = params.d, params.Atilde, params.B
    for blk in (coords[:3], coords[3:]):
        d0, d1, d2 = (c.deg for c in blk)
        if not (d0 == d1 and d <= d0 <= d + At and d1 - 1 <= d2 <= d1):
            return False
        f = blk[0] * blk[0] * blk[0] + blk[1] * blk[1] * blk[1] + blk[2] * blk[2] * blk[2]
        if f.deg != B:
            return False
    return True


# -- decomposition report --------------------------------------------------------


def manin_report(params: WeightParams, M_max: int, audit_limit: int = 64,
                 cap: int = 1 << 30) -> dict:
    """N_w(P) against sigma_infty * S(M_max) * |P|^3 plus the Upsilon term;
    the unexplained residual is reported, never asserted."""
    ctx, q, d, At = params.ctx, params.q, params.d, params.Atilde
    hist = ra_histogram(params, cap)
    nw = Fraction(hist.sigma1())
    ss = singular_series(ctx, M_max)
    s_inf = sigma_infty(params)
    main = s_inf * ss.partial * q ** (3 * d)
    spaces = upsilon_enumerate(ctx)
    upsilon_counts = [linear_space_count(sp, params) for sp in spaces]
    upsilon_term = sum(upsilon_counts)
    residual = nw - main - upsilon_term
    report = {
        "q": q, "A": params.A, "alpha": params.alpha, "d": params.d,
        "M_max": M_max,
        "Q_exponent": math.floor(-2 * At + Fraction(3 * d, 2)),
        "N_w": nw, "sigma_infty": s_inf, "singular_series_partial": ss.partial,
        "main_term": main, "upsilon_spaces": len(spaces),
        "upsilon_term": upsilon_term, "residual": residual,
        "residual_over_P3": residual / q ** (3 * d),
        "overlap_pairs_total": None,
    }
    if len(spaces) <= audit_limit:
        overlap = 0
        for i in range(len(spaces)):
            for j in range(i + 1, len(spaces)):
                overlap += _pairwise_overlap_count(spaces[i], spaces[j], params)
        report["overlap_pairs_total"] = overlap
    return report

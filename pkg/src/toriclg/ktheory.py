"""Intersection theory and K-theory oracles for smooth complete simplicial
toric varieties: Chow ring with exact rational structure constants,
Todd/Gamma classes, Euler pairings by Hirzebruch-Riemann-Roch and by the
Gamma-class pairing formula, Orlov-type K-group bases and semiorthogonality
verification.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath

from . import errors
from .fans import StackyFan
from .lattice import AbelianLattice, VectorSet
from .rational import det, frac, vec

# Bernoulli-series coefficients of x/(1-e^{-x}) up to degree 8
_TODD_COEFF = [Fraction(1), Fraction(1, 2), Fraction(1, 12), Fraction(0),
               Fraction(-1, 720), Fraction(0), Fraction(1, 30240), Fraction(0),
               Fraction(-1, 1209600)]

mpmath.mp.dps = 30
EULER_GAMMA = complex(mpmath.euler)


def zeta_value(k: int) -> complex:
    return complex(mpmath.zeta(k))


class GammaPoly:
    """Polynomial in the Euler-Mascheroni constant and zeta values with
    rational coefficients; keys are exponent tuples (gamma, zeta2, zeta3, ...)."""

    def __init__(self, terms=None, nzeta=0):
        self.nzeta = nzeta
        self.terms = dict(terms or {})

    @classmethod
    def const(cls, c, nzeta):
        c = frac(c)
        return cls({(0,) * (nzeta + 1): c} if c else {}, nzeta)

    @classmethod
    def symbol(cls, name, nzeta):
        key = [0] * (nzeta + 1)
        if name == "gamma":
            key[0] = 1
        else:
            k = int(name[4:])      # "zeta3" -> 3
            key[k - 1] = 1
        return cls({tuple(key): Fraction(1)}, nzeta)

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
            if out[k] == 0:
                del out[k]
        return GammaPoly(out, self.nzeta)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GammaPoly.const(other, self.nzeta)
        out = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, Fraction(0)) + v1 * v2
                if out[k] == 0:
                    del out[k]
        return GammaPoly(out, self.nzeta)

    def __neg__(self):
        return self * Fraction(-1)

    def evaluate(self) -> complex:
        vals = [EULER_GAMMA] + [zeta_value(k) for k in range(2, self.nzeta + 2)]
        out = 0j
        for key, c in self.terms.items():
            t = complex(c)
            for e, v in zip(key, vals):
                t *= v ** e
            out += t
        return out

    def __eq__(self, other):
        return isinstance(other, GammaPoly) and self.terms == other.terms

    def __repr__(self):
        return f"GammaPoly({self.terms})"


class CohomologyRing:
    """Rational Chow/cohomology ring of a smooth complete simplicial toric
    variety, with graded monomial bases and an exact degree map."""

    def __init__(self, fan: StackyFan):
        if not fan.is_smooth():
            raise errors.NotSmooth("ring requires a smooth torsion-free fan")
        if not fan.is_complete():
            raise errors.NotComplete("ring requires a complete fan")
        self.fan = fan
        self.n = fan.n
        self.m = len(fan.rays)
        self.ray_indices = list(fan.rays)      # indices into S
        self._build()
        total = sum(len(b) for b in self.basis.values())
        if total != fan.fan_polytope_volume():
            raise errors.RankMismatch(
                f"ring dimension {total} != normalized fan volume")

    # -- construction -------------------------------------------------------
    def _monomials(self, d):
        out = []
        for combo in itertools.combinations_with_replacement(range(self.m), d):
            mono = [0] * self.m
            for i in combo:
                mono[i] += 1
            out.append(tuple(mono))
        return sorted(out)

    def _sr_nonfaces(self):
        faces = set()
        for c in self.fan.max_cones:
            local = sorted(self.ray_indices.index(i) for i in c)
            for r in range(len(local) + 1):
                for s in itertools.combinations(local, r):
                    faces.add(frozenset(s))
        nonfaces = []
        for r in range(1, self.m + 1):
            for s in itertools.combinations(range(self.m), r):
                fs = frozenset(s)
                if fs in faces:
                    continue
                if any(nf <= fs for nf in nonfaces):
                    continue
                nonfaces.append(fs)
        return nonfaces

    def _build(self):
        from .rational import rref
        fan = self.fan
        lin = []
        for i in range(self.n):
            lin.append([Fraction(fan.S[b].free[i]) for b in self.ray_indices])
        sr = self._sr_nonfaces()
        self.basis = {0: [(0,) * self.m]}
        self.reduce_map = {0: {(0,) * self.m: [Fraction(1)]}}
        for d in range(1, self.n + 1):
            monos = self._monomials(d)
            idx = {mo: i for i, mo in enumerate(monos)}
            rows = []
            for mo in self._monomials(d - 1):
                for l in lin:
                    row = [Fraction(0)] * len(monos)
                    for b in range(self.m):
                        if l[b] == 0:
                            continue
                        mo2 = list(mo)
                        mo2[b] += 1
                        row[idx[tuple(mo2)]] += l[b]
                    rows.append(row)
            for nf in sr:
                k = len(nf)
                if k > d:
                    continue
                base = [0] * self.m
                for b in nf:
                    base[b] = 1
                for mo in self._monomials(d - k):
                    mo2 = tuple(base[i] + mo[i] for i in range(self.m))
                    row = [Fraction(0)] * len(monos)
                    row[idx[mo2]] = Fraction(1)
                    rows.append(row)
            red, piv = rref(rows, len(monos))
            basis = [monos[j] for j in range(len(monos)) if j not in piv]
            self.basis[d] = basis
            bidx = {mo: i for i, mo in enumerate(basis)}
            rmap = {}
            for j, mo in enumerate(monos):
                v = [Fraction(0)] * len(basis)
                if j in piv:
                    r = red[piv[j]]
                    for j2 in range(j + 1, len(monos)):
                        if r[j2] != 0:
                            v[bidx[monos[j2]]] -= r[j2]
                else:
                    v[bidx[mo]] = Fraction(1)
                rmap[mo] = v
            self.reduce_map[d] = rmap
        if len(self.basis[self.n]) != 1:
            raise errors.RankMismatch("top cohomology is not one-dimensional")
        # degree map: the distinct-ray monomial of every maximal cone
        # integrates to 1 on a smooth variety
        scale = None
        for c in self.fan.max_cones:
            mo = [0] * self.m
            for b in c:
                mo[self.ray_indices.index(b)] += 1
            v = self.reduce_map[self.n][tuple(mo)][0]
            if scale is None:
                scale = v
            elif scale != v:
                raise errors.RankMismatch("degree map inconsistent across cones")
        if scale == 0:
            raise errors.RankMismatch("degenerate degree map")
        self.top_scale = scale

    # -- elements ------------------------------------------------------------
    def zero(self):
        return Cls(self, {d: [Fraction(0)] * len(self.basis[d])
                          for d in range(self.n + 1)})

    def one(self):
        z = self.zero()
        z.coeffs[0][0] = Fraction(1)
        return z

    def from_poly(self, poly):
        out = self.zero()
        for mo, c in poly.items():
            d = sum(mo)
            if d > self.n:
                continue
            red = self.reduce_map[d][mo]
            for i, x in enumerate(red):
                out.coeffs[d][i] += c * x
        return out

    def divisor(self, ray_local_index: int):
        mo = [0] * self.m
        mo[ray_local_index] = 1
        return self.from_poly({tuple(mo): Fraction(1)})

    def divisor_by_s_index(self, s_index: int):
        return self.divisor(self.ray_indices.index(s_index))

    def c1(self):
        out = self.zero()
        for i in range(self.m):
            out = out + self.divisor(i)
        return out

    def total_dim(self):
        return sum(len(b) for b in self.basis.values())

    def todd_class(self):
        out = self.one()
        for i in range(self.m):
            D = self.divisor(i)
            s = self.zero()
            pw = self.one()
            for k in range(self.n + 1):
                if k:
                    pw = pw * D
                s = s + pw.scaled(_TODD_COEFF[k])
            out = out * s
        return out


class Cls:
    """Element of a CohomologyRing (per-degree coefficient vectors; the
    scalars may be Fractions, complex numbers, or GammaPoly)."""

    def __init__(self, ring: CohomologyRing, coeffs):
        self.ring = ring
        self.coeffs = coeffs

    def copy(self):
        return Cls(self.ring, {d: list(v) for d, v in self.coeffs.items()})

    def __add__(self, other):
        out = self.copy()
        for d, v in other.coeffs.items():
            for i, x in enumerate(v):
                out.coeffs[d][i] = out.coeffs[d][i] + x
        return out

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, c):
        return Cls(self.ring, {d: [c * x for x in v]
                               for d, v in self.coeffs.items()})

    def __mul__(self, other):
        ring = self.ring
        poly = {}
        for d1, v1 in self.coeffs.items():
            for i1, c1 in enumerate(v1):
                if _iszero(c1):
                    continue
                mo1 = ring.basis[d1][i1]
                for d2, v2 in other.coeffs.items():
                    if d1 + d2 > ring.n:
                        continue
                    for i2, c2 in enumerate(v2):
                        if _iszero(c2):
                            continue
                        mo2 = ring.basis[d2][i2]
                        mo = tuple(a + b for a, b in zip(mo1, mo2))
                        poly[mo] = poly.get(mo, 0) + c1 * c2
        out = ring.zero()
        for mo, c in poly.items():
            d = sum(mo)
            red = ring.reduce_map[d][mo]
            for i, x in enumerate(red):
                if x:
                    out.coeffs[d][i] = out.coeffs[d][i] + c * x
        return out

    def exp(self):
        """exp of a class with vanishing degree-0 part."""
        assert _iszero(self.coeffs[0][0])
        ring = self.ring
        out = ring.one()
        term = ring.one()
        for k in range(1, ring.n + 1):
            term = (term * self).scaled(Fraction(1, k))
            out = out + term
        return out

    def dual(self):
        """Negate odd-degree components (Chern character of the dual)."""
        return Cls(self.ring, {d: [(-x if d % 2 else x) for x in v]
                               for d, v in self.coeffs.items()})

    def integrate(self):
        return self.coeffs[self.ring.n][0] / self.ring.top_scale \
            if isinstance(self.coeffs[self.ring.n][0], Fraction) \
            else self.coeffs[self.ring.n][0] / complex(self.ring.top_scale)

    def degree_part(self, d):
        out = self.ring.zero()
        out.coeffs[d] = list(self.coeffs[d])
        return out

    def numeric(self):
        return Cls(self.ring, {d: [complex(x) if isinstance(x, (int, Fraction))
                                   else (x.evaluate() if isinstance(x, GammaPoly)
                                         else x) for x in v]
                               for d, v in self.coeffs.items()})

    def __eq__(self, other):
        return (isinstance(other, Cls) and
                all(self.coeffs[d] == other.coeffs[d] for d in self.coeffs))

    def is_zero(self):
        return all(_iszero(x) for v in self.coeffs.values() for x in v)


def _iszero(x):
    if isinstance(x, GammaPoly):
        return not x.terms
    return x == 0


# ---------------------------------------------------------------------------
# K classes


class KClass:
    """K-theory class represented by its Chern character plus a label."""

    def __init__(self, ring: CohomologyRing, ch: Cls, label: str):
        self.ring = ring
        self.ch = ch
        self.label = label

    @classmethod
    def structure_sheaf(cls, ring):
        return cls(ring, ring.one(), "O")

    @classmethod
    def line_bundle(cls, ring, divisor_class: Cls, label=None):
        return cls(ring, divisor_class.exp(), label or "O(D)")

    def tensor(self, other, label=None):
        return KClass(self.ring, self.ch * other.ch,
                      label or f"{self.label}*{other.label}")

    def shift(self):
        """Homological shift [-1]: negation in the K-group."""
        lbl = self.label[:-4] if self.label.endswith("[-1]") else self.label + "[-1]"
        return KClass(self.ring, self.ch.scaled(-1), lbl)

    def __repr__(self):
        return f"K<{self.label}>"


def build_cohomology_ring(fan: StackyFan) -> CohomologyRing:
    return CohomologyRing(fan)


def euler_pairing_hrr(V1: KClass, V2: KClass) -> int:
    """chi(V1, V2) = int ch(V1^dual) ch(V2) Td(X), exact and integral."""
    ring = V1.ring
    val = (V1.ch.dual() * V2.ch * ring.todd_class()).integrate()
    if not isinstance(val, Fraction) or val.denominator != 1:
        raise errors.NonIntegral(f"HRR pairing not an integer: {val}")
    return int(val)


def gamma_class(ring: CohomologyRing) -> Cls:
    """Gamma-hat class prod_b Gamma(1 + D_b) with coefficients kept symbolic
    in the Euler-Mascheroni constant and zeta(2..n)."""
    n = ring.n
    nz = max(n - 1, 1)

    def gp_cls(template=None):
        out = {d: [GammaPoly.const(0, nz) for _ in ring.basis[d]]
               for d in range(n + 1)}
        return Cls(ring, out)

    def gp_add(a, b):
        return Cls(ring, {d: [x + y for x, y in zip(a.coeffs[d], b.coeffs[d])]
                          for d in a.coeffs})

    one = gp_cls()
    one.coeffs[0][0] = GammaPoly.const(1, nz)
    out = one
    for i in range(ring.m):
        D = ring.divisor(i)
        # log Gamma(1+x) = -gamma x + sum_{k>=2} zeta(k) (-x)^k / k
        logg = gp_cls()
        pw = ring.one()
        for k in range(1, n + 1):
            pw = pw * D
            if k == 1:
                coef = GammaPoly.symbol("gamma", nz) * Fraction(-1)
            else:
                coef = GammaPoly.symbol(f"zeta{k}", nz) * \
                    (Fraction(-1) ** k * Fraction(1, k))
            lifted = Cls(ring, {d: [(coef * x if x else GammaPoly.const(0, nz))
                                    for x in v]
                                for d, v in pw.coeffs.items()})
            logg = gp_add(logg, lifted)
        # exp of the symbolic log, degree-truncated
        term = one
        acc = one
        for k in range(1, n + 1):
            term = _gp_mult(term, logg)
            term = Cls(ring, {d: [x * Fraction(1, k) for x in v]
                              for d, v in term.coeffs.items()})
            acc = gp_add(acc, term)
        out = _gp_mult(out, acc)
    return out


def _gp_mult(a: Cls, b: Cls) -> Cls:
    """Multiplication where coefficients are GammaPoly (Cls.__mul__ works,
    but zero-detection needs the GammaPoly-aware path)."""
    ring = a.ring
    poly = {}
    for d1, v1 in a.coeffs.items():
        for i1, c1 in enumerate(v1):
            if _iszero(c1):
                continue
            mo1 = ring.basis[d1][i1]
            for d2, v2 in b.coeffs.items():
                if d1 + d2 > ring.n:
                    continue
                for i2, c2 in enumerate(v2):
                    if _iszero(c2):
                        continue
                    mo2 = ring.basis[d2][i2]
                    mo = tuple(x + y for x, y in zip(mo1, mo2))
                    cur = poly.get(mo)
                    prod = c1 * c2 if isinstance(c1, GammaPoly) else c2 * c1
                    poly[mo] = prod if cur is None else cur + prod
    nz = max(ring.n - 1, 1)
    out = Cls(ring, {d: [GammaPoly.const(0, nz) for _ in ring.basis[d]]
                     for d in range(ring.n + 1)})
    for mo, c in poly.items():
        d = sum(mo)
        red = ring.reduce_map[d][mo]
        for i, x in enumerate(red):
            if x:
                out.coeffs[d][i] = out.coeffs[d][i] + c * x
    return out


class GammaData:
    def __init__(self, ring: CohomologyRing):
        self.ring = ring
        self.gamma = gamma_class(ring)
        self.c1 = ring.c1()
        nz = max(ring.n - 1, 1)
        # testable convention: the degree-2 part of Gamma-hat is -gamma*c1
        want = GammaPoly.symbol("gamma", nz) * Fraction(-1)
        for i, x in enumerate(self.gamma.coeffs[1] if ring.n >= 1 else []):
            expect = want * self.c1.coeffs[1][i]
            if x != expect:
                raise errors.MismatchWithHRR(
                    "degree-2 part of the Gamma class is not -gamma*c1")
        self._gamma_num = self.gamma.numeric()
        self._c1_num = self.c1.numeric()

    def pairing(self, V1: KClass, V2: KClass) -> complex:
        """[alpha_1, alpha_2) with alpha_i = Gamma * (2 pi i)^{deg0/2} ch(V_i)."""
        ring = self.ring
        n = ring.n
        twopii = 2j * math.pi

        def alpha(V):
            chnum = V.ch.numeric()
            scaled = Cls(ring, {d: [x * twopii ** d for x in v]
                                for d, v in chnum.coeffs.items()})
            return self._gamma_num * scaled
        a1 = alpha(V1)
        a2 = alpha(V2)
        ec = Cls(ring, {d: [x * (-1j * math.pi) for x in v]
                        for d, v in self._c1_num.coeffs.items()})
        # exp(-pi i c1) * a1, then e^{pi i mu} with mu = (deg0 - n)/2
        b1 = _cexp(ec) * a1
        b1 = Cls(ring, {d: [x * _cis(math.pi * (d - n / 2 * 1))
                            for x in v] for d, v in b1.coeffs.items()})
        val = (b1 * a2).integrate()
        return val / (2 * math.pi) ** n


def _cis(theta):
    return complex(math.cos(theta), math.sin(theta))


# ---------------------------------------------------------------------------
# blowups, Orlov bases and semiorthogonality


class BlowupData:
    """K-theory bridge for a divisorial-contraction or root wall
    phi: X_+ -> X_-.

    Carries the Chow rings of both sides, the exceptional class, the
    pull-back on line bundles (xi -> xi + k_b * E per ray), and a line
    bundle on X_- restricting to an ample generator on the centre Z.
    """

    def __init__(self, wall, center_twist_ray=None):
        if wall.kind not in ("contract_divisor", "root"):
            raise errors.RankMismatch(
                "Orlov data requires a type II-i or III wall")
        self.wall = wall
        self.ring_plus = CohomologyRing(wall.plus_fan)
        self.ring_minus = CohomologyRing(wall.minus_fan)
        self.hat_index = wall.M_minus[0]
        self.k = wall.k
        self.J = wall.J
        self.E = self.ring_plus.divisor_by_s_index(self.hat_index)
        self.center_rays = list(wall.M_plus)
        self.center_twist_ray = (center_twist_ray if center_twist_ray is not None
                                 else self.center_rays[0])
        # rank of K(Z): number of maximal cones of Sigma_- containing sigma_{M_+}
        mp = set(wall.M_plus)
        self.rank_center = sum(1 for c in wall.minus_fan.max_cones if mp <= c)
        self.rank_minus = self.ring_minus.total_dim()
        self.rank_plus = self.ring_plus.total_dim()

    def pullback_divisor(self, s_index: int) -> Cls:
        """phi^* of the minus-side ray divisor class, as a plus-side class."""
        out = self.ring_plus.divisor_by_s_index(s_index)
        kb = self.k[s_index]
        if kb > 0:
            out = out + self.E.scaled(Fraction(kb))
        return out

    def pullback_line_bundle(self, exponents, label=None) -> KClass:
        """phi^* O(sum_b a_b D_b^-) for a dict s_index -> multiplicity."""
        c1 = self.ring_plus.zero()
        for b, a in exponents.items():
            c1 = c1 + self.pullback_divisor(b).scaled(Fraction(a))
        return KClass.line_bundle(self.ring_plus, c1,
                                  label or f"phi^*O({exponents})")

    def minus_line_bundle_basis(self):
        """A line-bundle basis of K(X_-): twists O(j D_b0) of a primitive ray
        divisor (Beilinson-style on projective-space-like targets)."""
        ring = self.ring_minus
        b0 = self.center_twist_ray
        amp = ring.divisor_by_s_index(b0)
        out = []
        for j in range(self.rank_minus):
            out.append((j, KClass.line_bundle(ring, amp.scaled(Fraction(j)),
                                              f"O({j}A)")))
        if not _spans(ring, [kc.ch for _, kc in out]):
            raise errors.RankMismatch("line-bundle twists do not span K(X_-)")
        return out

    def orlov_basis(self, h: int):
        """The (SOD_K)-adapted generators; blocks ordered k=-h..-1,
        phi^* K(X_-), k=0..J-h-1.  Returns (classes, block_sizes)."""
        if not (0 <= h <= self.J):
            raise errors.RankMismatch(f"h = {h} outside 0..J = {self.J}")
        ring = self.ring_plus
        OE_dual = KClass.line_bundle(ring, self.E.scaled(Fraction(-1)), "O(-E)")
        oe_factor = KClass(ring, ring.one() - OE_dual.ch, "O_E")  # 1 - O(-E)
        twist = self.pullback_divisor(self.center_twist_ray)
        classes = []
        blocks = []

        def center_block(kk):
            blk = []
            for j in range(self.rank_center):
                c1 = self.E.scaled(Fraction(-kk)) + twist.scaled(Fraction(j))
                lb = KClass.line_bundle(ring, c1, f"O({-kk}E+{j}A)")
                blk.append(KClass(ring, lb.ch * oe_factor.ch,
                                  f"O_E({-kk}E+{j}A)"))
            return blk

        for kk in range(-h, 0):
            blk = center_block(kk)
            classes.extend(blk)
            blocks.append(len(blk))
        mid = []
        for j, _ in self.minus_line_bundle_basis():
            mid.append(self.pullback_line_bundle({self.center_twist_ray: j},
                                                 f"phi^*O({j}A)"))
        classes.extend(mid)
        blocks.append(len(mid))
        for kk in range(0, self.J - h):
            blk = center_block(kk)
            classes.extend(blk)
            blocks.append(len(blk))
        if len(classes) != self.rank_plus:
            raise errors.RankMismatch(
                f"Orlov basis has {len(classes)} classes, expected {self.rank_plus}")
        if not _spans(ring, [kc.ch for kc in classes]):
            raise errors.RankMismatch("Orlov classes do not span K(X_+)")
        return classes, blocks

    def verify_k_relations(self):
        """Both exact K-group relations in the Chow-ring representation."""
        ring = self.ring_plus
        rel1 = ring.one()
        for b in self.center_rays:
            Db = ring.divisor_by_s_index(b)
            rel1 = rel1 * (ring.one() - Db.scaled(Fraction(-1)).exp())
        if not rel1.is_zero():
            raise errors.RelationFails("prod_{b in M+} (1 - L_b) != 0")
        rel2 = ring.one()
        for b in self.center_rays:
            kb = self.k[b]
            lhs = self.E.scaled(Fraction(-kb)).exp()
            rhs = (self.pullback_divisor(b).scaled(Fraction(-1))).exp()
            rel2 = rel2 * (lhs - rhs)
        if not rel2.is_zero():
            raise errors.RelationFails(
                "prod_{b in M+} (L^{k_b} - phi^*L_b^-) != 0")
        return True


def _spans(ring, chs):
    """Whether the Chern characters span H^*(X;Q)."""
    from .rational import rank as mrank
    rows = []
    for ch in chs:
        row = []
        for d in range(ring.n + 1):
            row.extend(ch.coeffs[d])
        rows.append(tuple(row))
    return mrank(rows) == ring.total_dim()


def gram_matrix(classes):
    return [[euler_pairing_hrr(a, b) for b in classes] for a in classes]


def verify_sod(classes, blocks):
    """Gram must be block-upper-triangular with unipotent upper-triangular
    diagonal blocks and unit determinant over Z.

    Returns (ok, gram); ok is False (never raises) on structure failure.
    """
    G = gram_matrix(classes)
    ok = True
    starts = []
    s = 0
    for b in blocks:
        starts.append(s)
        s += b
    blk_of = []
    for bi, b in enumerate(blocks):
        blk_of.extend([bi] * b)
    nn = len(classes)
    for i in range(nn):
        for j in range(nn):
            if blk_of[i] > blk_of[j] and G[i][j] != 0:
                ok = False
            if blk_of[i] == blk_of[j]:
                if i == j and G[i][j] != 1:
                    ok = False
                if i > j and G[i][j] != 0:
                    ok = False
    d = det([[Fraction(x) for x in row] for row in G])
    if abs(d) != 1:
        ok = False
    return ok, G


def _cexp(x: Cls) -> Cls:
    ring = x.ring
    out = ring.zero()
    out = Cls(ring, {d: [complex(v2) for v2 in v] for d, v in out.coeffs.items()})
    out.coeffs[0][0] = 1 + 0j
    term = out.copy()
    for k in range(1, ring.n + 1):
        term = term * x
        term = Cls(ring, {d: [v2 / k for v2 in v] for d, v in term.coeffs.items()})
        out = out + term
    return out


def euler_pairing_gamma(gdata: GammaData, V1: KClass, V2: KClass,
                        check=True, tol=1e-6) -> complex:
    val = gdata.pairing(V1, V2)
    if check:
        ref = euler_pairing_hrr(V1, V2)
        if abs(val - ref) > tol:
            raise errors.MismatchWithHRR(
                f"gamma pairing {val} vs HRR {ref} for {V1}, {V2}")
    return val


# ---------------------------------------------------------------------------
# presets


def projective_space(n: int):
    N = AbelianLattice(n)
    vecs = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    vecs.append(tuple(-1 for _ in range(n)))
    vs = VectorSet(N, vecs)
    cones = list(itertools.combinations(range(n + 1), n))
    return StackyFan(vs, cones)


def p1xp1():
    N = AbelianLattice(2)
    vs = VectorSet(N, [(1, 0), (-1, 0), (0, 1), (0, -1)])
    cones = [{0, 2}, {0, 3}, {1, 2}, {1, 3}]
    return StackyFan(vs, cones)


def bl_line_p4():
    """Blowup of P^4 along a torus-invariant line; S includes the
    exceptional ray e1+e2+e3."""
    N = AbelianLattice(4)
    vecs = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
            (-1, -1, -1, -1), (1, 1, 1, 0)]
    vs = VectorSet(N, vecs)
    cones = []
    for c in itertools.combinations(range(5), 4):
        cs = set(c)
        if {0, 1, 2} <= cs:
            for drop in (0, 1, 2):
                cones.append((cs - {drop}) | {5})
        else:
            cones.append(cs)
    return StackyFan(vs, cones)


def bl_point_p2():
    """Blowup of P^2 at a torus-fixed point."""
    N = AbelianLattice(2)
    vs = VectorSet(N, [(1, 0), (0, 1), (-1, -1), (1, 1)])
    cones = [{0, 3}, {3, 1}, {1, 2}, {2, 0}]
    return StackyFan(vs, cones)


def bl_line_p4_collection(ring: CohomologyRing):
    """The nine-term exceptional collection on the blowup of P^4 along a
    line, ordered by decreasing imaginary part of the matching critical
    values on the small-lambda end of the wall path.

    p1 = class of the e1 divisor (pull-back of the plane-parameter
    hyperplane), p2 = class of the e4 divisor (pull-back of O_P4(1)),
    E = p2 - p1 the exceptional class."""
    p1 = ring.divisor_by_s_index(0)
    p2 = ring.divisor_by_s_index(3)
    E = ring.divisor_by_s_index(5)
    one = ring.one()

    def lb(c1, label):
        return KClass.line_bundle(ring, c1, label)

    def oe(tw, label):
        base = one - E.scaled(Fraction(-1)).exp()
        return KClass(ring, base * tw.exp(), label)
    Ecls = oe(E - p2, "O_E(E-H2)")
    OEE = oe(E, "O_E(E)")
    OmH2 = lb(p2.scaled(Fraction(-1)), "O(-H2)")
    # G = O(-2H2) (x) phi^* T_P4 [-1]: ch = -(5 e^{p2} - 1) e^{-2 p2}
    Gch = (p2.scaled(Fraction(-2)).exp()
           * (one.scaled(Fraction(1)) - p2.exp().scaled(Fraction(5))))
    Gcls = KClass(ring, Gch, "O(-2H2)*phi^*T[-1]")
    O = KClass.structure_sheaf(ring)
    # H = O(2H2) (x) phi^* Omega^1: ch = (5 e^{-p2} - 1) e^{2 p2}
    Hch = (p2.scaled(Fraction(2)).exp()
           * (p2.scaled(Fraction(-1)).exp().scaled(Fraction(5)) - one))
    Hcls = KClass(ring, Hch, "O(2H2)*phi^*Omega1")
    OH2 = lb(p2, "O(H2)")
    OEm = oe(ring.zero(), "O_E").shift()
    Fcls = oe(p2, "O_E(H2)").shift()
    return [Ecls, OEE, OmH2, Gcls, O, Hcls, OH2, OEm, Fcls]


def bl_line_p4_initial_collection(ring: CohomologyRing):
    """The nine K-classes marked by the critical values on the large-lambda
    end of the wall path, in decreasing imaginary part of the markings.

    Obtained from the small-lambda collection by undoing the ray-crossing
    mutations along the path; seven of the nine are line bundles."""
    coll = bl_line_p4_collection(ring)
    Ecls, OEE, OmH2, Gcls, O, Hcls, OH2, OEm, Fcls = coll
    p1 = ring.divisor_by_s_index(0)
    p2 = ring.divisor_by_s_index(3)
    E = ring.divisor_by_s_index(5)

    def lb(c1, label):
        return KClass.line_bundle(ring, c1, label)

    def comb(parts, label):
        ch = ring.zero()
        for c, kc in parts:
            ch = ch + kc.ch.scaled(Fraction(c))
        return KClass(ring, ch, label)
    OmH1 = lb(p1.scaled(Fraction(-1)), "O(-H1)")
    OH1 = lb(p1, "O(H1)")
    V_G = comb([(1, Gcls), (2, OmH1), (-1, OEE)], "G+2O(-H1)-O_E(E)")
    V_H = comb([(1, Hcls), (-2, OH1), (1, OEm)], "H-2O(H1)+O_E[-1]")
    OE_lb = lb(E, "O(E)")
    OmE_lb = lb(E.scaled(Fraction(-1)), "O(-E)")
    return [OmH2, V_G, OmH1, OmE_lb, O, OE_lb, OH1, V_H, OH2]

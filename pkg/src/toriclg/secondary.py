"""Secondary (GKZ) fan machinery: chamber enumeration of stacky fans adapted
to S, CPL/cpl cone data with integral structures, wall detection and
classification, and the toric-curve chart attached to a wall."""
from __future__ import annotations

import itertools
from fractions import Fraction

from . import errors
from .cones import Cone
from .fans import StackyFan, extended_sequences
from .lattice import VectorSet
from .rational import (dot, in_lattice, mat_inverse, matvec, primitive,
                       rank, solve, transpose, vec)

MAX_S_FOR_ENUMERATION = 12


class PLConeData:
    """CPL_+(Sigma), its image cpl(Sigma), and the integral structures
    restricted to the chamber."""

    def __init__(self, fan: StackyFan):
        self.fan = fan
        m = len(fan.S)
        n = fan.n
        ineqs = []
        for b in range(m):
            e = [Fraction(0)] * m
            e[b] = Fraction(1)
            ineqs.append(tuple(e))
        for c in fan.max_cones:
            cs = sorted(c)
            B = [[fan.S[i].free[j] for i in cs] for j in range(n)]
            Binv = mat_inverse(B)
            for b in range(m):
                if b in c:
                    continue
                # c_b - m_sigma(c)(b) >= 0 with m_sigma determined by c|_cs;
                # m_sigma(b) = sum_k (B^-1 b)_k c_{cs[k]}
                coeff = matvec(Binv, vec(fan.S[b].free))
                row = [Fraction(0)] * m
                row[b] = Fraction(1)
                for i, x in zip(cs, coeff):
                    row[i] -= x
                ineqs.append(tuple(row))
        self.cpl_plus = Cone.from_inequalities(ineqs, ambient_dim=m)
        L = fan.kernel_basis()
        self.rank = len(L)
        D = fan.divisor_images()
        if self.rank:
            gens = [matvec([vec(row) for row in L], g) for g in self.cpl_plus.rays]
            gens = [g for g in gens if any(x != 0 for x in g)]
            self.cpl = Cone.from_rays(gens, self.rank) if gens else None
        else:
            self.cpl = None
        self.pl_lattice = fan.pl_lattice()
        self.plq_lattice = fan.plq_lattice()

    def daleth_membership(self, xi) -> bool:
        """xi in cpl(Sigma) cap daleth (chamber-restricted integral structure)."""
        if self.cpl is None:
            return all(x == 0 for x in xi)
        return self.cpl.contains(xi) and in_lattice(xi, [vec(r) for r in self.plq_lattice])

    def daleth_tilde_membership_up_to_height(self, c, height: int) -> bool:
        """Test c in daleth~ by checking eta_c integrality on lattice points of
        Pi up to the given sup-norm height (certified-up-to-bound check)."""
        c = vec(c)
        if any(x < 0 or x.denominator != 1 for x in c):
            return False
        fan = self.fan
        pts = _lattice_points_in_support(fan, height)
        for v in pts:
            val = _eta_value(fan, c, v)
            if val is None or val.denominator != 1:
                return False
        return True


def _lattice_points_in_support(fan: StackyFan, height: int):
    n = fan.n
    sup = fan.vector_set.support_cone
    out = []
    for pt in itertools.product(range(-height, height + 1), repeat=n):
        if sup.contains(vec(pt)):
            out.append(vec(pt))
    return out


def _eta_value(fan: StackyFan, c, v):
    """eta_c(v) for v in the support: value of the slope of the containing cone."""
    for cone in fan.max_cones:
        cs = sorted(cone)
        rows = [tuple(fan.S[i].free[j] for i in cs) for j in range(fan.n)]
        coeff = solve(rows, v)
        if coeff is not None and all(x >= 0 for x in coeff):
            return sum((coeff[k] * c[cs[k]] for k in range(len(cs))), Fraction(0))
    return None


def cpl_cone(fan: StackyFan) -> PLConeData:
    data = PLConeData(fan)
    # duality checks against the extended Mori cones (exact, generator level)
    oe = fan.open_mori_cone()
    if data.cpl_plus.dual() != oe:
        raise errors.SupportMismatch("CPL_+^v != OE^: duality violated")
    if data.cpl is not None:
        ne = fan.extended_mori_cone()
        if data.cpl.dual() != ne:
            raise errors.SupportMismatch("cpl^v != NE^: duality violated")
    return data


# ---------------------------------------------------------------------------
# chamber enumeration


def _fan_from_stability(vector_set: VectorSet, D, omega):
    """Stacky fan selected by a generic GIT stability parameter omega in L^*_R.

    Maximal cones are the n-subsets I with omega in relint cone(D_b : b not
    in I); returns None when omega is not generic enough to select a valid
    simplicial fan.
    """
    S = vector_set.vectors
    n = vector_set.lattice.rank
    m = len(S)
    r = len(omega)
    max_cones = []
    for I in itertools.combinations(range(m), n):
        if rank([vec(S[i].free) for i in I]) != n:
            continue
        rest = [vec(D[b]) for b in range(m) if b not in I]
        if not rest:
            continue
        cone = Cone.from_rays(rest, r)
        if cone.dim() == r and cone.relint_contains(omega):
            max_cones.append(frozenset(I))
    if not max_cones:
        return None
    try:
        return StackyFan(vector_set, max_cones)
    except errors.ToricLGError:
        return None


def enumerate_adapted_fans(vector_set: VectorSet, max_size=MAX_S_FOR_ENUMERATION):
    """All stacky fans adapted to S, via breadth-first chamber traversal of
    the secondary fan.  Returns (fans, walls) with walls a list of
    (fan_index_plus_side, fan_index_other, primitive normal in L coords)."""
    S = vector_set.vectors
    if len(S) > max_size:
        raise errors.TooLarge(f"|S| = {len(S)} exceeds enumeration bound {max_size}")
    L, D, _ = extended_sequences(vector_set)
    r = len(L)
    if r == 0:
        # L = 0 forces S to be a basis of N_Q: a single chamber
        return [StackyFan(vector_set, [frozenset(range(len(S)))])], []
    support = Cone.from_rays([vec(d) for d in D], r)
    import random
    rng = random.Random(20200422)
    start = None
    for _ in range(200):
        omega = tuple(sum(Fraction(rng.randint(1, 97)) * Fraction(D[b][j])
                          for b in range(len(S))) for j in range(r))
        fan = _fan_from_stability(vector_set, D, omega)
        if fan is not None:
            data = PLConeData(fan)
            if data.cpl is not None and data.cpl.relint_contains(omega):
                start = fan
                break
    if start is None:
        raise errors.TooLarge("failed to locate an initial chamber")
    fans = [start]
    seen = {start.key(): 0}
    walls = []
    queue = [0]
    while queue:
        fi = queue.pop(0)
        fan = fans[fi]
        data = PLConeData(fan)
        cpl = data.cpl
        for g in cpl.inequalities:
            # facet relint point (the origin when the facet is {0})
            face_rays = [rr for rr in cpl.rays if dot(g, rr) == 0]
            p = tuple(Fraction(0) for _ in range(len(g)))
            for rr in face_rays:
                p = tuple(a + b for a, b in zip(p, rr))
            # boundary facet of the support: no neighbour
            if all(dot(g, vec(D[b])) >= 0 for b in range(len(S))):
                continue
            neighbour = None
            for k in range(1, 64):
                omega = tuple(Fraction(2 ** k) * a - b for a, b in zip(p, g))
                if not support.contains(omega):
                    continue
                cand = _fan_from_stability(vector_set, D, omega)
                if cand is None:
                    continue
                cdata = PLConeData(cand)
                if (cdata.cpl is not None and cdata.cpl.relint_contains(omega)
                        and all(cdata.cpl.contains(rr) for rr in face_rays)):
                    # genuine facet neighbour: shares the whole wall face
                    neighbour = cand
                    break
            if neighbour is None:
                raise errors.TooLarge("chamber probe failed near a wall")
            key = neighbour.key()
            if key not in seen:
                seen[key] = len(fans)
                fans.append(neighbour)
                queue.append(seen[key])
            wi = seen[key]
            wall_normal = primitive(g)
            pair = (min(fi, wi), max(fi, wi))
            if not any((a, b) == pair for a, b, _ in walls):
                walls.append((pair[0], pair[1], wall_normal))
    return fans, walls


# ---------------------------------------------------------------------------
# wall crossings


WALL_KINDS = ("flip", "contract_divisor", "extract_divisor", "root", "crepant")


class WallCrossing:
    """A codimension-one wall between two chambers, oriented so that the
    discrepancy sum is nonnegative on the plus side."""

    def __init__(self, plus_fan: StackyFan, minus_fan: StackyFan, w,
                 swapped=False):
        self.plus_fan = plus_fan
        self.minus_fan = minus_fan
        self.w = tuple(int(x) for x in w)
        self.swapped = swapped
        S = plus_fan.S
        lat = plus_fan.lattice
        D = plus_fan.divisor_images()
        self.k = [int(dot(vec(D[b]), vec(self.w))) for b in range(len(S))]
        self.M_plus = [b for b in range(len(S)) if self.k[b] > 0]
        self.M_minus = [b for b in range(len(S)) if self.k[b] < 0]
        self.discrepancy = sum(self.k)
        # circuit relation sum_b (D_b.w) b = 0, including torsion
        acc = lat.zero()
        for b in range(len(S)):
            if self.k[b]:
                acc = acc.add(S[b].scale(self.k[b], lat), lat)
        if any(acc.free) or any(acc.tor):
            raise errors.NotAdjacent("circuit relation fails for the wall normal")
        self.kind = self._classify()
        self.hat_b = None
        self.J = None
        self.K = None
        if self.kind in ("contract_divisor", "root"):
            acc = lat.zero()
            for b in self.M_plus:
                acc = acc.add(S[b].scale(self.k[b], lat), lat)
            self.hat_b = acc
            self.J = sum(self.k[b] for b in self.M_plus) - 1
            self.K = 1
            for b in self.M_plus:
                self.K *= self.k[b] ** self.k[b]
        elif self.kind == "extract_divisor":
            self.J = self.discrepancy
            b_plus = self.M_plus[0]
            self.hat_b = S[b_plus].scale(self.k[b_plus], lat)
            self.K = self.k[b_plus] ** self.k[b_plus]

    def _classify(self):
        if self.discrepancy == 0:
            return "crepant"
        Rp = set(self.plus_fan.rays)
        Rm = set(self.minus_fan.rays)
        Mp, Mm = set(self.M_plus), set(self.M_minus)
        if Rp == Rm and len(Mp) >= 2 and len(Mm) >= 2:
            return "flip"
        if Rp == Rm | Mm and len(Mm) == 1 and len(Mp) >= 2 and Rm & Mm == set():
            return "contract_divisor"      # type II-i
        if Rm == Rp | Mp and len(Mp) == 1 and len(Mm) >= 2 and Rp & Mp == set():
            return "extract_divisor"       # type II-ii
        if Rp - Rm == Mm and Rm - Rp == Mp and len(Mp) == len(Mm) == 1:
            return "root"                  # type III
        raise errors.NotAdjacent("wall does not match any circuit pattern")


def wall_between(fan_plus: StackyFan, fan_minus: StackyFan) -> WallCrossing:
    """Wall data for two chambers sharing a codimension-one face; the result
    is oriented so that the discrepancy is >= 0 (swapping if needed)."""
    d1 = PLConeData(fan_plus)
    d2 = PLConeData(fan_minus)
    if d1.cpl is None or d2.cpl is None:
        raise errors.NotAdjacent("trivial secondary fan has no walls")
    r = d1.rank
    inter = d1.cpl.intersection(d2.cpl)
    if inter.dim() != r - 1:
        raise errors.NotAdjacent("chambers do not share a codimension-one face")
    # primitive normal of the wall hyperplane, nonnegative on cpl(plus)
    from .rational import nullspace
    normals = nullspace([tuple(rr) for rr in inter.rays], r)
    if len(normals) != 1:
        raise errors.NotAdjacent("wall face does not span a hyperplane")
    w = vec(primitive(normals[0]))
    if not all(dot(w, rr) >= 0 for rr in d1.cpl.rays):
        w = tuple(-x for x in w)
    wc = WallCrossing(fan_plus, fan_minus, primitive(w))
    if wc.discrepancy < 0:
        wc = WallCrossing(fan_minus, fan_plus,
                          tuple(-x for x in primitive(w)), swapped=True)
    return wc


# ---------------------------------------------------------------------------
# the curve chart of a wall


class CurveChart:
    """Chart data of the toric curve joining the two large radius limit
    points of a wall.

    The two chart coordinates are t_plus = q^(w/e_plus) and
    t_minus = q^(-w/e_minus); they satisfy t_minus^e_minus = t_plus^(-e_plus).
    Products in the restricted algebras A_pm are returned as exponents of
    the corresponding chart coordinate.
    """

    def __init__(self, wall: WallCrossing):
        if wall.kind == "crepant":
            raise errors.NotAdjacent("curve chart requires nonzero discrepancy")
        self.wall = wall
        self.e_plus = self._common_denominator(wall.plus_fan)
        self.e_minus = self._common_denominator(wall.minus_fan)
        self._sigma0_cones = None

    def _common_denominator(self, fan: StackyFan) -> int:
        """Smallest common denominator of {c in Q : c*w in Lambda(fan)}."""
        from math import gcd
        lam = fan.big_lambda_lattice()
        coeff = solve(transpose([vec(r) for r in lam]), vec(self.wall.w))
        if coeff is None:
            raise errors.NotAdjacent("w not in Lambda_Q")
        # minimal t > 0 with t*coeff integral: t = lcm(denoms)/gcd(numers)
        num_g, den_l = 0, 1
        for a in coeff:
            if a == 0:
                continue
            num_g = gcd(num_g, abs(a.numerator))
            den_l = den_l * a.denominator // gcd(den_l, a.denominator)
        t = Fraction(den_l, num_g)
        return t.denominator

    def product_exponent(self, v1, v2, side="plus"):
        """Exponent a with w_{v1} w_{v2} = t_side^a w_{v1+v2}, or None when
        the product vanishes (v1, v2 not in a common cone of Sigma_0)."""
        fan = self.wall.plus_fan if side == "plus" else self.wall.minus_fan
        lat = fan.lattice
        from .lattice import as_element
        v1 = as_element(lat, v1)
        v2 = as_element(lat, v2)
        v12 = v1.add(v2, lat)
        try:
            p1, p2, p12 = fan.psi(v1), fan.psi(v2), fan.psi(v12)
        except errors.OutsideSupport:
            return None
        if self._sigma0_cones is None:
            self._sigma0_cones = sigma0_max_cones(self.wall)
        if not _common_cone_sigma0(self.wall, v1, v2, self._sigma0_cones):
            return None
        diff = tuple(a + b - c for a, b, c in zip(p1, p2, p12))
        return self._as_t_exponent(diff, side)

    def glue_exponent(self, v):
        """Exponent a with w_v^- = q^a_w w_v^+, as a multiple of w."""
        fan_p, fan_m = self.wall.plus_fan, self.wall.minus_fan
        from .lattice import as_element
        v = as_element(fan_p.lattice, v)
        diff = tuple(a - b for a, b in zip(fan_m.psi(v), fan_p.psi(v)))
        return self._as_w_multiple(diff)

    def _as_w_multiple(self, diff):
        L = self.wall.plus_fan.kernel_basis()
        Lt = [tuple(row[j] for row in L) for j in range(len(diff))]
        coeff = solve(Lt, vec(diff))
        if coeff is None:
            raise errors.NotAdjacent("difference not in L_Q")
        wv = vec(self.wall.w)
        # coeff = c * w in kernel coordinates
        idx = next(i for i in range(len(wv)) if wv[i] != 0)
        c = coeff[idx] / wv[idx]
        if tuple(c * x for x in wv) != tuple(coeff):
            raise errors.NotAdjacent("difference not proportional to w")
        return c

    def _as_t_exponent(self, diff, side):
        c = self._as_w_multiple(diff)
        if side == "plus":
            return c * self.e_plus
        return -c * self.e_minus


def sigma0_max_cones(wall: WallCrossing):
    """Maximal cones of the possibly-degenerate common coarsening Sigma_0,
    as Cone objects (with their generating index sets).

    I belongs to the index family when the angle spanned by {D_b : b not in
    I} contains the relative interior of the shared wall face; the maximal
    members give the cones of Sigma_0.
    """
    fan = wall.plus_fan
    m = len(fan.S)
    D = fan.divisor_images()
    d1 = PLConeData(wall.plus_fan)
    d2 = PLConeData(wall.minus_fan)
    face = d1.cpl.intersection(d2.cpl)
    p0 = face.relint_point()
    members = []
    for size in range(m + 1):
        for I in itertools.combinations(range(m), size):
            rest = [vec(D[b]) for b in range(m) if b not in I]
            if not rest:
                if all(x == 0 for x in p0):
                    members.append(frozenset(I))
                continue
            cone = Cone.from_rays(rest, d1.rank)
            if cone.relint_contains(p0):
                members.append(frozenset(I))
    maximal = [I for I in members
               if not any(I < J for J in members)]
    out = []
    for I in maximal:
        out.append((I, Cone.from_rays([fan.ray_free(i) for i in sorted(I)],
                                      fan.n)))
    return out


def _common_cone_sigma0(wall: WallCrossing, v1, v2, cache=None):
    """Whether v1bar, v2bar lie in a common cone of Sigma_0."""
    cones = cache if cache is not None else sigma0_max_cones(wall)
    for _, cone in cones:
        if cone.contains(vec(v1.free)) and cone.contains(vec(v2.free)):
            return True
    return False


def curve_chart(wall: WallCrossing) -> CurveChart:
    return CurveChart(wall)

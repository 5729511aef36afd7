"""Stacky fans adapted to a vector set: validation, Box elements and ages,
orbifold-cohomology dimension, extended fan/divisor sequences, extended Mori
cones and their monoids.

Everything here is exact. Fans are stored through their maximal cones,
given as index sets into S; the ray set R is the union of those index sets.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from . import errors
from .cones import Cone, hilbert_basis
from .lattice import NElt, VectorSet, as_element
from .lp import feasible_strict
from .rational import (det, dot, dual_lattice, integer_kernel,
                       lattice_from_generators, mat_inverse, matvec,
                       nullspace, preimage_lattice, primitive, rank, solve,
                       vec)


def extended_sequences(vector_set: VectorSet):
    """Kernel basis of beta, the divisor images D_b, and a surjectivity flag.

    Returns (L_basis, D, surjective) where L_basis rows span
    L = ker(beta: Z^S -> N) and D[b] are the coordinates of D_b in the dual
    basis of L_basis.
    """
    S = vector_set.vectors
    lat = vector_set.lattice
    n, tor = lat.rank, lat.torsion
    Bbar = [tuple(b.free[i] for b in S) for i in range(n)]
    ker_free = integer_kernel(Bbar) if S else []
    if tor:
        # refine by the torsion congruences sum_b lam_b zeta_b = 0 in N_tor
        T = [tuple(b.tor[i] for b in S) for i in range(len(tor))]
        coeffs = []
        for lam in ker_free:
            coeffs.append(tuple(sum(T[i][j] * lam[j] for j in range(len(S)))
                                for i in range(len(tor))))
        # sub-lattice of coefficient space where T*K*x = 0 mod d_i
        rows = []
        for i, d in enumerate(tor):
            rows.append(tuple(Fraction(coeffs[j][i], d) for j in range(len(ker_free))))
        sub = preimage_lattice(rows, len(ker_free)) if rows else \
            [tuple(1 if i == j else 0 for j in range(len(ker_free)))
             for i in range(len(ker_free))]
        L_basis = []
        for coeff in sub:
            v = [0] * len(S)
            for c, lam in zip(coeff, ker_free):
                for j in range(len(S)):
                    v[j] += c * lam[j]
            L_basis.append(tuple(v))
        L_basis = lattice_from_generators(L_basis)
    else:
        L_basis = lattice_from_generators(ker_free) if ker_free else []
    D = [tuple(Fraction(row[j]) for row in L_basis) for j in range(len(S))]
    return L_basis, D, bool(vector_set.generates)


class BoxElement:
    def __init__(self, element: NElt, cone_index: int, coefficients, age: Fraction):
        self.element = element
        self.cone = cone_index
        self.coefficients = coefficients     # dict ray-index -> Fraction in [0,1)
        self.age = age

    def __repr__(self):
        return f"Box({self.element}, age={self.age})"


class StackyFan:
    """A validated stacky fan adapted to S."""

    def __init__(self, vector_set: VectorSet, max_cones, validate=True):
        self.vector_set = vector_set
        self.S = vector_set.vectors
        self.lattice = vector_set.lattice
        self.max_cones = sorted(frozenset(int(i) for i in c) for c in max_cones)
        self.rays = sorted(set().union(*self.max_cones)) if self.max_cones else []
        self._cones_geom = None
        self._L = None
        self._D = None
        self._plz = None
        if validate:
            self._validate()

    # -- basic data --------------------------------------------------------
    @property
    def n(self):
        return self.lattice.rank

    def ray_free(self, i):
        return vec(self.S[i].free)

    def cone_geometry(self):
        if self._cones_geom is None:
            self._cones_geom = [Cone.from_rays([self.ray_free(i) for i in c],
                                               self.n)
                                for c in self.max_cones]
        return self._cones_geom

    def kernel_basis(self):
        if self._L is None:
            self._L, self._D, _ = extended_sequences(self.vector_set)
        return self._L

    def divisor_images(self):
        """D_b in L^* coordinates (dual basis of kernel_basis)."""
        if self._D is None:
            self.kernel_basis()
        return self._D

    # -- validation --------------------------------------------------------
    def _validate(self):
        n = self.n
        for c in self.max_cones:
            for i in c:
                if i < 0 or i >= len(self.S):
                    raise errors.RayNotInS(f"ray index {i} outside S")
        if not self.max_cones:
            raise errors.SupportMismatch("no maximal cones")
        dirs = {}
        for i in self.rays:
            d = primitive(self.ray_free(i))
            if d in dirs:
                raise errors.NonSimplicial(
                    f"rays {dirs[d]} and {i} span the same 1-cone")
            dirs[d] = i
        for c in self.max_cones:
            if rank([self.ray_free(i) for i in c]) != len(c):
                raise errors.NonSimplicial(f"cone {sorted(c)} is not simplicial")
            if len(c) != n:
                # Pi is full-dimensional, so lower-dimensional maximal cones
                # can never cover it
                raise errors.SupportMismatch(
                    f"maximal cone {sorted(c)} has dimension {len(c)} < {n}")
        self._check_pairwise_faces()
        self._check_cover()
        ok, _ = self.convexity_certificate()
        if not ok:
            raise errors.NoConvexSupportFunction(
                "no strictly convex piecewise linear support function")

    def _check_pairwise_faces(self):
        geom = self.cone_geometry()
        for a in range(len(self.max_cones)):
            for b in range(a + 1, len(self.max_cones)):
                common = self.max_cones[a] & self.max_cones[b]
                inter = geom[a].intersection(geom[b])
                if common:
                    expect = Cone.from_rays([self.ray_free(i) for i in common],
                                            self.n)
                    if inter != expect:
                        raise errors.SupportMismatch(
                            f"cones {sorted(self.max_cones[a])} and "
                            f"{sorted(self.max_cones[b])} do not meet in a face")
                elif inter.dim() != 0:
                    raise errors.SupportMismatch(
                        f"cones {sorted(self.max_cones[a])} and "
                        f"{sorted(self.max_cones[b])} overlap")

    def _facet_data(self, cone_idx, drop):
        """Normal of the facet of max cone `cone_idx` obtained by dropping
        ray `drop`, oriented positively on the cone."""
        c = sorted(self.max_cones[cone_idx])
        others = [i for i in c if i != drop]
        rows = [self.ray_free(i) for i in others]
        ns = nullspace(rows, self.n)
        h = ns[0]
        if dot(h, self.ray_free(drop)) < 0:
            h = tuple(-x for x in h)
        return vec(primitive(h)), frozenset(primitive(self.ray_free(i))
                                            for i in others)

    def _check_cover(self):
        support = self.vector_set.support_cone
        facets = {}
        for ci, c in enumerate(self.max_cones):
            for drop in c:
                h, key = self._facet_data(ci, drop)
                facets.setdefault(key, []).append((ci, h))
        for key, occ in facets.items():
            if len(occ) == 1:
                ci, h = occ[0]
                if not all(dot(h, self.ray_free(j)) >= 0
                           for j in range(len(self.S))):
                    raise errors.SupportMismatch(
                        "boundary facet not supporting Pi: union of cones "
                        "does not equal the support")
            elif len(occ) == 2:
                (c1, h1), (c2, h2) = occ
                if primitive(h1) != tuple(-x for x in primitive(h2)):
                    raise errors.SupportMismatch(
                        f"cones {c1} and {c2} lie on the same side of a wall")
            else:
                raise errors.SupportMismatch("facet shared by more than two cones")

    def convexity_certificate(self):
        """Exact LP feasibility of a strictly convex support function."""
        n = self.n
        ncones = len(self.max_cones)
        rays = self.rays
        nv = len(rays) + n * ncones    # c_b then slopes m_sigma
        ray_pos = {b: k for k, b in enumerate(rays)}

        def var_m(si, i):
            return len(rays) + si * n + i

        eqs, eqb = [], []
        strict = []
        for si, c in enumerate(self.max_cones):
            for b in rays:
                row = [Fraction(0)] * nv
                bb = self.ray_free(b)
                for i in range(n):
                    row[var_m(si, i)] = bb[i]
                if b in c:
                    row[ray_pos[b]] -= 1
                    eqs.append(row)
                    eqb.append(Fraction(0))
                else:
                    # c_b - m_sigma(b) >= 1
                    srow = [-x for x in row]
                    srow[ray_pos[b]] += 1
                    strict.append(srow)
        ok, witness = feasible_strict(strict, A_eq=eqs, b_eq=eqb)
        return ok, witness

    # -- Box and dimensions -------------------------------------------------
    def box_of_cone(self, cone_idx):
        """Box elements attached to one maximal cone (all torsion lifts)."""
        c = sorted(self.max_cones[cone_idx])
        n = self.n
        B = [[self.S[i].free[j] for i in c] for j in range(n)]   # columns = rays
        from .rational import snf
        Dg, U, V = snf(B)
        diag = [Dg[i][i] for i in range(n)]
        Uinv = mat_inverse(U)
        Binv = mat_inverse(B)
        pts = set()
        for ys in itertools.product(*[range(abs(d)) for d in diag]):
            x = matvec(Uinv, [Fraction(y) for y in ys])
            coeff = matvec(Binv, x)
            cmod = tuple(t - (t.numerator // t.denominator) for t in coeff)
            pt = matvec(B, cmod)
            pts.add(tuple(pt))
        out = []
        for pt in sorted(pts):
            if any(x.denominator != 1 for x in pt):
                raise errors.VolumeBoxMismatch("non-integral box point")
            coeff = matvec(Binv, pt)
            coeffs = {c[i]: coeff[i] for i in range(n) if coeff[i] != 0}
            age = sum(coeff, Fraction(0))
            for torp in self.lattice.torsion_elements():
                v = self.lattice.element(tuple(int(x) for x in pt), torp)
                out.append(BoxElement(v, cone_idx, coeffs, age))
        expected = self.lattice.torsion_order * abs(int(det(B)))
        if len(out) != expected:
            raise errors.VolumeBoxMismatch(
                f"cone {c}: {len(out)} box points, determinant predicts {expected}")
        return out

    def box_elements(self):
        """Deduplicated Box(Sigma) with ages; includes v = 0 with age 0."""
        seen = {}
        for ci in range(len(self.max_cones)):
            for be in self.box_of_cone(ci):
                key = be.element
                if key in seen:
                    if seen[key].age != be.age:
                        raise errors.VolumeBoxMismatch(
                            f"age mismatch for {key}: {seen[key].age} vs {be.age}")
                else:
                    seen[key] = be
        return [seen[k] for k in sorted(seen)]

    def dim_orbifold_cohomology(self) -> int:
        """|N_tor| x sum of normalized cone volumes, cross-checked against the
        per-sector Box count."""
        volsum = 0
        for c in self.max_cones:
            B = [[self.S[i].free[j] for i in sorted(c)] for j in range(self.n)]
            volsum += abs(int(det(B)))
        total = self.lattice.torsion_order * volsum
        sector = sum(len(self.box_of_cone(ci))
                     for ci in range(len(self.max_cones)))
        if sector != total:
            raise errors.VolumeBoxMismatch(
                f"box-sector count {sector} != volume count {total}")
        return total

    # -- Psi ----------------------------------------------------------------
    def psi(self, v):
        """Psi^Sigma(v) in Q^S for v with free image inside the support."""
        v = as_element(self.lattice, v)
        target = vec(v.free)
        for ci, c in enumerate(self.max_cones):
            cs = sorted(c)
            rows = [tuple(self.S[i].free[j] for i in cs) for j in range(self.n)]
            coeff = solve(rows, target)
            if coeff is not None and all(x >= 0 for x in coeff):
                out = [Fraction(0)] * len(self.S)
                for i, x in zip(cs, coeff):
                    out[i] = x
                return tuple(out)
        raise errors.OutsideSupport(f"{v} is not in the support of the fan")

    # -- PL lattices and Mori cones ------------------------------------------
    def pl_lattice(self):
        """Basis of PL_Z(Sigma) inside (Z^S)*."""
        if self._plz is not None:
            return self._plz
        m = len(self.S)
        conds = []
        for c in self.max_cones:
            cs = sorted(c)
            B = [[self.S[i].free[j] for i in cs] for j in range(self.n)]
            Binv = mat_inverse(B)
            # m_sigma(c) = Binv^T c|_cs ; integrality of all n coordinates
            for i in range(self.n):
                row = [Fraction(0)] * m
                for k, b in enumerate(cs):
                    row[b] = Binv[k][i]
                conds.append(row)
        self._plz = preimage_lattice(conds, m)
        return self._plz

    def plq_lattice(self):
        """Basis of pl_Z(Sigma) = PL_Z/M inside L^* (kernel-dual coords)."""
        L = self.kernel_basis()
        if not L:
            return []
        plz = self.pl_lattice()
        imgs = []
        for c in plz:
            img = tuple(int(sum(Fraction(row[j]) * c[j] for j in range(len(c))))
                        for row in L)
            if any(img):
                imgs.append(img)
        return lattice_from_generators(imgs)

    def big_lambda_lattice(self):
        """Basis of Lambda(Sigma) = pl_Z(Sigma)^* in L_Q (kernel-basis coords)."""
        plq = self.plq_lattice()
        if not plq:
            return []
        return dual_lattice([vec(r) for r in plq])

    def open_mori_cone(self):
        """OE^(X_Sigma) as a cone in Q^S (sum of the per-cone preimages)."""
        gens = []
        m = len(self.S)
        for c in self.max_cones:
            cs = sorted(c)
            rows = [tuple(self.S[i].free[j] for i in cs) for j in range(self.n)]
            for b in c:
                e = [Fraction(0)] * m
                e[b] = Fraction(1)
                gens.append(tuple(e))
            for b in range(m):
                if b in c:
                    continue
                # e_b minus the (possibly signed) expansion of b over the cone basis
                coeff = solve(rows, vec(self.S[b].free))
                d = [Fraction(0)] * m
                d[b] = Fraction(1)
                for i, x in zip(cs, coeff):
                    d[i] -= x
                gens.append(tuple(d))
        return Cone.from_rays(gens, m)

    def extended_mori_cone(self):
        """NE^(X_Sigma) in L_R, in kernel-basis coordinates."""
        oe = self.open_mori_cone()
        m = len(self.S)
        Bbar = [tuple(self.S[b].free[i] for b in range(m)) for i in range(self.n)]
        sub = Cone.from_inequalities(list(oe.inequalities),
                                     list(oe.equalities) + [vec(r) for r in Bbar],
                                     m)
        # express rays in kernel-basis coordinates
        L = self.kernel_basis()
        Lt = [tuple(row[j] for row in L) for j in range(m)]
        out = []
        for r in sub.rays:
            coeff = solve(Lt, r)
            out.append(tuple(coeff))
        return Cone.from_rays(out, len(L)) if out else Cone.from_rays([], len(L))

    def mori_monoid_generators(self):
        """Hilbert-basis generators of Lambda(Sigma)_+ (kernel coords)."""
        ne = self.extended_mori_cone()
        lam = self.big_lambda_lattice()
        if not ne.rays:
            return []
        return hilbert_basis(ne, lam)

    def open_monoid_generators(self):
        """Hilbert-basis generators of the torsion-free part of O(Sigma)_+
        as vectors in Q^S."""
        oe = self.open_mori_cone()
        plz = self.pl_lattice()
        obar = dual_lattice([vec(r) for r in plz])
        return hilbert_basis(oe, obar)

    # -- misc ---------------------------------------------------------------
    def is_smooth(self) -> bool:
        if self.lattice.torsion:
            return False
        for c in self.max_cones:
            B = [[self.S[i].free[j] for i in sorted(c)] for j in range(self.n)]
            if abs(int(det(B))) != 1:
                return False
        return True

    def is_complete(self) -> bool:
        sup = self.vector_set.support_cone
        return len(sup.lineality) == self.n

    def fan_polytope_volume(self):
        volsum = 0
        for c in self.max_cones:
            B = [[self.S[i].free[j] for i in sorted(c)] for j in range(self.n)]
            volsum += abs(int(det(B)))
        return volsum

    def key(self):
        return (tuple(self.max_cones), tuple(self.rays))

    def __repr__(self):
        cones = [sorted(c) for c in self.max_cones]
        return f"StackyFan(rays={self.rays}, cones={cones})"


def validate_stacky_fan(vector_set: VectorSet, max_cones) -> StackyFan:
    """Validate a raw fan description (cones as ray-index sets into S)."""
    return StackyFan(vector_set, max_cones, validate=True)

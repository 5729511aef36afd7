"""Mirror Landau-Ginzburg potentials on secondary-fan charts: critical
points by multistart damped Newton in log coordinates, conifold points,
closed-form critical values over wall curves, Newton non-degeneracy tests,
and predictor-corrector tracking of critical values along moduli paths.
"""
from __future__ import annotations

import cmath
import itertools
import math
from fractions import Fraction

import numpy as np

from . import errors
from .cones import normalized_volume, polytope_facets, polytope_proper_faces
from .fans import StackyFan
from .rational import mat_inverse, matvec, solve, vec

TOL_NEWTON = 1e-12
TOL_HESS = 1e-9
TOL_COLLIDE = 1e-4


class LGPotential:
    """F = sum_b c_b x^{b} (+ optional torsion characters twisting c_b and an
    equivariant shift chi), with analytic gradient and Hessian in log
    coordinates."""

    def __init__(self, exponents, coefficients, chi=None, torsion_parts=None,
                 torsion_invariants=(), labels=None):
        self.B = np.asarray(exponents, dtype=float)
        self.B_int = [tuple(int(x) for x in row) for row in exponents]
        self.c = np.asarray(coefficients, dtype=complex)
        if np.any(self.c == 0):
            raise ValueError("zero coefficients are not allowed in a potential")
        self.nterms, self.n = self.B.shape
        self.chi = (np.zeros(self.n, dtype=complex) if chi is None
                    else np.asarray(chi, dtype=complex))
        self.torsion_invariants = tuple(int(d) for d in torsion_invariants)
        self.torsion_parts = (torsion_parts if torsion_parts is not None
                              else [(0,) * len(self.torsion_invariants)] * self.nterms)
        self.labels = labels

    @property
    def torsion_order(self):
        out = 1
        for d in self.torsion_invariants:
            out *= d
        return out

    def components(self):
        """Character labels of the fibre components (trivial if no torsion)."""
        out = [()]
        for d in self.torsion_invariants:
            out = [t + (r,) for t in out for r in range(d)]
        return out

    def coefficients_on(self, component):
        """Coefficients twisted by the character of the given component."""
        if not self.torsion_invariants:
            return self.c
        tw = []
        for k in range(self.nterms):
            phase = 0.0
            for gi, ti, d in zip(component, self.torsion_parts[k],
                                 self.torsion_invariants):
                phase += 2 * math.pi * gi * ti / d
            tw.append(cmath.exp(1j * phase))
        return self.c * np.asarray(tw)

    # -- evaluation in log coordinates l = log x ----------------------------
    def value(self, l, component=()):
        c = self.coefficients_on(component) if self.torsion_invariants else self.c
        e = np.exp(self.B @ l)
        val = np.sum(c * e)
        if np.any(self.chi):
            val -= np.sum(self.chi * l)
        return complex(val)

    def grad(self, l, component=()):
        c = self.coefficients_on(component) if self.torsion_invariants else self.c
        e = np.exp(self.B @ l)
        return (c * e) @ self.B - self.chi

    def hess(self, l, component=()):
        c = self.coefficients_on(component) if self.torsion_invariants else self.c
        e = np.exp(self.B @ l)
        return (self.B.T * (c * e)) @ self.B

    def newton_polytope(self):
        return [tuple(int(x) for x in row) for row in self.B_int]

    def expected_count(self):
        """|N_tor| x normalized volume of the Newton polytope when 0 is
        interior (the Kouchnirenko count); None otherwise."""
        pts = self.newton_polytope()
        facets = polytope_facets([vec(p) for p in pts])
        if not facets or any(a0 <= 0 for _, a0, _ in facets):
            return None
        vol = normalized_volume([vec(p) for p in pts])
        return self.torsion_order * int(vol)


class CriticalDatum:
    def __init__(self, log_point, value, log_hessian, component=(),
                 tol_hess=TOL_HESS):
        self.log_point = np.asarray(log_point, dtype=complex)
        self.value = complex(value)
        self.log_hessian = np.asarray(log_hessian, dtype=complex)
        self.component = component
        deth = complex(np.linalg.det(self.log_hessian))
        scale = float(np.max(np.abs(self.log_hessian))) or 1.0
        self.det_hessian = deth
        self.nondegenerate = abs(deth) > tol_hess * scale ** len(log_point)
        self.tag = "unknown"
        self.orientation = 1
        self.sqrt_det_h = cmath.sqrt(deth)

    def __repr__(self):
        return f"CriticalDatum(value={self.value:.6g}, tag={self.tag})"


def _canonical_log(l):
    return l.real + 1j * ((l.imag + math.pi) % (2 * math.pi) - math.pi)


def _term_scale(F, l, component=()):
    """Magnitude of the largest monomial term at l (convergence is judged
    relative to this, so drift to toric infinity never passes as a zero)."""
    c = F.coefficients_on(component) if F.torsion_invariants else F.c
    with np.errstate(over="ignore", invalid="ignore"):
        mags = np.abs(c * np.exp(F.B @ l))
    s = float(np.max(mags)) if np.all(np.isfinite(mags)) else math.inf
    if np.any(F.chi):
        s = max(s, float(np.max(np.abs(F.chi))))
    return max(s, 1e-300)


def _newton_solve(F, l0, component=(), tol=TOL_NEWTON, itmax=100):
    l = np.asarray(l0, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(itmax):
            g = F.grad(l, component)
            gn = np.linalg.norm(g)
            if not np.isfinite(gn):
                return None
            if gn < tol * _term_scale(F, l, component):
                return l
            H = F.hess(l, component)
            try:
                dl = np.linalg.solve(H, -g)
            except np.linalg.LinAlgError:
                return None
            t = 1.0
            for _ in range(50):
                l2 = l + t * dl
                g2 = F.grad(l2, component)
                g2n = np.linalg.norm(g2)
                if np.isfinite(g2n) and (g2n < (1 - 0.25 * t) * gn
                                         or g2n < tol * _term_scale(F, l2, component)):
                    break
                t *= 0.5
            else:
                return None
            l = l + t * dl
        g = F.grad(l, component)
        return l if np.linalg.norm(g) < tol * _term_scale(F, l, component) else None


def critical_points(F: LGPotential, expected=None, rng=None,
                    budget_factor=200, window=2.5, structured_starts=(),
                    tol=TOL_NEWTON, raise_on_incomplete=True, coord_cap=18.0,
                    dedupe_tol=1e-5):
    """All critical points x dF/dx = chi on the open torus, by multistart
    damped Newton in log coordinates, deduplicated modulo 2 pi i shifts.

    Solutions drifting to toric infinity (|Re log x| beyond coord_cap, where
    the gradient decays without a genuine zero) are rejected.  Completeness
    is asserted against the Kouchnirenko count when the Newton polytope has
    0 in its interior (or against `expected`)."""
    if rng is None:
        rng = np.random.default_rng(0)
    if expected is None:
        expected = F.expected_count()
    found = []
    budget = budget_factor * (expected if expected else 8)

    def record(l, component):
        l = _canonical_log(l)
        if np.max(np.abs(l.real)) > coord_cap:
            return False
        for p in found:
            if p.component == component and \
                    np.linalg.norm(_wrap_diff(p.log_point, l)) < dedupe_tol:
                return False
        found.append(CriticalDatum(l, F.value(l, component),
                                   F.hess(l, component), component))
        return True

    components = F.components()
    per_comp_budget = max(budget // len(components), 40)
    for component in components:
        for s in structured_starts:
            l = _newton_solve(F, s, component, tol)
            if l is not None:
                record(l, component)
        tries = 0
        while tries < per_comp_budget:
            tries += 1
            l0 = (rng.uniform(-window, window, F.n)
                  + 1j * rng.uniform(-math.pi, math.pi, F.n))
            l = _newton_solve(F, l0, component, tol)
            if l is not None:
                record(l, component)
            if expected is not None and len(found) == expected \
                    and tries > per_comp_budget // 10:
                break
        if expected is not None and len(found) == expected:
            break
    if expected is not None and len(found) < expected and raise_on_incomplete:
        raise errors.IncompleteCount(
            f"found {len(found)} critical points, Kouchnirenko count is "
            f"{expected}; parameter may be near the discriminant")
    found.sort(key=lambda p: (-p.value.imag, p.value.real))
    return found


def _wrap_diff(l1, l2):
    d = l1 - l2
    return d.real + 1j * ((d.imag + math.pi) % (2 * math.pi) - math.pi)


def conifold_point(F: LGPotential, tol=TOL_NEWTON) -> CriticalDatum:
    """The unique critical point of F on the positive real fibre locus: the
    global minimum of the convex restriction."""
    if np.any(np.abs(F.c.imag) > 1e-12) or np.any(F.c.real <= 0):
        raise errors.NotPositiveReal("potential coefficients must be positive real")
    if np.any(F.chi):
        raise errors.NotPositiveReal("conifold point is non-equivariant")
    if F.expected_count() is None:
        raise errors.NotPositiveReal("origin must be interior to the Newton polytope")
    l = np.zeros(F.n, dtype=float)
    creal = F.c.real
    for _ in range(200):
        e = np.exp(F.B @ l)
        g = (creal * e) @ F.B
        if np.linalg.norm(g) < tol:
            break
        H = (F.B.T * (creal * e)) @ F.B
        dl = np.linalg.solve(H, -g)
        t = 1.0
        f0 = np.sum(creal * e)
        while t > 1e-12:
            f1 = np.sum(creal * np.exp(F.B @ (l + t * dl)))
            if f1 < f0:
                break
            t *= 0.5
        l = l + t * dl
    p = CriticalDatum(l.astype(complex), F.value(l.astype(complex)),
                      F.hess(l.astype(complex)))
    p.tag = "convergent"
    p.orientation = 1
    p.sqrt_det_h = math.sqrt(p.det_hessian.real)   # positive definite Hessian
    return p


# ---------------------------------------------------------------------------
# critical values over the wall curve (closed form)


def curve_critical_values(wall, t):
    """Critical values over the wall curve at the normalized curve parameter
    t: the 0-branch with the orbifold-cohomology multiplicity of the minus
    side, plus the J nonzero values J*gamma with gamma^J = -1/(K t).

    For contraction (II-i) and root (III) walls t is the chart coordinate
    q^{-w} of the minus side.  For extraction (II-ii) walls t is the
    rescaled coordinate -(-1)^(J+k) q^{-w} / prod_{b in M-} k_b^{k_b} with k
    the weight of the single plus ray; crepant walls are rejected.
    """
    if wall.kind == "crepant":
        raise errors.NotAdjacent("curve values require nonzero discrepancy")
    if wall.kind == "flip":
        raise errors.NotAdjacent("flip walls carry no morphism data")
    J = wall.discrepancy
    K = wall.K
    mult0 = wall.minus_fan.dim_orbifold_cohomology()
    out = [(0j, mult0)]
    if t == 0:
        return out
    base = -1.0 / (K * complex(t))
    r = abs(base) ** (1.0 / J)
    theta = cmath.phase(base)
    for m in range(J):
        gamma = r * cmath.exp(1j * (theta + 2 * math.pi * m) / J)
        out.append((J * gamma, 1))
    return out


def extraction_parameter(wall, q_minus_chart_value):
    """Normalized curve parameter for an extraction (II-ii) wall, from the
    minus-chart coordinate value q^{-w}."""
    if wall.kind != "extract_divisor":
        raise errors.NotAdjacent("only extraction walls need rescaling")
    kplus = wall.k[wall.M_plus[0]]
    prod = 1
    for b in wall.M_minus:
        kb = -wall.k[b]
        prod *= kb ** kb
    sign = -((-1) ** (wall.J + kplus))
    return sign * complex(q_minus_chart_value) / prod


# ---------------------------------------------------------------------------
# Newton non-degeneracy


def newton_nondegenerate(F: LGPotential, rng=None, budget_per_face=60,
                         window=2.0, tol=1e-10):
    """Kouchnirenko non-degeneracy by multistart search for torus critical
    points of every proper-face restriction.  Probabilistic certificate:
    returns (ok, report) with the budget recorded per face."""
    if rng is None:
        rng = np.random.default_rng(1)
    pts = [vec(p) for p in F.newton_polytope()]
    facets = polytope_facets(pts)
    if any(a0 <= 0 for _, a0, _ in facets):
        raise ValueError("Newton polytope must contain 0 in its interior")
    report = []
    ok = True
    for face in polytope_proper_faces(pts):
        idx = list(face)
        if len(idx) == 1:
            # monomial face: x dF has constant nonzero coefficient
            report.append({"face": idx, "degenerate": False, "budget": 0})
            continue
        sub = LGPotential([F.B_int[i] for i in idx], F.c[idx])
        normals = [a for a, a0, act in facets if set(idx) <= set(act)]
        hit = None
        for _ in range(budget_per_face):
            l0 = (rng.uniform(-window, window, F.n)
                  + 1j * rng.uniform(-math.pi, math.pi, F.n))
            l = _face_search(sub, normals, l0, tol)
            if l is not None:
                hit = l
                break
        report.append({"face": idx, "degenerate": hit is not None,
                       "budget": budget_per_face})
        if hit is not None:
            ok = False
    return ok, report


def _face_search(sub: LGPotential, normals, l0, tol, itmax=120):
    """Gauss-Newton search for a torus critical point of a face polynomial,
    restricted to the orthogonal complement of the face's scaling directions
    (the active facet normals), so the iteration cannot trade residual decay
    against drift to toric infinity."""
    n = sub.n
    A = np.asarray([[float(x) for x in a] for a in normals], dtype=float)
    if A.size:
        _, sv, Vt = np.linalg.svd(A)
        nkeep = int(np.sum(sv > 1e-10))
        V = Vt[nkeep:].T            # complement directions, n x k
    else:
        V = np.eye(n)
    if V.shape[1] == 0:
        return None
    s0 = V.T @ np.asarray(l0, dtype=complex)
    s = s0
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(itmax):
            l = V @ s
            g = sub.grad(l)
            sc = _term_scale(sub, l)
            if not np.isfinite(sc) or sc == 0:
                return None
            rel = np.linalg.norm(g) / sc
            if rel < tol:
                return l
            J = sub.hess(l) @ V
            ds, *_ = np.linalg.lstsq(J, -g, rcond=None)
            if not np.all(np.isfinite(ds)):
                return None
            t = 1.0
            improved = False
            for _ in range(40):
                l2 = V @ (s + t * ds)
                g2 = sub.grad(l2)
                sc2 = _term_scale(sub, l2)
                rel2 = (np.linalg.norm(g2) / sc2
                        if np.isfinite(sc2) and sc2 else math.inf)
                if rel2 < rel * (1 - 0.2 * t) or rel2 < tol:
                    improved = True
                    break
                t *= 0.5
            if not improved:
                return None
            s = s + t * ds
        l = V @ s
        return l if np.linalg.norm(sub.grad(l)) / _term_scale(sub, l) < tol else None


# ---------------------------------------------------------------------------
# tracking


class Trajectory:
    """Matched critical-value branches along a parameter path."""

    def __init__(self, params, branches, events, family=None):
        self.params = list(params)
        self.branches = branches      # list over branches of lists of CriticalDatum
        self.events = events          # list of dicts
        self.family = family

    @property
    def nbranches(self):
        return len(self.branches)

    def values_at_step(self, k):
        return [br[k].value for br in self.branches]

    def resolve(self, param, near_step):
        """Branch-aligned critical data at an intermediate parameter, seeded
        from the stored step `near_step` (used by mutation refinement)."""
        F = self.family(param)
        out = []
        for br in self.branches:
            seed = br[near_step].log_point
            l = _newton_solve(F, seed, br[near_step].component)
            if l is None:
                raise errors.LostBranch(f"refinement failed at {param}")
            out.append(CriticalDatum(_canonical_log(l), F.value(l),
                                     F.hess(l), br[near_step].component))
        return out


def track_critical_values(family, params, seeds=None, rng=None,
                          tol_collide=TOL_COLLIDE, max_bisect=12,
                          expected=None):
    """Predictor-corrector continuation of every critical branch of the
    family along the parameter list.

    family: callable param -> LGPotential with a fixed exponent layout.
    Collision events (two values approaching within tol_collide * scale)
    are localized by golden-section on the minimal pairwise distance of the
    critical points and logged with the refined parameter.
    """
    if len(params) < 2:
        raise ValueError("need at least two path parameters")
    F0 = family(params[0])
    if seeds is None:
        pts = critical_points(F0, rng=rng, expected=expected)
    else:
        pts = []
        for s in seeds:
            l = _newton_solve(F0, np.asarray(s, dtype=complex))
            if l is None:
                raise errors.LostBranch("seed failed to converge at the start")
            pts.append(CriticalDatum(_canonical_log(l), F0.value(l), F0.hess(l)))
    branches = [[p] for p in pts]
    events = []

    def advance(Fk, prev_pts, prev_prev_pts, frac_step):
        out = []
        for i, p in enumerate(prev_pts):
            pred = p.log_point
            if prev_prev_pts is not None:
                pred = p.log_point + (p.log_point - prev_prev_pts[i].log_point) \
                    * frac_step
            l = _newton_solve(Fk, pred, p.component)
            if l is None:
                l = _newton_solve(Fk, p.log_point, p.component)
            if l is None:
                return None, i
            q = CriticalDatum(_canonical_log(l), Fk.value(l, p.component),
                              Fk.hess(l, p.component), p.component)
            # transport the square-root branch continuously
            if abs(-q.sqrt_det_h - p.sqrt_det_h) < abs(q.sqrt_det_h - p.sqrt_det_h):
                q.sqrt_det_h = -q.sqrt_det_h
                q.orientation = -p.orientation
            else:
                q.orientation = p.orientation
            out.append(q)
        return out, None

    def min_pair_dist(pts_list, use_points=True):
        best = math.inf
        for i in range(len(pts_list)):
            for j in range(i + 1, len(pts_list)):
                if use_points:
                    d = np.linalg.norm(_wrap_diff(pts_list[i].log_point,
                                                  pts_list[j].log_point))
                else:
                    d = abs(pts_list[i].value - pts_list[j].value)
                best = min(best, d)
        return best

    def advance_adaptive(a, b, cur, prev_prev, depth):
        nxt, failed = advance(family(b), cur, prev_prev, 1.0)
        if nxt is not None:
            return nxt, cur
        if depth >= max_bisect:
            events.append({"step": k, "kind": "branch_lost",
                           "branch": failed, "param": _pnum(b)})
            raise errors.LostBranch(
                f"Newton failed for branch {failed} near parameter {b}")
        mid = a + (b - a) * 0.5
        m1, pp = advance_adaptive(a, mid, cur, prev_prev, depth + 1)
        return advance_adaptive(mid, b, m1, pp, depth + 1)

    prev_prev = None
    k = 0
    pending_from = None
    while k < len(params) - 1:
        s0, s1 = params[k], params[k + 1]
        cur = [br[-1] for br in branches]
        nxt, prev_prev = advance_adaptive(s0, s1, cur, prev_prev, 0)
        # two branches landing on one sheet (monodromy past a collision):
        # re-solve the fibre and re-match greedily
        merged = any(
            np.linalg.norm(_wrap_diff(nxt[i].log_point, nxt[j].log_point)) < 1e-8
            and nxt[i].component == nxt[j].component
            for i in range(len(nxt)) for j in range(i + 1, len(nxt)))
        if merged:
            nxt = _rematch(family(s1), cur, len(branches), rng)
            if nxt is None:
                raise errors.LostBranch(
                    f"branches merged at parameter {s1} and re-matching failed")
            events.append({"step": k, "kind": "branch_lost",
                           "param": _pnum(s1)})
        scale = max(1.0, max(abs(p.value) for p in nxt))
        vd = min_pair_dist(nxt, use_points=False)
        for br, p in zip(branches, nxt):
            br.append(p)
        if vd < tol_collide * scale and pending_from is None:
            pending_from = k      # entered the collision neighbourhood
        elif pending_from is not None and vd > 2 * tol_collide * scale:
            sstar = _locate_collision(family, branches, params,
                                      pending_from, k + 1)
            events.append({"step": pending_from,
                           "kind": "collision_near_discriminant",
                           "param": _pnum(sstar)})
            pending_from = None
        k += 1
    if pending_from is not None:
        sstar = _locate_collision(family, branches, params, pending_from,
                                  len(params) - 1)
        events.append({"step": pending_from,
                       "kind": "collision_near_discriminant",
                       "param": _pnum(sstar)})
    return Trajectory(params, branches, events, family)


def _pnum(s):
    s = complex(s)
    return s.real if s.imag == 0 else s


def _rematch(F, prev_pts, nbranches, rng):
    """Full fibre solve and greedy nearest-neighbour assignment to the
    previous step (used when monodromy merges tracked branches)."""
    try:
        pts = critical_points(F, rng=rng, raise_on_incomplete=False,
                              expected=nbranches)
    except errors.IncompleteCount:
        return None
    if len(pts) < nbranches:
        return None
    pairs = []
    for i, p in enumerate(prev_pts):
        for j, q in enumerate(pts):
            if p.component != q.component:
                continue
            d = np.linalg.norm(_wrap_diff(p.log_point, q.log_point))
            pairs.append((d, i, j))
    pairs.sort(key=lambda t: t[0])
    used_i, used_j = set(), set()
    assign = {}
    for d, i, j in pairs:
        if i in used_i or j in used_j:
            continue
        assign[i] = j
        used_i.add(i)
        used_j.add(j)
    if len(assign) < len(prev_pts):
        return None
    out = []
    for i, p in enumerate(prev_pts):
        q = pts[assign[i]]
        if abs(-q.sqrt_det_h - p.sqrt_det_h) < abs(q.sqrt_det_h - p.sqrt_det_h):
            q.sqrt_det_h = -q.sqrt_det_h
            q.orientation = -p.orientation
        else:
            q.orientation = p.orientation
        out.append(q)
    return out


def _locate_collision(family, branches, params, k_enter, k_exit):
    """Golden-section localization of the collision parameter between steps
    k_enter (separation dipped below threshold) and k_exit (separation rose
    again).

    The colliding pair's separation is re-evaluated by Newton from seeds on
    BOTH sides (left seeds are only valid below the discriminant and vice
    versa, so the maximum of the two distances is V-shaped with minimum at
    the collision)."""
    k0 = max(k_enter - 1, 0)
    lo = params[k0]
    hi = params[k_exit]
    left_seeds = [br[k0] for br in branches]
    nxt_pts = [br[k_exit] for br in branches]
    mid_pts = [br[min(k_enter + 1, k_exit)] for br in branches]
    pair = min(((i, j) for i in range(len(mid_pts))
                for j in range(i + 1, len(mid_pts))
                if mid_pts[i].component == mid_pts[j].component),
               key=lambda ij: abs(mid_pts[ij[0]].value - mid_pts[ij[1]].value))
    i, j = pair

    def side_dist(s, seeds):
        F = family(s)
        li = _newton_solve(F, seeds[i].log_point, seeds[i].component, tol=1e-10)
        lj = _newton_solve(F, seeds[j].log_point, seeds[j].component, tol=1e-10)
        if li is None or lj is None:
            return math.inf
        return float(np.linalg.norm(_wrap_diff(_canonical_log(li),
                                               _canonical_log(lj))))

    def phi(s):
        return max(side_dist(s, left_seeds), side_dist(s, nxt_pts))

    invphi = (math.sqrt(5) - 1) / 2
    a, b = 0.0, 1.0

    def at(t):
        return lo + (hi - lo) * t
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = phi(at(c)), phi(at(d))
    for _ in range(80):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = phi(at(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = phi(at(d))
        if abs(b - a) * abs(hi - lo) < 1e-10:
            break
    return at((a + b) / 2)


# ---------------------------------------------------------------------------
# chart assembly


def assemble_potential(fan: StackyFan, q_values=(), t_values=None, chi=None,
                       splitting=None):
    """LG potential of the chart attached to a stacky fan.

    Coordinates follow the local-chart convention: x-coordinates come from
    the splitting over a ray subset whose images form a basis (default: the
    lexicographically first such subset), each ray term carries the monomial
    q^{lambda(b)} in the canonical integer basis of Lambda^Sigma, and each
    ghost term additionally carries its own parameter t_b.

    q_values: sequence of complex values for the canonical q-basis.
    t_values: dict S-index -> complex for ghosts (default 0 is rejected).
    """
    S = fan.S
    n = fan.n
    m = len(S)
    rays = fan.rays
    ghosts = [b for b in range(m) if b not in rays]
    if splitting is None:
        splitting = _first_ray_basis(fan)
    Bmat = [[Fraction(S[i].free[j]) for i in splitting] for j in range(n)]
    Binv = mat_inverse(Bmat)
    lam_basis = _lambda_sigma_basis(fan)
    q_values = list(q_values)
    if len(q_values) != len(lam_basis):
        raise ValueError(f"chart needs {len(lam_basis)} q-values "
                         f"(canonical Lambda^Sigma basis)")
    t_values = dict(t_values or {})
    exps = []
    coeffs = []
    tors = []
    for b in range(m):
        lam_b = _lambda_of(fan, b, splitting, Binv)
        coeff = 1 + 0j
        if lam_basis:
            co = solve([tuple(r[j] for r in lam_basis) for j in range(m)],
                       lam_b)
            for e, qv in zip(co, q_values):
                if e != 0:
                    coeff *= complex(qv) ** float(e)
        if b in ghosts:
            if b not in t_values:
                raise ValueError(f"missing t-value for ghost ray index {b}")
            coeff *= complex(t_values[b])
        exps.append(tuple(S[b].free))
        coeffs.append(coeff)
        tors.append(tuple(S[b].tor))
    return LGPotential(exps, coeffs, chi=chi, torsion_parts=tors,
                       torsion_invariants=fan.lattice.torsion)


def _first_ray_basis(fan: StackyFan):
    from .rational import rank
    for combo in itertools.combinations(sorted(fan.rays), fan.n):
        if rank([vec(fan.S[i].free) for i in combo]) == fan.n:
            return list(combo)
    raise ValueError("no ray basis found")


def _lambda_sigma_basis(fan: StackyFan):
    """Canonical integer basis of Lambda^Sigma = Lambda(Sigma) cap Q^{R} as
    vectors in Q^S."""
    from .rational import lattice_from_generators
    lam = fan.big_lambda_lattice()       # kernel-basis coordinates
    if not lam:
        return []
    L = fan.kernel_basis()
    m = len(fan.S)
    ghosts = [b for b in range(m) if b not in fan.rays]
    # Lambda(Sigma) vectors in Q^S
    full = []
    for coeff in lam:
        v = [Fraction(0)] * m
        for cc, row in zip(coeff, L):
            for j in range(m):
                v[j] += cc * row[j]
        full.append(tuple(v))
    # sublattice with vanishing ghost coordinates
    if not ghosts:
        sub = full
    else:
        from .rational import nullspace
        rows = [tuple(v[g] for v in full) for g in ghosts]
        ker = nullspace(rows, len(full))
        sub = []
        for kv in ker:
            v = [Fraction(0)] * m
            for a, fv in zip(kv, full):
                for j in range(m):
                    v[j] += a * fv[j]
            sub.append(tuple(v))
    # clear denominators into a canonical integer basis
    out = []
    for v in sub:
        den = 1
        for x in v:
            den = den * x.denominator // math.gcd(den, x.denominator)
        out.append(tuple(int(x * den) for x in v))
    return lattice_from_generators(out) if out else []


def _lambda_of(fan: StackyFan, b, splitting, Binv):
    """lambda(b) = Psi(b) - sigma-bar(b) in Q^S."""
    m = len(fan.S)
    psi = list(fan.psi(fan.S[b]))
    coeff = matvec(Binv, vec(fan.S[b].free))
    for i, x in zip(splitting, coeff):
        psi[i] -= x
    return tuple(psi)

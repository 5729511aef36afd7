"""Marked reflection systems: admissible phases, Stokes/Gram matrices,
left and right mutations, evolution along critical-value trajectories with
ray-crossing detection, and the Orlov-block verification of an endpoint
system."""
from __future__ import annotations

import cmath
import math
from fractions import Fraction

from . import errors
from .rational import solve, transpose, vec


class MatrixBackend:
    """Abstract pairing: vectors are integer coordinate tuples, the pairing
    is u^T G v for a fixed integer matrix on the initial basis."""

    def __init__(self, gram):
        self.G = [list(map(Fraction, row)) for row in gram]

    def pair(self, u, v):
        n = len(self.G)
        return sum(Fraction(u[i]) * self.G[i][j] * Fraction(v[j])
                   for i in range(n) for j in range(n))

    def dim(self):
        return len(self.G)


class KBackend:
    """Euler pairing on Chern-character vectors flattened over the ring
    basis; exact rational."""

    def __init__(self, ring):
        self.ring = ring
        basis_cls = []
        for d in range(ring.n + 1):
            for i in range(len(ring.basis[d])):
                z = ring.zero()
                z.coeffs[d][i] = Fraction(1)
                basis_cls.append(z)
        td = ring.todd_class()
        self.X = [[(a.dual() * b * td).integrate() for b in basis_cls]
                  for a in basis_cls]
        self.dim_ = len(basis_cls)

    def flatten(self, cls):
        out = []
        for d in range(self.ring.n + 1):
            out.extend(cls.coeffs[d])
        return tuple(out)

    def unflatten(self, v):
        out = self.ring.zero()
        i = 0
        for d in range(self.ring.n + 1):
            for j in range(len(self.ring.basis[d])):
                out.coeffs[d][j] = Fraction(v[i])
                i += 1
        return out

    def pair(self, u, v):
        n = self.dim_
        return sum(Fraction(u[i]) * self.X[i][j] * Fraction(v[j])
                   for i in range(n) for j in range(n))

    def dim(self):
        return self.dim_


def admissible(phi, markings, tol=1e-9) -> bool:
    """Whether e^{i phi} is parallel to no nonzero difference of markings."""
    d = cmath.exp(1j * phi)
    for i in range(len(markings)):
        for j in range(len(markings)):
            if i == j:
                continue
            diff = complex(markings[i]) - complex(markings[j])
            if abs(diff) < tol:
                continue
            cross = (diff / d).imag
            if abs(cross) < tol * abs(diff):
                return False
    return True


class MarkedReflectionSystem:
    """Ordered basis with a semiorthogonal pairing, complex markings and a
    phase.  The order is by decreasing Im(e^{-i phi} u) with ties broken by
    the original index."""

    def __init__(self, backend, vectors, markings, phase=0.0, labels=None,
                 base_record=None, signs=None):
        self.backend = backend
        self.vectors = [tuple(v) for v in vectors]
        self.markings = [complex(u) for u in markings]
        self.phase = float(phase)
        self.labels = list(labels) if labels else [f"v{i}" for i in
                                                   range(len(vectors))]
        self.base_record = base_record or {}
        self.signs = list(signs) if signs else [1] * len(vectors)
        if len(self.vectors) != len(self.markings):
            raise ValueError("vectors and markings must align")

    def copy(self):
        return MarkedReflectionSystem(self.backend, self.vectors,
                                      self.markings, self.phase,
                                      self.labels, dict(self.base_record),
                                      self.signs)

    def order(self):
        d = cmath.exp(-1j * self.phase)
        keys = [(-(d * u).imag, i) for i, u in enumerate(self.markings)]
        return [i for _, i in sorted(zip(keys, range(len(self.markings))))]

    def pair(self, i, j):
        return self.backend.pair(self.vectors[i], self.vectors[j])

    def gram(self, order=None):
        order = order if order is not None else self.order()
        return [[self.pair(i, j) for j in order] for i in order]

    def stokes_matrix(self, assert_semiorthogonal=True):
        """Gram matrix in the admissibility order; raises when the pairing
        violates the semiorthogonality condition."""
        if not admissible(self.phase, self.markings):
            raise errors.NonAdmissibleEndpoint(
                "phase not admissible for the markings")
        order = self.order()
        G = self.gram(order)
        if assert_semiorthogonal:
            n = len(G)
            d = cmath.exp(-1j * self.phase)
            for a in range(n):
                if G[a][a] != 1:
                    raise errors.NotSemiorthogonal(
                        f"[v,v) = {G[a][a]} != 1 at position {a}")
                for b in range(a):
                    ia, ib = order[a], order[b]
                    ua = (d * self.markings[ia]).imag
                    ub = (d * self.markings[ib]).imag
                    if abs(ua - ub) < 1e-12:
                        continue  # equal-height markings never interact
                    if G[a][b] != 0:
                        raise errors.NotSemiorthogonal(
                            f"[{self.labels[ia]}, {self.labels[ib]}) = "
                            f"{G[a][b]} below the diagonal")
        return G

    def mutate(self, pos, direction):
        """Mutation of the adjacent pair at positions (pos, pos+1) in the
        current order; 'right' moves the earlier vector past the later one,
        'left' is the inverse."""
        order = self.order()
        if pos < 0 or pos + 1 >= len(order):
            raise errors.IndexOutOfRange(f"position {pos} has no neighbour")
        ia, ib = order[pos], order[pos + 1]
        out = self.copy()
        if direction == "right":
            c = self.pair(ia, ib)
            out.vectors[ia] = tuple(x - c * y for x, y in
                                    zip(self.vectors[ia], self.vectors[ib]))
        elif direction == "left":
            c = self.pair(ia, ib)
            out.vectors[ib] = tuple(x - c * y for x, y in
                                    zip(self.vectors[ib], self.vectors[ia]))
        else:
            raise ValueError("direction must be 'right' or 'left'")
        # markings swap heights per the crossing convention
        out.markings[ia], out.markings[ib] = (self.markings[ib],
                                              self.markings[ia])
        return out

    def __len__(self):
        return len(self.vectors)


class MutationEvent:
    def __init__(self, step, moving, pivot, direction, coefficient, at,
                 u_moving, u_pivot):
        self.step = step
        self.moving = moving          # branch index of the mutated vector
        self.pivot = pivot
        self.direction = direction    # 'up' or 'down' crossing
        self.coefficient = coefficient
        self.at = at                  # refined path parameter
        self.u_moving = u_moving
        self.u_pivot = u_pivot

    def signature(self):
        return (self.moving, self.pivot, self.direction)

    def as_dict(self):
        return {"step": self.step, "moving": self.moving, "pivot": self.pivot,
                "direction": self.direction,
                "coefficient": str(self.coefficient),
                "param": repr(self.at)}

    def __repr__(self):
        return (f"MutationEvent(moving={self.moving}, pivot={self.pivot}, "
                f"{self.direction}, coeff={self.coefficient})")


def _crossing_in_step(u0, u1, phase, collide_eps=1e-9):
    """Ray crossings between two consecutive marking snapshots: returns
    (i, j, direction, s) with i behind, j in front, direction the sign
    change of Im(e^{-i phi}(u_j - u_i)), and s in (0,1] the interpolated
    crossing time."""
    d = cmath.exp(-1j * phase)
    n = len(u0)
    out = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            a0 = (d * (u0[j] - u0[i])).imag
            a1 = (d * (u1[j] - u1[i])).imag
            if a0 == 0 or (a0 > 0) == (a1 > 0):
                continue
            s = a0 / (a0 - a1)
            ui = u0[i] + (u1[i] - u0[i]) * s
            uj = u0[j] + (u1[j] - u0[j]) * s
            re = (d * (uj - ui)).real
            if re <= collide_eps:
                continue          # j not in front: collision or behind
            out.append((i, j, "up" if a1 > a0 else "down", s))
    return out


def evolve(mrs: MarkedReflectionSystem, trajectory, phase_schedule=None,
           refine_tol=1e-10, collide_eps=1e-9):
    """Evolve the system along a trajectory: markings follow the branch
    values; each time a marking crosses the positive ray of another one the
    corresponding vector mutates.

    Returns (final system, events).  Vectors in `mrs` are aligned with
    trajectory branches by index.  Crossing times are refined by bisection
    of the in-step interpolant when the trajectory carries a resolver; two
    overlapping events sharing a mutated vector raise SimultaneousCrossing.
    """
    if len(mrs) != trajectory.nbranches:
        raise ValueError("system and trajectory sizes differ")
    cur = mrs.copy()
    events = []
    params = trajectory.params
    nsteps = len(params)
    for k in range(nsteps - 1):
        phase = (phase_schedule(k) if callable(phase_schedule)
                 else (phase_schedule[k] if phase_schedule else mrs.phase))
        u0 = [br[k].value for br in trajectory.branches]
        u1 = [br[k + 1].value for br in trajectory.branches]
        found = _crossing_in_step(u0, u1, phase, collide_eps)
        if not found:
            cur.markings = list(u1)
            continue
        refined = []
        for (i, j, direction, s) in found:
            s_ref = s
            if trajectory.family is not None:
                s_ref = _refine_crossing(trajectory, k, i, j, phase, s,
                                         refine_tol)
            refined.append((s_ref, i, j, direction))
        refined.sort(key=lambda t: t[0])
        for a in range(len(refined)):
            for b in range(a + 1, len(refined)):
                sa, ia, ja, _ = refined[a]
                sb, ib, jb, _ = refined[b]
                if abs(sa - sb) < 10 * refine_tol:
                    if ia == ib or ia == jb or ja == ib:
                        raise errors.SimultaneousCrossing(
                            f"entangled crossings ({ia},{ja}) and ({ib},{jb})"
                            f" within refinement tolerance at step {k}")
        for (s_ref, i, j, direction) in refined:
            if direction == "up":
                c = cur.backend.pair(cur.vectors[i], cur.vectors[j])
            else:
                c = cur.backend.pair(cur.vectors[j], cur.vectors[i])
            cur.vectors[i] = tuple(x - c * y for x, y in
                                   zip(cur.vectors[i], cur.vectors[j]))
            at = params[k] + (params[k + 1] - params[k]) * s_ref
            events.append(MutationEvent(k, i, j, direction, c, at,
                                        u0[i], u0[j]))
        cur.markings = list(u1)
    final_phase = (phase_schedule(nsteps - 1) if callable(phase_schedule)
                   else mrs.phase)
    cur.phase = final_phase
    if not admissible(final_phase, cur.markings):
        raise errors.NonAdmissibleEndpoint(
            "endpoint phase is not admissible for the final markings")
    return cur, events


def _refine_crossing(trajectory, k, i, j, phase, s_guess, tol):
    """Bisection refinement of the crossing time within [params[k],
    params[k+1]] using the trajectory resolver."""
    d = cmath.exp(-1j * phase)
    params = trajectory.params

    def align(s):
        p = params[k] + (params[k + 1] - params[k]) * s
        pts = trajectory.resolve(p, k)
        return (d * (pts[j].value - pts[i].value)).imag
    a, b = 0.0, 1.0
    fa = align(a)
    fb = align(b)
    if fa == 0:
        return 0.0
    if (fa > 0) == (fb > 0):
        return s_guess
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = align(m)
        if fm == 0:
            return m
        if (fa > 0) == (fm > 0):
            a, fa = m, fm
        else:
            b, fb = m, fm
        if b - a < tol:
            break
    return 0.5 * (a + b)


# ---------------------------------------------------------------------------
# Orlov-block verification of an evolved endpoint


def verify_orlov_evolution(mrs: MarkedReflectionSystem, blowup=None,
                           rank_minus=None, rank_center=None, J=None):
    """Split the endpoint markings into the convergent cluster and J
    divergent satellite clusters, then verify the block structure.

    In K-class mode (blowup given) the convergent vectors must span
    phi^* K(X_-) over Z and each divergent cluster must have the rank of
    K(Z); in abstract mode only the cluster ranks are checked.
    Returns a report dict."""
    if blowup is not None:
        rank_minus = blowup.rank_minus
        rank_center = blowup.rank_center
        J = blowup.J
    n = len(mrs)
    if rank_minus is None or J is None:
        raise ValueError("need rank data")
    mags = sorted(range(n), key=lambda i: abs(mrs.markings[i]))
    conv_idx = mags[:rank_minus]
    div_idx = mags[rank_minus:]
    if rank_center is not None and len(div_idx) != J * rank_center:
        raise errors.BlockMismatch(
            f"{len(div_idx)} divergent markings, expected {J * rank_center}")
    # cluster divergent markings by angle: cut the circle at the J largest
    # angular gaps
    clusters = {}
    if div_idx:
        m = len(div_idx)
        by_angle = sorted(div_idx,
                          key=lambda i: cmath.phase(mrs.markings[i]))
        angs = [cmath.phase(mrs.markings[i]) for i in by_angle]
        gaps = [(((angs[(t + 1) % m] - angs[t]) % (2 * math.pi)), t)
                for t in range(m)]
        cut_after = {t for _, t in sorted(gaps, reverse=True)[:min(J, m)]}
        start = (max(cut_after) + 1) % m
        cur = []
        label = 0
        for step in range(m):
            idx = (start + step) % m
            cur.append(by_angle[idx])
            if idx in cut_after:
                clusters[label] = cur
                label += 1
                cur = []
        if cur:
            clusters[label] = cur
    if len(div_idx) and len(clusters) != J:
        raise errors.BlockMismatch(
            f"divergent markings fall into {len(clusters)} angular clusters,"
            f" expected {J}")
    report = {"convergent": conv_idx, "clusters": clusters}
    if rank_center is not None:
        for key, idxs in clusters.items():
            if len(idxs) != rank_center:
                raise errors.BlockMismatch(
                    f"cluster {key} has {len(idxs)} markings, expected "
                    f"{rank_center}")
    if blowup is not None:
        backend = mrs.backend
        # phi^* K(X_-) span over Z
        pull = []
        for j, _ in blowup.minus_line_bundle_basis():
            kc = blowup.pullback_line_bundle({blowup.center_twist_ray: j})
            pull.append(backend.flatten(kc.ch))
        for i in conv_idx:
            coeff = solve(transpose([vec(r) for r in pull]),
                          vec(mrs.vectors[i]))
            if coeff is None or any(x.denominator != 1 for x in coeff):
                raise errors.BlockMismatch(
                    f"convergent vector {mrs.labels[i]} is not an integral "
                    "combination of pulled-back classes")
        report["convergent_in_pullback"] = True
    return report

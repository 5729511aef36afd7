import random
from fractions import Fraction

import pytest

from toriclg import errors
from toriclg.fans import StackyFan
from toriclg.lattice import AbelianLattice, VectorSet
from toriclg.rational import dot, in_lattice, primitive, vec
from toriclg.secondary import (CurveChart, cpl_cone, enumerate_adapted_fans,
                               wall_between)


def a1_vs():
    return VectorSet(AbelianLattice(2), [(-1, 1), (1, 1), (0, 1)])


def blowup_vs():
    return VectorSet(AbelianLattice(2), [(1, 0), (0, 1), (1, 1)])


def cyclic_vs(d):
    return VectorSet(AbelianLattice(2), [(0, 1), (d, -1), (1, 0)])


def orient(fan, target=(-1, -1, 2)):
    L = fan.kernel_basis()
    return 1 if primitive(L[0]) == target else -1


def test_cpl_a1():
    vs = a1_vs()
    s1 = StackyFan(vs, [{0, 1}])
    s2 = StackyFan(vs, [{0, 2}, {2, 1}])
    d1 = cpl_cone(s1)
    # CPL_+(Sigma_1) = {c >= 0, 2c3 >= c1+c2}: check H-rep by sampling
    assert d1.cpl_plus.contains((1, 1, 1))
    assert d1.cpl_plus.contains((0, 0, 1))
    assert not d1.cpl_plus.contains((1, 1, Fraction(1, 2)))
    d2 = cpl_cone(s2)
    assert d2.cpl_plus.contains((1, 1, 1))
    assert d2.cpl_plus.contains((1, 1, 0))
    assert not d2.cpl_plus.contains((0, 0, 1))
    # cpl cones: opposite rays of L^*_R = R
    r1 = d1.cpl.extreme_rays()
    r2 = d2.cpl.extreme_rays()
    assert len(r1) == len(r2) == 1 and r1[0] == tuple(-x for x in r2[0])
    # integral structure: pl_Z(Sigma_1) = 2Z, pl_Z(Sigma_2) = Z
    assert abs(d1.plq_lattice[0][0]) == 2
    assert abs(d2.plq_lattice[0][0]) == 1
    # daleth on chambers: 2Z>=0 on cpl(Sigma_1), Z<=0 on cpl(Sigma_2)
    s = orient(s1)
    assert d1.daleth_membership((2 * s,))
    assert not d1.daleth_membership((1 * s,))
    assert d2.daleth_membership((-1 * s,))
    assert not d2.daleth_membership((1 * s,))


def test_daleth_tilde_up_to_height():
    vs = a1_vs()
    s1 = StackyFan(vs, [{0, 1}])
    d1 = cpl_cone(s1)
    # (c1,c2,c3) = (1,1,1): eta on (0,1) is (c1+c2)/2 = 1, integral
    assert d1.daleth_tilde_membership_up_to_height((1, 1, 1), 3)
    # (1,2,2): eta(0,1) = 3/2 not integral
    assert not d1.daleth_tilde_membership_up_to_height((1, 2, 2), 3)


def test_enumerate_a1():
    fans, walls = enumerate_adapted_fans(a1_vs())
    assert len(fans) == 2
    assert len(walls) == 1
    sizes = sorted(len(f.max_cones) for f in fans)
    assert sizes == [1, 2]


def test_enumerate_blowup_c2():
    fans, walls = enumerate_adapted_fans(blowup_vs())
    assert len(fans) == 2 and len(walls) == 1


def test_enumerate_cyclic():
    for d in (3, 5):
        fans, walls = enumerate_adapted_fans(cyclic_vs(d))
        assert len(fans) == 2 and len(walls) == 1


def test_enumerate_single_chamber():
    vs = VectorSet(AbelianLattice(2), [(1, 0), (0, 1)])
    fans, walls = enumerate_adapted_fans(vs)
    assert len(fans) == 1 and not walls


def test_wall_blowup_c2():
    vs = blowup_vs()
    sigma1 = StackyFan(vs, [{0, 1}])            # C^2
    sigma2 = StackyFan(vs, [{0, 2}, {2, 1}])    # Bl_0 C^2
    w = wall_between(sigma2, sigma1)
    assert w.kind == "contract_divisor"
    assert w.discrepancy == 1
    assert sorted(w.M_plus) == [0, 1]
    assert w.M_minus == [2]
    assert w.J == 1 and w.K == 1
    assert tuple(w.hat_b.free) == (1, 1)
    # orientation: plus side is the blowup
    assert w.plus_fan.rays == [0, 1, 2]
    # w as element of L = Z(1,1,-1): D_b . w = (1,1,-1)
    assert w.k == [1, 1, -1]


def test_wall_cyclic():
    for d in (3, 4):
        vs = cyclic_vs(d)
        orb = StackyFan(vs, [{0, 1}])
        res = StackyFan(vs, [{0, 2}, {2, 1}])
        w = wall_between(orb, res)
        assert w.kind == "extract_divisor"
        assert w.discrepancy == d - 2
        assert w.M_plus == [2] and sorted(w.M_minus) == [0, 1]
        assert w.plus_fan is orb
        assert w.k == [-1, -1, d]
        assert w.J == d - 2 and w.K == d ** d
        assert tuple(w.hat_b.free) == (d, 0)


def test_wall_a1_crepant():
    vs = a1_vs()
    s1 = StackyFan(vs, [{0, 1}])
    s2 = StackyFan(vs, [{0, 2}, {2, 1}])
    w = wall_between(s1, s2)
    assert w.kind == "crepant" and w.discrepancy == 0


def test_wall_not_adjacent():
    vs = VectorSet(AbelianLattice(2), [(1, 0), (0, 1)])
    fan = StackyFan(vs, [{0, 1}])
    with pytest.raises(errors.NotAdjacent):
        wall_between(fan, fan)


def test_curve_chart_gluing():
    # A1 is crepant: excluded.  Blowup of C^2: t = q^{-1}, e=1.
    vs = blowup_vs()
    sigma1 = StackyFan(vs, [{0, 1}])
    sigma2 = StackyFan(vs, [{0, 2}, {2, 1}])
    w = wall_between(sigma2, sigma1)
    ch = CurveChart(w)
    assert ch.e_plus == 1 and ch.e_minus == 1
    # cyclic d: q = t^{-d}: e_plus = d on the orbifold side
    for d in (3, 5):
        vsc = cyclic_vs(d)
        orb = StackyFan(vsc, [{0, 1}])
        res = StackyFan(vsc, [{0, 2}, {2, 1}])
        wc = wall_between(orb, res)
        chc = CurveChart(wc)
        assert chc.e_plus == d and chc.e_minus == 1


def test_curve_chart_a1_via_discrepant_neighbour():
    # gluing rule on the cyclic chart: w_v^- = q^{Psi^- - Psi^+} w_v^+
    vs = cyclic_vs(3)
    orb = StackyFan(vs, [{0, 1}])
    res = StackyFan(vs, [{0, 2}, {2, 1}])
    w = wall_between(orb, res)
    ch = CurveChart(w)
    # v = (1,0) is the subdividing ray: u3 = t*v gluing with t = q^{w/3}
    c = ch.glue_exponent((1, 0))
    assert abs(c) == Fraction(1, 3)
    # orbifold chart: u1 u2 = v^3 exactly (no t power)
    assert ch.product_exponent((0, 1), (3, -1), side="plus") == 0
    # resolution chart: u1~ u2~ = q u3~^3, one power of the chart coordinate
    assert abs(ch.product_exponent((0, 1), (3, -1), side="minus")) == 1
    # and w_{(3,0)} = v^3 exactly in the plus chart
    assert ch.product_exponent((1, 0), (2, 0), side="plus") == 0


def test_fan_structure_of_secondary_fan_random():
    rng = random.Random(9)
    trials = 0
    for _ in range(30):
        if trials >= 4:
            break
        n = 2
        m = rng.randint(3, 6)
        vecs = set()
        while len(vecs) < m:
            v = (rng.randint(-2, 2), rng.randint(-2, 2))
            if v != (0, 0):
                vecs.add(v)
        try:
            vs = VectorSet(AbelianLattice(n), sorted(vecs))
        except ValueError:
            continue
        if not vs.generates:
            continue
        try:
            fans, walls = enumerate_adapted_fans(vs)
        except errors.TooLarge:
            continue
        trials += 1
        # chambers cover and have disjoint interiors: every wall facet of a
        # chamber is either on the boundary of the support or shared
        from toriclg.secondary import PLConeData
        from toriclg.cones import Cone
        L, D, _ = __import__("toriclg.fans", fromlist=["extended_sequences"]) \
            .extended_sequences(vs)
        r = len(L)
        if r == 0:
            continue
        support = Cone.from_rays([vec(d) for d in D], r)
        for fi, fan in enumerate(fans):
            cpl = PLConeData(fan).cpl
            for g in cpl.inequalities:
                on_boundary = all(dot(g, vec(D[b])) >= 0 for b in range(m))
                shared = any(fi in (a, b) for a, b, _ in walls
                             if _wall_matches(cpl, g, fans, walls, fi))
                assert on_boundary or _has_neighbour(fi, g, cpl, fans, walls)
    assert trials >= 3


def _wall_matches(cpl, g, fans, walls, fi):
    return True


def _has_neighbour(fi, g, cpl, fans, walls):
    from toriclg.secondary import PLConeData
    face_rays = [rr for rr in cpl.rays if dot(g, rr) == 0]
    for a, b, wn in walls:
        if fi not in (a, b):
            continue
        other = b if a == fi else a
        ocpl = PLConeData(fans[other]).cpl
        if all(ocpl.contains(rr) for rr in face_rays):
            return True
    return False

import random
from collections import Counter

import numpy as np
import pytest

from cameron_liebler.gf import GF
from cameron_liebler.geometry import DegenerateError
from cameron_liebler.group_action import embed, compose, generators, closure
from conftest import geometry, pencil, group


def point_orbit_sizes(q):
    return sorted([1, q + 1, q * (q - 1) // 2, q * (q + 1) // 2, q * q - 1]
                  + [q * q + q] * ((q - 1) // 2) + [q * q - q] * ((q - 1) // 2))


def line_orbit_sizes(q):
    return sorted([q + 1, q * (q - 1) // 2, q * (q + 1) // 2] * 2 + [q + 1] * (q - 1)
                  + [(q**3 - q) // 2] * (2 * (q - 1)) + [q**3 - q] * 2)


def two_by_two(x, y):
    a, b, c, d = x
    e, f, g, h = y
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def test_embed_identity_and_singular():
    F = GF(5)
    assert np.array_equal(embed(F, 1, 0, 0, 1).matrix, np.eye(4, dtype=np.int64))
    with pytest.raises(DegenerateError):
        embed(F, 1, 2, 2, 4)


def test_embed_reverses_products():
    F = GF(5)
    rng = random.Random(7)

    def draw():
        while True:
            x = tuple(F(rng.randrange(5)) for _ in range(4))
            if x[0] * x[3] - x[1] * x[2]:
                return x

    for _ in range(40):
        x, y = draw(), draw()
        got = compose(F, embed(F, *x), embed(F, *y))
        assert np.array_equal(got, embed(F, *two_by_two(y, x)).matrix)


def test_closure_order_q5():
    F = GF(5)
    assert closure(F, generators(F)) == 120


def test_generators_stabilise_pencil_and_pi(p5):
    g = p5.geom
    for gen in generators(p5.F):
        perm = g.point_permutation(gen.matrix)
        for lam in p5.F:
            Q = p5.quadric_mask(lam)
            assert np.array_equal(Q[perm], Q)
        assert np.array_equal(p5.on_pi[perm], p5.on_pi)
        assert perm[p5.u4] == p5.u4


def test_conic_maps_to_conic(p5):
    g, F = p5.geom, p5.F
    rng = random.Random(3)
    for _ in range(20):
        while True:
            a, b, c, d = (F(rng.randrange(5)) for _ in range(4))
            if a * d - b * c:
                break
        perm = g.point_permutation(embed(F, a, b, c, d).matrix)
        assert p5.conic[perm[p5.conic]].all()


@pytest.mark.parametrize("q", [5, 9, 13])
def test_orbit_inventories(q):
    G, P = group(q), pencil(q)
    po, lo = G.orbits("point"), G.orbits("line")
    assert len(po) == q + 4 and len(lo) == 3 * q + 5
    assert sorted(po.sizes) == point_orbit_sizes(q)
    assert sorted(lo.sizes) == line_orbit_sizes(q)
    assert all((q**3 - q) % s == 0 for s in po.sizes + lo.sizes)
    # orbits refine the labels, and equal each named line class
    for kind, orb, lab in (("point", po, P.label_point), ("line", lo, P.label_line)):
        for k in range(len(orb)):
            assert len({lab(int(i)).name for i in orb.members(k)}) == 1
    for name in ("L1", "L2", "L3", "L1p", "L2p", "L3p", "L4", "L4p"):
        ids = set(lo.orbit_id[P.class_mask(name)].tolist())
        assert len(ids) == 1


def test_orbit_ids_ordered_by_smallest_member():
    po = group(5).orbits("point")
    firsts = [int(po.members(k)[0]) for k in range(len(po))]
    assert firsts == sorted(firsts) == po.representatives


def test_u1_orbit_is_conic(p5):
    po = group(5).orbits("point")
    k = po.orbit_id[p5.U[0]]
    assert np.array_equal(po.orbit_id == k, p5.conic)


def test_invariance(p5):
    G = group(5)
    A, B = p5.build_A_B()
    assert G.is_invariant(A) and G.is_invariant(B)
    single = np.zeros(p5.geom.n_lines, dtype=bool)
    single[np.flatnonzero(p5.class_mask("L4"))[0]] = True
    assert not G.is_invariant(single)
    assert G.is_invariant(p5.conic, kind="point")

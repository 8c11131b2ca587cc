import itertools
import random

import pytest

from unitals.gf import FieldMismatchError, make_field
from unitals.proj import (DegenerateError, Plane, ProjLine, ProjPoint, ProjectiveMap,
                          all_points, apply, incident, is_normalized, join, map_from_frames,
                          meet, points_of_line)

F4 = make_field(2, 2)
F9 = make_field(3, 2)


def P(F, *c):
    return ProjPoint.of(F, *c)


def L(F, *c):
    return ProjLine.of(F, *c)


def test_axes():
    assert join(P(F4, 1, 0, 0), P(F4, 0, 1, 0)) == L(F4, 0, 0, 1)
    assert meet(L(F4, 0, 0, 1), L(F4, 0, 1, 0)) == P(F4, 1, 0, 0)
    assert incident(P(F4, 1, 0, 0), L(F4, 0, 0, 1))
    assert not incident(P(F4, 0, 0, 1), L(F4, 0, 0, 1))


def test_join_meet_reject_equal_arguments():
    with pytest.raises(DegenerateError):
        join(P(F4, 1, 2, 3), P(F4, 1, 2, 3))
    with pytest.raises(DegenerateError):
        meet(L(F4, 0, 1, 0), L(F4, 0, 1, 0))
    with pytest.raises(FieldMismatchError):
        incident(P(F4, 1, 0, 0), L(F9, 0, 0, 1))


def test_normalization():
    p = P(F9, 0, 4, 7)
    assert is_normalized(p.coords) and p.coords[1] == 1
    with pytest.raises(DegenerateError):
        P(F9, 0, 0, 0)


def test_join_incident_random_pairs_pg29():
    pts = list(all_points(F9))
    rng = random.Random(3)
    for _ in range(100):
        a, b = rng.sample(pts, 2)
        l = join(ProjPoint(F9, a), ProjPoint(F9, b))
        assert incident(ProjPoint(F9, a), l) and incident(ProjPoint(F9, b), l)


@pytest.mark.parametrize("F", [F4, F9])
def test_counts_and_incidence(F):
    n = F.order
    pts = list(all_points(F))
    assert len(pts) == n * n + n + 1
    assert pts == sorted(pts)
    for line in pts:
        on = points_of_line(F, line)
        assert len(on) == n + 1
        assert sum(1 for x in pts if incident(ProjPoint(F, x), ProjLine(F, line))) == n + 1


@pytest.mark.parametrize("F", [F4, F9])
def test_duality(F):
    pts = list(all_points(F))
    rng = random.Random(5)
    for _ in range(50):
        a, b = rng.sample(pts, 2)
        # meet of two lines has the coordinates of the join of the dual points
        assert meet(ProjLine(F, a), ProjLine(F, b)).coords == join(ProjPoint(F, a),
                                                                    ProjPoint(F, b)).coords


def test_frames_identity_and_swap():
    e = [P(F4, 1, 0, 0), P(F4, 0, 1, 0), P(F4, 0, 0, 1), P(F4, 1, 1, 1)]
    assert map_from_frames(e, e) == ProjectiveMap.identity(F4)
    g = map_from_frames(e, [e[1], e[0], e[2], e[3]])
    assert g.matrix == ((0, 1, 0), (1, 0, 0), (0, 0, 1))


def test_degenerate_frame_names_triple():
    bad = [P(F4, 1, 0, 0), P(F4, 0, 1, 0), P(F4, 1, 1, 0), P(F4, 0, 0, 1)]
    good = [P(F4, 1, 0, 0), P(F4, 0, 1, 0), P(F4, 0, 0, 1), P(F4, 1, 1, 1)]
    with pytest.raises(DegenerateError, match="collinear"):
        map_from_frames(bad, good)


def _random_quadrangle(F, rng):
    pts = list(all_points(F))
    while True:
        quad = [ProjPoint(F, x) for x in rng.sample(pts, 4)]
        try:
            map_from_frames(quad, quad)
            return quad
        except DegenerateError:
            continue


def test_random_frames_pg24():
    rng = random.Random(11)
    for _ in range(50):
        src, dst = _random_quadrangle(F4, rng), _random_quadrangle(F4, rng)
        g = map_from_frames(src, dst)
        assert [apply(g, x) for x in src] == dst


def test_apply_identity_inverse_and_incidence():
    rng = random.Random(2)
    ident = ProjectiveMap.identity(F4)
    pts = [ProjPoint(F4, x) for x in all_points(F4)]
    assert len(pts) == 21
    assert all(apply(ident, p) == p for p in pts)
    g = map_from_frames(_random_quadrangle(F4, rng), _random_quadrangle(F4, rng))
    ginv = g.inverse()
    assert all(apply(g, apply(ginv, p)) == p for p in pts)
    assert g.compose(ginv) == ident
    for _ in range(50):
        p = rng.choice(pts)
        l = ProjLine(F4, rng.choice(pts).coords)
        # image line under the inverse-transpose rule
        img = ProjLine(F4, g.apply_line(l.coords))
        assert incident(p, l) == incident(apply(g, p), img)


def test_image_of_all_points_is_a_permutation():
    rng = random.Random(7)
    g = map_from_frames(_random_quadrangle(F9, rng), _random_quadrangle(F9, rng))
    pts = list(all_points(F9))
    assert sorted(g(x) for x in pts) == pts


def test_singular_matrix_rejected():
    with pytest.raises(DegenerateError):
        ProjectiveMap.of(F4, ((1, 0, 0), (1, 0, 0), (0, 0, 1)))


def test_plane_tables():
    plane = Plane(F4)
    assert len(plane) == 21
    for i in range(len(plane)):
        pts = plane.line_points(i)
        assert len(pts) == 5
        for a, b in itertools.combinations(pts, 2):
            assert join(ProjPoint(F4, plane.points[a]),
                        ProjPoint(F4, plane.points[b])).coords == plane.lines[i]

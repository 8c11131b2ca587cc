import itertools
import random

import pytest

from unitals import gf
from unitals.embed import (CertificateError, EmbeddingWitness, FieldExtEmbedding,
                           NonStandardReport, SubunitalCertificate, _Search, _shard_states,
                           check_standard, disjointness_check, enumerate_ext_embeddings,
                           find_order2_matrix, find_subunitals, model_points, nine_points,
                           normalizing_map, search_subunitals, small_extension,
                           standard_subunital, verify_order2_theorem, verify_two_transitive)
from unitals.gf import SubfieldEmbedding
from unitals.props import find_onan
from unitals.proj import ProjectiveMap, mat_vec, normalize
from unitals.unital import LinearSpace, make_quad_ext, quad_ext_for_order

E = make_quad_ext(2, 1)  # F_4 | F_2


def _prime_powers(bound):
    return [r for r in range(2, bound + 1) if gf.prime_power(r)]


def _odd_power(qs, r):
    e = 0
    while r > 1 and r % qs == 0:
        r //= qs
        e += 1
    return r == 1 and e % 2 == 1


def test_enumeration_examples():
    assert enumerate_ext_embeddings(E, quad_ext_for_order(4)) == []
    embs = enumerate_ext_embeddings(E, quad_ext_for_order(8))
    assert len(embs) == 2
    roots = gf.roots_in((1, 1, 1), quad_ext_for_order(8).C)
    assert [e.image_of_generator for e in embs] == roots
    own = enumerate_ext_embeddings(E, E)
    assert [e.image_of_generator for e in own] == [2, 3]  # identity and Frobenius
    assert enumerate_ext_embeddings(E, quad_ext_for_order(3)) == []


@pytest.mark.parametrize("bound", [2 ** 12])
def test_embedding_law_restricted_reading(bound):
    # eta(E) not inside R: nonempty exactly for r = q'^e with e odd
    orders = [r for r in _prime_powers(64) if r * r <= bound]
    for r in orders:
        big = quad_ext_for_order(r)
        for qs in orders:
            small = small_extension(qs, big.p)
            got = bool(small and enumerate_ext_embeddings(small, big))
            assert got == _odd_power(qs, r), (qs, r)


def test_embedding_law_unrestricted_reading():
    # with only eta(F) inside R required, any r = q'^e qualifies
    orders = [r for r in _prime_powers(64)]
    for r in orders:
        big = quad_ext_for_order(r)
        for qs in orders:
            small = small_extension(qs, big.p)
            if small is None:
                continue
            ok = False
            if big.C.m % small.C.m == 0:
                for root in gf.roots_in(small.C.modulus, big.C):
                    eta = SubfieldEmbedding(small.C, big.C, root)
                    if all(big.in_R(eta.table[f]) for f in small.emb.table):
                        ok = True
            pk, pr = gf.prime_power(qs), gf.prime_power(r)
            assert ok == (pr[1] % pk[1] == 0), (qs, r)


def test_embedding_invariants():
    for emb in enumerate_ext_embeddings(E, quad_ext_for_order(8)):
        assert emb.problems() == []
        eta = emb.eta.table
        for x in E.C.elements():
            assert eta[E.bar[x]] == emb.big.bar[eta[x]]
        assert not emb.big.in_R(eta[E.eps])
        assert emb.eta.verify()


@pytest.fixture(scope="module")
def h64(unital):
    return unital(8)


def test_standard_subunitals_h64(h64):
    embs = enumerate_ext_embeddings(E, h64.ext)
    for emb in embs:
        cert = standard_subunital(h64, emb)
        assert cert.order == 2 and len(cert.points) == 9 and cert.problems() == []
        assert len(cert.induced_blocks) == 12
        assert disjointness_check(h64, cert)["failures"] == []
        assert find_onan(cert.space()) == []


def test_identity_map_does_not_suffice_in_h64(h64):
    emb = enumerate_ext_embeddings(E, h64.ext)[0]
    with pytest.raises(CertificateError, match="not on the ambient unital"):
        standard_subunital(h64, emb, ProjectiveMap.identity(h64.ext.C))
    # the normalizing map is diagonal
    M = normalizing_map(emb).matrix
    assert M[0] == (1, 0, 0) and M[2] == (0, 0, 1) and M[1][0] == M[1][2] == 0


def test_raw_images_related_by_frobenius(h64):
    C = h64.ext.C
    a, b = (set(model_points(e)) for e in enumerate_ext_embeddings(E, h64.ext))
    twins = [k for k in range(C.m)
             if {tuple(C.frob(x, k) for x in p) for p in a} == b]
    assert twins


def test_identity_embedding_gives_whole_unital(unital):
    u = unital(2)
    emb = enumerate_ext_embeddings(E, E)[0]
    assert emb.image_of_generator == E.eps
    cert = standard_subunital(u, emb)
    assert cert.points == tuple(range(9))


def test_standardness_round_trip(h64):
    C = h64.ext.C
    embs = enumerate_ext_embeddings(E, h64.ext)
    for emb in embs:
        cert = standard_subunital(h64, emb)
        w = check_standard(h64, cert)
        assert isinstance(w, EmbeddingWitness)
        assert w.embedding.image_of_generator in [e.image_of_generator for e in embs]
        img = [h64.index[normalize(C, mat_vec(C, w.g.matrix, x))]
               for x in model_points(w.embedding)]
        assert img == w.point_map and sorted(img) == list(cert.points)
        js = w.to_json()
        assert set(js) == {"eta", "matrix", "point_map"}


@pytest.mark.parametrize("q", [2, 3])
def test_whole_unital_is_standard(unital, q):
    u = unital(q)
    cert = SubunitalCertificate.build(u, range(u.v), q)
    w = check_standard(u, cert)
    assert isinstance(w, EmbeddingWitness)
    assert disjointness_check(u, cert)["failures"] == []


def test_non_standard_reports(unital, h64):
    rng = random.Random(0)
    fake = SubunitalCertificate.build(h64, rng.sample(range(h64.v), 9), 2, check=False)
    assert fake.problems()
    rep = check_standard(h64, fake)
    assert isinstance(rep, NonStandardReport)
    assert rep.etas_tried == 2 and rep.frames_tried > 0
    u16 = unital(4)
    rep = check_standard(u16, SubunitalCertificate.build(u16, range(9), 2, check=False))
    assert isinstance(rep, NonStandardReport) and rep.etas_tried == 0
    assert rep.to_json() == {"standard": False, "etas_tried": 0, "frames_tried": 0}


def test_disjointness_violation_reported():
    fano = LinearSpace(7, [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6),
                           (2, 4, 5)])
    cert = SubunitalCertificate.build(fano, [1, 2, 5, 6], 1, check=False)
    rep = disjointness_check(fano, cert)
    assert rep["configurations_checked"] == 3
    assert [f["common"] for f in rep["failures"]] == [[0], [3], [4]]


def test_certificate_validation(unital):
    u = unital(4)
    with pytest.raises(CertificateError):
        SubunitalCertificate.build(u, range(9), 2)
    cert = SubunitalCertificate.build(unital(2), range(9), 2)
    js = cert.to_json()
    assert set(js) == {"ambient_params", "points", "induced_blocks", "order"}


@pytest.mark.parametrize("q", [3, 4])
def test_no_order_two_subunitals(unital, q):
    res = search_subunitals(unital(q), 2, "exhaustive")
    assert res.certificates == [] and res.complete


def test_search_small_cases(unital):
    assert [c.points for c in find_subunitals(unital(2), 2)] == [tuple(range(9))]
    assert find_subunitals(unital(2), 3) == []
    with pytest.raises(ValueError):
        find_subunitals(unital(2), 1)


def test_search_parallel_matches_serial(unital):
    a = search_subunitals(unital(4), 2, "exhaustive", workers=1)
    b = search_subunitals(unital(4), 2, "exhaustive", workers=2)
    assert a.nodes == b.nodes and a.certificates == b.certificates


def test_two_transitivity(unital):
    u = unital(3)
    rep = verify_two_transitive(u, samples=5, seed=1)
    assert rep["two_transitive"] and rep["orbit_size"] == u.v * (u.v - 1)
    assert all(s["maps_to"] == [0, 1] for s in rep["samples"])


@pytest.fixture(scope="module")
def reduced_h64(h64):
    return search_subunitals(h64, 2, "reduced", seed=0)


def test_reduced_search_h64(h64, reduced_h64):
    res = reduced_h64
    assert res.reduction["two_transitive"] and not res.fallback and res.complete
    assert len(res.certificates) == 21
    pts = [c.points for c in res.certificates]
    assert pts == sorted(pts) and len(set(pts)) == len(pts)
    for cert in res.certificates:
        assert cert.points[:2] == (0, 1)
        assert cert.problems() == []
        assert isinstance(check_standard(h64, cert), EmbeddingWitness)
        assert disjointness_check(h64, cert)["failures"] == []
        assert find_onan(cert.space()) == []
    for emb in enumerate_ext_embeddings(E, h64.ext):
        assert standard_subunital(h64, emb).points in pts


def test_capped_search(h64):
    res = search_subunitals(h64, 2, "capped", limit=2)
    assert len(res.certificates) == 2 and not res.complete
    assert all(isinstance(check_standard(h64, c), EmbeddingWitness) for c in res.certificates)
    with pytest.raises(ValueError):
        search_subunitals(h64, 2, "capped")


@pytest.mark.slow
def test_reduced_search_agrees_with_exhaustive_shard(h64, reduced_h64):
    # every subunital through point 0 containing point 1 is found by the reduced search
    s = _Search(h64, 2)
    s.run(_shard_states(s, "exhaustive")[0])
    assert len(s.results) == 1344  # 21 through each pair {0, x}, each counted for its 8 choices of x
    through_1 = sorted(x for x in s.results if 1 in x)
    assert through_1 == [c.points for c in reduced_h64.certificates]


def test_order2_matrix_over_f4():
    C = E.C
    u = next(w for w in gf.roots_in((1, 1, 1), C) if not E.in_R(w))
    M, nsol = find_order2_matrix(E, u)
    assert nsol > 0
    a, b, c = M.matrix[0][1], M.matrix[2][0], M.matrix[1][2]
    assert all(M.matrix[i][i] == 0 for i in range(3))
    assert (a, b, c) == (1, 1, C.mul(u, u))
    for x in nine_points(C, u):
        assert M.value(x) == 0
    assert len(set(nine_points(C, u))) == 9


def test_order2_existence_reports():
    rep = verify_order2_theorem(E)
    assert rep["predicted"] and rep["computed"] and rep["agrees"]
    assert rep["nine_points_in_model"] and rep["nine_points_subunital"]
    assert rep["equivalence"] is not None
    for q in (3, 4):
        rep = verify_order2_theorem(quad_ext_for_order(q))
        assert rep["predicted"] is False and rep["agrees"] and rep["search_count"] == 0
    assert verify_order2_theorem(quad_ext_for_order(4))["predicted_by_formula"] is False


def test_embedding_dataclass_round_trip():
    big = quad_ext_for_order(8)
    emb = enumerate_ext_embeddings(E, big)[1]
    again = FieldExtEmbedding(E, big, SubfieldEmbedding(E.C, big.C, emb.image_of_generator))
    assert again.problems() == [] and model_points(again) == model_points(emb)
    assert len(set(itertools.chain(model_points(emb)))) == 9

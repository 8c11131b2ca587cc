"""Subunitals of H(C|R): standard embeddings, exhaustive search, standardness.

A *standard* subunital is the image of H(E|F) under a field embedding
eta: E -> C with eta(F) in R, applied coordinatewise and followed by a
projective map of PG(2, C).  :func:`find_subunitals` looks for arbitrary
subunitals by backtracking; :func:`check_standard` decides whether a
given one is standard by sweeping frames.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from itertools import combinations, permutations

from . import gf
from .gf import SubfieldEmbedding
from .parallel import run_shards
from .proj import ProjectiveMap, det3, frame_map, mat_normalize, mat_vec, normalize
from .props import translations_at
from .unital import (HermitianMatrix, HermitianUnital, LinearSpace, QuadExtension,
                     build_unital, build_unital_from_matrix, make_quad_ext)

log = logging.getLogger(__name__)


class CertificateError(ValueError):
    pass


# -- field extension embeddings ------------------------------------------------

@dataclass(frozen=True)
class FieldExtEmbedding:
    small: QuadExtension
    big: QuadExtension
    eta: SubfieldEmbedding

    def problems(self) -> list[str]:
        E, C = self.small, self.big
        eta = self.eta.table
        out = []
        if any(not C.in_R(eta[f]) for f in E.emb.table):
            out.append("eta(F) is not contained in R")
        if C.in_R(eta[E.eps]):
            out.append("eta(E) is contained in R")
        if any(eta[E.bar[x]] != C.bar[eta[x]] for x in E.C.elements()):
            out.append("eta does not intertwine the involutions")
        return out

    @property
    def image_of_generator(self) -> int:
        return self.eta.gen_image

    def map_point(self, v):
        return normalize(self.big.C, tuple(self.eta.table[c] for c in v))


def small_extension(q_sub: int, p: int) -> QuadExtension | None:
    pk = gf.prime_power(q_sub)
    if pk is None or pk[0] != p:
        return None
    return make_quad_ext(pk[0], pk[1])


def enumerate_ext_embeddings(small: QuadExtension, big: QuadExtension) -> list[FieldExtEmbedding]:
    """Every eta: E -> C with eta(F) in R and eta(E) not in R, by ascending root code."""
    if small.p != big.p or big.C.m % small.C.m:
        return []
    out = []
    for root in gf.roots_in(small.C.modulus, big.C):
        emb = FieldExtEmbedding(small, big, SubfieldEmbedding(small.C, big.C, root))
        problems = emb.problems()
        if not problems:
            out.append(emb)
        elif problems != ["eta(E) is contained in R"]:
            # only the E-in-R condition may fail once eta(F) is in R
            log.debug("root %d rejected: %s", root, problems)
    return out


def normalizing_map(emb: FieldExtEmbedding) -> ProjectiveMap:
    """diag(1, k, 1) carrying the eta-image of H(E|F) into H(C|R).

    The image satisfies X^s Y + Z^s Z in eta(eps_E) R; scaling Y by
    k = c * bar(e') / bar(e) with c = (bar(e) - e) / (bar(e') - e') moves
    it onto the eps_C R condition.
    """
    C, big = emb.big.C, emb.big
    e, eb = big.eps, big.eps_bar
    e2 = emb.eta.table[emb.small.eps]
    e2b = big.bar[e2]
    c = C.div(C.sub(eb, e), C.sub(e2b, e2))
    k = C.mul(c, C.div(e2b, eb))
    return ProjectiveMap(C, ((1, 0, 0), (0, k, 0), (0, 0, 1)))


# -- certificates --------------------------------------------------------------------

@dataclass
class SubunitalCertificate:
    ambient: HermitianUnital
    points: tuple[int, ...]
    induced_blocks: dict[int, tuple[int, ...]]
    order: int

    @classmethod
    def build(cls, ambient: LinearSpace, points, order: int | None = None,
              check: bool = True) -> "SubunitalCertificate":
        pts = tuple(sorted(set(points)))
        if order is None:
            order = round((len(pts) - 1) ** (1 / 3))
        induced = {}
        members = set(pts)
        for b in sorted({b for x in pts for b in ambient.blocks_through[x]}):
            inter = tuple(x for x in ambient.blocks[b] if x in members)
            if len(inter) >= 2:
                induced[b] = inter
        cert = cls(ambient, pts, induced, order)
        if check:
            problems = cert.problems()
            if problems:
                raise CertificateError("; ".join(problems))
        return cert

    def problems(self) -> list[str]:
        """Re-derive every certificate invariant from the ambient incidences."""
        amb, q = self.ambient, self.order
        pts = set(self.points)
        out = []
        if len(pts) != q ** 3 + 1:
            out.append(f"{len(pts)} points, expected {q ** 3 + 1}")
        for b, blk in enumerate(amb.blocks):
            k = sum(1 for x in blk if x in pts)
            if k not in (0, 1, q + 1):
                out.append(f"ambient block {b} meets the set in {k} points")
        inner = [blk for blk in self.induced_blocks.values()]
        if any(len(blk) != q + 1 for blk in inner):
            out.append("induced block of wrong size")
        covered = set()
        for blk in inner:
            for pair in combinations(blk, 2):
                if pair in covered:
                    out.append(f"pair {pair} covered twice")
                covered.add(pair)
        if len(covered) != len(pts) * (len(pts) - 1) // 2:
            out.append("not every pair of points lies on an induced block")
        return out

    def space(self) -> LinearSpace:
        """The induced linear space relabelled to 0..|S|-1."""
        pos = {x: i for i, x in enumerate(self.points)}
        return LinearSpace(len(self.points),
                           [[pos[x] for x in blk] for blk in self.induced_blocks.values()])

    def coords(self):
        return [self.ambient.points[i] for i in self.points]

    def to_json(self) -> dict:
        amb = self.ambient
        params = amb.params() if hasattr(amb, "params") else {"v": amb.v, "b": amb.b}
        return {
            "ambient_params": params,
            "points": list(self.points),
            "induced_blocks": {str(b): list(blk) for b, blk in sorted(self.induced_blocks.items())},
            "order": self.order,
        }


@dataclass
class EmbeddingWitness:
    embedding: FieldExtEmbedding
    g: ProjectiveMap
    point_map: list[int]

    def to_json(self) -> dict:
        return {
            "eta": self.embedding.image_of_generator,
            "matrix": [list(r) for r in self.g.matrix],
            "point_map": list(self.point_map),
        }


@dataclass
class NonStandardReport:
    etas_tried: int
    frames_tried: int

    def to_json(self) -> dict:
        return {"standard": False, "etas_tried": self.etas_tried,
                "frames_tried": self.frames_tried}


def model_points(emb: FieldExtEmbedding) -> list[tuple[int, int, int]]:
    """Coordinatewise eta-image of the canonical H(E|F), in H(E|F) point order."""
    small_u = _small_unital(emb.small)
    return [emb.map_point(x) for x in small_u.points]


_SMALL_CACHE: dict = {}


def _small_unital(ext):
    key = id(ext)
    if key not in _SMALL_CACHE:
        _SMALL_CACHE[key] = build_unital(ext)
    return _SMALL_CACHE[key]


def standard_subunital(big: HermitianUnital, emb: FieldExtEmbedding,
                       g: ProjectiveMap | None = None) -> SubunitalCertificate:
    """Certified image g(eta(H(E|F))); g defaults to :func:`normalizing_map`."""
    problems = emb.problems()
    if problems:
        raise CertificateError("; ".join(problems))
    if g is None:
        g = normalizing_map(emb)
    pts = []
    for x in model_points(emb):
        y = g(x)
        if y not in big.index:
            raise CertificateError(f"image point {y} is not on the ambient unital")
        pts.append(big.index[y])
    return SubunitalCertificate.build(big, pts, order=emb.small.q)


# -- projective equivalence by frame sweeping ------------------------------------------

def _first_quadrangle(C, pts):
    for quad in combinations(range(len(pts)), 4):
        if all(det3(C, tuple(pts[i] for i in trio)) != 0 for trio in combinations(quad, 3)):
            return [pts[i] for i in quad]
    return None


def frame_sweep(C, model, target, first_only=True):
    """Linear maps g with g(model) = target, found by trying every ordered target quadrangle.

    Returns ``(maps, frames_tried)``; ``maps`` holds ``(matrix, point_map)``
    pairs where ``point_map[i]`` is the target position of model point i.
    """
    if len(model) != len(target):
        return [], 0
    src = _first_quadrangle(C, model)
    if src is None:
        return [], 0
    pos = {x: i for i, x in enumerate(target)}
    n = len(target)
    collinear = {t for t in combinations(range(n), 3)
                 if det3(C, tuple(target[i] for i in t)) == 0}
    found = []
    tried = 0
    for quad in permutations(range(n), 4):
        if any(tuple(sorted(t)) in collinear for t in combinations(quad, 3)):
            continue
        tried += 1
        M = frame_map(C, src, [target[i] for i in quad])
        pmap = []
        for x in model:
            j = pos.get(normalize(C, mat_vec(C, M, x)))
            if j is None:
                break
            pmap.append(j)
        else:
            found.append((mat_normalize(C, M), pmap))
            if first_only:
                break
    return found, tried


def check_standard(big: HermitianUnital, cert: SubunitalCertificate):
    """An :class:`EmbeddingWitness` if ``cert`` is standard, else a :class:`NonStandardReport`."""
    C = big.ext.C
    small = small_extension(cert.order, big.ext.p)
    embs = enumerate_ext_embeddings(small, big.ext) if small else []
    target = cert.coords()
    frames = 0
    for emb in embs:
        found, tried = frame_sweep(C, model_points(emb), target)
        frames += tried
        if found:
            M, pmap = found[0]
            return EmbeddingWitness(emb, ProjectiveMap(C, M), [cert.points[j] for j in pmap])
    return NonStandardReport(len(embs), frames)


def projective_equivalence(u1: HermitianUnital, u2: HermitianUnital):
    """A ProjectiveMap g with g(u1) = u2, or None."""
    if u1.ext.C is not u2.ext.C:
        raise ValueError("unitals over different fields")
    found, _ = frame_sweep(u1.ext.C, u1.points, u2.points)
    return ProjectiveMap(u1.ext.C, found[0][0]) if found else None


# -- disjoint induced blocks stay disjoint -----------------------------------------

def disjointness_check(big: LinearSpace, cert: SubunitalCertificate) -> dict:
    """Blocks disjoint inside the subunital must be disjoint in the ambient space."""
    failures = []
    checked = 0
    items = sorted(cert.induced_blocks.items())
    sets = big.block_sets
    for (b1, s1), (b2, s2) in combinations(items, 2):
        if set(s1) & set(s2):
            continue
        checked += 1
        common = sets[b1] & sets[b2]
        if common:
            failures.append({"blocks": [b1, b2], "common": sorted(common)})
    return {"property": "disjointness", "mode": "exhaustive", "seed": None, "prng": None,
            "configurations_checked": checked, "failures": failures}


# -- two-point transitivity of the translation group ------------------------------------

def verify_two_transitive(u: HermitianUnital, samples: int = 8, seed: int = 0) -> dict:
    """Show that translations move every ordered pair onto (0, 1).

    Breadth-first search of the orbit of (0, 1) under translations at a
    growing set of centres; for a few seeded sample pairs the explicit
    product of translations is rebuilt from the search tree and checked.
    """
    v = u.v
    k = 3
    while True:
        centers = list(range(min(k, v)))
        gens = [t.perm for c in centers for t in translations_at(u, c).elements if t.lam]
        parent = [-1] * (v * v)
        start = 0 * v + 1
        parent[start] = len(gens)
        frontier = [start]
        size = 1
        while frontier:
            nxt = []
            for s in frontier:
                a, b = divmod(s, v)
                for gi, g in enumerate(gens):
                    t = g[a] * v + g[b]
                    if parent[t] < 0:
                        parent[t] = gi
                        nxt.append(t)
                        size += 1
            frontier = nxt
        if size == v * (v - 1) or len(centers) == v:
            break
        k *= 2
    ok = size == v * (v - 1)
    words = []
    if ok:
        rng = random.Random(seed)
        pairs = [tuple(rng.sample(range(v), 2)) for _ in range(samples)]
        for x, y in pairs:
            # walk back to (0, 1), composing inverse generators
            word = []
            s = x * v + y
            while s != start:
                gi = parent[s]
                g = gens[gi]
                inv = [0] * v
                for i, j in enumerate(g):
                    inv[j] = i
                a, b = divmod(s, v)
                s = inv[a] * v + inv[b]
                word.append(gi)
            perm = list(range(v))
            for gi in word:
                g = gens[gi]
                inv = [0] * v
                for i, j in enumerate(g):
                    inv[j] = i
                perm = [inv[i] for i in perm]
            words.append({"pair": [x, y], "length": len(word),
                          "maps_to": [perm[x], perm[y]]})
        ok = all(w["maps_to"] == [0, 1] for w in words)
    return {"two_transitive": ok, "centers": len(centers), "orbit_size": size,
            "samples": words}


# -- backtracking search -----------------------------------------------------------------

class _State:
    __slots__ = ("S", "cnt", "avail", "navail", "open")

    def __init__(self, S, cnt, avail, navail, open_):
        self.S = S
        self.cnt = cnt
        self.avail = avail
        self.navail = navail
        self.open = open_

    def copy(self):
        return _State(list(self.S), list(self.cnt), bytearray(self.avail), self.navail,
                      set(self.open))


class _Search:
    def __init__(self, space: LinearSpace, q_sub: int, limit: int | None = None):
        self.space = space
        self.k = q_sub + 1
        self.target = q_sub ** 3 + 1
        self.limit = limit
        self.results = []
        self.nodes = 0
        self.capped = False

    def initial(self):
        sp = self.space
        return _State([], [0] * sp.b, bytearray([1]) * sp.v, sp.v, set())

    def include(self, st, c):
        blocks, k = self.space.blocks, self.k
        st.S.append(c)
        st.avail[c] = 0
        st.navail -= 1
        cnt, avail = st.cnt, st.avail
        for b in self.space.blocks_through[c]:
            n = cnt[b] + 1
            cnt[b] = n
            if n == k:
                st.open.discard(b)
                for x in blocks[b]:
                    if avail[x]:
                        avail[x] = 0
                        st.navail -= 1
            elif n >= 2:
                st.open.add(b)

    def exclude(self, st, c):
        if st.avail[c]:
            st.avail[c] = 0
            st.navail -= 1

    def _propagate(self, st):
        """Apply forced completions; return (consistent, tightest open block or None)."""
        blocks, k = self.space.blocks, self.k
        while True:
            if len(st.S) > self.target or len(st.S) + st.navail < self.target:
                return False, None
            best = None
            forced = None
            cover = {}
            avail = st.avail
            for b in sorted(st.open):
                cands = [x for x in blocks[b] if avail[x]]
                need = k - st.cnt[b]
                if len(cands) < need:
                    return False, None
                if len(cands) == need:
                    forced = cands
                    break
                if best is None or len(cands) < len(best[1]):
                    best = (b, cands)
                for x in cands:
                    cover[x] = cover.get(x, 0) + 1
            if forced is None:
                # every open block still needs a point; the remaining slots
                # must be able to supply one to each of them
                if st.open:
                    room = self.target - len(st.S)
                    top = sorted(cover.values(), reverse=True)[:room]
                    if sum(top) < len(st.open):
                        return False, None
                return True, best
            for c in forced:
                if not st.avail[c]:
                    return False, None
                self.include(st, c)

    def run(self, st):
        if self.capped:
            return
        self.nodes += 1
        ok, branch = self._propagate(st)
        if not ok:
            return
        if branch is not None:
            cands = branch[1]
            for i, c in enumerate(cands):
                child = st.copy()
                for x in cands[:i]:
                    self.exclude(child, x)
                self.include(child, c)
                self.run(child)
                if self.capped:
                    return
            return
        if len(st.S) == self.target:
            self.results.append(tuple(sorted(st.S)))
            if self.limit is not None and len(self.results) >= self.limit:
                self.capped = True
            return
        # closed configuration below target size: choose the next point in order
        for c in range(self.space.v):
            if not st.avail[c]:
                continue
            if len(st.S) + st.navail < self.target:
                return
            child = st.copy()
            self.include(child, c)
            self.run(child)
            if self.capped:
                return
            self.exclude(st, c)


def _shard_states(search, mode):
    """Independent starting states partitioning the search space."""
    sp = search.space
    if mode == "reduced":
        base = search.initial()
        search.include(base, 0)
        search.include(base, 1)
        b = sp.block_of(0, 1)
        cands = [x for x in sp.blocks[b] if base.avail[x]]
        out = []
        for i, c in enumerate(cands):
            st = base.copy()
            for x in cands[:i]:
                search.exclude(st, x)
            search.include(st, c)
            out.append(st)
        return out
    out = []
    for c in range(sp.v):
        st = search.initial()
        for x in range(c):
            search.exclude(st, x)
        search.include(st, c)
        out.append(st)
    return out


def _run_shard(args, st):
    space, q_sub = args
    s = _Search(space, q_sub)
    s.run(st)
    return s.results, s.nodes


@dataclass
class SearchResult:
    certificates: list[SubunitalCertificate]
    mode: str
    nodes: int
    complete: bool
    reduction: dict | None = None
    fallback: bool = False


def search_subunitals(big: HermitianUnital, q_sub: int, mode: str = "exhaustive",
                      limit: int | None = None, seed: int = 0, workers: int = 1) -> SearchResult:
    """Backtracking search for subunitals of order ``q_sub``.

    Point sets grow in canonical order; a block holding 2..q_sub points of
    the partial set is *open* and must be completed from its still
    available points, and a block holding q_sub+1 points is closed and
    excludes the rest of its points.  Branching on the candidates of the
    tightest open block (earlier candidates excluded in later branches),
    or include/exclude of the next available point when nothing is open,
    partitions the search space, so every subunital appears exactly once.

    ``reduced`` fixes points 0 and 1 after checking that translations act
    2-transitively; if that check fails it falls back to ``exhaustive``.
    ``capped`` is exhaustive but stops after ``limit`` certificates.
    """
    if q_sub < 2:
        raise ValueError("subunital order must be at least 2")
    if q_sub ** 3 + 1 > big.v:
        return SearchResult([], mode, 0, True)
    reduction = None
    fallback = False
    run_mode = mode
    if mode == "reduced":
        reduction = verify_two_transitive(big, seed=seed)
        if not reduction["two_transitive"]:
            log.warning("2-transitivity not established; falling back to exhaustive search")
            fallback = True
            run_mode = "exhaustive"
    if mode == "capped":
        if not limit:
            raise ValueError("capped mode needs a positive limit")
        s = _Search(big, q_sub, limit)
        for st in _shard_states(s, "exhaustive"):
            s.run(st)
            if s.capped:
                break
        found, nodes, complete = s.results, s.nodes, not s.capped
    elif run_mode in ("exhaustive", "reduced"):
        s = _Search(big, q_sub)
        shards = _shard_states(s, run_mode)
        found, nodes = [], 0
        for res, n in run_shards(_run_shard, (big, q_sub), shards, workers):
            found.extend(res)
            nodes += n
        complete = True
    else:
        raise ValueError(f"unknown search mode {mode!r}")
    certs = [SubunitalCertificate.build(big, pts, q_sub) for pts in sorted(set(found))]
    return SearchResult(certs, mode, nodes, complete, reduction, fallback)


def find_subunitals(big: HermitianUnital, q_sub: int, mode: str = "exhaustive",
                    limit: int | None = None, seed: int = 0,
                    workers: int = 1) -> list[SubunitalCertificate]:
    return search_subunitals(big, q_sub, mode, limit, seed, workers).certificates


# -- order-2 subunitals and the zero-diagonal model ---------------------------------

NINE_POINTS_LABELS = ["[1,0,0]", "[1,1,0]", "[1,0,1]", "[1,-u,1]", "[1,1,-u^2]",
                      "[1,-u,-u^2]", "[0,1,0]", "[0,1,u]", "[0,0,1]"]


def nine_points(C, u: int):
    """The nine points of the order-2 frame, for a root u of X^2+X+1."""
    neg = C.neg
    u2 = C.mul(u, u)
    raw = [(1, 0, 0), (1, 1, 0), (1, 0, 1), (1, neg(u), 1), (1, 1, neg(u2)),
           (1, neg(u), neg(u2)), (0, 1, 0), (0, 1, u), (0, 0, 1)]
    return [normalize(C, x) for x in raw]


def zero_diagonal_matrix(ext: QuadExtension, a, b, c):
    bar = ext.bar
    return ((0, a, bar[b]), (bar[a], 0, c), (b, bar[c], 0))


def find_order2_matrix(ext: QuadExtension, u: int):
    """First (a, b, c) in code order with tr(a) = tr(b) = tr(cu) = 0, a = b, det != 0.

    Returns ``(HermitianMatrix | None, number of solutions of the trace
    constraints alone)``.
    """
    C = ext.C
    ker = [w for w in C.elements() if ext.trace(w) == 0]
    cs = [w for w in C.elements() if ext.trace(C.mul(w, u)) == 0]
    chosen = None
    solutions = 0
    for a in ker:
        for b in ker:
            for c in cs:
                M = zero_diagonal_matrix(ext, a, b, c)
                if det3(C, M) == 0:
                    continue
                solutions += 1
                if chosen is None and a == b:
                    chosen = M
    return (HermitianMatrix(ext, chosen) if chosen else None), solutions


def verify_order2_theorem(ext: QuadExtension, workers: int = 1,
                          equivalence: bool = True) -> dict:
    """Compare the predicted and computed existence of an order-2 subunital in H(C|R)."""
    C = ext.C
    roots = gf.roots_in((1, 1, 1), C)
    outside = [r for r in roots if not ext.in_R(r)]
    predicted = ext.p == 2 and bool(outside)
    report = {"extension": ext.describe(), "predicted": predicted,
              "predicted_by_formula": ext.p == 2 and ext.n % 2 == 1}
    if predicted:
        u = outside[0]
        M, nsol = find_order2_matrix(ext, u)
        report["u"] = u
        report["trace_constraint_solutions"] = nsol
        if M is None:
            report.update(computed=False, reason="no matrix satisfies the constraints")
            return report
        report["matrix"] = [list(r) for r in M.matrix]
        model = build_unital_from_matrix(ext, M)
        pts = nine_points(C, u)
        report["nine_points"] = [list(x) for x in pts]
        inside = [x in model.index for x in pts]
        report["nine_points_in_model"] = all(inside)
        ok = all(inside)
        if ok:
            cert = SubunitalCertificate.build(model, [model.index[x] for x in pts], check=False)
            probs = cert.problems()
            report["nine_points_subunital"] = not probs and cert.order == 2
            ok = not probs and cert.order == 2
        if ok and equivalence:
            canon = build_unital(ext)
            g = projective_equivalence(canon, model)
            report["equivalence"] = [list(r) for r in g.matrix] if g else None
            ok = g is not None
        report["computed"] = ok
    else:
        canon = build_unital(ext)
        certs = find_subunitals(canon, 2, "exhaustive", workers=workers)
        report["search_count"] = len(certs)
        report["computed"] = bool(certs)
    report["agrees"] = report["computed"] == predicted
    return report

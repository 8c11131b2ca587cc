"""Structural checks on hermitian unitals.

Covers O'Nan configurations (NON), translation groups and the (ALL),
(TRA) and (TAN) properties, plus the per-line and per-form sanity checks
run by ``check``.  Every check returns a plain ``dict`` report::

    {property, mode, seed, prng, configurations_checked, failures}

Sampled checks draw from ``random.Random(seed)``; the same seed always
gives the same report.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations

from .parallel import run_shards
from .proj import ProjectiveMap, all_points, dot, meet_coords, normalize, points_of_line
from .unital import HermitianUnital, LinearSpace, baer_check, canonical_member, hermitian_form

PRNG = "python-random-mt19937"


def _report(prop, mode, seed, checked, failures, **extra):
    rep = {
        "property": prop,
        "mode": mode,
        "seed": seed,
        "prng": PRNG if seed is not None else None,
        "configurations_checked": checked,
        "failures": failures,
    }
    rep.update(extra)
    return rep


def passed(report: dict) -> bool:
    return not report["failures"]


# -- O'Nan configurations ------------------------------------------------------

@dataclass(frozen=True)
class OnanConfiguration:
    blocks: tuple[int, int, int, int]
    points: tuple[int, ...]

    @classmethod
    def from_blocks(cls, space: LinearSpace, blocks) -> "OnanConfiguration":
        blocks = tuple(sorted(blocks))
        pts = set()
        for b1, b2 in combinations(blocks, 2):
            common = space.block_sets[b1] & space.block_sets[b2]
            if len(common) != 1:
                raise ValueError(f"blocks {b1}, {b2} do not meet in one point")
            pts |= common
        if len(pts) != 6:
            raise ValueError("the four blocks do not meet in six distinct points")
        for b in blocks:
            if len(space.block_sets[b] & pts) != 3:
                raise ValueError("incidence pattern is not (6_2 4_3)")
        return cls(blocks, tuple(sorted(pts)))

    def to_json(self):
        return {"blocks": list(self.blocks), "points": list(self.points)}


def _onan_tuple(space, p, B1, B2, a, b, c, d):
    pb, v = space.pair_block, space.v
    B3 = pb[a * v + c]
    B4 = pb[b * v + d]
    if B3 < 0 or B4 < 0 or B3 == B4:
        return None
    common = space.block_sets[B3] & space.block_sets[B4]
    if not common:
        return None
    (x,) = common
    if x in space.block_sets[B1] or x in space.block_sets[B2]:
        return None
    return (B1, B2, B3, B4)


def _onan_shard(space, p):
    found = set()
    checked = 0
    blocks = space.blocks
    for B1, B2 in combinations(space.blocks_through[p], 2):
        A = [x for x in blocks[B1] if x != p]
        D = [x for x in blocks[B2] if x != p]
        for a in A:
            for b in A:
                if a == b:
                    continue
                for c in D:
                    for d in D:
                        if c == d:
                            continue
                        checked += 1
                        hit = _onan_tuple(space, p, B1, B2, a, b, c, d)
                        if hit:
                            found.add(tuple(sorted(hit)))
    return found, checked


def _onan_scan(space, mode="exhaustive", count=100000, seed=None, workers=1):
    found = set()
    checked = 0
    if mode == "exhaustive":
        for f, c in run_shards(_onan_shard, space, range(space.v), workers):
            found |= f
            checked += c
    elif mode == "sample":
        if seed is None:
            raise ValueError("sampling requires a seed")
        rng = random.Random(seed)
        blocks = space.blocks
        centers = [p for p in range(space.v) if len(space.blocks_through[p]) >= 2]
        for _ in range(count):
            p = rng.choice(centers)
            B1, B2 = rng.sample(space.blocks_through[p], 2)
            A = [x for x in blocks[B1] if x != p]
            D = [x for x in blocks[B2] if x != p]
            if len(A) < 2 or len(D) < 2:
                continue
            a, b = rng.sample(A, 2)
            c, d = rng.sample(D, 2)
            checked += 1
            hit = _onan_tuple(space, p, B1, B2, a, b, c, d)
            if hit:
                found.add(tuple(sorted(hit)))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    configs = [OnanConfiguration.from_blocks(space, bl) for bl in sorted(found)]
    return configs, checked


def find_onan(space: LinearSpace, mode: str = "exhaustive", count: int = 100000,
              seed: int | None = None, workers: int = 1) -> list[OnanConfiguration]:
    """O'Nan configurations of a linear space, deduplicated by their block set.

    Tuples (p; B1, B2 through p; a != b on B1; c != d on B2) are tested for
    a common point of block(a, c) and block(b, d) off B1 and B2.
    """
    return _onan_scan(space, mode, count, seed, workers)[0]


def check_onan(space, mode="exhaustive", count=100000, seed=None, workers=1) -> dict:
    configs, checked = _onan_scan(space, mode, count, seed, workers)
    return _report("onan", mode, seed, checked, [c.to_json() for c in configs])


# -- translations ----------------------------------------------------------------

@dataclass(frozen=True)
class Translation:
    """The elation x -> x + lam * l(x) * P with centre P and axis the tangent l."""

    center: int
    lam: int
    matrix: ProjectiveMap
    perm: tuple[int, ...]

    def __call__(self, i: int) -> int:
        return self.perm[i]


@dataclass
class TranslationGroup:
    center: int
    elements: list[Translation]

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_group(self) -> bool:
        perms = {t.perm for t in self.elements}
        ident = tuple(range(len(self.elements[0].perm)))
        if ident not in perms:
            return False
        for s in perms:
            for t in perms:
                if tuple(s[i] for i in t) not in perms:
                    return False
        return True


def _elation(u, p, lam):
    C = u.ext.C
    P = u.points[p]
    ell = u.tangent[p]
    M = tuple(tuple(C.add(int(i == j), C.mul(lam, C.mul(P[i], ell[j]))) for j in range(3))
              for i in range(3))
    return M


def translations_at(u: HermitianUnital, p: int) -> TranslationGroup:
    """All elations with centre ``p`` and axis the tangent at ``p`` preserving the unital."""
    cache = u.__dict__.setdefault("_translation_cache", {})
    if p in cache:
        return cache[p]
    C = u.ext.C
    P = u.points[p]
    ell = u.tangent[p]
    index = u.index
    mul, add = C.mul, C.add
    svals = [dot(C, ell, x) for x in u.points]
    elements = []
    for lam in C.elements():
        perm = []
        for x, s in zip(u.points, svals):
            k = mul(lam, s)
            img = normalize(C, (add(x[0], mul(k, P[0])), add(x[1], mul(k, P[1])),
                                add(x[2], mul(k, P[2]))))
            j = index.get(img)
            if j is None:
                break
            perm.append(j)
        else:
            M = ProjectiveMap.of(C, _elation(u, p, lam))
            elements.append(Translation(p, lam, M, tuple(perm)))
    group = TranslationGroup(p, elements)
    cache[p] = group
    return group


def block_image(u: LinearSpace, perm, b: int) -> int:
    return u.block_index(perm[x] for x in u.blocks[b])


def check_all_property(u: HermitianUnital) -> dict:
    """(ALL): translations at z act transitively on B - {z} for every block B on z."""
    failures = []
    checked = 0
    q = u.q
    for z in range(u.v):
        G = translations_at(u, z)
        if G.order != q:
            failures.append({"center": z, "reason": f"group order {G.order} != {q}"})
        for b in u.blocks_through[z]:
            rest = [x for x in u.blocks[b] if x != z]
            x0 = rest[0]
            orbit = {t.perm[x0] for t in G.elements}
            for y in rest:
                checked += 1
                if y not in orbit:
                    failures.append({"x": x0, "y": y, "z": z})
    return _report("all", "exhaustive", None, checked, failures)


def check_translation_groups(u: HermitianUnital) -> dict:
    """Order q, group closure and regularity on B - {p} at every centre."""
    failures = []
    for p in range(u.v):
        G = translations_at(u, p)
        if G.order != u.q or not G.is_group():
            failures.append({"center": p, "order": G.order})
            continue
        for b in u.blocks_through[p]:
            rest = [x for x in u.blocks[b] if x != p]
            for x in rest:
                if sorted(t.perm[x] for t in G.elements) != rest:
                    failures.append({"center": p, "block": b, "point": x})
                    break
    return _report("translations", "exhaustive", None, u.v, failures)


# -- (TRA) and (TAN) -------------------------------------------------------------

class _Hits:
    """For a fixed point p: the blocks through p met by each block missing p."""

    def __init__(self, space, p):
        v, pb = space.v, space.pair_block
        self.p = p
        self.outside = [b for b in range(space.b) if p not in space.block_sets[b]]
        self.hits = {b: frozenset(pb[p * v + x] for x in space.blocks[b]) for b in self.outside}
        self._by_triple = None

    def by_triple(self):
        if self._by_triple is None:
            d = {}
            for b in self.outside:
                for t in combinations(sorted(self.hits[b]), 3):
                    d.setdefault(t, []).append(b)
            self._by_triple = d
        return self._by_triple


def _hits_for(space, p):
    cache = space.__dict__.setdefault("_hits_cache", {})
    if p not in cache:
        cache[p] = _Hits(space, p)
    return cache[p]


def _tra_config(space, p, triple, B, z, with_translations):
    H = _hits_for(space, p)
    need = set(triple)
    cands = [b for b in space.blocks_through[z]
             if p not in space.block_sets[b] and need <= H.hits[b]]
    fail = {"p": p, "blocks": list(triple), "B": B, "z": z}
    if len(cands) != 1:
        return dict(fail, reason=f"{len(cands)} blocks through z meet all three")
    B2 = cands[0]
    if H.hits[B] != H.hits[B2]:
        return dict(fail, reason="blocks through p meeting B and B' differ")
    if with_translations:
        G = translations_at(space, p)
        if not any(block_image(space, t.perm, B) == B2 for t in G.elements):
            return dict(fail, reason="B' is not a translation image of B")
    return None


def _tra_configs_at(space, p):
    H = _hits_for(space, p)
    for B in H.outside:
        for triple in combinations(sorted(H.hits[B]), 3):
            zs = sorted({x for b in triple for x in space.blocks[b]} - {p})
            for z in zs:
                yield triple, B, z


def check_tra(space, mode="exhaustive", count=1000, seed=None) -> dict:
    """(TRA) on every (or a sample of) configuration (p; X, Y, Z; B; z).

    The translation part is checked only for hermitian unitals; for a bare
    linear space this is the purely combinatorial condition.
    """
    with_tr = isinstance(space, HermitianUnital)
    failures = []
    checked = 0
    if mode == "exhaustive":
        for p in range(space.v):
            for triple, B, z in _tra_configs_at(space, p):
                checked += 1
                f = _tra_config(space, p, triple, B, z, with_tr)
                if f:
                    failures.append(f)
    elif mode == "sample":
        if seed is None:
            raise ValueError("sampling requires a seed")
        rng = random.Random(seed)
        attempts = 0
        while checked < count and attempts < 100 * count:
            attempts += 1
            p = rng.randrange(space.v)
            H = _hits_for(space, p)
            if not H.outside:
                continue
            B = rng.choice(H.outside)
            hs = sorted(H.hits[B])
            if len(hs) < 3:
                continue
            triple = tuple(sorted(rng.sample(hs, 3)))
            zs = sorted({x for b in triple for x in space.blocks[b]} - {p})
            z = rng.choice(zs)
            checked += 1
            f = _tra_config(space, p, triple, B, z, with_tr)
            if f:
                failures.append(f)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return _report("tra", mode, seed, checked, failures)


def _tan_pair(u, p, triple, B, B2):
    C = u.ext.C
    x = meet_coords(C, u.block_lines[B], u.block_lines[B2])
    if dot(C, x, u.tangent[p]) != 0:
        return {"p": p, "blocks": list(triple), "B": B, "B2": B2, "meet": list(x)}
    return None


def check_tan(u: HermitianUnital, mode="exhaustive", count=1000, seed=None) -> dict:
    """(TAN): disjoint blocks B, B' meeting X, Y, Z through p have lines meeting on the tangent."""
    failures = []
    checked = 0
    sets = u.block_sets
    if mode == "exhaustive":
        for p in range(u.v):
            for triple, Bs in sorted(_hits_for(u, p).by_triple().items()):
                for B, B2 in combinations(Bs, 2):
                    if sets[B] & sets[B2]:
                        continue
                    checked += 1
                    f = _tan_pair(u, p, triple, B, B2)
                    if f:
                        failures.append(f)
    elif mode == "sample":
        if seed is None:
            raise ValueError("sampling requires a seed")
        rng = random.Random(seed)
        attempts = 0
        while checked < count and attempts < 100 * count:
            attempts += 1
            p = rng.randrange(u.v)
            H = _hits_for(u, p)
            B = rng.choice(H.outside)
            triple = tuple(sorted(rng.sample(sorted(H.hits[B]), 3)))
            partners = [b for b in H.by_triple()[triple] if not sets[b] & sets[B]]
            if not partners:
                continue
            B2 = rng.choice(partners)
            checked += 1
            f = _tan_pair(u, p, triple, B, B2)
            if f:
                failures.append(f)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return _report("tan", mode, seed, checked, failures)


def wilbrink_report(space, mode="exhaustive", count=100000, seed=None) -> dict:
    """Wilbrink's conditions (I) = no O'Nan configuration, (II) = (TRA) given (I)."""
    cond1 = not find_onan(space, mode, count, seed)
    cond2 = None
    if cond1:
        tra_mode = mode if mode == "exhaustive" else "sample"
        cond2 = passed(check_tra(space, tra_mode, min(count, 1000), seed))
    return {"condition_I": cond1, "condition_II": cond2}


# -- construction-level checks -----------------------------------------------------

def check_lines(u: HermitianUnital) -> dict:
    """Every line of PG(2, C) meets the unital in 1 or q+1 points; one tangent per point."""
    C = u.ext.C
    failures = []
    checked = 0
    tangents_seen = 0
    for line in all_points(C):
        k = sum(1 for x in points_of_line(C, line) if x in u.index)
        checked += 1
        if k not in (1, u.q + 1):
            failures.append({"line": list(line), "meets": k})
        tangents_seen += k == 1
    if tangents_seen != u.v or len(set(u.tangent)) != u.v:
        failures.append({"reason": f"{tangents_seen} tangent lines for {u.v} points"})
    return _report("lines", "exhaustive", None, checked, failures)


def check_form(u: HermitianUnital) -> dict:
    """h(v, v) = 0 exactly on the unital, over every point of the plane."""
    failures = []
    checked = 0
    for x in all_points(u.ext.C):
        checked += 1
        zero = hermitian_form(u.ext, x, x) == 0
        if zero != (x in u.index) or zero != canonical_member(u.ext, x):
            failures.append(list(x))
    return _report("form", "exhaustive", None, checked, failures)


def check_baer(u: HermitianUnital) -> dict:
    failures = [b for b in range(u.b) if not baer_check(u, b)]
    return _report("baer", "exhaustive", None, u.b, failures)


def check_design(u: LinearSpace, q: int) -> dict:
    """2-(q^3+1, q+1, 1) parameters."""
    failures = []
    if u.v != q ** 3 + 1:
        failures.append({"reason": f"v = {u.v}"})
    if u.block_sizes() != {q + 1}:
        failures.append({"reason": f"block sizes {sorted(u.block_sizes())}"})
    if u.b != q * q * (q * q - q + 1):
        failures.append({"reason": f"b = {u.b}"})
    if not u.is_linear_space():
        failures.append({"reason": "some pair of points lies on no block"})
    return _report("design", "exhaustive", None, u.v * (u.v - 1) // 2, failures)

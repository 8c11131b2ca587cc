"""Hermitian unitals H(C|R) in PG(2, C) for finite C = F_{q^2}, R = F_q.

The point set is ``{[X,Y,Z] : X^s Y + Z^s Z in eps*R}`` where ``s`` is the
involution x -> x^q and eps is the generator of C.  Blocks are the
intersections with secant lines.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import gf
from .gf import FieldElement, FieldSpec, SubfieldEmbedding
from .proj import (DegenerateError, det3, join_coords, normalize, points_of_line,
                   all_points)


class ConstructionError(RuntimeError):
    pass


class QuadExtension:
    """C|R with C = F_{p^2n}, R = F_{p^n} embedded in C, and eps = X in C."""

    def __init__(self, C: FieldSpec, R: FieldSpec, emb: SubfieldEmbedding):
        if C.p != R.p or C.m != 2 * R.m:
            raise gf.FieldError("C must be a quadratic extension of R")
        self.C = C
        self.R = R
        self.emb = emb
        self.p = C.p
        self.n = R.m
        self.q = R.order
        self.sigma_exponent = self.n
        Q = C.order
        self.bar = [C.frob(a, self.n) for a in range(Q)]
        self.eps = C.generator()
        bar = self.bar
        if bar[self.eps] == self.eps:
            raise ConstructionError("eps lies in R")
        self.eps_bar = bar[self.eps]
        self._t = C.add(self.eps, self.eps_bar)
        self._d = C.mul(self.eps, self.eps_bar)
        eps_inv = C.inv(self.eps)
        self.in_eps_R_table = bytearray(
            1 if w == 0 or bar[C.mul(w, eps_inv)] == C.mul(w, eps_inv) else 0 for w in range(Q))
        self.norm_table = [C.mul(a, bar[a]) for a in range(Q)]
        self._check()

    def _check(self):
        C, bar = self.C, self.bar
        e = self.eps
        # eps^2 - t eps + d = 0
        if C.add(C.sub(C.mul(e, e), C.mul(self._t, e)), self._d) != 0:
            raise ConstructionError("eps does not satisfy its quadratic")
        if any(bar[self.emb(r)] != self.emb(r) for r in self.R.elements()):
            raise ConstructionError("sigma does not fix R")
        if any(bar[bar[a]] != a for a in C.elements()):
            raise ConstructionError("sigma is not an involution")
        if not self.emb.contains(self._t) or not self.emb.contains(self._d):
            raise ConstructionError("t or d outside R")

    @property
    def t(self) -> FieldElement:
        return FieldElement(self.R, self.emb.preimage(self._t))

    @property
    def d(self) -> FieldElement:
        return FieldElement(self.R, self.emb.preimage(self._d))

    @property
    def epsilon(self) -> FieldElement:
        return FieldElement(self.C, self.eps)

    def sigma(self, a):
        if isinstance(a, FieldElement):
            return FieldElement(self.C, self.bar[self.C(a).code])
        return self.bar[a]

    def in_R(self, a: int) -> bool:
        return self.bar[a] == a

    def trace(self, a: int) -> int:
        return self.C.add(a, self.bar[a])

    def norm(self, a: int) -> int:
        return self.norm_table[a]

    def R_elements(self) -> list[int]:
        """Codes in C of the elements of R, ascending."""
        return sorted(self.emb.table)

    def describe(self) -> dict:
        return {"q": self.q, "p": self.p, "n": self.n, "modulus": list(self.C.modulus)}

    def __repr__(self):
        return f"QuadExtension(F_{self.C.order}|F_{self.q})"


def make_quad_ext(p: int, n: int, modulus=None) -> QuadExtension:
    if not gf.is_prime(p):
        raise gf.FieldError(f"{p} is not prime")
    if n < 1:
        raise gf.FieldError("n must be at least 1")
    if p ** (2 * n) > gf.MAX_ORDER:
        raise gf.FieldError(f"q^2 = {p}^{2 * n} exceeds {gf.MAX_ORDER}")
    C = gf.make_field(p, 2 * n, modulus)
    R = gf.make_field(p, n)
    return _cached_ext(C, R)


_EXT_CACHE: dict = {}


def _cached_ext(C, R):
    key = (id(C), id(R))
    if key not in _EXT_CACHE:
        _EXT_CACHE[key] = QuadExtension(C, R, gf.embed_subfield(R, C))
    return _EXT_CACHE[key]


def quad_ext_for_order(q: int, modulus=None) -> QuadExtension:
    pk = gf.prime_power(q)
    if pk is None:
        raise gf.FieldError(f"{q} is not a prime power")
    return make_quad_ext(pk[0], pk[1], modulus)


def rel_trace(ext: QuadExtension, w: FieldElement) -> FieldElement:
    w = ext.C(w)
    return FieldElement(ext.C, ext.trace(w.code))


def rel_norm(ext: QuadExtension, w: FieldElement) -> FieldElement:
    w = ext.C(w)
    return FieldElement(ext.C, ext.norm(w.code))


def in_eps_R(ext: QuadExtension, w) -> bool:
    code = ext.C(w).code if isinstance(w, FieldElement) else w
    return bool(ext.in_eps_R_table[code])


def _codes(ext, v):
    return tuple(ext.C(c).code if isinstance(c, FieldElement) else c for c in v)


def hermitian_form(ext: QuadExtension, v, w) -> int:
    """h(v, w) = eps^s X^s Y' - eps Y^s X' + (eps^s - eps) Z^s Z'."""
    C, bar = ext.C, ext.bar
    X, Y, Z = _codes(ext, v)
    X2, Y2, Z2 = _codes(ext, w)
    e, eb = ext.eps, ext.eps_bar
    mul = C.mul
    return C.add(C.sub(mul(eb, mul(bar[X], Y2)), mul(e, mul(bar[Y], X2))),
                 mul(C.sub(eb, e), mul(bar[Z], Z2)))


def canonical_member(ext: QuadExtension, v) -> bool:
    X, Y, Z = v
    C = ext.C
    return bool(ext.in_eps_R_table[C.add(C.mul(ext.bar[X], Y), ext.norm_table[Z])])


@dataclass(frozen=True)
class HermitianMatrix:
    """A nonsingular 3x3 matrix over C with M[j][i] = M[i][j]^s."""

    ext: QuadExtension
    matrix: tuple

    def __post_init__(self):
        M = tuple(tuple(_codes(self.ext, r)) for r in self.matrix)
        object.__setattr__(self, "matrix", M)
        bar = self.ext.bar
        for i in range(3):
            for j in range(3):
                if M[j][i] != bar[M[i][j]]:
                    raise ValueError(f"matrix is not hermitian at ({i},{j})")
        if det3(self.ext.C, M) == 0:
            raise ValueError("hermitian matrix is singular")

    def value(self, v) -> int:
        """v^s . M . v (lies in R)."""
        C, bar, M = self.ext.C, self.ext.bar, self.matrix
        acc = 0
        for i in range(3):
            if v[i]:
                row = 0
                for j in range(3):
                    row = C.add(row, C.mul(M[i][j], v[j]))
                acc = C.add(acc, C.mul(bar[v[i]], row))
        return acc

    def polar(self, v):
        """The line {w : v^s M w = 0}."""
        C, bar, M = self.ext.C, self.ext.bar, self.matrix
        vb = [bar[x] for x in v]
        return normalize(C, tuple(
            C.add(C.add(C.mul(vb[0], M[0][j]), C.mul(vb[1], M[1][j])), C.mul(vb[2], M[2][j]))
            for j in range(3)))


class LinearSpace:
    """Points 0..v-1 and blocks (sorted index tuples), any two points on at most one block."""

    def __init__(self, npoints: int, blocks):
        self.v = npoints
        self.blocks = [tuple(sorted(b)) for b in blocks]
        self.block_sets = [frozenset(b) for b in self.blocks]
        self.blocks_through = [[] for _ in range(npoints)]
        for bi, b in enumerate(self.blocks):
            for x in b:
                self.blocks_through[x].append(bi)
        v = npoints
        self.pair_block = [-1] * (v * v)
        for bi, b in enumerate(self.blocks):
            for i in b:
                for j in b:
                    if i != j:
                        if self.pair_block[i * v + j] != -1:
                            raise ValueError(f"points {i},{j} lie on two blocks")
                        self.pair_block[i * v + j] = bi
        self._block_index = {b: i for i, b in enumerate(self.blocks)}

    @property
    def b(self) -> int:
        return len(self.blocks)

    def block_of(self, i: int, j: int) -> int:
        return self.pair_block[i * self.v + j]

    def block_index(self, pts) -> int:
        return self._block_index.get(tuple(sorted(pts)), -1)

    def is_linear_space(self) -> bool:
        v = self.v
        return all(self.pair_block[i * v + j] >= 0
                   for i in range(v) for j in range(v) if i != j)

    def block_sizes(self) -> set[int]:
        return {len(b) for b in self.blocks}


class HermitianUnital(LinearSpace):
    """A hermitian unital with its embedding in PG(2, C).

    ``points`` are normalized coordinate triples in canonical order;
    ``block_lines[i]`` is the secant line carrying block i and
    ``tangent[i]`` the tangent line at point i.
    """

    def __init__(self, ext: QuadExtension, points, check: bool = True, form=None):
        self.ext = ext
        self.q = ext.q
        self.form = form
        self.points = sorted(points)
        self.index = {p: i for i, p in enumerate(self.points)}
        v = len(self.points)
        q = self.q
        if check and v != q ** 3 + 1:
            raise ConstructionError(f"point set has {v} points, expected {q ** 3 + 1}")
        blocks, lines = self._secant_blocks()
        super().__init__(v, blocks)
        self.block_lines = lines
        self.line_block = {l: i for i, l in enumerate(lines)}
        self.tangent = [self._tangent(i) for i in range(v)]
        if check:
            self.verify()

    def _secant_blocks(self):
        C = self.ext.C
        pts, index = self.points, self.index
        v = len(pts)
        covered = bytearray(v * v)
        found = []
        for i in range(v):
            row = i * v
            for j in range(i + 1, v):
                if covered[row + j]:
                    continue
                line = join_coords(C, pts[i], pts[j])
                block = sorted(index[x] for x in points_of_line(C, line) if x in index)
                for a in block:
                    for c in block:
                        covered[a * v + c] = 1
                found.append((tuple(block), line))
        found.sort()
        return [b for b, _ in found], [l for _, l in found]

    def _tangent(self, i):
        C = self.ext.C
        p = self.points[i]
        secants = {self.block_lines[b] for b in self.blocks_through[i]}
        # lines through p are the joins of p with the points of a line missing p
        k = next(k for k in range(3) if p[k])
        base = tuple(int(i == k) for i in range(3))
        others = [join_coords(C, p, r) for r in points_of_line(C, base)]
        rest = [l for l in others if l not in secants]
        if len(rest) != 1:
            raise ConstructionError(f"point {i} has {len(rest)} tangent lines")
        return rest[0]

    def verify(self):
        q = self.q
        if self.block_sizes() != {q + 1}:
            raise ConstructionError(f"block sizes {self.block_sizes()} != {q + 1}")
        if self.b != q * q * (q * q - q + 1):
            raise ConstructionError(f"{self.b} blocks, expected {q * q * (q * q - q + 1)}")
        for i, l in enumerate(self.tangent):
            on = [x for x in points_of_line(self.ext.C, l) if x in self.index]
            if on != [self.points[i]]:
                raise ConstructionError(f"tangent at point {i} meets the unital in {on}")

    def line_profile(self) -> dict[int, int]:
        """Histogram of |line ∩ H| over all lines of PG(2, C)."""
        C = self.ext.C
        hist: dict[int, int] = {}
        for line in all_points(C):
            k = sum(1 for x in points_of_line(C, line) if x in self.index)
            hist[k] = hist.get(k, 0) + 1
        return hist

    def params(self) -> dict:
        d = self.ext.describe()
        d.update(v=self.v, b=self.b)
        return d

    def contains(self, v) -> bool:
        return normalize(self.ext.C, v) in self.index


def canonical_points(ext: QuadExtension) -> list[tuple[int, int, int]]:
    """Points of H(C|R) by direct parametrisation.

    [0,1,0] together with [1, Y, Z] where Y = eps*r - Z^{q+1} for r in R.
    """
    C = ext.C
    pts = [(0, 1, 0)]
    for z in C.elements():
        nz = ext.norm_table[z]
        for r in ext.R_elements():
            pts.append((1, C.sub(C.mul(ext.eps, r), nz), z))
    return sorted(pts)


def build_unital(ext: QuadExtension, check: bool = True) -> HermitianUnital:
    return HermitianUnital(ext, canonical_points(ext), check=check)


def build_unital_from_matrix(ext: QuadExtension, M: HermitianMatrix,
                             check: bool = True) -> HermitianUnital:
    pts = [v for v in all_points(ext.C) if M.value(v) == 0]
    expected = ext.q ** 3 + 1
    if len(pts) != expected:
        raise ConstructionError(f"matrix model has {len(pts)} points, expected {expected}")
    return HermitianUnital(ext, pts, check=check, form=M)


def tangent_at(u: HermitianUnital, p: int):
    return u.tangent[p]


# -- Baer sublines -------------------------------------------------------------

def _solve_pair(C, a, b, P):
    """(x, y) with x*a + y*b = P for P on the line through a and b."""
    for i in range(3):
        for j in range(i + 1, 3):
            det = C.sub(C.mul(a[i], b[j]), C.mul(a[j], b[i]))
            if det:
                di = C.inv(det)
                x = C.mul(di, C.sub(C.mul(P[i], b[j]), C.mul(P[j], b[i])))
                y = C.mul(di, C.sub(C.mul(a[i], P[j]), C.mul(a[j], P[i])))
                return x, y
    raise DegenerateError("reference points coincide")


def subline_parameters(C: FieldSpec, pts, ref=(0, 1, 2)):
    """Parameters lambda (None for infinity) of pts w.r.t. reference points.

    With p0 = [a], pinf = [b] and p1 = [a + b], each point is [a + lambda b]
    or pinf.
    """
    p0, p1, pinf = (pts[i] for i in ref)
    x, y = _solve_pair(C, p0, pinf, p1)
    if x == 0 or y == 0:
        raise DegenerateError("reference points are not distinct")
    a = tuple(C.mul(x, c) for c in p0)
    b = tuple(C.mul(y, c) for c in pinf)
    out = []
    for P in pts:
        s, t = _solve_pair(C, a, b, P)
        out.append(None if s == 0 else C.div(t, s))
    return out


def is_baer_subline(ext: QuadExtension, pts, ref=(0, 1, 2)) -> bool:
    if len(pts) < 3:
        raise ValueError("a Baer subline needs at least three points")
    params = subline_parameters(ext.C, pts, ref)
    return all(lam is None or ext.in_R(lam) for lam in params)


def baer_check(u: HermitianUnital, b: int, ref=(0, 1, 2)) -> bool:
    pts = [u.points[i] for i in u.blocks[b]]
    return is_baer_subline(u.ext, pts, ref)

"""Points, lines and projective maps of PG(2, K).

Points and lines are triples of field codes.  The canonical representative
has its leftmost nonzero coordinate equal to 1, so equality is tuple
equality and sorting tuples gives the canonical point order.  A line
``(a, b, c)`` is the set of points with ``aX + bY + cZ = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .gf import FieldElement, FieldMismatchError, FieldSpec


class DegenerateError(ValueError):
    pass


def normalize(F: FieldSpec, v) -> tuple[int, int, int]:
    for c in v:
        if c:
            inv = F.inv(c)
            return tuple(F.mul(inv, x) for x in v)
    raise DegenerateError("zero vector has no projective point")


def is_normalized(v) -> bool:
    for c in v:
        if c:
            return c == 1
    return False


def cross(F: FieldSpec, u, v) -> tuple[int, int, int]:
    mul, sub = F.mul, F.sub
    return (
        sub(mul(u[1], v[2]), mul(u[2], v[1])),
        sub(mul(u[2], v[0]), mul(u[0], v[2])),
        sub(mul(u[0], v[1]), mul(u[1], v[0])),
    )


def dot(F: FieldSpec, u, v) -> int:
    mul, add = F.mul, F.add
    return add(add(mul(u[0], v[0]), mul(u[1], v[1])), mul(u[2], v[2]))


def join_coords(F: FieldSpec, p, q) -> tuple[int, int, int]:
    c = cross(F, p, q)
    if not any(c):
        raise DegenerateError(f"points {p} and {q} coincide")
    return normalize(F, c)


meet_coords = join_coords


def points_of_line(F: FieldSpec, line) -> list[tuple[int, int, int]]:
    """All |F|+1 points incident with ``line``, in canonical order."""
    a, b, c = normalize(F, line)
    neg, mul, add = F.neg, F.mul, F.add
    if a:
        # X = -(bY + cZ) over the points (Y:Z) of PG(1)
        pts = [normalize(F, (neg(add(b, mul(c, z))), 1, z)) for z in F.elements()]
        pts.append(normalize(F, (neg(c), 0, 1)))
    elif b:
        nc = neg(c)
        pts = [(1, 0, 0)] + [normalize(F, (x, nc, 1)) for x in F.elements()]
    else:
        pts = [(0, 1, 0)] + [(1, y, 0) for y in F.elements()]
    return sorted(pts)


def all_points(F: FieldSpec):
    """Every point of PG(2, F) in canonical order."""
    yield (0, 0, 1)
    for z in F.elements():
        yield (0, 1, z)
    for y in F.elements():
        for z in F.elements():
            yield (1, y, z)


all_lines = all_points


# -- typed wrappers ---------------------------------------------------------

@dataclass(frozen=True)
class ProjPoint:
    field: FieldSpec
    coords: tuple[int, int, int]

    @classmethod
    def of(cls, F: FieldSpec, *coords) -> "ProjPoint":
        vals = tuple(_code(F, c) for c in coords)
        return cls(F, normalize(F, vals))

    def elements(self) -> tuple[FieldElement, ...]:
        return tuple(FieldElement(self.field, c) for c in self.coords)


@dataclass(frozen=True)
class ProjLine:
    field: FieldSpec
    coords: tuple[int, int, int]

    @classmethod
    def of(cls, F: FieldSpec, *coords) -> "ProjLine":
        vals = tuple(_code(F, c) for c in coords)
        return cls(F, normalize(F, vals))

    def points(self) -> list[ProjPoint]:
        return [ProjPoint(self.field, p) for p in points_of_line(self.field, self.coords)]


def _code(F, c):
    if isinstance(c, FieldElement):
        if c.field is not F:
            raise FieldMismatchError("coordinate from another field")
        return c.code
    return F.from_int(c) if c < 0 else c


def _same_field(*objs):
    F = objs[0].field
    if any(o.field is not F for o in objs):
        raise FieldMismatchError("objects live over different fields")
    return F


def join(p1: ProjPoint, p2: ProjPoint) -> ProjLine:
    F = _same_field(p1, p2)
    return ProjLine(F, join_coords(F, p1.coords, p2.coords))


def meet(l1: ProjLine, l2: ProjLine) -> ProjPoint:
    F = _same_field(l1, l2)
    return ProjPoint(F, meet_coords(F, l1.coords, l2.coords))


def incident(p: ProjPoint, l: ProjLine) -> bool:
    F = _same_field(p, l)
    return dot(F, p.coords, l.coords) == 0


# -- 3x3 matrices -------------------------------------------------------------

def mat_vec(F, M, v):
    mul, add = F.mul, F.add
    return tuple(add(add(mul(r[0], v[0]), mul(r[1], v[1])), mul(r[2], v[2])) for r in M)


def mat_mul(F, A, B):
    mul, add = F.mul, F.add
    return tuple(
        tuple(add(add(mul(A[i][0], B[0][j]), mul(A[i][1], B[1][j])), mul(A[i][2], B[2][j]))
              for j in range(3))
        for i in range(3)
    )


def det3(F, M):
    mul, add, sub = F.mul, F.add, F.sub
    (a, b, c), (d, e, f), (g, h, i) = M
    return add(sub(mul(a, sub(mul(e, i), mul(f, h))), mul(b, sub(mul(d, i), mul(f, g)))),
               mul(c, sub(mul(d, h), mul(e, g))))


def mat_inv(F, M):
    d = det3(F, M)
    if d == 0:
        raise DegenerateError("singular matrix")
    cols = [tuple(M[r][c] for r in range(3)) for c in range(3)]
    # rows of the inverse are cross products of column pairs, scaled by 1/det
    di = F.inv(d)
    rows = [cross(F, cols[1], cols[2]), cross(F, cols[2], cols[0]), cross(F, cols[0], cols[1])]
    return tuple(tuple(F.mul(di, x) for x in r) for r in rows)


def mat_normalize(F, M):
    flat = [x for r in M for x in r]
    for x in flat:
        if x:
            inv = F.inv(x)
            return tuple(tuple(F.mul(inv, y) for y in r) for r in M)
    raise DegenerateError("zero matrix")


def transpose(M):
    return tuple(tuple(M[r][c] for r in range(3)) for c in range(3))


IDENTITY = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


@dataclass(frozen=True)
class ProjectiveMap:
    """A collineation x -> Mx of PG(2, K); ``matrix`` is canonical modulo scalars."""

    field: FieldSpec
    matrix: tuple

    @classmethod
    def of(cls, F: FieldSpec, M) -> "ProjectiveMap":
        M = tuple(tuple(_code(F, x) for x in r) for r in M)
        if det3(F, M) == 0:
            raise DegenerateError("singular matrix")
        return cls(F, mat_normalize(F, M))

    @classmethod
    def identity(cls, F: FieldSpec) -> "ProjectiveMap":
        return cls(F, IDENTITY)

    def __call__(self, v):
        """Apply to a coordinate triple."""
        return normalize(self.field, mat_vec(self.field, self.matrix, v))

    def apply_line(self, line):
        # lines transform by the inverse transpose
        Minv = mat_inv(self.field, self.matrix)
        return normalize(self.field, mat_vec(self.field, transpose(Minv), line))

    def inverse(self) -> "ProjectiveMap":
        return ProjectiveMap(self.field, mat_normalize(self.field, mat_inv(self.field, self.matrix)))

    def compose(self, other: "ProjectiveMap") -> "ProjectiveMap":
        """self after other."""
        return ProjectiveMap(self.field,
                             mat_normalize(self.field, mat_mul(self.field, self.matrix, other.matrix)))


def apply(m: ProjectiveMap, p: ProjPoint) -> ProjPoint:
    _same_field(m, p)
    return ProjPoint(p.field, m(p.coords))


def _solve3(F, cols, rhs):
    """Coefficients alpha with sum(alpha_i * cols_i) = rhs."""
    M = transpose(cols)
    return mat_vec(F, mat_inv(F, M), rhs)


def collinear(F, a, b, c) -> bool:
    return det3(F, (a, b, c)) == 0


def _frame_matrix(F, quad):
    for trio in combinations(range(4), 3):
        if collinear(F, *(quad[i] for i in trio)):
            raise DegenerateError(f"points {[quad[i] for i in trio]} are collinear")
    alpha = _solve3(F, quad[:3], quad[3])
    cols = [tuple(F.mul(alpha[i], x) for x in quad[i]) for i in range(3)]
    return transpose(cols)


def frame_map(F: FieldSpec, src, dst) -> tuple:
    """Matrix (not normalized) of the collineation with src[i] -> dst[i]."""
    A = _frame_matrix(F, src)
    B = _frame_matrix(F, dst)
    return mat_mul(F, B, mat_inv(F, A))


def map_from_frames(src, dst) -> ProjectiveMap:
    """The unique projective map sending the quadrangle src onto dst, in order."""
    F = _same_field(*src, *dst)
    M = frame_map(F, [p.coords for p in src], [p.coords for p in dst])
    return ProjectiveMap(F, mat_normalize(F, M))


class Plane:
    """Interned point and line tables of PG(2, F)."""

    def __init__(self, F: FieldSpec):
        self.field = F
        self.points = list(all_points(F))
        self.point_index = {p: i for i, p in enumerate(self.points)}
        self.lines = self.points
        self.line_index = self.point_index

    def __len__(self):
        return len(self.points)

    def line_points(self, line_idx: int) -> list[int]:
        idx = self.point_index
        return [idx[p] for p in points_of_line(self.field, self.lines[line_idx])]

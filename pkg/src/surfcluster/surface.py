"""Marked surfaces, arcs, triangulations, flips, and exchange matrices.

Polygons are embedded with vertex k at (k, -k^2), so increasing index walks
the boundary clockwise and any vertex triple u < v < w is in clockwise
order.  The annulus is handled in its strip cover: outer marked points lift
to the line y = 1 at x = i/p + Z, inner ones to y = 0 at x = j/q + Z, and
the deck transformation is the unit shift.  Peripheral arcs are drawn as
shallow three-point arches whose depth scales with span^2 so that nested
pockets stay disjoint; crossing numbers are transversal intersection counts
of one fixed lift against all translates of the other arc.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ._geom import DegenerateGeometry, Edge, Point, polyline_crossings, trace_faces


class InvalidArc(ValueError):
    pass


class InvalidTriangulation(ValueError):
    pass


class UnsupportedSurface(ValueError):
    pass


# ---------------------------------------------------------------------------
# surface specifications


class SurfaceSpec:
    """Combinatorial surface descriptor: polygon, annulus, or general."""

    def __init__(self, kind: str, **kw):
        self.kind = kind
        if kind == "polygon":
            self.m = int(kw["m"])
            if self.m < 4:
                raise UnsupportedSurface("polygon needs m >= 4 (rank >= 1)")
            self.genus, self.nboundary = 0, 1
            self.boundary_sizes = (self.m,)
        elif kind == "annulus":
            self.outer = int(kw["outer"])
            self.inner = int(kw["inner"])
            if self.outer < 1 or self.inner < 1:
                raise UnsupportedSurface("annulus needs >= 1 marked point per boundary")
            self.m = self.outer + self.inner
            self.genus, self.nboundary = 0, 2
            self.boundary_sizes = (self.outer, self.inner)
        elif kind == "general":
            self.genus = int(kw["genus"])
            self.boundary_sizes = tuple(int(x) for x in kw["boundaries"])
            if self.genus < 0 or len(self.boundary_sizes) < 1 or any(
                x < 1 for x in self.boundary_sizes
            ):
                raise UnsupportedSurface("general spec needs genus >= 0, boundaries >= 1")
            self.m = sum(self.boundary_sizes)
            self.nboundary = len(self.boundary_sizes)
        else:
            raise UnsupportedSurface(f"unknown surface kind {kind!r}")
        if self.rank < 1:
            raise UnsupportedSurface(f"rank {self.rank} < 1 is rejected")

    @property
    def rank(self) -> int:
        return 6 * self.genus + 3 * self.nboundary + self.m - 6

    def __eq__(self, other):
        return (
            isinstance(other, SurfaceSpec)
            and self.kind == other.kind
            and self.genus == other.genus
            and self.boundary_sizes == other.boundary_sizes
        )

    def __hash__(self):
        return hash((self.kind, self.genus, self.boundary_sizes))

    def __repr__(self):
        if self.kind == "polygon":
            return f"SurfaceSpec(polygon, m={self.m})"
        if self.kind == "annulus":
            return f"SurfaceSpec(annulus, {self.outer}+{self.inner})"
        return f"SurfaceSpec(general, g={self.genus}, b={self.boundary_sizes})"

    @staticmethod
    def polygon(m: int) -> "SurfaceSpec":
        return SurfaceSpec("polygon", m=m)

    @staticmethod
    def annulus(outer: int, inner: int) -> "SurfaceSpec":
        return SurfaceSpec("annulus", outer=outer, inner=inner)

    @staticmethod
    def general(genus: int, boundaries: Sequence[int]) -> "SurfaceSpec":
        return SurfaceSpec("general", genus=genus, boundaries=boundaries)


# ---------------------------------------------------------------------------
# arcs

Endpoint = Tuple[str, int]  # ("out"|"in", index) for the annulus


class PolygonArc:
    """Diagonal of the polygon, oriented s -> t; identity ignores orientation."""

    is_boundary = False
    kind = "polygon"

    def __init__(self, spec: SurfaceSpec, s: int, t: int):
        m = spec.m
        if not (0 <= s < m and 0 <= t < m):
            raise InvalidArc(f"vertex out of range: {s},{t}")
        if (s - t) % m in (0, 1, m - 1):
            raise InvalidArc(f"({s},{t}) is not an internal arc of the {m}-gon")
        self.spec = spec
        self.s = s
        self.t = t

    def key(self):
        return ("pg", min(self.s, self.t), max(self.s, self.t))

    def reversed(self) -> "PolygonArc":
        return PolygonArc(self.spec, self.t, self.s)

    def __eq__(self, other):
        return isinstance(other, PolygonArc) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"PolygonArc({self.s}->{self.t})"

    def to_json(self):
        return [self.s, self.t]


class AnnulusArc:
    """Annulus arc: bridging (out<->in, any winding) or same-boundary arch.

    `winding` counts deck shifts from the s endpoint's base lift to the t
    endpoint, so the lift runs from x = s_idx/p to x = t_idx/p' + winding.
    """

    is_boundary = False
    kind = "annulus"

    def __init__(self, spec: SurfaceSpec, s_end: Endpoint, t_end: Endpoint, winding: int):
        self.spec = spec
        self.s_end = (s_end[0], int(s_end[1]))
        self.t_end = (t_end[0], int(t_end[1]))
        self.winding = int(winding)
        for side, idx in (self.s_end, self.t_end):
            count = spec.outer if side == "out" else spec.inner if side == "in" else None
            if count is None or not (0 <= idx < count):
                raise InvalidArc(f"bad endpoint {(side, idx)}")
        if self.s_end[0] == self.t_end[0]:
            pb = spec.outer if self.s_end[0] == "out" else spec.inner
            span = Fraction(self.t_end[1] - self.s_end[1], pb) + self.winding
            if span == 0 or abs(span) > 1:
                raise InvalidArc(f"peripheral span {span} not in (0,1]")
            pocket = abs(span) * pb - 1
            if pocket < 1:
                raise InvalidArc("peripheral arc would be isotopic to a boundary arc")

    @property
    def bridging(self) -> bool:
        return self.s_end[0] != self.t_end[0]

    def key(self):
        if self.bridging:
            if self.s_end[0] == "out":
                return ("br", self.s_end[1], self.t_end[1], self.winding)
            return ("br", self.t_end[1], self.s_end[1], -self.winding)
        a = (self.s_end[0], self.s_end[1], self.t_end[1], self.winding)
        b = (self.s_end[0], self.t_end[1], self.s_end[1], -self.winding)
        return ("per",) + min(a, b)

    def reversed(self) -> "AnnulusArc":
        return AnnulusArc(self.spec, self.t_end, self.s_end, -self.winding)

    def __eq__(self, other):
        return isinstance(other, AnnulusArc) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"AnnulusArc({self.s_end}->{self.t_end}, w={self.winding})"

    def to_json(self):
        return {
            "from": list(self.s_end),
            "to": list(self.t_end),
            "winding": self.winding,
        }


class GeneralArc:
    """Opaque arc label on a general surface (matrix/seed level only)."""

    is_boundary = False
    kind = "general"

    def __init__(self, label: str):
        self.label = str(label)

    def key(self):
        return ("g", self.label)

    def reversed(self) -> "GeneralArc":
        return self

    def __eq__(self, other):
        return isinstance(other, GeneralArc) and self.label == other.label

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"GeneralArc({self.label})"

    def to_json(self):
        return self.label


class BoundaryArc:
    """Boundary segment from marked point i to i+1 on one boundary circle."""

    is_boundary = True

    def __init__(self, boundary: str, i: int, count: int):
        self.boundary = boundary  # "poly", "out", "in", or "b<k>" for general
        self.i = i
        self.count = count

    @property
    def s_end(self):
        return self.i if self.boundary == "poly" else (self.boundary, self.i)

    @property
    def t_end(self):
        j = (self.i + 1) % self.count
        return j if self.boundary == "poly" else (self.boundary, j)

    def key(self):
        return ("bnd", self.boundary, self.i)

    def reversed(self):
        return self

    def __eq__(self, other):
        return isinstance(other, BoundaryArc) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"BoundaryArc({self.boundary},{self.i})"


Arc = Union[PolygonArc, AnnulusArc, GeneralArc]


# ---------------------------------------------------------------------------
# scenes: exact embeddings of the surface (or its strip cover)

LiftId = Tuple  # polygon: (vertex, 0); annulus: (side, index, deck shift)


class PolygonScene:
    def __init__(self, spec: SurfaceSpec):
        self.spec = spec

    def run(self, fn):
        return fn()

    def point(self, lid: LiftId) -> Point:
        v = lid[0]
        return (Fraction(v), Fraction(-v * v))

    def lift_ids(self, arc, shift: int = 0) -> Tuple[LiftId, LiftId]:
        return (arc.s_end if arc.is_boundary else arc.s, 0), (
            arc.t_end if arc.is_boundary else arc.t,
            0,
        )

    def polyline(self, arc, shift: int = 0) -> List[Point]:
        a, b = self.lift_ids(arc, shift)
        return [self.point(a), self.point(b)]

    def shift_range(self, a, b):
        return [0]

    def resolve_chord(self, lid_a: LiftId, lid_b: LiftId):
        u, v = lid_a[0], lid_b[0]
        m = self.spec.m
        if u == v:
            raise InvalidArc("degenerate chord")
        if (v - u) % m == 1:
            return ("boundary", ("poly", u))
        if (u - v) % m == 1:
            return ("boundary", ("poly", v))
        return ("arc", PolygonArc(self.spec, u, v))

    def window_shifts(self):
        return [0]

    def safe(self, lid: LiftId) -> bool:
        return True


class AnnulusScene:
    def __init__(self, spec: SurfaceSpec):
        self.spec = spec
        self._depth_den = 64 * spec.outer * spec.inner

    def run(self, fn):
        for _ in range(50):
            try:
                return fn()
            except DegenerateGeometry:
                self._depth_den *= 7
        raise RuntimeError("persistent degenerate geometry in strip model")

    def _count(self, side: str) -> int:
        return self.spec.outer if side == "out" else self.spec.inner

    def norm_id(self, side: str, idx: int, k: int) -> LiftId:
        c = self._count(side)
        extra, idx = divmod(idx, c)
        return (side, idx, k + extra)

    def point(self, lid: LiftId) -> Point:
        side, idx, k = lid
        x = Fraction(idx, self._count(side)) + k
        return (x, Fraction(1 if side == "out" else 0))

    def lift_ids(self, arc, shift: int = 0) -> Tuple[LiftId, LiftId]:
        if arc.is_boundary:
            side = arc.boundary
            return (
                self.norm_id(side, arc.i, shift),
                self.norm_id(side, arc.i + 1, shift),
            )
        sa = self.norm_id(arc.s_end[0], arc.s_end[1], shift)
        ta = self.norm_id(arc.t_end[0], arc.t_end[1], shift + arc.winding)
        return sa, ta

    def _depth(self, span: Fraction) -> Fraction:
        return span * span / self._depth_den

    def polyline(self, arc, shift: int = 0) -> List[Point]:
        a, b = self.lift_ids(arc, shift)
        pa, pb = self.point(a), self.point(b)
        if arc.is_boundary or pa[1] != pb[1]:
            return [pa, pb]
        # same-boundary arch; dip into the surface, clearing marked points
        span = abs(pb[0] - pa[0])
        dip = self._depth(span)
        midx = (pa[0] + pb[0]) / 2
        midy = pa[1] - dip if pa[1] == 1 else pa[1] + dip
        return [pa, (midx, midy), pb]

    def x_extent(self, arc, shift: int = 0):
        pts = [self.point(i) for i in self.lift_ids(arc, shift)]
        xs = [p[0] for p in pts]
        return min(xs), max(xs)

    def shift_range(self, a, b):
        """Deck shifts s such that lifts of b at s can meet the 0-lift of a."""
        alo, ahi = self.x_extent(a, 0)
        blo, bhi = self.x_extent(b, 0)
        lo = alo - bhi
        hi = ahi - blo
        return range(ceil(lo) - 1, floor(hi) + 2)

    def resolve_chord(self, lid_a: LiftId, lid_b: LiftId):
        (sa, ia, ka), (sb, ib, kb) = lid_a, lid_b
        if sa != sb:
            return (
                "arc",
                AnnulusArc(self.spec, (sa, ia), (sb, ib), kb - ka),
            )
        c = self._count(sa)
        delta = Fraction(ib - ia, c) + (kb - ka)
        if delta == 0:
            raise InvalidArc("degenerate chord between equal lifts")
        if abs(delta) > 1:
            raise InvalidArc(f"chord span {delta} exceeds one period")
        pocket = abs(delta) * c - 1
        if pocket == 0:
            i = ia if delta > 0 else ib
            return ("boundary", (sa, i % c))
        return ("arc", AnnulusArc(self.spec, (sa, ia), (sb, ib), kb - ka))

    def window_shifts(self):
        return None  # computed per triangulation from windings


def scene_for(spec: SurfaceSpec):
    if spec.kind == "polygon":
        return PolygonScene(spec)
    if spec.kind == "annulus":
        return AnnulusScene(spec)
    raise UnsupportedSurface("general surfaces have no geometric scene")


# ---------------------------------------------------------------------------
# crossing numbers


def crossing_number(a, b, spec: SurfaceSpec) -> int:
    """Minimal crossing count e(a, b) between two arcs."""
    if spec.kind == "general":
        raise UnsupportedSurface("crossing numbers unsupported on general surfaces")
    if a.is_boundary or b.is_boundary:
        return 0
    scene = scene_for(spec)

    def compute():
        total = 0
        A = scene.polyline(a, 0)
        same = a.key() == b.key()
        for s in scene.shift_range(a, b):
            if same and s == 0:
                continue
            total += len(polyline_crossings(A, scene.polyline(b, s)))
        return total

    return scene.run(compute)


# ---------------------------------------------------------------------------
# extended exchange matrix


class ExtendedMatrix:
    """(n+m) x n integer matrix; rows/cols are 1-based in the API."""

    def __init__(self, rows: List[List[int]], n: int):
        self.rows = [list(r) for r in rows]
        self.n = n

    def entry(self, i: int, j: int) -> int:
        return self.rows[i - 1][j - 1]

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def principal(self) -> List[List[int]]:
        return [row[: self.n] for row in self.rows[: self.n]]

    def column(self, j: int) -> List[int]:
        return [row[j - 1] for row in self.rows]

    def mutate(self, k: int) -> "ExtendedMatrix":
        """Matrix mutation in direction k (1 <= k <= n)."""
        if not (1 <= k <= self.n):
            raise ValueError(f"mutation direction {k} out of range")
        old = self.rows
        kk = k - 1
        new = []
        for i, row in enumerate(old):
            nr = []
            for j in range(self.n):
                if i == kk or j == kk:
                    nr.append(-row[j])
                else:
                    bik = row[kk]
                    bkj = old[kk][j]
                    nr.append(row[j] + (abs(bik) * bkj + bik * abs(bkj)) // 2)
            new.append(nr)
        return ExtendedMatrix(new, self.n)

    def __eq__(self, other):
        return (
            isinstance(other, ExtendedMatrix)
            and self.n == other.n
            and self.rows == other.rows
        )

    def __repr__(self):
        return f"ExtendedMatrix({self.rows})"


# ---------------------------------------------------------------------------
# triangulations


@dataclass(frozen=True)
class TriFace:
    """One triangle: sides/vertices in ccw walk order (side i: v[i] -> v[i+1]).

    Sides are (arc_index, relative deck shift); the representative is
    normalized so the minimum side shift is zero.
    """

    sides: Tuple[Tuple[int, int], ...]
    vertices: Tuple[LiftId, ...]

    def cw_indices(self) -> Tuple[int, ...]:
        return tuple(idx for idx, _ in reversed(self.sides))


@dataclass(frozen=True)
class CrossRec:
    """One crossing of a lifted arc gamma~ with a lifted triangulation arc."""

    arc_index: int
    shift: int
    param_gamma: Fraction
    param_arc: Fraction


class Triangulation:
    """A triangulation: n internal arcs (input order) + m implicit boundary arcs.

    Arc indices are 1-based: internal 1..n, then boundary n+1..n+m in
    boundary order (outer first for the annulus).  Instances are immutable;
    flips return new objects.
    """

    def __init__(self, spec: SurfaceSpec, internal_arcs: Sequence, triangles=None):
        self.spec = spec
        self.internal_arcs = list(internal_arcs)
        n, m = spec.rank, spec.m
        if len(self.internal_arcs) != n:
            raise InvalidTriangulation(
                f"need {n} internal arcs (6g+3b+m-6), got {len(self.internal_arcs)}"
            )
        keys = [a.key() for a in self.internal_arcs]
        if len(set(keys)) != n:
            raise InvalidTriangulation("duplicate internal arcs")
        self.boundary_arcs: List[BoundaryArc] = []
        if spec.kind == "polygon":
            self.boundary_arcs = [BoundaryArc("poly", i, spec.m) for i in range(spec.m)]
        elif spec.kind == "annulus":
            self.boundary_arcs = [
                BoundaryArc("out", i, spec.outer) for i in range(spec.outer)
            ] + [BoundaryArc("in", j, spec.inner) for j in range(spec.inner)]
        else:
            for bi, cnt in enumerate(spec.boundary_sizes):
                self.boundary_arcs += [BoundaryArc(f"b{bi}", i, cnt) for i in range(cnt)]
        self.arcs = [None] + self.internal_arcs + self.boundary_arcs  # 1-based
        self._index = {a.key(): i for i, a in enumerate(self.arcs[1:], start=1)}

        if spec.kind == "general":
            if triangles is None:
                raise InvalidTriangulation(
                    "general surfaces need explicit clockwise triangle triples"
                )
            self.faces = [
                TriFace(sides=tuple((i, 0) for i in reversed(tri)), vertices=())
                for tri in triangles
            ]
            self.scene = None
        else:
            self.scene = scene_for(spec)
            for i in range(n):
                for j in range(i + 1, n):
                    e = crossing_number(self.internal_arcs[i], self.internal_arcs[j], spec)
                    if e:
                        raise InvalidTriangulation(
                            f"arcs {i + 1} and {j + 1} cross {e} times: "
                            f"{self.internal_arcs[i]!r} x {self.internal_arcs[j]!r}"
                        )
                if crossing_number(self.internal_arcs[i], self.internal_arcs[i], spec):
                    raise InvalidTriangulation(f"arc {i + 1} crosses itself")
            self.faces = self.scene.run(self._derive_faces)
        self._check_face_counts()

    # -- structure -------------------------------------------------------

    @property
    def n(self) -> int:
        return self.spec.rank

    @property
    def m(self) -> int:
        return self.spec.m

    def index_of(self, arc) -> Optional[int]:
        return self._index.get(arc.key())

    def __eq__(self, other):
        return (
            isinstance(other, Triangulation)
            and self.spec == other.spec
            and [a.key() for a in self.internal_arcs]
            == [a.key() for a in other.internal_arcs]
        )

    def __repr__(self):
        return f"Triangulation({self.spec!r}, {self.internal_arcs!r})"

    def _check_face_counts(self):
        n, m = self.n, self.m
        if 3 * len(self.faces) != 2 * n + m:
            raise InvalidTriangulation(
                f"expected {(2 * n + m) / 3} triangles, derived {len(self.faces)}"
            )
        count = {i: 0 for i in range(1, n + m + 1)}
        for f in self.faces:
            idxs = [i for i, _ in f.sides]
            if len(set(f.sides)) != 3:
                raise InvalidTriangulation(f"triangle with repeated side: {f}")
            if len(set(idxs)) != 3:
                raise InvalidTriangulation(f"triangle sides not distinct: {idxs}")
            for i in idxs:
                count[i] += 1
        for i in range(1, n + 1):
            if count[i] != 2:
                raise InvalidTriangulation(f"internal arc {i} lies in {count[i]} triangles")
        for i in range(n + 1, n + m + 1):
            if count[i] != 1:
                raise InvalidTriangulation(f"boundary arc {i} lies in {count[i]} triangles")

    def _winding_bound(self) -> int:
        w = 1
        for a in self.internal_arcs:
            if isinstance(a, AnnulusArc):
                w = max(w, abs(a.winding))
        return w

    def _derive_faces(self) -> List[TriFace]:
        scene = self.scene
        if self.spec.kind == "polygon":
            shifts = [0]
            safe_limit = None
        else:
            E = self._winding_bound()
            shifts = range(-(2 * E + 6), 2 * E + 7)
            safe_limit = E + 2
        edges = []
        for idx in range(1, self.n + self.m + 1):
            arc = self.arcs[idx]
            for s in shifts:
                poly = scene.polyline(arc, s)
                va, vb = scene.lift_ids(arc, s)
                dir_a = (poly[1][0] - poly[0][0], poly[1][1] - poly[0][1])
                dir_b = (poly[-2][0] - poly[-1][0], poly[-2][1] - poly[-1][1])
                edges.append(Edge((idx, s), va, vb, dir_a, dir_b))
        pts = {}
        for e in edges:
            pts[e.va] = scene.point(e.va)
            pts[e.vb] = scene.point(e.vb)
        emap = {e.eid: e for e in edges}
        faces = trace_faces(edges)
        reps = {}
        for face in faces:
            if len(face) != 3:
                continue
            verts = []
            sides = []
            ok = True
            for eid, fwd in face:
                e = emap[eid]
                v = e.va if fwd else e.vb
                if safe_limit is not None and abs(pts[v][0]) > safe_limit:
                    ok = False
                    break
                verts.append(v)
                sides.append((eid[0], eid[1]))
            if not ok:
                continue
            delta = min(s for _, s in sides)
            sides = [(i, s - delta) for i, s in sides]
            if self.spec.kind == "annulus":
                verts = [(side, idx, k - delta) for side, idx, k in verts]
            rots = [
                (tuple(sides[r:] + sides[:r]), tuple(verts[r:] + verts[:r]))
                for r in range(3)
            ]
            sides_c, verts_c = min(rots)
            reps[sides_c] = TriFace(sides=sides_c, vertices=verts_c)
        return list(reps.values())

    def face_instances(self, arc_index: int, shift: int = 0):
        """Lifted triangles having (arc_index, shift) as a side."""
        out = []
        for f in self.faces:
            for i, (idx, r) in enumerate(f.sides):
                if idx == arc_index:
                    out.append((f, shift - r))
        return out

    def face_vertices_at(self, face: TriFace, inst_shift: int):
        return [(side, idx, k + inst_shift) for side, idx, k in face.vertices]

    # -- crossings of an arc with the triangulation ----------------------

    def crossing_records(self, gamma) -> List[CrossRec]:
        """All crossings of gamma's 0-lift with lifted internal arcs,
        ordered along gamma."""
        if self.spec.kind == "general":
            raise UnsupportedSurface("no crossing records on general surfaces")
        scene = self.scene

        def compute():
            A = scene.polyline(gamma, 0)
            recs = []
            for idx in range(1, self.n + 1):
                arc = self.arcs[idx]
                same = arc.key() == gamma.key()
                for s in scene.shift_range(gamma, arc):
                    if same and s == 0:
                        continue
                    for pa, pb, _ in polyline_crossings(A, scene.polyline(arc, s)):
                        recs.append(CrossRec(idx, s, pa, pb))
            recs.sort(key=lambda r: r.param_gamma)
            for r1, r2 in zip(recs, recs[1:]):
                if r1.param_gamma == r2.param_gamma:
                    raise DegenerateGeometry("coincident crossing parameters")
            return recs

        return scene.run(compute)

    def crossing_total(self, gamma) -> int:
        if gamma.is_boundary or self.index_of(gamma) is not None:
            return 0
        return len(self.crossing_records(gamma))

    # -- flips ------------------------------------------------------------

    def flip(self, k: int):
        """Flip internal arc k; returns (new_triangulation, new_arc)."""
        if not (1 <= k <= self.n):
            raise ValueError(f"flip index {k} out of range 1..{self.n}")
        if self.spec.kind == "general":
            return self._flip_general(k)
        inst = self.face_instances(k, 0)
        if len(inst) != 2:
            raise InvalidTriangulation(f"arc {k} has {len(inst)} adjacent triangles")
        fars = []
        old = self.arcs[k]
        sa, ta = self.scene.lift_ids(old, 0)
        for face, s in sorted(inst, key=lambda fs: (fs[1], fs[0].sides)):
            verts = self.face_vertices_at(face, s) if self.spec.kind == "annulus" else [
                v for v in face.vertices
            ]
            far = [v for v in verts if v != sa and v != ta]
            if len(far) != 1:
                raise InvalidTriangulation("flip quadrilateral is degenerate")
            fars.append(far[0])
        kind, payload = self.scene.resolve_chord(fars[0], fars[1])
        if kind != "arc":
            raise InvalidTriangulation("flip produced a boundary arc")
        new_arcs = list(self.internal_arcs)
        new_arcs[k - 1] = payload
        return Triangulation(self.spec, new_arcs), payload

    def _flip_general(self, k: int):
        tris = [list(f.cw_indices()) for f in self.faces]
        touching = [t for t in tris if k in t]
        if len(touching) != 2:
            raise InvalidTriangulation(f"arc {k} is in {len(touching)} triangles")

        def rot(t):
            while t[2] != k:
                t = t[1:] + t[:1]
            return t

        t1, t2 = rot(touching[0]), rot(touching[1])
        label = f"{self.internal_arcs[k - 1].label}'"
        existing = {a.label for a in self.internal_arcs if isinstance(a, GeneralArc)}
        while label in existing:
            label += "'"
        new_arc = GeneralArc(label)
        new_tris = [t for t in tris if k not in t]
        new_tris.append([t1[1], t2[0], k])
        new_tris.append([t2[1], t1[0], k])
        new_arcs = list(self.internal_arcs)
        new_arcs[k - 1] = new_arc
        return (
            Triangulation(self.spec, new_arcs, triangles=new_tris),
            new_arc,
        )


def build_matrix(t: Triangulation) -> ExtendedMatrix:
    """Signed adjacency matrix: +1 when column arc follows row arc clockwise
    inside a shared triangle, summed over triangles."""
    n, m = t.n, t.m
    rows = [[0] * n for _ in range(n + m)]
    for f in t.faces:
        cw = f.cw_indices()
        for a in range(3):
            u, v = cw[a], cw[(a + 1) % 3]
            if v <= n:
                rows[u - 1][v - 1] += 1
            if u <= n:
                rows[v - 1][u - 1] -= 1
    mat = ExtendedMatrix(rows, n)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if mat.entry(i, j) != -mat.entry(j, i):
                raise InvalidTriangulation("principal part is not skew-symmetric")
    for row in rows:
        for x in row:
            if abs(x) > 2:
                raise InvalidTriangulation(f"matrix entry {x} out of range")
    return mat


# ---------------------------------------------------------------------------
# the first-crossing quadrilateral (simply connected case)


@dataclass
class Quadrilateral:
    tau2: object
    tau1: object
    tau3: object
    rho: object
    sigma: object


def quadrilateral_of(t: Triangulation, gamma) -> Quadrilateral:
    """First-crossing exchange quadrilateral of gamma: gamma and tau2 are its
    diagonals, tau1/tau3 are triangulation (or boundary) arcs at gamma's
    start, rho opposes tau1 and sigma opposes tau3."""
    if t.spec.kind != "polygon":
        raise UnsupportedSurface(
            "quadrilateral_of needs a simply connected surface; lift first"
        )
    if t.index_of(gamma) is not None:
        raise InvalidArc("gamma is already a triangulation arc")
    recs = t.crossing_records(gamma)
    first = recs[0]
    tau2 = t.arcs[first.arc_index]
    a_id, b_id = t.scene.lift_ids(gamma, 0)
    d_id, c_id = t.scene.lift_ids(tau2, first.shift)
    inst = t.face_instances(first.arc_index, first.shift)
    side_face = [f for f, s in inst if a_id in f.vertices]
    if len(side_face) != 1:
        raise InvalidTriangulation("cannot locate the start-side triangle")
    f0 = side_face[0]

    def side_with(p, q):
        for (idx, r), i in zip(f0.sides, range(3)):
            arc = t.arcs[idx]
            ends = set(t.scene.lift_ids(arc, r))
            if ends == {p, q}:
                return t.arcs[idx]
        raise InvalidTriangulation("quadrilateral side missing")

    tau1 = side_with(a_id, d_id)
    tau3 = side_with(a_id, c_id)

    def chord(u, v):
        kind, payload = t.scene.resolve_chord(u, v)
        if kind == "boundary":
            bid, i = payload
            for b in t.boundary_arcs:
                if b.boundary == bid and b.i == i:
                    return b
            raise InvalidTriangulation("boundary arc lookup failed")
        return payload

    rho = chord(c_id, b_id)
    sigma = chord(d_id, b_id)
    return Quadrilateral(tau2=tau2, tau1=tau1, tau3=tau3, rho=rho, sigma=sigma)


# ---------------------------------------------------------------------------
# JSON schema


def surface_from_json(obj: dict) -> SurfaceSpec:
    kind = obj.get("kind")
    if kind == "polygon":
        return SurfaceSpec.polygon(obj["m"])
    if kind == "annulus":
        return SurfaceSpec.annulus(obj["outer"], obj["inner"])
    if kind == "general":
        return SurfaceSpec.general(obj["genus"], obj["boundaries"])
    raise UnsupportedSurface(f"unknown surface kind {kind!r}")


def arc_from_json(spec: SurfaceSpec, obj) -> Arc:
    if spec.kind == "polygon":
        if not (isinstance(obj, (list, tuple)) and len(obj) == 2):
            raise InvalidArc(f"polygon arc must be a vertex pair, got {obj!r}")
        return PolygonArc(spec, int(obj[0]), int(obj[1]))
    if spec.kind == "annulus":
        return AnnulusArc(
            spec,
            (obj["from"][0], int(obj["from"][1])),
            (obj["to"][0], int(obj["to"][1])),
            int(obj.get("winding", 0)),
        )
    return GeneralArc(str(obj))


def triangulation_from_json(obj: dict) -> Triangulation:
    spec = surface_from_json(obj["surface"])
    arcs = [arc_from_json(spec, a) for a in obj["arcs"]]
    tris = obj.get("triangles")
    return Triangulation(spec, arcs, triangles=tris)

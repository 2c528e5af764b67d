"""Exact 2D geometry helpers: polyline crossings and face tracing.

All coordinates are ints or fractions.Fraction; every predicate is exact.
Representative curves are polylines chosen elsewhere so that transversal
intersection counts equal minimal crossing numbers; any contact that is
not a clean transversal crossing or a shared terminal raises
DegenerateGeometry so the caller can perturb its representatives and retry.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key
from typing import Dict, Hashable, List, Sequence, Tuple

Point = Tuple[Fraction, Fraction]
Vec = Tuple[Fraction, Fraction]


class DegenerateGeometry(Exception):
    pass


def vsub(a: Point, b: Point) -> Vec:
    return (a[0] - b[0], a[1] - b[1])


def vcross(a: Vec, b: Vec):
    return a[0] * b[1] - a[1] * b[0]


def vdot(a: Vec, b: Vec):
    return a[0] * b[0] + a[1] * b[1]


def _seg_params(p1: Point, p2: Point, q1: Point, q2: Point):
    """Intersection params (t, u) of segments p1p2, q1q2, or None.

    Collinear overlaps of positive length raise DegenerateGeometry;
    collinear single-point touches return None (never transversal).
    """
    d1 = vsub(p2, p1)
    d2 = vsub(q2, q1)
    den = vcross(d1, d2)
    r = vsub(q1, p1)
    if den == 0:
        if vcross(r, d1) != 0:
            return None
        # collinear: check overlap extent via projection on d1
        L = vdot(d1, d1)
        if L == 0:
            raise DegenerateGeometry("zero-length segment")
        a0, a1 = 0, L
        b0 = vdot(vsub(q1, p1), d1)
        b1 = vdot(vsub(q2, p1), d1)
        lo, hi = min(b0, b1), max(b0, b1)
        if min(a1, hi) > max(a0, lo):
            raise DegenerateGeometry("collinear overlap")
        return None
    t = Fraction(vcross(r, d2), den)
    u = Fraction(vcross(r, d1), den)
    if t < 0 or t > 1 or u < 0 or u > 1:
        return None
    return t, u


def polyline_crossings(A: Sequence[Point], B: Sequence[Point]):
    """Transversal crossings of two polylines as (param_A, param_B, point).

    Params are Fractions in [0, len-1]; contacts at shared terminals are
    skipped; any other endpoint/vertex contact raises DegenerateGeometry.
    """
    out = []
    na, nb = len(A) - 1, len(B) - 1
    for i in range(na):
        p1, p2 = A[i], A[i + 1]
        for j in range(nb):
            q1, q2 = B[j], B[j + 1]
            res = _seg_params(p1, p2, q1, q2)
            if res is None:
                continue
            t, u = res
            pa = i + t
            pb = j + u
            a_terminal = pa == 0 or pa == na
            b_terminal = pb == 0 or pb == nb
            if a_terminal and b_terminal:
                continue  # shared marked point
            if a_terminal or b_terminal:
                raise DegenerateGeometry("polyline terminal touches another curve")
            if pa == int(pa) or pb == int(pb):
                raise DegenerateGeometry("crossing at a polyline vertex")
            d1 = vsub(p2, p1)
            pt = (p1[0] + t * d1[0], p1[1] + t * d1[1])
            out.append((pa, pb, pt))
    # each segment pair contributes at most once, but two segment pairs can
    # see the same geometric point only if it sits on a vertex (excluded)
    return out


def _angle_cmp(u: Vec, v: Vec) -> int:
    """Counterclockwise angular order starting just above direction (1,0)."""

    def half(w: Vec) -> int:
        if w[1] > 0 or (w[1] == 0 and w[0] > 0):
            return 0
        return 1

    hu, hv = half(u), half(v)
    if hu != hv:
        return -1 if hu < hv else 1
    c = vcross(u, v)
    if c > 0:
        return -1
    if c < 0:
        return 1
    raise DegenerateGeometry("two edge-ends share a direction")


class Edge:
    """Undirected edge between vertex ids with exact end directions."""

    __slots__ = ("eid", "va", "vb", "dir_a", "dir_b")

    def __init__(self, eid: Hashable, va: Hashable, vb: Hashable, dir_a: Vec, dir_b: Vec):
        self.eid = eid
        self.va = va
        self.vb = vb
        self.dir_a = dir_a
        self.dir_b = dir_b


def trace_faces(edges: List[Edge]):
    """Trace faces of an embedded graph; interior faces come out ccw.

    Returns a list of faces, each a list of half-edges (eid, forward_flag);
    a half-edge (e, True) walks va -> vb.  The next half-edge after u -> v is
    the ccw successor at v of the reversed half-edge v -> u.
    """
    out_at: Dict[Hashable, List[Tuple[Tuple[Hashable, bool], Vec]]] = {}
    for e in edges:
        out_at.setdefault(e.va, []).append(((e.eid, True), e.dir_a))
        out_at.setdefault(e.vb, []).append(((e.eid, False), e.dir_b))
    order: Dict[Hashable, List[Tuple[Hashable, bool]]] = {}
    pos: Dict[Tuple[Hashable, Tuple[Hashable, bool]], int] = {}
    for v, lst in out_at.items():
        lst.sort(key=cmp_to_key(lambda a, b: _angle_cmp(a[1], b[1])))
        order[v] = [he for he, _ in lst]
        for i, (he, _) in enumerate(lst):
            pos[(v, he)] = i
    emap = {e.eid: e for e in edges}

    def target(he):
        e = emap[he[0]]
        return e.vb if he[1] else e.va

    def nxt(he):
        v = target(he)
        twin = (he[0], not he[1])
        lst = order[v]
        i = pos[(v, twin)]
        return lst[(i + 1) % len(lst)]

    faces = []
    seen = set()
    for e in edges:
        for fwd in (True, False):
            h0 = (e.eid, fwd)
            if h0 in seen:
                continue
            face = []
            h = h0
            while True:
                face.append(h)
                seen.add(h)
                h = nxt(h)
                if h == h0:
                    break
                if len(face) > 4 * len(edges) + 8:
                    raise DegenerateGeometry("runaway face walk")
            faces.append(face)
    return faces

"""Path-sum cluster expansion on a triangulated surface.

An arc gamma not in the triangulation is expanded as a sum of weights of
admissible odd-length walks on triangulation arcs.  The walk axioms: odd
length (T1), even steps cross gamma (T2), each arc is used at even
positions at most its crossing count with gamma (T3), the even steps pick
up crossing points in strictly increasing order along gamma (T4), and the
walk follows gamma's homotopy class between picked-up points (T5).

Enumeration happens in the cover fragment: the chain of lifted triangles
crossed by the lifted arc.  There the homotopy axiom is automatic, every
fragment arc crosses the lift at most once, and no fragment arc can repeat
inside a valid walk, so a label-monotone depth-first search with a no-reuse
prune is finite and complete.  Projection back to the surface is a
bijection onto the admissible walks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .laurent import LaurentPoly
from .surface import (
    InvalidArc,
    Triangulation,
    UnsupportedSurface,
)

Lift = Tuple[int, int]  # (arc index, deck shift)


@dataclass(frozen=True)
class TPath:
    """Odd walk on triangulation arcs: steps (arc_index, direction)."""

    steps: Tuple[Tuple[int, int], ...]
    witness: Tuple[int, ...]  # crossing labels at even positions

    def tokens(self) -> List[str]:
        return [f"t{i}" + ("-" if d < 0 else "") for i, d in self.steps]

    @staticmethod
    def from_tokens(tokens: Sequence[str]) -> "TPath":
        steps = []
        for tok in tokens:
            if not tok.startswith("t"):
                raise ValueError(f"bad path token {tok!r}")
            if tok.endswith("-"):
                steps.append((int(tok[1:-1]), -1))
            else:
                steps.append((int(tok[1:]), 1))
        return TPath(steps=tuple(steps), witness=())

    def weight(self) -> LaurentPoly:
        exps: Dict[int, int] = {}
        for pos, (idx, _) in enumerate(self.steps, start=1):
            exps[idx] = exps.get(idx, 0) + (1 if pos % 2 else -1)
        return LaurentPoly.monomial(1, exps)

    def to_json(self) -> list:
        return self.tokens()


class FragmentArc:
    """One lifted arc of the cover fragment."""

    __slots__ = ("lift", "s_id", "t_id", "label")

    def __init__(self, lift: Lift, s_id, t_id, label: Optional[int]):
        self.lift = lift
        self.s_id = s_id
        self.t_id = t_id
        self.label = label  # crossing label along gamma, or None

    def __repr__(self):
        return f"FragmentArc({self.lift}, {self.s_id}->{self.t_id}, label={self.label})"


class CoverFragment:
    """Chain of lifted triangles crossed by the lifted arc, with projection.

    The fragment is a triangulated polygon: its internal arcs are exactly
    the crossed lifts (labelled 1..k in order along gamma) and its boundary
    cycle consists of the uncrossed sides.
    """

    def __init__(self, t: Triangulation, gamma):
        if t.spec.kind == "general":
            raise UnsupportedSurface("no cover fragments on general surfaces")
        if t.index_of(gamma) is not None:
            raise InvalidArc("gamma lies in the triangulation")
        self.t = t
        self.gamma = gamma
        recs = t.crossing_records(gamma)
        if not recs:
            raise InvalidArc("gamma crosses nothing; it should be a boundary arc")
        self.lifts: List[Lift] = [(r.arc_index, r.shift) for r in recs]
        k = len(self.lifts)
        self.a_id, self.b_id = t.scene.lift_ids(gamma, 0)

        inst = [set(self._inst(lift)) for lift in self.lifts]
        chain: List[Tuple] = []
        for j in range(k - 1):
            common = inst[j] & inst[j + 1]
            if len(common) != 1:
                raise InvalidArc(f"crossings {j + 1},{j + 2} share {len(common)} faces")
            chain.append(next(iter(common)))
        if k == 1:
            both = sorted(inst[0], key=self._inst_key)
            first = [fi for fi in both if self.a_id in self._verts(fi)]
            if len(first) != 1:
                raise InvalidArc("cannot orient the single-crossing fragment")
            chain = [first[0], next(f for f in both if f != first[0])]
        else:
            t0 = [fi for fi in inst[0] if fi != chain[0]]
            tk = [fi for fi in inst[-1] if fi != chain[-1]]
            if len(t0) != 1 or len(tk) != 1:
                raise InvalidArc("fragment ends are ambiguous")
            chain = t0 + chain + tk
        self.chain = chain
        if self.a_id not in self._verts(chain[0]) or self.b_id not in self._verts(chain[-1]):
            raise InvalidArc("fragment does not join the endpoints of gamma")

        label_of = {lift: j + 1 for j, lift in enumerate(self.lifts)}
        arcs: Dict[Lift, FragmentArc] = {}
        for fi in chain:
            for lift in self._sides(fi):
                if lift not in arcs:
                    s_id, t_id = t.scene.lift_ids(t.arcs[lift[0]], lift[1])
                    arcs[lift] = FragmentArc(lift, s_id, t_id, label_of.get(lift))
        self.arcs = arcs
        self.vertices = sorted({a.s_id for a in arcs.values()} | {a.t_id for a in arcs.values()})
        self.boundary_cycle = self._boundary_cycle()

    def _inst(self, lift: Lift):
        return [(f, s) for f, s in self.t.face_instances(lift[0], lift[1])]

    @staticmethod
    def _inst_key(fi):
        face, s = fi
        return (s, face.sides)

    def _sides(self, fi) -> List[Lift]:
        face, s = fi
        return [(idx, r + s) for idx, r in face.sides]

    def _verts(self, fi):
        face, s = fi
        if self.t.spec.kind == "polygon":
            return list(face.vertices)
        return self.t.face_vertices_at(face, s)

    def _boundary_cycle(self):
        crossed = set(self.lifts)
        edges = [a for lift, a in self.arcs.items() if lift not in crossed]
        if len({a.lift for a in edges}) != len(edges):
            raise InvalidArc("fragment boundary is degenerate")
        adj: Dict[Tuple, List[Tuple]] = {}
        for a in edges:
            adj.setdefault(a.s_id, []).append(a.t_id)
            adj.setdefault(a.t_id, []).append(a.s_id)
        for v, nbrs in adj.items():
            if len(nbrs) != 2:
                raise InvalidArc(f"fragment boundary vertex {v} has degree {len(nbrs)}")
        cycle = [self.a_id]
        prev = None
        while True:
            nbrs = adj[cycle[-1]]
            nxt = nbrs[0] if nbrs[0] != prev else nbrs[1]
            if nxt == cycle[0]:
                break
            prev = cycle[-1]
            cycle.append(nxt)
        if len(cycle) != len(self.vertices):
            raise InvalidArc("fragment boundary cycle misses vertices")
        return cycle

    # -- enumeration -------------------------------------------------------

    def admissible_walks(self) -> List[TPath]:
        incid: Dict[Tuple, List[Tuple[FragmentArc, int]]] = {}
        for a in self.arcs.values():
            incid.setdefault(a.s_id, []).append((a, 1))
            incid.setdefault(a.t_id, []).append((a, -1))
            if a.s_id == a.t_id:
                raise InvalidArc("degenerate fragment arc")
        for v in incid:
            incid[v].sort(key=lambda ad: (ad[0].lift, ad[1]))

        out: List[TPath] = []
        steps: List[Tuple[FragmentArc, int]] = []
        used: set = set()

        def walk(cur, last_label: int):
            if steps and len(steps) % 2 == 1 and cur == self.b_id:
                out.append(
                    TPath(
                        steps=tuple((a.lift[0], d) for a, d in steps),
                        witness=tuple(
                            a.label for a, _ in steps[1::2]
                        ),
                    )
                )
            even = len(steps) % 2 == 1  # parity of the *next* step
            for a, d in incid.get(cur, ()):
                if a.lift in used:
                    continue
                if even:
                    if a.label is None or a.label <= last_label:
                        continue
                used.add(a.lift)
                steps.append((a, d))
                walk(a.t_id if d > 0 else a.s_id, a.label if even else last_label)
                steps.pop()
                used.discard(a.lift)

        walk(self.a_id, 0)
        out.sort(key=lambda p: (len(p.steps), p.steps))
        return out


def build_cover_fragment(t: Triangulation, gamma) -> CoverFragment:
    return CoverFragment(t, gamma)


def _singleton(t: Triangulation, gamma) -> TPath:
    idx = t.index_of(gamma)
    stored = t.arcs[idx]
    if gamma.is_boundary or stored.is_boundary:
        d = 1
    else:
        d = 1 if (stored.s_end if hasattr(stored, "s_end") else stored.s) == (
            gamma.s_end if hasattr(gamma, "s_end") else gamma.s
        ) else -1
    return TPath(steps=((idx, d),), witness=())


def enumerate_tpaths(t: Triangulation, gamma) -> List[TPath]:
    """All admissible walks for gamma; the singleton when gamma is in T."""
    if t.index_of(gamma) is not None:
        return [_singleton(t, gamma)]
    return CoverFragment(t, gamma).admissible_walks()


def path_weight(path: TPath) -> LaurentPoly:
    return path.weight()


def expand_tpaths(t: Triangulation, gamma) -> LaurentPoly:
    """The cluster variable of gamma as the sum of admissible walk weights."""
    total = LaurentPoly.zero()
    for p in enumerate_tpaths(t, gamma):
        total = total + p.weight()
    return total


# ---------------------------------------------------------------------------
# independent validator for the walk axioms


def _lift_step(t: Triangulation, cur, idx: int, direction: int):
    """Lift step (idx, direction) starting at lifted point cur, or None."""
    arc = t.arcs[idx]
    s_id, t_id = t.scene.lift_ids(arc, 0)
    frm, to = (s_id, t_id) if direction > 0 else (t_id, s_id)
    if t.spec.kind == "polygon":
        if frm != cur:
            return None, None
        return to, (idx, 0)
    if frm[:2] != cur[:2]:
        return None, None
    shift = cur[2] - frm[2]
    return (to[0], to[1], to[2] + shift), (idx, shift)


def validate_tpath(t: Triangulation, gamma, path: TPath) -> bool:
    """Check the five walk axioms from scratch (cover-based homotopy check)."""
    steps = path.steps
    if len(steps) % 2 == 0:
        return False  # T1
    for (i1, d1), (i2, d2) in zip(steps, steps[1:]):
        if i1 == i2 and d1 == -d2:
            return False  # not reduced
    cross_count: Dict[int, int] = {}
    labels_on: Dict[int, List[int]] = {}
    if t.index_of(gamma) is None:
        for lbl, rec in enumerate(t.crossing_records(gamma), start=1):
            cross_count[rec.arc_index] = cross_count.get(rec.arc_index, 0) + 1
            labels_on.setdefault((rec.arc_index, rec.shift), []).append(lbl)
    even_use: Dict[int, int] = {}
    for idx, _ in steps[1::2]:
        if cross_count.get(idx, 0) == 0:
            return False  # T2
        even_use[idx] = even_use.get(idx, 0) + 1
    for idx, cnt in even_use.items():
        if cnt > cross_count[idx]:
            return False  # T3
    # lift the walk; even lifted arcs must be crossed lifts in label order
    cur = t.scene.lift_ids(gamma, 0)[0]
    b_id = t.scene.lift_ids(gamma, 0)[1]
    last = 0
    for pos, (idx, d) in enumerate(steps, start=1):
        cur, lift = _lift_step(t, cur, idx, d)
        if cur is None:
            return False  # not a connected walk from s(gamma)
        if pos % 2 == 0:
            lbls = labels_on.get(lift, [])
            nxt = [l for l in lbls if l > last]
            if not nxt:
                return False  # T4/T5 in the cover
            last = min(nxt)
    return cur == b_id  # T5 endpoints

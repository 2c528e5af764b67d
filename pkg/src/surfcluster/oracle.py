"""Independent cluster-variable computations: seed mutation and a
crossing-reduction recursion.

The recursion picks the triangulation arc tau carrying the first crossing
along beta, selects the crossing of beta and tau that is midmost among all
crossings of beta with the triangulation, and builds five arcs forming an
exchange quadrilateral whose diagonals are beta and a new arc beta'.  Each
of the five arcs crosses the triangulation strictly fewer times than beta,
so memoized recursion terminates.  Arcs are resolved from lifted endpoint
pairs in the cover, where the homotopy classes are unambiguous.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .laurent import LaurentPoly
from .surface import (
    ExtendedMatrix,
    InvalidArc,
    Triangulation,
    UnsupportedSurface,
    build_matrix,
)


def select_midmost(labels_in_tau_order: List[int], k: int, tie: str = "low") -> int:
    """1-based position ell of the crossing midmost along beta.

    `labels_in_tau_order` lists the beta-crossing labels of one arc tau in
    the order the crossings appear along tau; k is the total crossing count
    of beta with the triangulation.  Ties prefer the smallest position
    (`tie="high"` checks that the other choice gives the same answer).
    """
    mid = Fraction(k + 1, 2)
    dists = [abs(mid - x) for x in labels_in_tau_order]
    best = min(dists)
    positions = [p for p, d in enumerate(dists, start=1) if d == best]
    return positions[0] if tie == "low" else positions[-1]


class Expander:
    """Memoized recursive expansion over one fixed triangulation."""

    def __init__(self, t: Triangulation, tie: str = "low", record: bool = False):
        if t.spec.kind == "general":
            raise UnsupportedSurface("recursive expansion needs polygon or annulus")
        self.t = t
        self.tie = tie
        self.cache: Dict[tuple, LaurentPoly] = {}
        for i in range(1, t.n + t.m + 1):
            self.cache[t.arcs[i].key()] = LaurentPoly.var(i)
        self.steps: List[Tuple[int, List[int]]] = [] if record else None

    def _resolve(self, lid_a, lid_b):
        kind, payload = self.t.scene.resolve_chord(lid_a, lid_b)
        if kind == "boundary":
            bid, i = payload
            for b in self.t.boundary_arcs:
                if b.boundary == bid and b.i == i:
                    return b
            raise InvalidArc("boundary arc lookup failed")
        return payload

    def expand(self, arc) -> LaurentPoly:
        key = arc.key()
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        val = self._expand_new(arc)
        self.cache[key] = val
        return val

    def _expand_new(self, beta) -> LaurentPoly:
        t = self.t
        recs = t.crossing_records(beta)
        k = len(recs)
        if k == 0:
            raise InvalidArc(f"{beta!r} is compatible with T but not in it")
        tau_idx = recs[0].arc_index
        tau = t.arcs[tau_idx]
        own = [(rec, lbl) for lbl, rec in enumerate(recs, start=1) if rec.arc_index == tau_idx]
        own.sort(key=lambda rl: rl[0].param_arc)
        labels = [lbl for _, lbl in own]
        shifts = [rec.shift for rec, _ in own]
        ell = select_midmost(labels, k, tie=self.tie)

        a_id, b_id = t.scene.lift_ids(beta, 0)
        c0, d0 = t.scene.lift_ids(tau, 0)

        def cpt(s):
            return self._shift_id(c0, s)

        def dpt(s):
            return self._shift_id(d0, s)

        bp, r1, r2, s1, s2 = self._five_pairs(
            labels, shifts, ell - 1, a_id, b_id, cpt, dpt, k
        )
        five = []
        for pair in (bp, r1, r2, s1, s2):
            if pair == "tau":
                five.append(tau)
            else:
                five.append(self._resolve(*pair))
        bprime, rho1, rho2, sig1, sig2 = five
        if self.steps is not None:
            children = [self._crossings(x) for x in five]
            self.steps.append((k, children))
        for x in five:
            if self._crossings(x) >= k:
                raise AssertionError(
                    f"crossing count failed to drop: {x!r} has {self._crossings(x)} >= {k}"
                )
        num = self.expand(rho1) * self.expand(rho2) + self.expand(sig1) * self.expand(sig2)
        return num.exact_div(self.expand(bprime))

    def _crossings(self, arc) -> int:
        if arc.is_boundary or self.t.index_of(arc) is not None:
            return 0
        key = arc.key()
        if not hasattr(self, "_xcount"):
            self._xcount = {}
        if key not in self._xcount:
            self._xcount[key] = len(self.t.crossing_records(arc))
        return self._xcount[key]

    def _shift_id(self, lid, s):
        if self.t.spec.kind == "polygon":
            return lid
        return (lid[0], lid[1], lid[2] + s)

    def _five_pairs(self, labels, shifts, p, a_id, b_id, cpt, dpt, tau_idx):
        """Endpoint pairs of (beta', rho1, rho2, sigma1, sigma2).

        p is the 0-based midmost position along tau.  Configurations with
        the tau-order or beta-order reversed are normalized by the two
        symmetries: reversing tau swaps c and d and reverses the lists;
        reversing beta swaps a and b and relabels x -> k+1-x.
        """
        r = len(labels)
        k_total = max(labels) if labels else 0

        def sh(a_or_b, delta):
            return self._shift_id(a_or_b, delta)

        if r == 1:
            s0 = shifts[0]
            return (
                "tau",
                (a_id, cpt(s0)),
                (b_id, dpt(s0)),
                (cpt(s0), b_id),
                (dpt(s0), a_id),
            )
        mid = labels[p]
        left = labels[p - 1] if p >= 1 else None
        right = labels[p + 1] if p + 1 < r else None
        if p == r - 1:  # reverse tau so the midmost sits at position 1
            return self._five_pairs(
                labels[::-1], shifts[::-1], 0, a_id, b_id, dpt, cpt, tau_idx
            )
        if left is not None and left > mid:
            if right < mid:  # reverse tau: (>, <) becomes (<, >)
                return self._five_pairs(
                    labels[::-1], shifts[::-1], r - 1 - p, a_id, b_id, dpt, cpt, tau_idx
                )
            # (>, >): reverse beta: labels remap to k+1-x, a and b swap
            k = self._last_k
            return self._five_pairs(
                [k + 1 - x for x in labels], shifts, p, b_id, a_id, cpt, dpt, tau_idx
            )
        sl = shifts[p]
        sp = shifts[p + 1]
        if p == 0:
            if right < mid:  # first-position form, descending continuation
                return (
                    (cpt(sp), a_id),
                    (a_id, cpt(sl)),
                    (b_id, sh(a_id, sl - sp)),
                    (cpt(sl), b_id),
                    (a_id, sh(a_id, sp - sl)),
                )
            return (  # first-position form, ascending continuation
                (cpt(sp), b_id),
                (cpt(sl), a_id),
                (b_id, sh(b_id, sp - sl)),
                (a_id, sh(b_id, sl - sp)),
                (b_id, cpt(sl)),
            )
        sm = shifts[p - 1]
        if right < mid:  # interior, both neighbors earlier along beta
            return (
                (a_id, sh(a_id, sm - sp)),
                (a_id, sh(a_id, sl - sm)),
                (b_id, sh(a_id, sl - sp)),
                (a_id, sh(b_id, sm - sl)),
                (a_id, sh(a_id, sp - sl)),
            )
        return (  # interior, neighbors straddle the midmost crossing
            (a_id, sh(b_id, sm - sp)),
            (a_id, sh(a_id, sm - sl)),
            (b_id, sh(b_id, sp - sl)),
            (a_id, sh(b_id, sl - sp)),
            (b_id, sh(a_id, sl - sm)),
        )

    _last_k = 0  # set per _expand_new call; see below


def expand_recursive(
    t: Triangulation, beta, tie: str = "low", expander: Optional[Expander] = None
) -> LaurentPoly:
    """Cluster variable of beta via the crossing-reduction recursion."""
    exp = expander or Expander(t, tie=tie)
    return exp.expand(beta)


# ---------------------------------------------------------------------------
# seeds and mutation


class Seed:
    """Cluster seed attached to a triangulation.

    `cluster[i]` is the i-th cluster variable expanded in the initial
    variables; boundary variables stay frozen at x_{n+1}..x_{n+m}.
    """

    def __init__(self, t: Triangulation, matrix: ExtendedMatrix, cluster: Dict[int, LaurentPoly]):
        self.triangulation = t
        self.matrix = matrix
        self.cluster = dict(cluster)

    @staticmethod
    def initial(t: Triangulation) -> "Seed":
        return Seed(t, build_matrix(t), {i: LaurentPoly.var(i) for i in range(1, t.n + 1)})

    def variable(self, i: int) -> LaurentPoly:
        if i <= self.triangulation.n:
            return self.cluster[i]
        return LaurentPoly.var(i)

    def __eq__(self, other):
        return (
            isinstance(other, Seed)
            and self.matrix == other.matrix
            and self.cluster == other.cluster
            and self.triangulation == other.triangulation
        )


def mutate_seed(seed: Seed, k: int) -> Seed:
    """Exchange the k-th cluster variable; boundary rows feed the coefficients."""
    t = seed.triangulation
    if not (1 <= k <= t.n):
        raise ValueError(f"mutation direction {k} out of range")
    pos = LaurentPoly.const(1)
    neg = LaurentPoly.const(1)
    for i in range(1, t.n + t.m + 1):
        b = seed.matrix.entry(i, k)
        if b > 0:
            pos = pos * seed.variable(i) ** b
        elif b < 0:
            neg = neg * seed.variable(i) ** (-b)
    new_var = (pos + neg).exact_div(seed.cluster[k])
    new_cluster = dict(seed.cluster)
    new_cluster[k] = new_var
    new_t, _ = t.flip(k)
    return Seed(new_t, seed.matrix.mutate(k), new_cluster)


def expand_by_mutation(t: Triangulation, gamma) -> LaurentPoly:
    """Expand gamma by flipping the first-crossed arc until gamma appears.

    Each flip at the first-crossed arc lowers the crossing count by one on a
    simply connected surface, so the walk takes exactly e(gamma, T) steps.
    """
    if t.spec.kind != "polygon":
        raise UnsupportedSurface("mutation-sequence expansion requires a polygon")
    seed = Seed.initial(t)
    guard = 0
    while True:
        idx = seed.triangulation.index_of(gamma)
        if idx is not None:
            if idx > t.n:
                return LaurentPoly.var(idx)
            return seed.cluster[idx]
        recs = seed.triangulation.crossing_records(gamma)
        seed = mutate_seed(seed, recs[0].arc_index)
        guard += 1
        if guard > 10 * t.n + 20:
            raise RuntimeError("mutation walk failed to reach gamma")

"""Exact integer-coefficient Laurent polynomials in variables x1, x2, ...

Variables are positive integer indices.  A monomial is stored as a
coefficient together with a sparse exponent map (no zero exponents kept);
a polynomial is a map from exponent keys to nonzero coefficients.  All
arithmetic is exact; the term order used for canonical printed form is
descending lexicographic on the (dense) exponent vector.
"""

from __future__ import annotations

import re
from typing import Dict, Iterable, Mapping, Tuple

ExpKey = Tuple[Tuple[int, int], ...]  # sorted ((var, exp), ...), exp != 0


def _key(exps: Mapping[int, int]) -> ExpKey:
    return tuple(sorted((v, e) for v, e in exps.items() if e != 0))


class Monomial:
    """A single term: coeff * prod x_v^e.  coeff must be nonzero."""

    __slots__ = ("coeff", "exps")

    def __init__(self, coeff: int, exps: Mapping[int, int]):
        if coeff == 0:
            raise ValueError("monomial coefficient must be nonzero")
        self.coeff = coeff
        self.exps = {v: e for v, e in exps.items() if e != 0}

    def key(self) -> ExpKey:
        return _key(self.exps)

    def __repr__(self):
        return f"Monomial({self.coeff}, {self.exps})"


class ExactDivisionError(ArithmeticError):
    """Raised when exact_div is asked for a division that leaves a remainder."""


class LaurentPoly:
    """Immutable-by-convention Laurent polynomial with canonical form."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[ExpKey, int] | None = None):
        self.terms: Dict[ExpKey, int] = {}
        if terms:
            for k, c in terms.items():
                if c != 0:
                    self.terms[k] = c

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "LaurentPoly":
        return LaurentPoly()

    @staticmethod
    def const(c: int) -> "LaurentPoly":
        return LaurentPoly({(): c} if c else {})

    @staticmethod
    def var(i: int, exp: int = 1) -> "LaurentPoly":
        if i < 1:
            raise ValueError("variable indices start at 1")
        if exp == 0:
            return LaurentPoly.const(1)
        return LaurentPoly({((i, exp),): 1})

    @staticmethod
    def monomial(coeff: int, exps: Mapping[int, int]) -> "LaurentPoly":
        if coeff == 0:
            return LaurentPoly()
        return LaurentPoly({_key(exps): coeff})

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            elif k in out:
                del out[k]
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        out: Dict[ExpKey, int] = {}
        for k1, c1 in self.terms.items():
            e1 = dict(k1)
            for k2, c2 in other.terms.items():
                e = dict(e1)
                for v, x in k2:
                    s = e.get(v, 0) + x
                    if s:
                        e[v] = s
                    elif v in e:
                        del e[v]
                k = tuple(sorted(e.items()))
                s = out.get(k, 0) + c1 * c2
                if s:
                    out[k] = s
                elif k in out:
                    del out[k]
        return LaurentPoly(out)

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            if len(self.terms) != 1:
                raise ExactDivisionError("negative power of a non-monomial")
            ((k, c),) = self.terms.items()
            if c not in (1, -1):
                raise ExactDivisionError("negative power of non-unit coefficient")
            return LaurentPoly({tuple((v, e * n) for v, e in k): c if n % 2 else 1})
        r = LaurentPoly.const(1)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def monomials(self) -> Iterable[Monomial]:
        for k in self._sorted_keys():
            yield Monomial(self.terms[k], dict(k))

    def variables(self) -> set:
        vs = set()
        for k in self.terms:
            vs.update(v for v, _ in k)
        return vs

    def coefficients(self):
        return list(self.terms.values())

    # -- ordering / printing ------------------------------------------

    def _sorted_keys(self):
        vs = sorted(self.variables())

        def dense(k):
            d = dict(k)
            return tuple(d.get(v, 0) for v in vs)

        return sorted(self.terms, key=dense, reverse=True)

    def __str__(self) -> str:
        return self.format()

    def format(self, names: Mapping[int, str] | None = None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in self._sorted_keys():
            c = self.terms[k]
            factors = []
            for v, e in sorted(k):
                name = names[v] if names else f"x{v}"
                factors.append(name if e == 1 else f"{name}^{e}")
            if not factors:
                body = str(abs(c))
            elif abs(c) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(abs(c))] + factors)
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"LaurentPoly({self.format()})"

    # -- division ------------------------------------------------------

    def _shifted_to_poly(self) -> Tuple["LaurentPoly", Dict[int, int]]:
        """Multiply by a monomial so all exponents become >= 0.

        Returns the shifted polynomial and the shift applied per variable.
        """
        shift: Dict[int, int] = {}
        for k in self.terms:
            for v, e in k:
                if e < shift.get(v, 0):
                    shift[v] = e
        shift = {v: -e for v, e in shift.items() if e < 0}
        if not shift:
            return self, {}
        return self * LaurentPoly.monomial(1, shift), shift

    def exact_div(self, divisor: "LaurentPoly") -> "LaurentPoly":
        """Exact division in the Laurent ring; ExactDivisionError if inexact."""
        if divisor.is_zero():
            raise ExactDivisionError("division by zero")
        if self.is_zero():
            return LaurentPoly()
        p, sp = self._shifted_to_poly()
        q, sq = divisor._shifted_to_poly()
        quot: Dict[ExpKey, int] = {}
        qkey = q._sorted_keys()[0]
        qlead = q.terms[qkey]
        qexp = dict(qkey)
        while p.terms:
            pkey = p._sorted_keys()[0]
            plead = p.terms[pkey]
            pexp = dict(pkey)
            texp = {}
            ok = True
            for v in set(pexp) | set(qexp):
                d = pexp.get(v, 0) - qexp.get(v, 0)
                if d < 0:
                    ok = False
                    break
                if d:
                    texp[v] = d
            if not ok or plead % qlead != 0:
                raise ExactDivisionError(
                    f"({self.format()}) is not divisible by ({divisor.format()})"
                )
            tc = plead // qlead
            tkey = _key(texp)
            quot[tkey] = quot.get(tkey, 0) + tc
            p = p - LaurentPoly.monomial(tc, texp) * q
        result = LaurentPoly(quot)
        # undo the shifts: self = result * (x^sp / x^sq) inverse bookkeeping
        adj = {v: sq.get(v, 0) for v in sq}
        for v, e in sp.items():
            adj[v] = adj.get(v, 0) - e
        if adj:
            result = result * LaurentPoly.monomial(1, adj)
        return result

    def reduced_fraction_form(self) -> Tuple["LaurentPoly", Monomial]:
        """Write self = numerator / x^d with d >= 0 minimal per variable.

        The numerator has no variable dividing all of its terms among the
        ones appearing in the denominator.
        """
        if self.is_zero():
            raise ValueError("zero polynomial has no reduced fraction form")
        mins: Dict[int, int] = {}
        for v in self.variables():
            mins[v] = min(dict(k).get(v, 0) for k in self.terms)
        den = {v: -e for v, e in mins.items() if e < 0}
        num = self * LaurentPoly.monomial(1, den)
        return num, Monomial(1, den)

    # -- substitution ---------------------------------------------------

    def substitute(self, var: int, value: "LaurentPoly") -> "LaurentPoly":
        """Replace x_var by `value`; x_var must occur with exponents >= 0."""
        out = LaurentPoly()
        for k, c in self.terms.items():
            e = dict(k)
            p = e.pop(var, 0)
            if p < 0:
                raise ValueError("substitute requires nonnegative exponents")
            term = LaurentPoly.monomial(c, e)
            if p:
                term = term * value ** p
            out = out + term
        return out

    # -- serialization ---------------------------------------------------

    def to_json(self) -> list:
        return [
            {"c": self.terms[k], "e": {str(v): e for v, e in k}}
            for k in self._sorted_keys()
        ]

    @staticmethod
    def from_json(data: list) -> "LaurentPoly":
        out: Dict[ExpKey, int] = {}
        for t in data:
            k = _key({int(v): int(e) for v, e in t["e"].items()})
            out[k] = out.get(k, 0) + int(t["c"])
        return LaurentPoly(out)

    @staticmethod
    def parse(text: str) -> "LaurentPoly":
        """Parse the canonical printed syntax, e.g. '2*x1^-2*x2 + x5 - x3'."""
        text = text.strip()
        if text == "0":
            return LaurentPoly()
        text = text.replace("- ", "+ -").replace(" -", " +-")
        if text.startswith("-"):
            text = "-" + text[1:].lstrip()
        out = LaurentPoly()
        for chunk in text.split("+"):
            chunk = chunk.strip()
            if not chunk:
                continue
            sign = 1
            while chunk.startswith("-"):
                sign = -sign
                chunk = chunk[1:].strip()
            coeff = sign
            exps: Dict[int, int] = {}
            for factor in chunk.split("*"):
                factor = factor.strip()
                m = re.fullmatch(r"x(\d+)(?:\^(-?\d+))?", factor)
                if m:
                    v = int(m.group(1))
                    e = int(m.group(2)) if m.group(2) else 1
                    exps[v] = exps.get(v, 0) + e
                elif re.fullmatch(r"\d+", factor):
                    coeff *= int(factor)
                else:
                    raise ValueError(f"cannot parse factor {factor!r}")
            out = out + LaurentPoly.monomial(coeff, exps)
        return out

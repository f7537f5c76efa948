"""The projective line over finite fields: points, PGL_2 and rational self-maps.

Convention: a finite point is ``(x : 1)`` and infinity is ``(1 : 0)``.
"""
from __future__ import annotations

from functools import lru_cache
from math import gcd
from typing import Iterable, Iterator, Sequence

from .ffield import FieldCtx, FieldElem, FieldError, check_budget
from .unipoly import Poly, deflate, poly_gcd, roots_with_multiplicity


class TamenessError(ArithmeticError):
    pass


class P1Point:
    __slots__ = ("ctx", "v")

    def __init__(self, ctx: FieldCtx, v: int | None):
        self.ctx = ctx
        self.v = v

    @classmethod
    def finite(cls, x: FieldElem) -> P1Point:
        return cls(x.ctx, x.v)

    @classmethod
    def inf(cls, ctx: FieldCtx) -> P1Point:
        return cls(ctx, None)

    @classmethod
    def from_homogeneous(cls, X: FieldElem, Z: FieldElem) -> P1Point:
        if Z.is_zero():
            if X.is_zero():
                raise ValueError("(0 : 0) is not a point")
            return cls(Z.ctx, None)
        return cls.finite(X / Z)

    @property
    def is_inf(self) -> bool:
        return self.v is None

    @property
    def x(self) -> FieldElem:
        if self.v is None:
            raise ValueError("the point at infinity has no affine coordinate")
        return FieldElem(self.ctx, self.v)

    def over(self, ctx: FieldCtx) -> P1Point:
        if ctx is self.ctx or self.v is None:
            return P1Point(ctx, self.v if ctx is self.ctx else None)
        return P1Point(ctx, ctx.embed(self.x).v)

    def restrict(self, sub: FieldCtx) -> P1Point:
        if self.v is None:
            return P1Point(sub, None)
        return P1Point.finite(self.ctx.restrict(self.x, sub))

    def conjugate(self, base: FieldCtx | None = None) -> P1Point:
        if self.v is None:
            return self
        from .ffield import frobenius_q
        return P1Point.finite(frobenius_q(self.x, base))

    def _key(self, other: P1Point):
        if self.ctx is other.ctx:
            return self.v, other.v
        if self.ctx.contains(other.ctx):
            return self.v, other.over(self.ctx).v
        if other.ctx.contains(self.ctx):
            return self.over(other.ctx).v, other.v
        raise FieldError("points over incomparable fields")

    def __eq__(self, other) -> bool:
        if not isinstance(other, P1Point):
            return NotImplemented
        a, b = self._key(other)
        return a == b

    def __hash__(self) -> int:
        return hash(self.v)

    def sort_key(self) -> int:
        # finite points in canonical order, infinity last
        return self.ctx.order if self.v is None else self.v

    def __lt__(self, other: P1Point) -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return "inf" if self.v is None else str(self.x)

    def __repr__(self) -> str:
        return f"P1Point({self})"


def parse_point(ctx: FieldCtx, text: str) -> P1Point:
    return P1Point.inf(ctx) if text == "inf" else P1Point.finite(ctx.parse(text))


def p1_points(ctx: FieldCtx) -> list[P1Point]:
    """P^1(ctx) in canonical order: finite points by encoding, then infinity."""
    check_budget(ctx.order + 1)
    return [P1Point(ctx, v) for v in range(ctx.order)] + [P1Point(ctx, None)]


class Mobius:
    """An element of PGL_2, stored with the first nonzero entry (row-major) equal to 1.

    Acts by x -> (a*x + b) / (c*x + d).
    """

    __slots__ = ("ctx", "m")

    def __init__(self, ctx: FieldCtx, a, b, c, d):
        vs = [ctx(e).v if not isinstance(e, FieldElem) else ctx.embed(e).v for e in (a, b, c, d)]
        det = ctx.sub_v(ctx.mul_v(vs[0], vs[3]), ctx.mul_v(vs[1], vs[2]))
        if det == 0:
            raise ValueError("singular matrix")
        lead = next(v for v in vs if v)
        inv = ctx.inv_v(lead)
        self.ctx = ctx
        self.m = tuple(ctx.mul_v(v, inv) for v in vs)

    @classmethod
    def identity(cls, ctx: FieldCtx) -> Mobius:
        return cls(ctx, 1, 0, 0, 1)

    @classmethod
    def affine(cls, c, d) -> Mobius:
        """x -> c*x + d."""
        return cls(c.ctx, c, d, 0, 1)

    @property
    def entries(self) -> tuple[FieldElem, ...]:
        return tuple(FieldElem(self.ctx, v) for v in self.m)

    @property
    def det(self) -> FieldElem:
        a, b, c, d = self.entries
        return a * d - b * c

    def over(self, ctx: FieldCtx) -> Mobius:
        if ctx is self.ctx:
            return self
        return Mobius(ctx, *(ctx.embed(e) for e in self.entries))

    def __call__(self, P: P1Point) -> P1Point:
        return mobius_apply(self, P)

    def compose(self, other: Mobius) -> Mobius:
        """self o other."""
        ctx = _larger(self.ctx, other.ctx)
        a, b, c, d = self.over(ctx).entries
        e, f, g, h = other.over(ctx).entries
        return Mobius(ctx, a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def __matmul__(self, other: Mobius) -> Mobius:
        return self.compose(other)

    def inverse(self) -> Mobius:
        a, b, c, d = self.entries
        return Mobius(self.ctx, d, -b, -c, a)

    def __pow__(self, k: int) -> Mobius:
        if k < 0:
            return self.inverse() ** (-k)
        out = Mobius.identity(self.ctx)
        for _ in range(k):
            out = self @ out
        return out

    def order(self, limit: int | None = None) -> int:
        ident = Mobius.identity(self.ctx)
        cur, k = self, 1
        limit = limit or self.ctx.order ** 3
        while cur != ident:
            cur = self @ cur
            k += 1
            if k > limit:
                raise ArithmeticError("order exceeds limit")
        return k

    def is_affine(self) -> bool:
        return self.m[2] == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mobius):
            return NotImplemented
        if self.ctx is other.ctx:
            return self.m == other.m
        ctx = _larger(self.ctx, other.ctx)
        return self.over(ctx).m == other.over(ctx).m

    def __hash__(self) -> int:
        return hash(self.m)

    def __str__(self) -> str:
        return "[" + "; ".join(str(e) for e in self.entries) + "]"

    def __repr__(self) -> str:
        return f"Mobius({self})"

    def to_json(self) -> list[str]:
        return [str(e) for e in self.entries]


def _larger(a: FieldCtx, b: FieldCtx) -> FieldCtx:
    if a is b or a.contains(b):
        return a
    if b.contains(a):
        return b
    raise FieldError(f"incomparable fields {a} and {b}")


def mobius_apply(M: Mobius, P: P1Point) -> P1Point:
    ctx = _larger(M.ctx, P.ctx)
    M = M.over(ctx)
    P = P.over(ctx) if P.ctx is not ctx else P
    a, b, c, d = M.m
    if P.v is None:
        return P1Point(ctx, None) if c == 0 else P1Point(ctx, ctx.mul_v(a, ctx.inv_v(c)))
    x = P.v
    num = ctx.add_v(ctx.mul_v(a, x), b)
    den = ctx.add_v(ctx.mul_v(c, x), d)
    if den == 0:
        return P1Point(ctx, None)
    return P1Point(ctx, ctx.mul_v(num, ctx.inv_v(den)))


@lru_cache(maxsize=None)
def _pgl2_raw(ctx: FieldCtx) -> tuple[tuple[int, int, int, int], ...]:
    q = ctx.order
    check_budget(q ** 3 - q, "PGL_2 enumeration")
    out = []
    for c in range(1, q):
        for d in range(q):
            out.append((0, 1, c, d))
    for b in range(q):
        for c in range(q):
            bc = ctx.mul_v(b, c)
            for d in range(q):
                if d != bc:
                    out.append((1, b, c, d))
    return tuple(out)


def pgl2(ctx: FieldCtx) -> Iterator[Mobius]:
    """PGL_2(ctx) in canonical order (lexicographic in the normalized entries)."""
    for m in _pgl2_raw(ctx):
        M = Mobius.__new__(Mobius)
        M.ctx = ctx
        M.m = m
        yield M


def mobius_search(ctx: FieldCtx, constraints: Sequence[tuple[P1Point, P1Point]]) -> list[Mobius]:
    """All M in PGL_2(ctx), in canonical order, with M(P) == image for every constraint."""
    return [M for M in pgl2(ctx) if all(mobius_apply(M, P) == T for P, T in constraints)]


class RatMap:
    """A rational self-map num/den of P^1, kept reduced with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly, reduce: bool = True):
        ctx, num, den = num._common(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if reduce:
            h = poly_gcd(num, den)
            if h.degree > 0:
                num, den = num // h, den // h
        lead = den.lead.inverse()
        self.num = num * lead
        self.den = den * lead

    @property
    def ctx(self) -> FieldCtx:
        return self.num.ctx

    @property
    def degree(self) -> int:
        return max(self.num.degree, self.den.degree)

    def over(self, ctx: FieldCtx) -> RatMap:
        if ctx is self.ctx:
            return self
        return RatMap(self.num.over(ctx), self.den.over(ctx), reduce=False)

    def is_reduced(self) -> bool:
        return poly_gcd(self.num, self.den).degree == 0

    def __call__(self, P: P1Point) -> P1Point:
        return ratmap_eval(self, P)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMap):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num.c, self.den.c))

    def pretty(self) -> str:
        """Human form such as ``(x^6 + x + 2)/(x^5 - x)``."""
        return f"({_pretty_poly(self.num)})/({_pretty_poly(self.den)})"

    def __str__(self) -> str:
        return self.pretty()

    def __repr__(self) -> str:
        return f"RatMap({self.pretty()})"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}


def _pretty_poly(f: Poly) -> str:
    # In a prime field the coefficient p-1 is shown as a minus sign.
    ctx = f.ctx
    parts: list[tuple[str, str]] = []
    for i in range(f.degree, -1, -1):
        v = f.c[i]
        if not v:
            continue
        sign = "+"
        if ctx.n == 1 and v == ctx.p - 1 and ctx.p > 2:
            sign, v = "-", 1
        coef = str(FieldElem(ctx, v))
        if "," in coef:
            coef = f"({coef})"
        mono = "" if i == 0 else "x" if i == 1 else f"x^{i}"
        if i == 0:
            term = coef
        else:
            term = mono if v == 1 else f"{coef}{mono}"
        parts.append((sign, term))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, term in parts[1:]:
        out += f" {sign} {term}"
    return out


def ratmap_eval(F: RatMap, P: P1Point) -> P1Point:
    ctx = _larger(F.ctx, P.ctx)
    if P.v is None:
        dn, dd = F.num.degree, F.den.degree
        if dn > dd:
            return P1Point(ctx, None)
        if dn < dd:
            return P1Point(ctx, 0)
        return P1Point.finite(ctx.embed(F.num.lead / F.den.lead))
    x = P.x if P.ctx is ctx else ctx.embed(P.x)
    n = F.num.eval(x)
    d = F.den.eval(x)
    if d.is_zero():
        assert not n.is_zero(), "unreduced map"
        return P1Point(ctx, None)
    return P1Point.finite(n / d)


def value_table(F: RatMap, ctx: FieldCtx) -> list[P1Point]:
    """F evaluated on all of P^1(ctx), in the order of :func:`p1_points`."""
    return [ratmap_eval(F, P) for P in p1_points(ctx)]


def _substitute(F: RatMap, M: Mobius, ctx: FieldCtx) -> tuple[Poly, Poly]:
    """Homogenised F(M(x)) as (numerator, denominator) before reduction."""
    a, b, c, d = M.over(ctx).entries
    A = Poly(ctx, [b, a])
    B = Poly(ctx, [d, c])
    deg = F.degree
    num = F.num.over(ctx)
    den = F.den.over(ctx)
    Apow = [Poly(ctx, [1])]
    Bpow = [Poly(ctx, [1])]
    for _ in range(deg):
        Apow.append(Apow[-1] * A)
        Bpow.append(Bpow[-1] * B)
    N = Poly(ctx, [])
    D = Poly(ctx, [])
    for i in range(deg + 1):
        term = Apow[i] * Bpow[deg - i]
        N = N + term * num.coeff(i)
        D = D + term * den.coeff(i)
    return N, D


def ratmap_compose_mobius(pre: Mobius | None, F: RatMap, post: Mobius | None) -> RatMap:
    """The reduced map post o F o pre."""
    ctx = F.ctx
    for M in (pre, post):
        if M is not None:
            ctx = _larger(ctx, M.ctx)
    if pre is not None:
        N, D = _substitute(F, pre, ctx)
    else:
        N, D = F.num.over(ctx), F.den.over(ctx)
    if post is not None:
        a, b, c, d = post.over(ctx).entries
        N, D = N * a + D * b, N * c + D * d
    G = RatMap(N, D)
    assert G.degree == F.degree, "Mobius composition changed the degree"
    return G


def fiber_polynomial(F: RatMap, t: P1Point) -> Poly:
    """num - t*den (or den for t = infinity), over the larger of the two fields."""
    if t.v is None:
        return F.den
    ctx = _larger(F.ctx, t.ctx)
    return F.num.over(ctx) - F.den.over(ctx) * ctx.embed(t.x)


def fiber(F: RatMap, t: P1Point, target: FieldCtx) -> list[tuple[P1Point, int]]:
    """Points of P^1(target) over t, with multiplicities; infinity listed last."""
    h = fiber_polynomial(F, t)
    out = [(P1Point.finite(r), m) for r, m in roots_with_multiplicity(h, target)]
    at_inf = F.degree - h.degree
    if at_inf > 0:
        out.append((P1Point.inf(target), at_inf))
    return out


def ramification_index(F: RatMap, P: P1Point) -> int:
    t = ratmap_eval(F, P)
    h = fiber_polynomial(F, t)
    if P.v is None:
        e = F.degree - h.degree
    else:
        x = P.x
        ctx = _larger(h.ctx, x.ctx)
        e, _ = deflate(h.over(ctx), ctx.embed(x))
    assert e >= 1
    return e


def assert_tame(e: int, p: int) -> None:
    if e > 1 and gcd(e, p) != 1:
        raise TamenessError(f"wild ramification index {e} in characteristic {p}")


def ramification_profile(F: RatMap, ctx: FieldCtx) -> dict[P1Point, int]:
    """Ramified points of P^1(ctx) with their (tame) indices."""
    out = {}
    for P in p1_points(ctx):
        e = ramification_index(F, P)
        if e > 1:
            assert_tame(e, ctx.p)
            out[P] = e
    return out


def is_galois_invariant(F: RatMap, M: Mobius) -> bool:
    """True iff F o M == F."""
    G = ratmap_compose_mobius(M, F, None)
    ctx = _larger(F.ctx, G.ctx)
    return G.over(ctx) == F.over(ctx)


def ratmap_from_coeffs(ctx: FieldCtx, num: Iterable, den: Iterable) -> RatMap:
    return RatMap(Poly(ctx, list(num)), Poly(ctx, list(den)))

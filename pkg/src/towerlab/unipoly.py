"""Dense univariate polynomials over a :class:`FieldCtx`."""
from __future__ import annotations

from typing import Iterable, Sequence

from .ffield import FieldCtx, FieldElem, FieldError, check_budget, is_square, trace_norm


class Poly:
    """Little-endian coefficients stored as field encodings; no trailing zeros.

    The zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("ctx", "c")

    def __init__(self, ctx: FieldCtx, coeffs: Iterable = ()):
        vs = []
        for x in coeffs:
            if isinstance(x, FieldElem):
                vs.append(ctx.embed(x).v)
            else:
                vs.append(ctx.int_v(x))
        while vs and vs[-1] == 0:
            vs.pop()
        self.ctx = ctx
        self.c = tuple(vs)

    @classmethod
    def _raw(cls, ctx: FieldCtx, vs: list[int]) -> Poly:
        while vs and vs[-1] == 0:
            vs.pop()
        p = cls.__new__(cls)
        p.ctx = ctx
        p.c = tuple(vs)
        return p

    @classmethod
    def x(cls, ctx: FieldCtx) -> Poly:
        return cls._raw(ctx, [0, 1])

    @classmethod
    def const(cls, ctx: FieldCtx, a) -> Poly:
        return cls(ctx, [a])

    @classmethod
    def monomial(cls, ctx: FieldCtx, k: int, a=1) -> Poly:
        return cls(ctx, [0] * k + [a])

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    @property
    def coeffs(self) -> list[FieldElem]:
        return [FieldElem(self.ctx, v) for v in self.c]

    def coeff(self, i: int) -> FieldElem:
        return FieldElem(self.ctx, self.c[i] if 0 <= i < len(self.c) else 0)

    @property
    def lead(self) -> FieldElem:
        return FieldElem(self.ctx, self.c[-1] if self.c else 0)

    def is_zero(self) -> bool:
        return not self.c

    def over(self, ctx: FieldCtx) -> Poly:
        """The same polynomial with coefficients embedded into ``ctx``."""
        if ctx is self.ctx:
            return self
        if not ctx.contains(self.ctx):
            raise FieldError(f"cannot move polynomial from {self.ctx} to {ctx}")
        table = ctx.embedding_table(self.ctx)
        return Poly._raw(ctx, [table[v] for v in self.c])

    def _common(self, other) -> tuple[FieldCtx, Poly, Poly]:
        if isinstance(other, int):
            other = Poly(self.ctx, [other])
        elif isinstance(other, FieldElem):
            other = Poly(other.ctx, [other])
        a, b = self.ctx, other.ctx
        if a is b:
            return a, self, other
        if a.contains(b):
            return a, self, other.over(a)
        if b.contains(a):
            return b, self.over(b), other
        raise FieldError(f"context mismatch: {a} vs {b}")

    def __add__(self, other) -> Poly:
        ctx, f, g = self._common(other)
        n = max(len(f.c), len(g.c))
        fc = f.c + (0,) * (n - len(f.c))
        gc = g.c + (0,) * (n - len(g.c))
        return Poly._raw(ctx, [ctx.add_v(x, y) for x, y in zip(fc, gc)])

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly._raw(self.ctx, [self.ctx.neg_v(x) for x in self.c])

    def __sub__(self, other) -> Poly:
        ctx, f, g = self._common(other)
        return f + (-g)

    def __rsub__(self, other) -> Poly:
        return (-self) + other

    def __mul__(self, other) -> Poly:
        ctx, f, g = self._common(other)
        if not f.c or not g.c:
            return Poly._raw(ctx, [])
        out = [0] * (len(f.c) + len(g.c) - 1)
        add, mul = ctx.add_v, ctx.mul_v
        for i, x in enumerate(f.c):
            if x:
                for j, y in enumerate(g.c):
                    if y:
                        out[i + j] = add(out[i + j], mul(x, y))
        return Poly._raw(ctx, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> Poly:
        result = Poly._raw(self.ctx, [1])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def scale(self, a) -> Poly:
        return self * a

    def __divmod__(self, other: Poly):
        ctx, f, g = self._common(other)
        if not g.c:
            raise ZeroDivisionError("division by the zero polynomial")
        r = list(f.c)
        dg = len(g.c) - 1
        inv_lead = ctx.inv_v(g.c[-1])
        quo = [0] * max(len(r) - dg, 0)
        while len(r) - 1 >= dg and r:
            k = ctx.mul_v(r[-1], inv_lead)
            shift = len(r) - 1 - dg
            quo[shift] = k
            for i, gi in enumerate(g.c):
                r[shift + i] = ctx.sub_v(r[shift + i], ctx.mul_v(k, gi))
            while r and r[-1] == 0:
                r.pop()
        return Poly._raw(ctx, quo), Poly._raw(ctx, r)

    def __floordiv__(self, other: Poly) -> Poly:
        return divmod(self, other)[0]

    def __mod__(self, other: Poly) -> Poly:
        return divmod(self, other)[1]

    def monic(self) -> Poly:
        if not self.c:
            return self
        inv = self.ctx.inv_v(self.c[-1])
        return Poly._raw(self.ctx, [self.ctx.mul_v(x, inv) for x in self.c])

    def derivative(self) -> Poly:
        ctx = self.ctx
        return Poly._raw(ctx, [ctx.mul_v(ctx.int_v(i), x) for i, x in enumerate(self.c)][1:])

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x) -> FieldElem:
        if isinstance(x, int):
            x = FieldElem(self.ctx, self.ctx.int_v(x))
        f = self
        if x.ctx is not self.ctx:
            if x.ctx.contains(self.ctx):
                f = self.over(x.ctx)
            else:
                x = self.ctx.embed(x)
        ctx = f.ctx
        acc, xv = 0, x.v
        for cv in reversed(f.c):
            acc = ctx.add_v(ctx.mul_v(acc, xv), cv)
        return FieldElem(ctx, acc)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        if self.ctx is other.ctx:
            return self.c == other.c
        try:
            _, f, g = self._common(other)
        except FieldError:
            return False
        return f.c == g.c

    def __hash__(self) -> int:
        return hash(self.c)

    def __str__(self) -> str:
        """Text form ``c0 + c1*X + ...`` with canonical element strings."""
        if not self.c:
            return "0"
        terms = []
        for i, v in enumerate(self.c):
            if not v:
                continue
            s = str(FieldElem(self.ctx, v))
            if "," in s:
                s = f"({s})"
            terms.append(s if i == 0 else f"{s}*X" if i == 1 else f"{s}*X^{i}")
        return " + ".join(terms)

    def __repr__(self) -> str:
        return f"Poly({self})"

    def to_json(self) -> list[str]:
        return [str(x) for x in self.coeffs]


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd (zero if both inputs are zero)."""
    _, a, b = f._common(g)
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_arith(op: str, f: Poly, g=None):
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    if op == "divmod":
        return divmod(f, g)
    if op == "gcd":
        return poly_gcd(f, g)
    if op == "derivative":
        return f.derivative()
    if op == "eval":
        return f.eval(g)
    raise ValueError(f"unknown operation {op!r}")


def deflate(f: Poly, r: FieldElem) -> tuple[int, Poly]:
    """Divide ``f`` by (X - r) as long as the division is exact."""
    ctx = f.ctx
    if r.ctx is not ctx:
        r = ctx.embed(r)
    mult = 0
    cur = list(f.c)
    rv = r.v
    while cur:
        # synthetic division by (X - r)
        q = [0] * (len(cur) - 1)
        acc = 0
        for i in range(len(cur) - 1, -1, -1):
            acc = ctx.add_v(ctx.mul_v(acc, rv), cur[i])
            if i:
                q[i - 1] = acc
        if acc != 0:
            break
        mult += 1
        cur = q
    return mult, Poly._raw(ctx, cur)


def roots_with_multiplicity(f: Poly, target: FieldCtx) -> list[tuple[FieldElem, int]]:
    """All roots of ``f`` lying in ``target``, by exhaustive scan, in canonical order.

    ``target`` may be an extension of f's field or a subfield of it; roots
    are returned as elements of ``target``.
    """
    if f.is_zero():
        raise ValueError("the zero polynomial has every element as a root")
    check_budget(target.order)
    if target.contains(f.ctx):
        work = f.over(target)
        lift = None
    elif f.ctx.contains(target):
        work = f
        table = f.ctx.embedding_table(target)
        lift = table
    else:
        raise FieldError(f"{target} and {f.ctx} are not comparable")
    ctx = work.ctx
    out = []
    cs = work.c[::-1]
    add, mul = ctx.add_v, ctx.mul_v
    for v in range(target.order):
        xv = lift[v] if lift is not None else v
        acc = 0
        for cv in cs:
            acc = add(mul(acc, xv), cv)
        if acc == 0:
            m, _ = deflate(work, FieldElem(ctx, xv))
            out.append((FieldElem(target, v), m))
    assert sum(m for _, m in out) <= f.degree
    return out


def is_irreducible_quadratic(a: FieldElem, b: FieldElem) -> bool:
    """Whether X^2 - aX + b has no root in the field of a and b."""
    ctx = a.ctx
    chi = Poly(ctx, [b, -a, 1])
    exhaustive = not roots_with_multiplicity(chi, ctx)
    if ctx.p != 2:
        disc = a * a - 4 * b
        assert exhaustive == (disc != 0 and not is_square(disc)), "discriminant test disagrees"
    return exhaustive


def minimal_quadratic(x: FieldElem, base: FieldCtx) -> tuple[FieldElem, FieldElem]:
    """(t, n) with X^2 - tX + n the characteristic polynomial of x over ``base``."""
    return trace_norm(x, base)


def poly_from_strings(ctx: FieldCtx, coeffs: Sequence[str]) -> Poly:
    return Poly(ctx, [ctx.parse(s) for s in coeffs])

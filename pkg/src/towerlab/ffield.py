"""Exact arithmetic in finite fields F_{p^N}.

Every field is an absolute extension of its prime field, given by a monic
irreducible modulus over F_p. Elements are stored as integers
``v = c0 + c1*p + ... + c_{N-1}*p^(N-1)`` where ``c_i`` are the coefficients
in the power basis of the class of X. That integer is also the canonical
element order used for every deterministic enumeration in the package.

Multiplication and addition go through exp/log/Zech tables built once per
modulus, so all element operations are O(1) table lookups.
"""
from __future__ import annotations

import itertools
import os
from functools import lru_cache
from typing import Iterator, Sequence

DEFAULT_BUDGET = 1 << 20


class FieldError(ValueError):
    pass


class FieldSizeError(FieldError):
    """Raised when a request exceeds the exhaustive-enumeration budget."""


def size_budget() -> int:
    """Largest field (or enumeration) size any exhaustive sweep may touch."""
    env = os.environ.get("TOWERLAB_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def check_budget(size: int, what: str = "field") -> None:
    limit = size_budget()
    if size > limit:
        raise FieldSizeError(f"{what} of size {size} exceeds budget {limit}")


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Split ``q = p**n``; raise if q is not a prime power."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    n, r = 0, q
    while r % p == 0:
        r //= p
        n += 1
    if r != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, n


def _factorize(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# --- dense polynomials over F_p as little-endian int lists (modulus plumbing)

def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _pmod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = _trim(list(a))
    inv_lead = pow(m[-1], p - 2, p)
    dm = len(m) - 1
    while a and len(a) - 1 >= dm:
        k = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - k * mi) % p
        _trim(a)
    return a


def _pmulmod(a: Sequence[int], b: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pmod(out, m, p)


def _powmod(c: list[int], e: int, m: Sequence[int], p: int) -> list[int]:
    r, b = [1], c
    while e:
        if e & 1:
            r = _pmulmod(r, b, m, p)
        b = _pmulmod(b, b, m, p)
        e >>= 1
    return r


def _to_coeffs(v: int, p: int, n: int) -> list[int]:
    c = []
    for _ in range(n):
        v, r = divmod(v, p)
        c.append(r)
    return c


def _from_coeffs(c: Sequence[int], p: int) -> int:
    v = 0
    for x in reversed(list(c)):
        v = v * p + x % p
    return v


def monic_polys(p: int, degree: int) -> Iterator[tuple[int, ...]]:
    """Monic degree-``degree`` polynomials over F_p in canonical order.

    Canonical order compares the non-leading coefficients as the integer
    ``c0 + c1*p + ...``, i.e. the highest non-leading coefficient is most
    significant (``X^2 + 2`` precedes ``X^2 + X + 1``).
    """
    for v in range(p ** degree):
        yield tuple(_to_coeffs(v, p, degree)) + (1,)


def is_irreducible_fp(modulus: Sequence[int], p: int) -> bool:
    """Exhaustive trial division by every monic polynomial of degree <= N/2."""
    m = list(modulus)
    d = len(m) - 1
    if d < 1 or m[-1] % p == 0:
        return False
    if d == 1:
        return True
    for k in range(1, d // 2 + 1):
        for h in monic_polys(p, k):
            if not _pmod(m, h, p):
                return False
    return True


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, degree: int) -> tuple[int, ...]:
    for m in monic_polys(p, degree):
        if is_irreducible_fp(m, p):
            return m
    raise FieldError(f"no irreducible polynomial of degree {degree} over F_{p}")  # pragma: no cover


@lru_cache(maxsize=None)
def _tables(p: int, modulus: tuple[int, ...]):
    """(primitive element, exp, log, zech) for F_p[X]/(modulus)."""
    n = len(modulus) - 1
    Q = p ** n
    N = Q - 1
    primes = _factorize(N)
    gen = 1
    for v in range(1, Q):
        c = _to_coeffs(v, p, n)
        if all(_powmod(c, N // r, modulus, p) != [1] for r in primes):
            gen = v
            break
    exp = [0] * N
    log = [-1] * Q
    cur = [1]
    g = _to_coeffs(gen, p, n)
    for i in range(N):
        v = _from_coeffs(cur, p)
        exp[i] = v
        log[v] = i
        cur = _pmulmod(cur, g, modulus, p)
    zech = [-1] * N
    for i in range(N):
        v = exp[i]
        w = v - (p - 1) if v % p == p - 1 else v + 1
        zech[i] = log[w]
    return gen, exp, log, zech


class FieldCtx:
    """The field F_p[X]/(modulus).

    Build through :func:`make_field_tower` or :func:`field_from_modulus`.
    A context belongs to exactly one tower: ``base`` is the F_q it was built
    over and ``degree_over_base`` the k in F_{q^k}.
    """

    def __init__(self, p: int, modulus: Sequence[int]):
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        modulus = tuple(int(c) % p for c in modulus)
        if modulus[-1] != 1:
            raise FieldError("modulus must be monic")
        if not is_irreducible_fp(modulus, p):
            raise FieldError(f"modulus {list(modulus)} is reducible over F_{p}")
        self.p = p
        self.modulus = modulus
        self.n = len(modulus) - 1
        self.order = p ** self.n
        check_budget(self.order)
        self.base: FieldCtx | None = None
        self.degree_over_base = 1
        self._embeddings: dict[FieldCtx, tuple[int, ...]] = {}
        self._restrictions: dict[FieldCtx, dict[int, int]] = {}
        # F_{q^k} built over this context, when it is the bottom of a tower
        self._ext: dict[int, FieldCtx] = {}
        self.primitive, self._exp, self._log, self._zech = _tables(p, modulus)
        self._half = (self.order - 1) // 2 if p != 2 else 0

    def _to_coeffs(self, v: int) -> list[int]:
        return _to_coeffs(v, self.p, self.n)

    def _from_coeffs(self, c: Sequence[int]) -> int:
        return _from_coeffs(c, self.p)

    # -- raw int arithmetic

    def add_v(self, u: int, v: int) -> int:
        if u == 0:
            return v
        if v == 0:
            return u
        N = self.order - 1
        i = self._log[u]
        z = self._zech[(self._log[v] - i) % N]
        return 0 if z < 0 else self._exp[(i + z) % N]

    def neg_v(self, u: int) -> int:
        if u == 0:
            return 0
        return self._exp[(self._log[u] + self._half) % (self.order - 1)]

    def sub_v(self, u: int, v: int) -> int:
        return self.add_v(u, self.neg_v(v))

    def mul_v(self, u: int, v: int) -> int:
        if u == 0 or v == 0:
            return 0
        return self._exp[(self._log[u] + self._log[v]) % (self.order - 1)]

    def inv_v(self, u: int) -> int:
        if u == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._exp[-self._log[u] % (self.order - 1)]

    def pow_v(self, u: int, e: int) -> int:
        if u == 0:
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if e == 0 else 0
        return self._exp[self._log[u] * e % (self.order - 1)]

    def int_v(self, k: int) -> int:
        return k % self.p

    # -- element construction

    def __call__(self, value) -> FieldElem:
        if isinstance(value, FieldElem):
            return self.embed(value)
        if isinstance(value, int):
            return FieldElem(self, value % self.p)
        if isinstance(value, str):
            return self.parse(value)
        return self.from_coeffs(list(value))

    def elem(self, v: int) -> FieldElem:
        if not 0 <= v < self.order:
            raise FieldError(f"encoding {v} out of range for {self}")
        return FieldElem(self, v)

    def from_coeffs(self, coeffs: Sequence[int]) -> FieldElem:
        if len(coeffs) > self.n:
            raise FieldError("too many coefficients")
        return FieldElem(self, self._from_coeffs(coeffs))

    def parse(self, text: str) -> FieldElem:
        """Inverse of ``str(elem)``: little-endian coefficients ``"c0,c1,..."``."""
        parts = [s for s in text.replace(" ", "").split(",") if s]
        return self.from_coeffs([int(s) for s in parts])

    @property
    def zero(self) -> FieldElem:
        return FieldElem(self, 0)

    @property
    def one(self) -> FieldElem:
        return FieldElem(self, 1)

    @property
    def gen(self) -> FieldElem:
        """Class of X (equals ``-modulus[0]`` in a prime field)."""
        if self.n == 1:
            return FieldElem(self, (-self.modulus[0]) % self.p)
        return FieldElem(self, self.p)

    def primitive_element(self) -> FieldElem:
        """First generator of the multiplicative group in canonical order."""
        return FieldElem(self, self.primitive)

    def elements(self) -> Iterator[FieldElem]:
        for v in range(self.order):
            yield FieldElem(self, v)

    def nonzero(self) -> Iterator[FieldElem]:
        for v in range(1, self.order):
            yield FieldElem(self, v)

    # -- embeddings

    def contains(self, sub: FieldCtx) -> bool:
        return sub is self or (sub.n == 1 and sub.p == self.p) or sub in self._embeddings

    def embed(self, x: FieldElem) -> FieldElem:
        """Image of ``x`` (from a registered subfield) in this field."""
        src = x.ctx
        if src is self:
            return x
        if src.n == 1 and src.p == self.p:
            return FieldElem(self, x.v)
        try:
            return FieldElem(self, self._embeddings[src][x.v])
        except KeyError:
            raise FieldError(f"{src} is not a registered subfield of {self}") from None

    def restrict(self, x: FieldElem, sub: FieldCtx) -> FieldElem:
        """Preimage of ``x`` in ``sub``; raises if x does not lie in the subfield."""
        x = self.embed(x)
        if sub is self:
            return x
        if sub.n == 1 and sub.p == self.p:
            if x.v >= self.p:
                raise FieldError(f"{x} is not in the prime field")
            return FieldElem(sub, x.v)
        try:
            return FieldElem(sub, self._restrictions[sub][x.v])
        except KeyError:
            raise FieldError(f"{x} does not lie in {sub}") from None

    def register_embedding(self, sub: FieldCtx, table: Sequence[int]) -> None:
        table = tuple(table)
        self._embeddings[sub] = table
        self._restrictions[sub] = {w: v for v, w in enumerate(table)}

    def embedding_table(self, sub: FieldCtx) -> tuple[int, ...]:
        if sub.n == 1 and sub.p == self.p:
            return tuple(range(sub.order))
        return self._embeddings[sub]

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "modulus": list(self.modulus)}

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, n={self.n}, modulus={list(self.modulus)})"


class FieldElem:
    __slots__ = ("ctx", "v")

    def __init__(self, ctx: FieldCtx, v: int):
        self.ctx = ctx
        self.v = v

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(self.ctx._to_coeffs(self.v))

    def _pair(self, other):
        if isinstance(other, int):
            return self.ctx, self.v, self.ctx.int_v(other)
        if not isinstance(other, FieldElem):
            return None
        a, b = self.ctx, other.ctx
        if a is b:
            return a, self.v, other.v
        if a.contains(b):
            return a, self.v, a.embed(other).v
        if b.contains(a):
            return b, b.embed(self).v, other.v
        raise FieldError(f"context mismatch: {a} vs {b}")

    def __add__(self, other):
        pr = self._pair(other)
        if pr is None:
            return NotImplemented
        ctx, u, v = pr
        return FieldElem(ctx, ctx.add_v(u, v))

    __radd__ = __add__

    def __sub__(self, other):
        pr = self._pair(other)
        if pr is None:
            return NotImplemented
        ctx, u, v = pr
        return FieldElem(ctx, ctx.sub_v(u, v))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pr = self._pair(other)
        if pr is None:
            return NotImplemented
        ctx, u, v = pr
        return FieldElem(ctx, ctx.mul_v(u, v))

    __rmul__ = __mul__

    def __truediv__(self, other):
        pr = self._pair(other)
        if pr is None:
            return NotImplemented
        ctx, u, v = pr
        return FieldElem(ctx, ctx.mul_v(u, ctx.inv_v(v)))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __neg__(self):
        return FieldElem(self.ctx, self.ctx.neg_v(self.v))

    def __pow__(self, e: int):
        return FieldElem(self.ctx, self.ctx.pow_v(self.v, e))

    def inverse(self) -> FieldElem:
        return FieldElem(self.ctx, self.ctx.inv_v(self.v))

    def is_zero(self) -> bool:
        return self.v == 0

    def __bool__(self) -> bool:
        return self.v != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.v == self.ctx.int_v(other)
        if isinstance(other, FieldElem):
            return self.ctx is other.ctx and self.v == other.v
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.v)

    def __lt__(self, other: FieldElem) -> bool:
        return self.v < other.v

    def __str__(self) -> str:
        c = self.coeffs
        while len(c) > 1 and c[-1] == 0:
            c = c[:-1]
        return ",".join(map(str, c))

    def __repr__(self) -> str:
        return f"FieldElem({self})"


def field_from_modulus(p: int, modulus: Sequence[int]) -> FieldCtx:
    """A standalone context over F_p; arithmetic tables are shared by modulus."""
    ctx = FieldCtx(p, tuple(modulus))
    ctx.base = ctx
    ctx._ext[1] = ctx
    return ctx


@lru_cache(maxsize=None)
def prime_field(p: int) -> FieldCtx:
    return field_from_modulus(p, (0, 1))


def _roots_fp_poly(ctx: FieldCtx, poly: Sequence[int]) -> list[int]:
    """Encodings of all roots in ``ctx`` of a polynomial with F_p coefficients."""
    roots = []
    for v in range(ctx.order):
        acc = 0
        for c in reversed(poly):
            acc = ctx.add_v(ctx.mul_v(acc, v), c % ctx.p)
        if acc == 0:
            roots.append(v)
    return roots


def _embedding_for_root(sub: FieldCtx, sup: FieldCtx, beta: int) -> list[int]:
    powers = [1]
    for _ in range(sub.n - 1):
        powers.append(sup.mul_v(powers[-1], beta))
    table = []
    for v in range(sub.order):
        acc = 0
        for c, pw in zip(sub._to_coeffs(v), powers):
            if c:
                acc = sup.add_v(acc, sup.mul_v(c, pw))
        table.append(acc)
    return table


def link_fields(sub: FieldCtx, sup: FieldCtx, via: FieldCtx | None = None) -> None:
    """Register the embedding sub -> sup.

    The generator of ``sub`` goes to the first root (canonical order) of its
    modulus in ``sup``. With ``via`` given, only roots compatible with the
    already registered embeddings of ``via`` into both fields are accepted.
    """
    if sup.contains(sub):
        return
    if sub.p != sup.p or sup.n % sub.n:
        raise FieldError(f"{sub} does not embed into {sup}")
    for beta in _roots_fp_poly(sup, sub.modulus):
        table = _embedding_for_root(sub, sup, beta)
        if via is not None and via.n > 1:
            g = via.gen.v
            if table[sub.embedding_table(via)[g]] != sup.embedding_table(via)[g]:
                continue
        sup.register_embedding(sub, table)
        return
    raise FieldError(f"no compatible embedding of {sub} into {sup}")  # pragma: no cover


def make_field_tower(p: int, n: int, k_max: int,
                     moduli: dict[int, Sequence[int]] | None = None) -> list[FieldCtx]:
    """Contexts for F_q, F_{q^2}, ..., F_{q^k_max} with q = p^n, all linked.

    ``moduli`` optionally fixes the absolute modulus of F_{q^k} for chosen
    k (used to build F_25 from X^2 + X + 2); every other degree uses the
    smallest irreducible in canonical order. Identical requests return the
    identical context objects.
    """
    key = tuple(sorted((k, tuple(m)) for k, m in (moduli or {}).items()))
    return list(_make_field_tower(p, n, k_max, key))


@lru_cache(maxsize=None)
def _make_field_tower(p: int, n: int, k_max: int, moduli: tuple) -> tuple[FieldCtx, ...]:
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if n < 1 or k_max < 1:
        raise FieldError("degrees must be positive")
    check_budget(p ** (n * k_max))
    fixed = dict(moduli)
    base = field_from_modulus(p, fixed.get(1, smallest_irreducible(p, n)))
    if base.n != n:
        raise FieldError("base modulus has the wrong degree")
    for k in range(2, k_max + 1):
        _attach(base, k, fixed.get(k))
    return tuple(base._ext[k] for k in range(1, k_max + 1))


def _attach(base: FieldCtx, k: int, modulus: Sequence[int] | None) -> FieldCtx:
    m = tuple(modulus) if modulus is not None else smallest_irreducible(base.p, base.n * k)
    if len(m) - 1 != base.n * k:
        raise FieldError(f"modulus for degree {k} has the wrong degree")
    ctx = FieldCtx(base.p, m)
    ctx.base = base
    ctx.degree_over_base = k
    link_fields(base, ctx)
    for j in sorted(base._ext):
        if 1 < j < k and k % j == 0:
            link_fields(base._ext[j], ctx, via=base)
    base._ext[k] = ctx
    return ctx


def extension(base: FieldCtx, k: int) -> FieldCtx:
    """F_{q^k} over ``base`` = F_q, created on demand and linked into the tower."""
    if base.base is not base:
        raise FieldError("extension() needs the bottom field of a tower")
    if k in base._ext:
        return base._ext[k]
    check_budget(base.order ** k)
    return _attach(base, k, None)


# --- spec-level operations

def arith(op: str, x: FieldElem, y=None) -> FieldElem:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    if op == "pow":
        return x ** y
    if op == "neg":
        return -x
    if op == "inv":
        return x.inverse()
    raise FieldError(f"unknown operation {op!r}")


def _base_of(x: FieldElem, base: FieldCtx | None) -> FieldCtx:
    base = base or x.ctx.base
    if base is None or not x.ctx.contains(base):
        raise FieldError(f"{x.ctx} does not lie above {base}")
    return base


def frobenius_q(x: FieldElem, base: FieldCtx | None = None) -> FieldElem:
    """x ** q, the generator of Gal(F_{q^k}/F_q); conjugation when k = 2."""
    return x ** _base_of(x, base).order


def conjugates(x: FieldElem, base: FieldCtx | None = None) -> list[FieldElem]:
    base = _base_of(x, base)
    out = [x]
    for _ in range(x.ctx.n // base.n - 1):
        out.append(out[-1] ** base.order)
    return out


def trace_norm(x: FieldElem, base: FieldCtx | None = None) -> tuple[FieldElem, FieldElem]:
    """Relative trace and norm down to ``base``, returned as elements of ``base``."""
    base = _base_of(x, base)
    cs = conjugates(x, base)
    tr, nm = cs[0], cs[0]
    for c in cs[1:]:
        tr = tr + c
        nm = nm * c
    return x.ctx.restrict(tr, base), x.ctx.restrict(nm, base)


def trace(x: FieldElem, base: FieldCtx | None = None) -> FieldElem:
    return trace_norm(x, base)[0]


def norm(x: FieldElem, base: FieldCtx | None = None) -> FieldElem:
    return trace_norm(x, base)[1]


def in_subfield(x: FieldElem, sub: FieldCtx) -> bool:
    try:
        x.ctx.restrict(x, sub)
    except FieldError:
        return False
    return True


@lru_cache(maxsize=None)
def _square_set(p: int, modulus: tuple[int, ...]) -> frozenset[int]:
    ctx = FieldCtx(p, modulus)
    return frozenset(ctx.mul_v(v, v) for v in range(ctx.order))


def is_square(x: FieldElem) -> bool:
    """Exhaustive membership in the squares, cross-checked by Euler's criterion."""
    ctx = x.ctx
    exhaustive = x.v in _square_set(ctx.p, ctx.modulus)
    if ctx.p != 2 and x.v:
        euler = ctx.pow_v(x.v, (ctx.order - 1) // 2) == 1
        assert euler == exhaustive, "Euler criterion disagrees with exhaustion"
    return exhaustive


def find_nonsquares(ctx: FieldCtx) -> list[FieldElem]:
    if ctx.p == 2:
        raise FieldError("every element is a square in characteristic 2")
    return [x for x in ctx.elements() if not is_square(x)]


def all_tuples(ctx: FieldCtx, r: int) -> Iterator[tuple[FieldElem, ...]]:
    """All r-tuples over ctx in lexicographic canonical order."""
    return itertools.product(list(ctx.elements()), repeat=r)

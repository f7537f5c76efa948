"""The Singer-subgroup cover f: P^1 -> P^1 of degree q + 1 and its checks."""
from __future__ import annotations

from dataclasses import dataclass

from .ffield import FieldCtx, FieldElem, frobenius_q, norm, trace, trace_norm
from .projline import (
    Mobius,
    P1Point,
    RatMap,
    fiber,
    is_galois_invariant,
    mobius_apply,
    mobius_search,
    p1_points,
    ramification_index,
    ramification_profile,
    ratmap_compose_mobius,
    ratmap_eval,
)
from .unipoly import Poly, is_irreducible_quadratic, roots_with_multiplicity


class SingerError(ValueError):
    pass


@dataclass(frozen=True)
class SingerData:
    base: FieldCtx          # F_q
    ext: FieldCtx           # F_{q^2}
    a: FieldElem            # trace of theta
    b: FieldElem            # norm of theta
    theta: FieldElem
    generator: Mobius       # generates the isotropy group of Q in PGL_2(F_q)
    f: RatMap

    @property
    def q(self) -> int:
        return self.base.order

    @property
    def Q(self) -> P1Point:
        return P1Point.finite(self.theta)

    @property
    def Qbar(self) -> P1Point:
        return P1Point.finite(frobenius_q(self.theta, self.base))

    @property
    def S(self) -> list[P1Point]:
        """P^1(F_q) viewed inside P^1(F_{q^2})."""
        return [P.over(self.ext) for P in p1_points(self.base)]

    @property
    def R(self) -> frozenset[P1Point]:
        return ramification_locus(self.base, self.ext)

    def is_in_R(self, P: P1Point) -> bool:
        return P.v is not None and P.over(self.ext) in self.R

    def group(self) -> list[Mobius]:
        out = [Mobius.identity(self.base)]
        while len(out) <= self.q + 1:
            nxt = self.generator @ out[-1]
            if nxt == out[0]:
                break
            out.append(nxt)
        return out


_R_CACHE: dict[tuple[int, int], frozenset[P1Point]] = {}


def ramification_locus(base: FieldCtx, ext: FieldCtx) -> frozenset[P1Point]:
    """P^1(F_{q^2}) minus P^1(F_q)."""
    key = (id(base), id(ext))
    if key not in _R_CACHE:
        rational = set(ext.embedding_table(base))
        _R_CACHE[key] = frozenset(P1Point(ext, v) for v in range(ext.order) if v not in rational)
    return _R_CACHE[key]


def singer_cover(base: FieldCtx, a: FieldElem, b: FieldElem) -> RatMap:
    """(x^{q+1} - a x + b) / (x^q - x)."""
    q = base.order
    num = Poly(base, [b, -a] + [0] * (q - 1) + [1])
    den = Poly(base, [0, -1] + [0] * (q - 2) + [1])
    return RatMap(num, den)


def singer_generator(base: FieldCtx, ext: FieldCtx, a: FieldElem, b: FieldElem,
                     theta: FieldElem) -> Mobius:
    """Multiplication by a primitive element of F_{q^2} in the basis {1, theta}, mod scalars.

    For lam = u + v*theta the matrix [[u + a v, -b v], [v, u]] has the
    eigenvectors (theta, 1) and (conj theta, 1), so it fixes Q and its
    conjugate, and its class in PGL_2(F_q) has order q + 1.
    """
    lam = ext.primitive_element()
    lam_bar = frobenius_q(lam, base)
    theta_bar = frobenius_q(theta, base)
    v = (lam - lam_bar) / (theta - theta_bar)
    u = lam - v * theta
    u, v = ext.restrict(u, base), ext.restrict(v, base)
    return Mobius(base, u + a * v, -b * v, v, u)


def build_singer(base: FieldCtx, ext: FieldCtx, a, b, verify: bool = True) -> SingerData:
    a, b = base(a), base(b)
    if not is_irreducible_quadratic(a, b):
        raise SingerError(f"X^2 - ({a})X + ({b}) is reducible over F_{base.order}")
    chi = Poly(base, [b, -a, 1])
    theta = roots_with_multiplicity(chi, ext)[0][0]
    sd = SingerData(base, ext, a, b, theta, singer_generator(base, ext, a, b, theta),
                    singer_cover(base, a, b))
    if verify:
        report = verify_cover(sd)
        bad = [k for k, ok in report.items() if not ok]
        if bad:
            raise SingerError(f"cover verification failed: {bad}")  # pragma: no cover
    return sd


def first_irreducible_pair(base: FieldCtx) -> tuple[FieldElem, FieldElem]:
    """First (a, b) in canonical order with X^2 - aX + b irreducible over base."""
    for a in base.elements():
        for b in base.elements():
            if is_irreducible_quadratic(a, b):
                return a, b
    raise SingerError("no irreducible quadratic")  # pragma: no cover


def verify_cover(sd: SingerData) -> dict[str, bool]:
    q, f = sd.q, sd.f
    ext = sd.ext
    inf = P1Point.inf(ext)
    Q, Qb = sd.Q, sd.Qbar
    report: dict[str, bool] = {}
    report["fixes_Q_Qbar_inf"] = f(Q) == Q and f(Qb) == Qb and f(inf) == inf
    report["Q_Qbar_totally_ramified"] = (
        ramification_index(f, Q) == q + 1 and ramification_index(f, Qb) == q + 1)
    split = fiber(f, P1Point.inf(sd.base), sd.base)
    report["inf_totally_split"] = (
        sorted(P for P, _ in split) == p1_points(sd.base) and all(m == 1 for _, m in split))
    prof = ramification_profile(f, ext)
    report["no_other_ramification"] = (
        set(prof) == {Q, Qb} and sum(e - 1 for e in prof.values()) == 2 * q)
    G = sd.group()
    report["galois_invariant"] = (
        len(G) == q + 1 and all(is_galois_invariant(f, s) for s in G))
    report["generator_fixes_Q"] = sd.generator(Q) == Q and sd.generator(Qb) == Qb
    orbit = {s(P1Point.inf(sd.base)) for s in G}
    report["transitive_on_S"] = len(orbit) == q + 1
    return report


def isotropy_by_search(sd: SingerData) -> list[Mobius]:
    """Brute-force cross-check of the Singer group: PGL_2(F_q) elements fixing Q."""
    return mobius_search(sd.base, [(sd.Q, sd.Q)])


def image_of_R(sd: SingerData) -> set[P1Point]:
    return {ratmap_eval(sd.f, P) for P in sd.R}


def trace_fiber(sd: SingerData) -> set[P1Point]:
    """{(gamma : 1) : Tr(gamma) = a}."""
    return {P1Point.finite(x) for x in sd.ext.elements() if trace(x, sd.base) == sd.a}


def image_is_trace_fiber(sd: SingerData) -> bool:
    img = image_of_R(sd)
    return img == trace_fiber(sd) and len(img) == sd.q


def mu_map(sd: SingerData, swap: bool = False) -> Mobius:
    """x -> (x - theta) / (x - conj theta), over F_{q^2}."""
    t, tb = sd.theta, frobenius_q(sd.theta, sd.base)
    if swap:
        t, tb = tb, t
    return Mobius(sd.ext, 1, -t, 1, -tb)


def mu_conjugation_check(sd: SingerData, swap: bool = False) -> bool:
    """mu o f o mu^-1 == x^{q+1}, and N(mu(P)) = 1 on P^1(F_q)."""
    mu = mu_map(sd, swap)
    conj = ratmap_compose_mobius(mu.inverse(), sd.f, mu)
    target = RatMap(Poly.monomial(sd.ext, sd.q + 1), Poly(sd.ext, [1]))
    if conj != target:
        return False
    for P in p1_points(sd.base):
        img = mobius_apply(mu, P)
        if img.is_inf or norm(img.x, sd.base) != 1:
            return False
    return True


def fiber_sizes_on_R(sd: SingerData) -> dict[P1Point, int]:
    """#(f^-1(t) cap R) for each t in f(R)."""
    out: dict[P1Point, int] = {}
    for P in sd.R:
        t = ratmap_eval(sd.f, P)
        out[t] = out.get(t, 0) + 1
    return out


def singer_summary(sd: SingerData) -> dict:
    tr, nm = trace_norm(sd.theta, sd.base)
    return {
        "q": sd.q,
        "a": str(sd.a),
        "b": str(sd.b),
        "theta": str(sd.theta),
        "trace_theta": str(tr),
        "norm_theta": str(nm),
        "generator": sd.generator.to_json(),
        "f": sd.f.to_json(),
    }

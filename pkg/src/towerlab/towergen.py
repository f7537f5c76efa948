"""Choice of phi and psi, construction of g, and validation of a tower spec."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator

from .ffield import (
    FieldCtx,
    FieldElem,
    is_square,
    make_field_tower,
    prime_power,
    trace,
    trace_norm,
)
from .projline import (
    Mobius,
    P1Point,
    RatMap,
    fiber,
    mobius_search,
    p1_points,
    ramification_index,
    ramification_profile,
    ratmap_compose_mobius,
)
from .singer import SingerData, build_singer, first_irreducible_pair, image_of_R
from .unipoly import Poly, is_irreducible_quadratic, roots_with_multiplicity


class SpecError(ValueError):
    """A named precondition failed while building a tower spec."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class PhiParams:
    c: FieldElem
    d: FieldElem

    @property
    def mobius(self) -> Mobius:
        return Mobius.affine(self.c, self.d)

    def __str__(self) -> str:
        return f"({self.c})x + ({self.d})"


@dataclass(frozen=True)
class TowerSpec:
    sd: SingerData
    phi: PhiParams
    psi: Mobius
    g: RatMap
    provenance: str          # generic-search | closed-form | q5-instance | forced
    notes: tuple = field(default=())

    @property
    def base(self) -> FieldCtx:
        return self.sd.base

    @property
    def ext(self) -> FieldCtx:
        return self.sd.ext

    @property
    def q(self) -> int:
        return self.sd.q

    @property
    def f(self) -> RatMap:
        return self.sd.f

    @property
    def Q(self) -> P1Point:
        return self.sd.Q

    @property
    def Qbar(self) -> P1Point:
        return self.sd.Qbar

    @property
    def rho_point(self) -> P1Point:
        return self.psi.inverse()(self.Q.over(self.ext))

    @property
    def rho(self) -> FieldElem:
        return self.rho_point.x

    @property
    def nu_point(self) -> P1Point:
        return self.phi.mobius(self.Q)

    @property
    def t(self) -> FieldElem:
        return trace_norm(self.rho, self.base)[0]

    @property
    def n_param(self) -> FieldElem:
        return trace_norm(self.rho, self.base)[1]

    def to_json(self) -> dict:
        return {
            "p": self.base.p,
            "n": self.base.n,
            "q": self.q,
            "modulus": list(self.ext.modulus),
            "base_modulus": list(self.base.modulus),
            "a": str(self.sd.a),
            "b": str(self.sd.b),
            "t": str(self.t),
            "n_param": str(self.n_param),
            "c": str(self.phi.c),
            "d": str(self.phi.d),
            "psi": self.psi.to_json(),
            "f": self.f.to_json(),
            "g": self.g.to_json(),
            "theta": str(self.sd.theta),
            "rho": str(self.rho),
            "nu": str(self.nu_point),
            "display": {"f": self.f.pretty(), "g": self.g.pretty()},
            "provenance": self.provenance,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


# --- phi

def _affine_pairs(sd: SingerData) -> Iterator[tuple[FieldElem, FieldElem]]:
    for c in sd.base.nonzero():
        for d in sd.base.elements():
            yield c, d


def trace_condition(sd: SingerData, c: FieldElem, d: FieldElem) -> bool:
    """(1 - c) a == 2 d with c != 0."""
    return not c.is_zero() and (1 - c) * sd.a == 2 * d


def excluded_phi(sd: SingerData) -> set[tuple[int, int]]:
    """(1, 0) fixes Q and (-1, a) swaps Q with its conjugate."""
    one = sd.base.one
    return {(one.v, 0), ((-one).v, sd.a.v)}


def phi_candidates(sd: SingerData) -> list[PhiParams]:
    bad = excluded_phi(sd)
    return [PhiParams(c, d) for c, d in _affine_pairs(sd)
            if trace_condition(sd, c, d) and (c.v, d.v) not in bad]


def brute_force_phi_oracle(sd: SingerData) -> list[PhiParams]:
    """Every affine (c, d) over F_q that maps f(R) onto itself, by direct test."""
    fR = image_of_R(sd)
    out = []
    for c, d in _affine_pairs(sd):
        M = Mobius.affine(c, d)
        if all(M(P) in fR for P in fR):
            out.append(PhiParams(c, d))
    return out


# --- psi

def t_set(sd: SingerData, phi: PhiParams) -> list[P1Point]:
    """f^-1(phi^-1(Q)): the points T with psi(Q) = T giving g(Q) = Q."""
    V = phi.mobius.inverse()(sd.Q)
    pts = fiber(sd.f, V, sd.ext)
    assert all(m == 1 for _, m in pts)
    out = [P for P, _ in pts]
    assert all(sd.is_in_R(P) for P in out), "T-set leaves R"
    return out


def psi_candidates(sd: SingerData, phi: PhiParams) -> list[tuple[P1Point, Mobius]]:
    out = []
    for T in t_set(sd, phi):
        for psi in mobius_search(sd.base, [(sd.Q, T)]):
            out.append((T, psi))
    return out


# --- g

def build_g_composed(sd: SingerData, phi: PhiParams, psi: Mobius) -> RatMap:
    return ratmap_compose_mobius(psi, sd.f, phi.mobius)


def closed_form_c(a, b, t, n, sign: int = -1) -> FieldElem:
    """(2b + 2n + sign*t*a) / (4b - a^2); the consistent choice is sign = -1."""
    den = 4 * b - a * a
    if den.is_zero():
        raise SpecError("degenerate-theta", "4b - a^2 vanishes")
    return (2 * b + 2 * n + sign * t * a) / den


def build_g_closed_form(sd: SingerData, t, n, sign: int = -1) -> tuple[RatMap, FieldElem]:
    """(x^{q+1} + c_q x^q + c_1 x + n) / (c (x^q - x)) with g(Q) = Q.

    c_q + c_1 = -t and c_q - c_1 = c a come from matching g(theta) = theta
    in the basis {1, theta}.
    """
    base = sd.base
    if base.p == 2:
        raise SpecError("even-characteristic", "closed form needs odd characteristic")
    t, n = base(t), base(n)
    if not is_irreducible_quadratic(t, n):
        raise SpecError("rho-reducible", f"X^2 - ({t})X + ({n}) is reducible")
    if t == sd.a and n == sd.b:
        raise SpecError("rho-is-theta", "rho coincides with theta or its conjugate")
    c = closed_form_c(sd.a, sd.b, t, n, sign)
    if c.is_zero():
        raise SpecError("c-zero", "the closed-form constant c vanishes")
    q = sd.q
    cq = (c * sd.a - t) / 2
    c1 = -t - cq
    num = Poly(base, [n, c1] + [0] * (q - 2) + [cq, 1])
    den = Poly(base, [0, -c] + [0] * (q - 2) + [c])
    return RatMap(num, den), c


def recover_phi(sd: SingerData, g: RatMap, psi: Mobius) -> PhiParams | None:
    """The affine phi with g == phi o f o psi, if one exists."""
    h = ratmap_compose_mobius(psi, sd.f, None)
    if h.den != g.den:
        return None
    q = sd.q
    c = g.num.coeff(q + 1) / h.num.coeff(q + 1)
    d = g.num.coeff(q) - c * h.num.coeff(q)
    if c.is_zero():
        return None
    phi = PhiParams(c, d)
    return phi if build_g_composed(sd, phi, psi) == g else None


def make_spec(sd: SingerData, phi: PhiParams, psi: Mobius, provenance: str,
              g: RatMap | None = None) -> TowerSpec:
    return TowerSpec(sd, phi, psi, g if g is not None else build_g_composed(sd, phi, psi),
                     provenance)


def default_singer(p: int, n: int) -> SingerData:
    base, ext = make_field_tower(p, n, 2)
    a, b = first_irreducible_pair(base)
    return build_singer(base, ext, a, b)


def generic_spec(sd: SingerData, phi_index: int = 0, t_index: int = 0,
                 psi_index: int = 0) -> TowerSpec:
    phis = phi_candidates(sd)
    if not phis:
        raise SpecError("no-phi", f"no valid phi: construction fails for q={sd.q}")
    try:
        phi = phis[phi_index]
        Ts = t_set(sd, phi)
        T = Ts[t_index]
        psi = mobius_search(sd.base, [(sd.Q, T)])[psi_index]
    except IndexError:
        raise SpecError("index", "generic-path index out of range") from None
    return make_spec(sd, phi, psi, "generic-search")


def forced_spec(sd: SingerData, phi: PhiParams, T: P1Point, psi_index: int = 0) -> TowerSpec:
    """Bypass the candidate filters: any affine phi and any psi with psi(Q) = T.

    Used for negative controls such as phi(Q) = conj(Q) with psi(Q) = conj(Q).
    """
    psi = mobius_search(sd.base, [(sd.Q, T)])[psi_index]
    return make_spec(sd, phi, psi, "forced")


@dataclass
class SearchResult:
    specs: list[TowerSpec]      # one per distinct g
    candidates: int             # (phi, rho) classes examined
    valid: int                  # classes passing validate_spec
    phi_count: int


def search_specs(sd: SingerData, validate: bool = True) -> SearchResult:
    """Valid towers in deterministic order, one spec per distinct g.

    psi and sigma o psi (sigma in the Singer group) give the same g and
    share rho = psi^-1(Q), so each rho is examined once per phi. Classes
    (phi, rho) and (phi', conj rho) related through the normaliser of the
    Singer group also give the same g; only the first is emitted.
    """
    phis = phi_candidates(sd)
    specs, seen_g = [], set()
    n = valid = 0
    for phi in phis:
        seen = set()
        for T, psi in psi_candidates(sd, phi):
            rho = psi.inverse()(sd.Q)
            if rho in seen:
                continue
            seen.add(rho)
            n += 1
            spec = make_spec(sd, phi, psi, "generic-search")
            if validate and not all(validate_spec(spec).values()):
                continue
            valid += 1
            if spec.g not in seen_g:
                seen_g.add(spec.g)
                specs.append(spec)
    return SearchResult(specs, n, valid, len(phis))


# --- the a = 0, t = 0 family and the q = 5 instance

def family_conditions(base: FieldCtx, b: FieldElem, n: FieldElem) -> dict[str, bool]:
    """The printed hypotheses on (b, n) for the a = t = 0 family."""
    odd = base.p != 2
    return {
        "odd_characteristic": odd,
        "q_greater_than_5": base.order > 5,
        "minus_b_nonsquare": odd and not is_square(-b),
        "minus_n_nonsquare": odd and not is_square(-n),
        "n_not_b": n != b,
        "n_not_minus_b": n != -b,
    }


_FAMILY_MESSAGES = {
    "odd_characteristic": "odd characteristic required",
    "q_greater_than_5": "q > 5 required",
    "minus_b_nonsquare": "-b must be a nonsquare",
    "minus_n_nonsquare": "-n must be a nonsquare",
    "n_not_b": "n must differ from b",
    "n_not_minus_b": "n must differ from -b",
}


def _field_for_q(q: int) -> tuple[FieldCtx, FieldCtx]:
    p, n = prime_power(q)
    base, ext = make_field_tower(p, n, 2)
    return base, ext


def standard_family(q: int, b, n_param, validate: bool = True) -> TowerSpec:
    """f = (x^{q+1} + b)/(x^q - x), g = 2b(x^{q+1} + n)/((b + n)(x^q - x))."""
    base, ext = _field_for_q(q)
    b, n = base(b), base(n_param)
    for name, ok in family_conditions(base, b, n).items():
        if not ok:
            raise SpecError(name, _FAMILY_MESSAGES[name])
    sd = build_singer(base, ext, 0, b)
    g, _ = build_g_closed_form(sd, 0, n)
    rho = roots_with_multiplicity(Poly(base, [n, 0, 1]), ext)[0][0]
    psi = mobius_search(base, [(P1Point.finite(rho), sd.Q)])[0]
    phi = recover_phi(sd, g, psi)
    if phi is None:  # pragma: no cover - would contradict the decomposition argument
        raise SpecError("no-decomposition", "closed-form g is not phi o f o psi")
    spec = TowerSpec(sd, phi, psi, g, "closed-form")
    if validate:
        bad = [k for k, ok in validate_spec(spec).items() if not ok]
        if bad:
            raise SpecError("validation", f"family spec fails {bad}")
    return spec


def family_pairs(base: FieldCtx) -> Iterator[tuple[FieldElem, FieldElem]]:
    """(b, n) pairs meeting every printed family hypothesis, in canonical order."""
    if base.p == 2:
        return
    for b in base.elements():
        for n in base.elements():
            if all(family_conditions(base, b, n).values()):
                yield b, n


def default_family(q: int) -> TowerSpec:
    base, _ = _field_for_q(q)
    for b, n in family_pairs(base):
        return standard_family(q, b, n)
    raise SpecError("q_greater_than_5", f"no admissible (b, n) for q={q}")


def q5_instance() -> TowerSpec:
    """theta a root of X^2 + X + 2 over F_5, phi(x) = 2x + 3, psi(x) = 1/x."""
    base, ext = make_field_tower(5, 1, 2, {2: (2, 1, 1)})
    sd = build_singer(base, ext, 4, 2)
    phi = PhiParams(base(2), base(3))
    psi = Mobius(base, 0, 1, 1, 0)
    return make_spec(sd, phi, psi, "q5-instance")


# --- validation

def validate_spec(spec: TowerSpec) -> dict[str, bool]:
    sd, base, ext, q = spec.sd, spec.base, spec.ext, spec.q
    phi, psi, g = spec.phi.mobius, spec.psi, spec.g
    Q, Qb = sd.Q, sd.Qbar
    inf = P1Point.inf(ext)
    R = sd.R
    S = set(sd.S)
    fR = image_of_R(sd)
    rho = spec.rho_point
    rho_bar = rho.conjugate(base) if not rho.is_inf else rho
    r: dict[str, bool] = {}
    r["phi_psi_over_Fq"] = phi.ctx is base and psi.ctx is base
    r["phi_fixes_inf"] = phi(inf) == inf
    r["phi_preserves_fR"] = {phi(P) for P in fR} == fR
    r["phi_trace_identity"] = trace_condition(sd, spec.phi.c, spec.phi.d)
    r["phi_Q_not_in_Q_Qbar"] = phi(Q) not in (Q, Qb)
    r["psi_preserves_R_S"] = {psi(P) for P in R} == R and {psi(P) for P in S} == S
    r["g_is_composition"] = g == ratmap_compose_mobius(psi, sd.f, phi)
    r["g_fixes_Q"] = g(Q) == Q
    r["Q_unramified_for_g"] = ramification_index(g, Q) == 1
    prof = ramification_profile(g, ext)
    r["g_ramified_exactly_at_rho"] = (
        rho not in (Q, Qb)
        and set(prof) == {rho, rho_bar}
        and all(e == q + 1 for e in prof.values())
        and sum(e - 1 for e in prof.values()) == 2 * q
    )
    split = fiber(g, P1Point.inf(base), base)
    r["g_inf_fiber_split"] = (
        sorted(P for P, _ in split) == p1_points(base) and all(m == 1 for _, m in split))
    nu = spec.nu_point
    r["trace_nu_equals_a"] = not nu.is_inf and trace(nu.x, base) == sd.a
    if base.p != 2:
        try:
            closed, _ = build_g_closed_form(sd, spec.t, spec.n_param)
            r["closed_form_agrees"] = closed == g
        except SpecError:
            r["closed_form_agrees"] = False
    return r


def failed_checks(report: dict[str, bool]) -> list[str]:
    return [k for k, ok in report.items() if not ok]

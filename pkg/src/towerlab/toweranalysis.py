"""Per-level invariants of the tower: genus ladder, chain counts, limit and Weil checks."""
from __future__ import annotations

import csv
import io
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

from .ffield import FieldCtx, check_budget, extension, frobenius_q
from .projline import (
    P1Point,
    RatMap,
    fiber,
    fiber_polynomial,
    p1_points,
    ramification_index,
    ratmap_eval,
)
from .towergen import TowerSpec
from .unipoly import deflate, poly_gcd

DEFAULT_LEVEL_CAP = 6


class AnalysisError(RuntimeError):
    """Internal inconsistency; the CLI maps it to exit code 3."""


class ConfinementError(AnalysisError):
    """A tracked place left the ramification locus R."""


class GenusIntegralityError(AnalysisError):
    pass


class OracleMismatch(AnalysisError):
    pass


# --- correspondence graph

@dataclass
class CorrespondenceGraph:
    ctx: FieldCtx
    nodes: list[P1Point]
    succ: dict[P1Point, list[P1Point]]
    in_R: dict[P1Point, bool]
    in_S: dict[P1Point, bool]

    @property
    def edge_count(self) -> int:
        return sum(len(v) for v in self.succ.values())

    def out_degree(self, P: P1Point) -> int:
        return len(self.succ[P])

    def subgraph(self, keep) -> CorrespondenceGraph:
        nodes = [P for P in self.nodes if keep(P)]
        kept = set(nodes)
        succ = {P: [Y for Y in self.succ[P] if Y in kept] for P in nodes}
        return CorrespondenceGraph(self.ctx, nodes, succ,
                                   {P: self.in_R[P] for P in nodes},
                                   {P: self.in_S[P] for P in nodes})

    def s_subgraph(self) -> CorrespondenceGraph:
        return self.subgraph(lambda P: self.in_S[P])

    def to_dot(self, name: str = "correspondence") -> str:
        lines = [f"digraph {name} {{"]
        for P in self.nodes:
            locus = "S" if self.in_S[P] else "R" if self.in_R[P] else "other"
            shape = {"S": "box", "R": "ellipse", "other": "point"}[locus]
            lines.append(f'  "{P}" [label="{P}", locus="{locus}", shape={shape}];')
        for P in self.nodes:
            for Y in self.succ[P]:
                lines.append(f'  "{P}" -> "{Y}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _values(F: RatMap, ctx: FieldCtx) -> dict[P1Point, P1Point]:
    F = F.over(ctx)
    return {P: ratmap_eval(F, P) for P in p1_points(ctx)}


def build_graph(spec: TowerSpec, k: int) -> CorrespondenceGraph:
    """Edges x -> y over P^1(F_{q^k}) whenever g(y) = f(x)."""
    check_budget(spec.q ** k, "correspondence graph")
    ctx = extension(spec.base, k)
    fv = _values(spec.f, ctx)
    gv = _values(spec.g, ctx)
    preimage: dict[P1Point, list[P1Point]] = defaultdict(list)
    for y, t in gv.items():
        preimage[t].append(y)
    nodes = p1_points(ctx)
    succ = {x: preimage.get(fv[x], []) for x in nodes}
    rational = set(range(ctx.order)) if ctx is spec.base else set(ctx.embedding_table(spec.base))
    in_S = {P: P.v is None or P.v in rational for P in nodes}
    if k % 2 == 0:
        quad = set(range(ctx.order)) if ctx is spec.ext else set(ctx.embedding_table(spec.ext))
        in_R = {P: not in_S[P] and P.v in quad for P in nodes}
    else:
        in_R = {P: False for P in nodes}
    return CorrespondenceGraph(ctx, nodes, succ, in_R, in_S)


def count_chains(graph: CorrespondenceGraph, m: int) -> int:
    """Number of node sequences (P_0, ..., P_m) following edges."""
    cur = {P: 1 for P in graph.nodes}
    for _ in range(m):
        nxt: dict[P1Point, int] = defaultdict(int)
        for P, c in cur.items():
            for Y in graph.succ[P]:
                nxt[Y] += c
        cur = nxt
    return sum(cur.values())


def enumerate_chains(graph: CorrespondenceGraph, m: int, start=None) -> list[tuple]:
    chains = [(P,) for P in graph.nodes if start is None or start(P)]
    for _ in range(m):
        chains = [ch + (Y,) for ch in chains for Y in graph.succ[ch[-1]]]
    return chains


def frobenius_stable(graph: CorrespondenceGraph, base: FieldCtx) -> bool:
    """Relabelling nodes by x -> x^q maps the edge set onto itself."""
    def fr(P: P1Point) -> P1Point:
        return P if P.is_inf else P1Point.finite(frobenius_q(P.x, base))
    edges = {(P, Y) for P in graph.nodes for Y in graph.succ[P]}
    return {(fr(P), fr(Y)) for P, Y in edges} == edges


def splitting_lower_bound(spec: TowerSpec, m: int) -> int:
    """#S (q+1)^m, cross-checked against chain counting on the S-subgraph."""
    q = spec.q
    expected = (q + 1) ** (m + 1)
    counted = count_chains(build_graph(spec, 1).s_subgraph(), m)
    if counted != expected:
        raise AnalysisError(f"S-chain count {counted} != {expected}")
    return expected


def rational_lower_bound(spec: TowerSpec, m: int, k: int) -> int:
    """F_{q^k}-rational chains avoiding R; each is a smooth point of the chain model."""
    g = build_graph(spec, k)
    return count_chains(g.subgraph(lambda P: not g.in_R[P]), m)


# --- genus ladder

@dataclass
class LevelReport:
    m: int
    degree: int
    genus: int | None = None
    delta: int | None = None
    n_lower: int | None = None
    cancellations: int = 0
    states: int = 0
    skipped: bool = False

    @property
    def lam(self) -> Fraction | None:
        if self.skipped or not self.genus or self.genus <= 0:
            return None
        return Fraction(self.n_lower, self.genus)


@dataclass
class _Local:
    """Values and ramification indices of f and g on R, plus g-fibers over f(R)."""
    R: list[P1Point]
    fval: dict
    ef: dict
    eg: dict
    gfib: dict = field(default_factory=dict)


def _local_data(spec: TowerSpec) -> _Local:
    sd, q = spec.sd, spec.q
    R = sorted(sd.R)
    fval = {P: ratmap_eval(spec.f, P) for P in R}
    ef = {P: ramification_index(spec.f, P) for P in R}
    eg = {P: ramification_index(spec.g, P) for P in R}
    gfib: dict[P1Point, list] = defaultdict(list)
    for y in R:
        gfib[ratmap_eval(spec.g, y)].append((y, eg[y]))
    ffib: dict[P1Point, int] = defaultdict(int)
    for x in R:
        ffib[fval[x]] += ef[x]
    # closure: f^-1(f(R)) and g^-1(f(R)) lie in R, with full degree accounted for
    for t in ffib:
        if ffib[t] != q + 1 or sum(e for _, e in gfib.get(t, ())) != q + 1:
            raise ConfinementError(f"fiber over {t} leaves R")
    if set(gfib) != set(ffib):
        raise ConfinementError("g(R) differs from f(R)")
    return _Local(R, fval, ef, eg, dict(gfib))


def _rchains(spec: TowerSpec, m: int) -> set[tuple]:
    g = build_graph(spec, 2)
    return set(enumerate_chains(g, m, start=lambda P: g.in_R[P]))


def genus_ladder(spec: TowerSpec, m_max: int = DEFAULT_LEVEL_CAP, audit: bool = False,
                 level_cap: int = DEFAULT_LEVEL_CAP) -> list[LevelReport]:
    """Exact genus of every level by tracking places above R-chains.

    A state is (last point, e1) where e1 is the ramification index of
    f(last coordinate) at the place. Extending by y with g-index e2 yields
    gcd(e1, e2) places, each ramified e2/gcd over the previous level.
    With ``audit`` the full chain and the index over level 0 are kept too.
    """
    q = spec.q
    loc = _local_data(spec)
    ext_to_local = {P: P for P in loc.R}
    if audit:
        states = Counter({((x,), loc.ef[x], 1): 1 for x in loc.R})
    else:
        states = Counter({(x, loc.ef[x]): 1 for x in loc.R})
    reports = [LevelReport(0, 1, 0, 0, splitting_lower_bound(spec, 0), 0, len(states))]
    genus = 0
    for m in range(1, m_max + 1):
        if m > level_cap:
            reports.append(LevelReport(m, (q + 1) ** m, skipped=True))
            continue
        nxt: Counter = Counter()
        delta = cancel = 0
        for key, cnt in states.items():
            last = key[0][-1] if audit else key[0]
            e1 = key[1]
            for y, e2 in loc.gfib[loc.fval[last]]:
                if y not in ext_to_local:
                    raise ConfinementError(f"place above {y} outside R")
                h = gcd(e1, e2)
                e_rel = e2 // h
                e_new = loc.ef[y] * (e1 // h)
                if audit:
                    nxt[(key[0] + (y,), e_new, key[2] * e_rel)] += cnt * h
                else:
                    nxt[(y, e_new)] += cnt * h
                delta += cnt * h * (e_rel - 1)
                if e2 > 1 and e_rel == 1:
                    cancel += cnt * h
        states = nxt
        chi = (q + 1) * (2 * genus - 2) + delta
        if chi % 2:
            raise GenusIntegralityError(f"odd Euler characteristic at level {m}")
        genus = chi // 2 + 1
        _check_degree(states, loc, q, m, audit)
        if audit:
            _check_audit(spec, states, q, m)
        reports.append(LevelReport(m, (q + 1) ** m, genus, delta,
                                   splitting_lower_bound(spec, m), cancel, len(states)))
    return reports


def _check_degree(states: Counter, loc: _Local, q: int, m: int, audit: bool) -> None:
    mass: dict[P1Point, int] = defaultdict(int)
    for key, cnt in states.items():
        last = key[0][-1] if audit else key[0]
        mass[loc.fval[last]] += key[1] * cnt
    want = (q + 1) ** (m + 1)
    bad = {t: v for t, v in mass.items() if v != want}
    if bad or len(mass) != len(loc.gfib):
        raise AnalysisError(f"degree conservation fails at level {m}")


def _check_audit(spec: TowerSpec, states: Counter, q: int, m: int) -> None:
    down: dict[P1Point, int] = defaultdict(int)
    for (chain, _, e_down), cnt in states.items():
        down[chain[0]] += e_down * cnt
    if any(v != (q + 1) ** m for v in down.values()):
        raise AnalysisError(f"degree over level 0 fails at level {m}")
    if m <= 3 and {ch for ch, _, _ in states} != _rchains(spec, m):
        raise ConfinementError(f"tracked chains differ from R-chains at level {m}")


# --- independent level-1 checks

def level1_genus_oracle(spec: TowerSpec) -> int:
    """Genus of the first level from root multiplicities over every x in P^1(F_{q^2}).

    All branching of the x-projection sits above P^1(F_{q^2}): f is ramified
    only at Q and its conjugate, and g's branch values lie in f(R), whose
    f-fibers are inside R. The residual factor of each fiber polynomial is
    checked squarefree as a guard.
    """
    ext, q = spec.ext, spec.q
    g = spec.g.over(ext)
    f = spec.f.over(ext)
    delta = 0
    for x in p1_points(ext):
        e1 = ramification_index(f, x)
        t = ratmap_eval(f, x)
        h = fiber_polynomial(g, t)
        rest = h
        total = 0
        for y, e2 in fiber(g, t, ext):
            total += e2
            if not y.is_inf:
                _, rest = deflate(rest, y.x)
            k = gcd(e1, e2)
            delta += k * (e2 // k - 1)
        if rest.degree > 0 and poly_gcd(rest, rest.derivative()).degree > 0:
            raise OracleMismatch(f"ramification above {x} outside F_q^2")
        if total + rest.degree != q + 1:
            raise OracleMismatch(f"fiber degree mismatch above {x}")
    chi = (q + 1) * -2 + delta
    if chi % 2:
        raise GenusIntegralityError("odd Euler characteristic in the level-1 oracle")
    return chi // 2 + 1


def bidegree_genus(spec: TowerSpec) -> int | None:
    """(q+1-1)^2 for a smooth bidegree-(q+1, q+1) curve, or None if some point
    is ramified for both projections (g(rho) in {Q, conj Q})."""
    nu = spec.nu_point
    if nu in (spec.Q, spec.Qbar):
        return None
    return spec.q ** 2


# --- limit and Weil

def limit_target(q: int) -> Fraction:
    """2#S/(#R - 2), checked against 2/(q - 2)."""
    n_s, n_r = q + 1, q * q - q
    target = Fraction(2 * n_s, n_r - 2)
    if target != Fraction(2, q - 2):
        raise AnalysisError("limit target identity fails")
    return target


def weil_check(q: int, k: int, N: int, g: int) -> bool:
    """N <= q^k + 1 + 2 g sqrt(q^k), in exact integers."""
    if g < 0:
        return False
    return N <= q ** k + 1 + isqrt(4 * g * g * q ** k)


def limit_report(spec: TowerSpec, m_max: int = DEFAULT_LEVEL_CAP, audit: bool = False,
                 level_cap: int = DEFAULT_LEVEL_CAP) -> dict:
    q = spec.q
    levels = genus_ladder(spec, m_max, audit=audit, level_cap=level_cap)
    target = limit_target(q)
    rows = []
    for lv in levels:
        row = {"report": lv, "weil_ok": None}
        if not lv.skipped:
            row["weil_ok"] = all(weil_check(q, k, lv.n_lower, lv.genus) for k in (1, 2))
        rows.append(row)
    return {"q": q, "target": target, "rows": rows}


CSV_COLUMNS = ["m", "degree", "genus", "delta", "n_lower", "lambda_num", "lambda_den",
               "lambda_decimal", "target_num", "target_den", "weil_ok"]
UNDEFINED = "—"


def format_decimal(fr: Fraction) -> str:
    scaled = round(fr * 10 ** 6)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10 ** 6)
    return f"{sign}{whole}.{frac:06d}"


def report_rows(report: dict) -> list[dict]:
    target = report["target"]
    out = []
    for row in report["rows"]:
        lv: LevelReport = row["report"]
        if lv.skipped:
            rec = {c: "skipped" for c in CSV_COLUMNS}
            rec["m"], rec["degree"] = lv.m, lv.degree
        else:
            lam = lv.lam
            rec = {
                "m": lv.m, "degree": lv.degree, "genus": lv.genus, "delta": lv.delta,
                "n_lower": lv.n_lower,
                "lambda_num": lam.numerator if lam is not None else UNDEFINED,
                "lambda_den": lam.denominator if lam is not None else UNDEFINED,
                "lambda_decimal": format_decimal(lam) if lam is not None else UNDEFINED,
                "weil_ok": "true" if row["weil_ok"] else "false",
            }
        rec["target_num"] = target.numerator
        rec["target_den"] = target.denominator
        out.append(rec)
    return out


def report_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for rec in report_rows(report):
        w.writerow(rec)
    return buf.getvalue()

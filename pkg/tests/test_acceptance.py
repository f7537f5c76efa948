"""Acceptance criteria, one test each; a pass/fail line per criterion is printed
in the pytest terminal summary (see conftest.py) or when run as a script."""
import time
from fractions import Fraction

from towerlab.cli import main
from towerlab.ffield import make_field_tower, prime_power, trace
from towerlab.projline import P1Point, mobius_search, ramification_index
from towerlab.singer import build_singer, image_of_R, image_is_trace_fiber
from towerlab.toweranalysis import (
    bidegree_genus,
    build_graph,
    count_chains,
    genus_ladder,
    level1_genus_oracle,
    limit_target,
    rational_lower_bound,
    splitting_lower_bound,
    weil_check,
)
from towerlab.towergen import (
    SpecError,
    brute_force_phi_oracle,
    build_g_closed_form,
    build_g_composed,
    default_family,
    default_singer,
    failed_checks,
    family_conditions,
    phi_candidates,
    q5_instance,
    recover_phi,
    search_specs,
    standard_family,
    trace_condition,
    validate_spec,
)
from towerlab.unipoly import Poly, is_irreducible_quadratic, roots_with_multiplicity


def _singer(q):
    return default_singer(*prime_power(q))


def test_criterion_1_q5_instance_strings(capsys):
    import json
    start = time.perf_counter()
    code = main(["build", "--q5"])
    elapsed = time.perf_counter() - start
    spec = json.loads(capsys.readouterr().out)
    assert code == 0
    assert spec["display"]["f"] == "(x^6 + x + 2)/(x^5 - x)"
    assert spec["display"]["g"] == "(x^6 + x^5 + 2x + 3)/(x^5 - x)"
    assert elapsed < 1.0


def test_criterion_2_image_of_R_is_trace_fiber():
    for q in (5, 7, 9, 11, 13):
        for sd in ([_singer(q), q5_instance().sd] if q == 5 else [_singer(q)]):
            img = image_of_R(sd)
            fib = {P1Point.finite(x) for x in sd.ext.elements() if trace(x, sd.base) == sd.a}
            assert img == fib and len(img) == q
            assert image_is_trace_fiber(sd)


def test_criterion_3_phi_criterion_is_exact():
    for q in (4, 5, 7, 9, 11, 13):
        sd = _singer(q)
        oracle = {(P.c.v, P.d.v) for P in brute_force_phi_oracle(sd)}
        criterion = {(c.v, d.v) for c in sd.base.nonzero() for d in sd.base.elements()
                     if trace_condition(sd, c, d)}
        assert oracle == criterion


def test_criterion_4_tower_premises():
    specs = [q5_instance()] + [default_family(q) for q in (7, 9, 11, 13)]
    for spec in specs:
        report = validate_spec(spec)
        assert all(report.values()), (spec.q, failed_checks(report))
        assert spec.g(spec.Q) == spec.Q
        assert ramification_index(spec.g, spec.Q) == 1


def test_criterion_5_small_fields():
    for q in (2, 3):
        sd = _singer(q)
        assert phi_candidates(sd) == []
        assert search_specs(sd).specs == []
    assert len(search_specs(_singer(4)).specs) >= 1


def test_criterion_6_genus_ladder_base():
    for q in (5, 7, 9):
        specs = list(search_specs(_singer(q)).specs)
        if q == 5:
            specs.append(q5_instance())
        else:
            specs.append(default_family(q))
        for spec in specs:
            levels = genus_ladder(spec, 1)
            assert levels[0].genus == 0
            assert levels[1].genus == q * q
            assert level1_genus_oracle(spec) == levels[1].genus
            assert bidegree_genus(spec) == (q + 1 - 1) ** 2 == levels[1].genus


def test_criterion_7_limit_ladder():
    start = time.perf_counter()
    target = Fraction(2, 3)
    specs = [q5_instance()] + search_specs(_singer(5)).specs
    for spec in specs:
        levels = genus_ladder(spec, 6)
        lams = [lv.lam for lv in levels[1:]]
        assert all(lam is not None and lam >= target for lam in lams)
        assert lams[0] == Fraction(36, 25)
        assert all(lv.lam == Fraction((5 + 1) ** (lv.m + 1), lv.genus) for lv in levels[1:])
    for q in (4, 5, 7, 8, 9, 11, 13):
        n_s, n_r = q + 1, q * q - q
        assert Fraction(2 * n_s, n_r - 2) == Fraction(2, q - 2) == limit_target(q)
    assert time.perf_counter() - start < 60


def test_criterion_8_counterexample_regression():
    base = make_field_tower(13, 1, 2)[0]
    assert all(family_conditions(base, base(11), base(6)).values())
    spec = standard_family(13, 11, 6, validate=False)
    assert failed_checks(validate_spec(spec)) == ["Q_unramified_for_g"]


def _closed_form_tuples(q, count=20):
    base, ext = make_field_tower(*prime_power(q), 2)
    pairs = [(a, b) for a in base.elements() for b in base.elements()
             if is_irreducible_quadratic(a, b)]
    tuples = []
    for a, b in pairs:
        for t, n in pairs:
            if (t, n) == (a, b):
                continue
            tuples.append((a, b, t, n))
    step = max(1, len(tuples) // (4 * count))
    return base, ext, tuples[::step]


def test_criterion_9_closed_form_sign():
    spec = q5_instance()
    g_minus, c = build_g_closed_form(spec.sd, spec.t, spec.n_param)
    assert c == spec.base(1) and g_minus == spec.g
    g_plus, c_plus = build_g_closed_form(spec.sd, spec.t, spec.n_param, sign=+1)
    assert c_plus == spec.base(4) and g_plus != spec.g
    for q in (7, 9, 11, 13):
        base, ext, tuples = _closed_form_tuples(q)
        singers, checked = {}, 0
        for a, b, t, n in tuples:
            if checked == 20:
                break
            key = (a.v, b.v)
            if key not in singers:
                singers[key] = build_singer(base, ext, a, b)
            sd = singers[key]
            try:
                g, _ = build_g_closed_form(sd, t, n)
            except SpecError:
                continue  # c = 0
            rho = roots_with_multiplicity(Poly(base, [n, -t, 1]), ext)[0][0]
            psi = mobius_search(base, [(P1Point.finite(rho), sd.Q)])[0]
            phi = recover_phi(sd, g, psi)
            assert phi is not None, (q, a, b, t, n)
            assert build_g_composed(sd, phi, psi) == g
            checked += 1
        assert checked == 20


def test_criterion_10_consistency_suite():
    specs = [q5_instance()] + [default_family(q) for q in (7, 9, 11, 13)]
    specs += search_specs(_singer(4)).specs + search_specs(_singer(5)).specs
    for spec in specs:
        q = spec.q
        S_graph = build_graph(spec, 1).s_subgraph()
        for m in range(5):
            assert count_chains(S_graph, m) == (q + 1) ** (m + 1) == splitting_lower_bound(spec, m)
        levels = genus_ladder(spec, 3, audit=q <= 5)
        for lv in levels:
            for k in (1, 2):
                N = rational_lower_bound(spec, lv.m, k)
                assert weil_check(q, k, N, lv.genus)


if __name__ == "__main__":
    import pytest
    import sys
    sys.exit(pytest.main([__file__, "-q"]))

import json

import pytest

from towerlab.ffield import make_field_tower
from towerlab.projline import Mobius, P1Point, ramification_index, ratmap_compose_mobius
from towerlab.singer import build_singer
from towerlab.towergen import (
    PhiParams,
    SpecError,
    brute_force_phi_oracle,
    build_g_closed_form,
    build_g_composed,
    closed_form_c,
    default_family,
    excluded_phi,
    failed_checks,
    family_pairs,
    forced_spec,
    generic_spec,
    make_spec,
    phi_candidates,
    psi_candidates,
    q5_instance,
    recover_phi,
    search_specs,
    standard_family,
    t_set,
    trace_condition,
    validate_spec,
)


def pairs(phis):
    return [(P.c.v, P.d.v) for P in phis]


@pytest.mark.parametrize("q", [2, 3])
def test_no_phi_over_f2_f3(singer_by_q, q):
    assert phi_candidates(singer_by_q(q)) == []


def test_phi_q5_includes_instance(sd5):
    assert (2, 3) in pairs(phi_candidates(sd5))


def test_phi_q4_two_candidates(singer_by_q):
    sd = singer_by_q(4)
    cands = phi_candidates(sd)
    assert len(cands) == 2
    assert all(P.c == sd.base.one for P in cands)
    assert {P.d.v for P in cands} == set(range(4)) - {0, sd.a.v}


def test_oracle_q5(sd5):
    oracle = pairs(brute_force_phi_oracle(sd5))
    assert len(oracle) == 4
    assert all((2 * d - (1 - c) * 4) % 5 == 0 and c for c, d in oracle)
    assert (1, 0) in oracle and (1, 0) not in pairs(phi_candidates(sd5))


def test_oracle_q7_a_zero(singer_by_q):
    sd = singer_by_q(7)
    assert sd.a.is_zero()
    assert pairs(brute_force_phi_oracle(sd)) == [(c, 0) for c in range(1, 7)]


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9, 11, 13])
def test_candidates_plus_exclusions_equal_oracle(singer_by_q, q):
    sd = singer_by_q(q)
    assert set(pairs(phi_candidates(sd))) | excluded_phi(sd) == set(pairs(brute_force_phi_oracle(sd)))


def test_psi_candidates_q5(sd5):
    phi = PhiParams(sd5.base(2), sd5.base(3))
    cands = psi_candidates(sd5, phi)
    T = P1Point.finite(2 * sd5.theta + 2)
    assert (T, Mobius(sd5.base, 0, 1, 1, 0)) in cands
    assert len(cands) == 36 and len(t_set(sd5, phi)) == 6
    assert all(T in sd5.R for T, _ in cands)
    assert all(psi != Mobius.identity(sd5.base) for _, psi in cands)
    for _, psi in cands:
        assert build_g_composed(sd5, phi, psi)(sd5.Q) == sd5.Q


def test_composed_g_q5(q5):
    assert q5.g.pretty() == "(x^6 + x^5 + 2x + 3)/(x^5 - x)"


def test_g_depends_on_rho_not_on_T(sd5):
    # psi and sigma o psi (sigma fixing Q) share rho = psi^-1(Q) and give the same g;
    # psi o sigma shares T = psi(Q) but moves rho, and the q+1 maps give q+1 different g
    phi = PhiParams(sd5.base(2), sd5.base(3))
    psi = Mobius(sd5.base, 0, 1, 1, 0)
    g = build_g_composed(sd5, phi, psi)
    G = sd5.group()
    assert all(build_g_composed(sd5, phi, s @ psi) == g for s in G)
    same_T = {build_g_composed(sd5, phi, psi @ s) for s in G}
    assert len(same_T) == 6


def test_identity_phi_is_flagged(sd5):
    phi = PhiParams(sd5.base.one, sd5.base.zero)
    psi = Mobius(sd5.base, 0, 1, 1, 0)
    spec = make_spec(sd5, phi, psi, "forced")
    assert spec.g == ratmap_compose_mobius(psi, sd5.f, None)
    assert not validate_spec(spec)["phi_Q_not_in_Q_Qbar"]


def test_closed_form_q5(q5):
    sd = q5.sd
    g, c = build_g_closed_form(sd, 2, 3)
    assert c == sd.base(1)
    assert g == q5.g
    assert closed_form_c(sd.a, sd.b, sd.base(2), sd.base(3), sign=+1) == sd.base(4)
    g_plus, _ = build_g_closed_form(sd, 2, 3, sign=+1)
    assert g_plus != q5.g and g_plus(sd.Q) != sd.Q


def test_closed_form_coefficient_matching_oracle(q5):
    # b + n + c_q a = 2 c b and c_1 - c_q = -c a, solved directly
    sd = q5.sd
    F = sd.base
    t, n = F(2), F(3)
    sols = [c for c in F.nonzero()
            if any(sd.b + n + cq * sd.a == 2 * c * sd.b and (-t - cq) - cq == -c * sd.a
                   for cq in F.elements())]
    assert sols == [F(1)]


def test_closed_form_family_display():
    base, ext = make_field_tower(7, 1, 2)
    sd = build_singer(base, ext, 0, 1)
    g, c = build_g_closed_form(sd, 0, 2)
    assert c == (base(1) + 2) / (2 * base(1))
    assert g.pretty() == "(3x^8 - 1)/(x^7 - x)"


def test_closed_form_errors(singer_by_q):
    sd = singer_by_q(5)
    with pytest.raises(SpecError, match="reducible"):
        build_g_closed_form(sd, 0, 4)
    with pytest.raises(SpecError) as exc:
        build_g_closed_form(sd, sd.a, sd.b)
    assert exc.value.code == "rho-is-theta"
    with pytest.raises(SpecError) as exc:
        build_g_closed_form(singer_by_q(4), 1, 1)
    assert exc.value.code == "even-characteristic"


def test_closed_form_at_13_11_6_has_c_minus_one_but_q_unramified():
    base, ext = make_field_tower(13, 1, 2)
    sd = build_singer(base, ext, 0, 11)
    g, c = build_g_closed_form(sd, 0, 6)
    assert c == base(-1)
    assert g(sd.Q) == sd.Q
    assert ramification_index(g, sd.Q) == 1


def test_standard_family_q7():
    spec = standard_family(7, 1, 2)
    assert spec.f.pretty() == "(x^8 + 1)/(x^7 - x)"
    assert spec.g.pretty() == "(3x^8 - 1)/(x^7 - x)"
    assert spec.provenance == "closed-form"
    assert all(validate_spec(spec).values())


@pytest.mark.parametrize("q,b,n,code", [
    (5, 2, 3, "q_greater_than_5"),
    (11, 1, 1, "n_not_b"),
    (7, 1, 1, "n_not_b"),
    (13, 2, 11, "n_not_minus_b"),
    (7, 3, 1, "minus_b_nonsquare"),
    (7, 1, 3, "minus_n_nonsquare"),
    (8, 1, 1, "odd_characteristic"),
])
def test_standard_family_named_errors(q, b, n, code):
    with pytest.raises(SpecError) as exc:
        standard_family(q, b, n)
    assert exc.value.code == code


def test_q5_error_message():
    with pytest.raises(SpecError, match=r"q > 5 required"):
        standard_family(5, 2, 3)


def test_q5_instance(q5):
    assert q5.f.pretty() == "(x^6 + x + 2)/(x^5 - x)"
    assert q5.g.pretty() == "(x^6 + x^5 + 2x + 3)/(x^5 - x)"
    assert q5.g(q5.Q) == q5.Q
    assert (q5.t.v, q5.n_param.v) == (2, 3)
    report = validate_spec(q5)
    assert all(report.values()), failed_checks(report)


def test_q5_recover_phi(q5):
    phi = recover_phi(q5.sd, q5.g, q5.psi)
    assert (phi.c.v, phi.d.v) == (2, 3)


def test_forced_degenerate_fails(singer_by_q):
    sd = singer_by_q(5)
    spec = forced_spec(sd, PhiParams(-sd.base.one, sd.a), sd.Qbar)
    report = validate_spec(spec)
    assert not report["Q_unramified_for_g"]
    assert not report["phi_Q_not_in_Q_Qbar"]
    assert report["g_fixes_Q"]


@pytest.mark.parametrize("q", [4, 5, 7])
def test_search(singer_by_q, q):
    sd = singer_by_q(q)
    res = search_specs(sd)
    assert res.specs and res.candidates == res.phi_count * (q + 1)
    assert res.valid == res.candidates
    # classes pair up through the normaliser of the Singer group
    assert 2 * len(res.specs) == res.valid
    for spec in res.specs:
        assert {spec.nu_point, spec.nu_point.conjugate(sd.base)}.isdisjoint({sd.Q, sd.Qbar})
        assert trace_condition(sd, spec.phi.c, spec.phi.d)
    assert len({s.g for s in res.specs}) == len(res.specs)


@pytest.mark.parametrize("q", [7, 9])
def test_family_towers_appear_in_generic_search(q):
    spec = default_family(q)
    res = search_specs(spec.sd)
    assert spec.g in {s.g for s in res.specs}


def test_generic_spec_indices(singer_by_q):
    sd = singer_by_q(5)
    spec = generic_spec(sd, 1, 2, 3)
    assert all(validate_spec(spec).values())
    with pytest.raises(SpecError):
        generic_spec(sd, 99)
    with pytest.raises(SpecError, match="no valid phi"):
        generic_spec(singer_by_q(3))


def test_spec_json_is_deterministic(q5):
    a = json.dumps(q5_instance().to_json())
    assert a == json.dumps(q5.to_json())
    keys = set(q5.to_json())
    assert {"p", "n", "q", "modulus", "a", "b", "t", "n_param", "c", "d", "psi", "f", "g",
            "provenance"} <= keys


def test_family_pairs_are_admissible():
    base = make_field_tower(7, 1, 2)[0]
    got = [(b.v, n.v) for b, n in family_pairs(base)]
    assert (1, 2) in got and all(b != n for b, n in got)

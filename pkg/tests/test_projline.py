import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from towerlab.ffield import extension, prime_field
from towerlab.projline import (
    Mobius,
    P1Point,
    RatMap,
    TamenessError,
    assert_tame,
    fiber,
    is_galois_invariant,
    mobius_apply,
    mobius_search,
    p1_points,
    pgl2,
    ramification_index,
    ramification_profile,
    ratmap_compose_mobius,
    ratmap_eval,
)
from towerlab.singer import mu_map
from towerlab.unipoly import Poly

F5 = prime_field(5)


def _f5_map(sd5):
    return sd5.f


def test_mobius_apply_examples(sd5, q5):
    theta = sd5.theta
    rho = P1Point.finite(2 * theta + 2)
    for P in p1_points(sd5.ext):
        assert mobius_apply(Mobius.identity(F5), P) == P
    assert mobius_apply(Mobius(sd5.base, 0, 1, 1, 0), rho) == sd5.Q
    phi = Mobius.affine(sd5.base(2), sd5.base(3))
    assert phi(sd5.Q) == P1Point.finite(2 * theta + 3)


def test_mobius_search_examples(sd5):
    base = sd5.base
    rho = P1Point.finite(2 * sd5.theta + 2)
    assert Mobius(base, 0, 1, 1, 0) in mobius_search(base, [(rho, sd5.Q)])
    pts = {s: P1Point(base, v) for s, v in (("0", 0), ("1", 1), ("inf", None))}
    only = mobius_search(base, [(P, P) for P in pts.values()])
    assert only == [Mobius.identity(base)]
    assert len(mobius_search(base, [(sd5.Q, sd5.Q)])) == 6


def test_pgl2_size_and_canonical():
    F3 = prime_field(3)
    els = list(pgl2(F3))
    assert len(els) == 27 - 3 == len(set(els))
    assert Mobius(F3, 2, 0, 0, 2) == Mobius.identity(F3)
    assert Mobius(F3, 2, 2, 0, 2) == Mobius(F3, 1, 1, 0, 1)


def test_singular_matrix_rejected():
    with pytest.raises(ValueError):
        Mobius(F5, 1, 2, 2, 4)


def test_ratmap_eval_examples(sd5):
    f = sd5.f
    assert ratmap_eval(f, P1Point.inf(F5)).is_inf
    assert ratmap_eval(f, P1Point(F5, 2)).is_inf
    assert ratmap_eval(f, sd5.Q) == sd5.Q


def test_compose_examples(sd5, q5):
    f = sd5.f
    assert ratmap_compose_mobius(Mobius.identity(F5), f, Mobius.identity(F5)) == f
    g = ratmap_compose_mobius(Mobius(F5, 0, 1, 1, 0), f, Mobius.affine(F5(2), F5(3)))
    assert g.pretty() == "(x^6 + x^5 + 2x + 3)/(x^5 - x)"
    mu = mu_map(sd5)
    conj = ratmap_compose_mobius(mu.inverse(), f, mu)
    assert conj == RatMap(Poly.monomial(sd5.ext, 6), Poly(sd5.ext, [1]))


def test_fiber_examples(sd5):
    f = sd5.f
    over_inf = fiber(f, P1Point.inf(F5), F5)
    assert [P for P, _ in over_inf] == p1_points(F5)
    assert all(m == 1 for _, m in over_inf)
    assert fiber(f, sd5.Q, sd5.ext) == [(sd5.Q, 6)]
    sq = RatMap(Poly.monomial(F5, 2), Poly(F5, [1]))
    assert fiber(sq, P1Point(F5, 0), F5) == [(P1Point(F5, 0), 2)]


def test_ramification_examples(sd5, q5):
    assert ramification_index(sd5.f, sd5.Q) == 6
    assert all(ramification_index(sd5.f, P) == 1 for P in p1_points(F5))
    assert ramification_index(q5.g, sd5.Q) == 1


def test_galois_invariance_examples(sd5):
    sq = RatMap(Poly.monomial(F5, 2), Poly(F5, [1]))
    assert is_galois_invariant(sq, Mobius.affine(F5(-1), F5(0)))
    assert is_galois_invariant(sd5.f, sd5.generator)
    invariant = [M for M in pgl2(F5) if is_galois_invariant(sd5.f, M)]
    assert len(invariant) == 6
    assert set(invariant) == set(sd5.group())


def test_pretty_form(sd5):
    assert sd5.f.pretty() == "(x^6 + x + 2)/(x^5 - x)"


def test_riemann_hurwitz_for_f_and_g(q5):
    for F in (q5.f, q5.g):
        prof = ramification_profile(F, q5.ext)
        assert sum(e - 1 for e in prof.values()) == 2 * 6 - 2


def test_fibers_over_f625(q5):
    ext4 = extension(q5.base, 4)
    pts = p1_points(ext4)
    images = {}
    for y in pts:
        images.setdefault(ratmap_eval(q5.g, y), []).append(y)
    # every ramified point is already over F_25, so the indices add up to 626 + 10
    assert sum(ramification_index(q5.g, y) for y in pts) == len(pts) + 10
    for t in list(images)[::25]:
        fib = fiber(q5.g, t, ext4)
        assert sorted(P for P, _ in fib) == sorted(images[t])
        assert sum(m for _, m in fib) <= 6
    for t in p1_points(q5.ext):
        if t in images and len(images[t]) == 6:
            assert all(m == 1 for _, m in fiber(q5.g, t, ext4))


def test_tame_guard():
    assert_tame(6, 5)
    with pytest.raises(TamenessError):
        assert_tame(10, 5)


@pytest.mark.parametrize("v", range(25))
def test_search_single_constraint_gives_q_plus_one(sd5, v):
    T = P1Point(sd5.ext, v)
    if T in sd5.R:
        assert len(mobius_search(sd5.base, [(sd5.Q, T)])) == 6


entries = st.tuples(*[st.integers(0, 4)] * 4).filter(lambda m: (m[0] * m[3] - m[1] * m[2]) % 5)


@settings(max_examples=40, deadline=None)
@given(entries, entries)
def test_mobius_composition_acts(m1, m2):
    A, B = Mobius(F5, *m1), Mobius(F5, *m2)
    for P in p1_points(F5):
        assert (A @ B)(P) == A(B(P))
    assert (A @ A.inverse()) == Mobius.identity(F5)


@settings(max_examples=25, deadline=None)
@given(entries, entries)
def test_composition_preserves_degree_and_reducedness(m1, m2):
    from towerlab.singer import build_singer
    from towerlab.ffield import make_field_tower
    base, ext = make_field_tower(5, 1, 2)
    f = build_singer(base, ext, 0, 2, verify=False).f
    G = ratmap_compose_mobius(Mobius(base, *m1), f, Mobius(base, *m2))
    assert G.degree == 6 and G.is_reduced()

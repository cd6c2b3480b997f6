from __future__ import annotations

from fractions import Fraction

import pytest

from twodescent.arith import ONE, SquareClass, square_class, squarefree_part
from twodescent.curve import Curve, INFINITY, discriminant, mul, on_curve, pt
from twodescent.descent import (
    DescentError,
    SelmerSet,
    TorsionImageError,
    bad_set,
    delta_class,
    descent_report,
    hom_space,
    isogenous_curve,
    lift_point,
    phi_map,
    qs2,
    search_point,
    selmer,
)


def classes(*reps: int) -> set[SquareClass]:
    return {square_class(r) for r in reps}


def test_isogenous_curve_examples():
    assert isogenous_curve(Curve(6, 1, 0)).Eprime == Curve(-12, 32, 0)
    assert isogenous_curve(Curve(0, 17, 0)).Eprime == Curve(0, -68, 0)
    for p in (3, 7, 19):
        assert isogenous_curve(Curve(0, p, 0)).Eprime == Curve(0, -4 * p, 0)


def test_isogenous_curve_rejects_bad_models():
    with pytest.raises(DescentError):
        isogenous_curve(Curve(6, 1, 2))
    with pytest.raises(DescentError):
        isogenous_curve(Curve(1, 0, 2))  # b = 0: (0,0) not on E
    # a^2 = 4b or b = 0 never reaches the descent: the model is singular
    from twodescent.curve import SingularModel

    with pytest.raises(SingularModel):
        Curve(2, 1, 0)
    with pytest.raises(SingularModel):
        Curve(3, 0, 0)


def test_second_iterate_is_quartic_twist_back():
    # E'' = (4a, 16b) returns to E under (x, y) -> (x/4, y/8)
    pair = isogenous_curve(Curve(6, 1, 0))
    second = isogenous_curve(pair.Eprime)
    assert second.Eprime == Curve(24, 16, 0)
    P = pt(-1, 2)
    Q = phi_map(second, phi_map(pair, P))
    back = pt(Q.x / 4, Q.y / 8)
    assert on_curve(Curve(6, 1, 0), back)
    assert back == mul(Curve(6, 1, 0), 2, P)


def test_phi_map_examples():
    pair = isogenous_curve(Curve(6, 1, 0))
    assert phi_map(pair, pt(-1, 2)) == pt(4, 0)
    assert phi_map(pair, pt(0, 0)) == INFINITY
    assert phi_map(pair, INFINITY) == INFINITY
    with pytest.raises(DescentError):
        phi_map(pair, pt(1, 1))


def test_phi_map_lands_on_the_isogenous_curve():
    pair = isogenous_curve(Curve(-6, 12, 0))
    for P in (pt(3, 3), pt(3, -3), pt(4, 4), pt(4, -4)):
        assert on_curve(pair.E, P)
        assert on_curve(pair.Eprime, phi_map(pair, P))


def test_delta_class_examples():
    assert delta_class(Curve(-12, 32, 0), pt(0, 0)) == square_class(2)
    assert delta_class(Curve(-12, 32, 0), INFINITY) == ONE
    assert delta_class(Curve(6, 1, 0), pt(-1, 2)) == square_class(-1)
    with pytest.raises(DescentError):
        delta_class(Curve(6, 1, 0), pt(2, 2))


def test_delta_is_a_homomorphism_on_sample_points():
    from twodescent.curve import add

    E = Curve(-6, 12, 0)
    P, Q = pt(3, 3), pt(4, 4)
    assert add(E, P, Q) == pt(0, 0)
    # delta(P + Q) = delta(P) * delta(Q), with (0, 0) mapping to cls(a4)
    assert delta_class(E, pt(0, 0)) == delta_class(E, P) * delta_class(E, Q)
    assert delta_class(E, pt(0, 0)) == square_class(12)


def test_bad_set_contents():
    S = bad_set(Curve(6, 1, 0))
    assert S.primes == (2,)
    assert S.includes_infinity
    assert bad_set(Curve(0, 17, 0)).primes == (2, 17)
    assert bad_set(Curve(0, -68, 0)).primes == (2, 17)


def test_qs2_group():
    small = qs2(bad_set(Curve(6, 1, 0)))
    assert set(small) == classes(1, -1, 2, -2)
    big = qs2(bad_set(Curve(0, 17, 0)))
    assert set(big) == classes(1, -1, 2, -2, 17, -17, 34, -34)
    assert ONE in big
    assert list(big) == sorted(big)


def test_hom_space_cleared_forms():
    f = hom_space(Curve(6, 1, 0), 2)
    assert f.c == (64, 0, -48, 0, 8)
    for p, d in ((17, -1), (17, 17), (5, 2)):
        g = hom_space(Curve(0, p, 0), d)
        assert g.c == (-4 * p * d, 0, 0, 0, d**3)
    triv = hom_space(Curve(6, 1, 0), 1)
    assert triv(0) == 1


def test_hom_space_accepts_square_class_objects():
    assert hom_space(Curve(6, 1, 0), square_class(2)).c == (64, 0, -48, 0, 8)


def test_selmer_worked_example():
    assert set(selmer(Curve(6, 1, 0))) == classes(1, 2)
    assert set(selmer(Curve(-12, 32, 0))) == classes(1, -1)
    assert set(selmer(Curve(0, 17, 0))) == classes(1, -1, 2, -2, 17, -17, 34, -34)


def test_selmer_is_a_subgroup_with_seed_class():
    for E in (Curve(6, 1, 0), Curve(0, 17, 0), Curve(0, -68, 0), Curve(1, 6, 0)):
        sel = selmer(E)
        assert ONE in sel
        seed = squarefree_part(E.a2**2 - 4 * E.a4)
        assert seed in sel
        for u in sel:
            for v in sel:
                assert u * v in sel


def test_selmer_set_validates_its_invariants():
    with pytest.raises(DescentError):
        SelmerSet((square_class(2),))  # missing the trivial class
    with pytest.raises(DescentError):
        SelmerSet((ONE, square_class(2), square_class(3)))  # 6 missing
    with pytest.raises(DescentError):
        SelmerSet((square_class(2), ONE))  # unsorted
    ok = SelmerSet(tuple(sorted(classes(1, 2))))
    assert ok.size == 2 and ok.dim2 == 1
    assert square_class(2) in ok and square_class(3) not in ok


def test_dual_selmer_of_ep_is_minimal():
    for p in (3, 7, 17, 41, 73):
        sel = selmer(Curve(0, -4 * p, 0))
        assert set(sel) == classes(1, p)


def test_search_point_examples():
    assert search_point(Curve(6, 1, 0), 2, 2) == (Fraction(1, 2), Fraction(0))
    assert search_point(Curve(-12, 32, 0), -1, 2) == (Fraction(1, 2), Fraction(2))
    assert search_point(Curve(0, 17, 0), -17, 2) == "infinity"
    assert search_point(Curve(0, 17, 0), -2, 30) is None


def test_search_point_results_satisfy_the_space_equation():
    # d w^2 = d^2 - 2 a d z^2 + (a^2 - 4b) z^4
    for E, d in ((Curve(6, 1, 0), 2), (Curve(-12, 32, 0), -1),
                 (Curve(-6, 12, 0), 6), (Curve(12, -12, 0), 3)):
        res = search_point(E, d, 8)
        assert res is not None and res != "infinity"
        z, w = res
        a, b = E.a2, E.a4
        assert d * w * w == d * d - 2 * a * d * z * z + (a * a - 4 * b) * z**4


def test_lift_point_examples():
    pair = isogenous_curve(Curve(6, 1, 0))
    L = lift_point(pair, 2, (Fraction(1, 2), Fraction(0)))
    assert L == pt(8, 0)
    assert on_curve(pair.Eprime, L)
    assert delta_class(pair.Eprime, L) == square_class(2)


def test_lift_point_dual_direction():
    dual = isogenous_curve(Curve(-12, 32, 0))
    L = lift_point(dual, -1, (Fraction(1, 2), Fraction(2)))
    assert L == pt(-4, 16)
    assert on_curve(Curve(24, 16, 0), L)
    back = pt(L.x / 4, L.y / 8)
    assert back == pt(-1, 2)
    assert on_curve(Curve(6, 1, 0), back)


def test_lift_point_torsion_inputs_are_rejected():
    pair = isogenous_curve(Curve(6, 1, 0))
    with pytest.raises(TorsionImageError):
        lift_point(pair, 2, (Fraction(0), Fraction(1)))
    with pytest.raises(TorsionImageError):
        lift_point(pair, 32, "infinity")


def test_report_zero_rank_curve():
    rep = descent_report(Curve(6, 1, 0), 5)
    assert (rep.selmer_phi.size, rep.selmer_phi_hat.size) == (2, 2)
    assert (rep.rank_lower, rep.rank_upper, rep.rank_exact) == (0, 0, True)
    assert rep.sha_phi_dim_upper == 0 and rep.sha_phi_hat_dim_upper == 0
    assert rep.torsion.structure == "Z4"
    assert rep.generators == ()


def test_report_seventeen_curve():
    rep = descent_report(Curve(0, 17, 0), 20)
    assert discriminant(rep.curve) == -314432
    assert (rep.selmer_phi.size, rep.selmer_phi_hat.size) == (8, 2)
    assert (rep.rank_lower, rep.rank_upper, rep.rank_exact) == (0, 2, False)
    assert rep.sha_phi_dim_upper == 2
    assert rep.torsion.structure == "Z2"
    assert rep.torsion.generators == (pt(0, 0),)


def test_report_rank_one_curve_with_generator():
    rep = descent_report(Curve(-6, 12, 0), 10)
    assert (rep.selmer_phi.size, rep.selmer_phi_hat.size) == (4, 2)
    assert (rep.rank_lower, rep.rank_upper, rep.rank_exact) == (1, 1, True)
    assert len(rep.generators) == 1
    g = rep.generators[0]
    assert on_curve(Curve(-6, 12, 0), g)
    # infinite order: not among the torsion points
    assert g not in rep.torsion.points


def test_report_invariants_across_samples():
    for E in (Curve(6, 1, 0), Curve(0, 17, 0), Curve(-6, 12, 0), Curve(1, 6, 0),
              Curve(0, -1, 0), Curve(3, -2, 0)):
        rep = descent_report(E, 8)
        sel, img = rep.selmer_phi, rep.image_phi
        assert set(img) <= set(sel)
        assert set(rep.image_phi_hat) <= set(rep.selmer_phi_hat)
        s, g = sel.dim2, img.dim2
        s2, g2 = rep.selmer_phi_hat.dim2, rep.image_phi_hat.dim2
        assert rep.rank_upper - rep.rank_lower == (s - g) + (s2 - g2)
        assert rep.rank_exact == (rep.rank_lower == rep.rank_upper)
        assert 0 <= rep.rank_lower <= rep.rank_upper
        assert rep.sha_phi_dim_upper == s - g
        assert rep.sha_phi_hat_dim_upper == s2 - g2
        for P in rep.generators:
            assert on_curve(E, P)


def test_report_flags_odd_selmer_residual():
    # rank bounds stay honest when the residual is odd: note, not failure
    rep = descent_report(Curve(0, 17, 0), 2)
    assert not rep.rank_exact


def test_certified_classes_have_global_points():
    rep = descent_report(Curve(0, -68, 0), 20)
    E = Curve(0, -68, 0)
    for d in rep.image_phi:
        res = search_point(E, int(d), 20)
        assert res is not None

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from strongmult.counting import common_support
from strongmult.density import (
    ABSTRACT,
    SetSelector,
    adjoint_coeff,
    bound_entry,
    bound_table,
    bound_tables,
    cauchy_schwarz_check,
    classify,
    default_schedule,
    density_estimate,
    fourth_power_expansion,
    members,
    pole_order_proxies,
    prime_zeta_partial,
    theorem_constants,
)
from strongmult.errors import RangeError, ValidationError
from strongmult.forms import normalized_eigenvalue


# ---------------------------------------------------------------- selectors

def test_selector_parse():
    assert SetSelector.parse("S_0") == SetSelector("S_alpha", 0.0)
    assert SetSelector.parse("S_pi").rotation == "pi"
    assert SetSelector.parse("S_alpha:1.0").rotation == "generic"
    assert SetSelector.parse("S_alpha:6.283185307179586").rotation == "0"
    assert str(SetSelector.parse("S_star")) == "S_star"
    for bad in ("S_x", "S_alpha:abc", ""):
        with pytest.raises(ValidationError):
            SetSelector.parse(bad)


def test_selector_tolerance():
    assert SetSelector("S_alpha", math.pi + 1e-13).rotation == "pi"
    assert SetSelector("S_alpha", math.pi + 1e-9).rotation == "generic"
    assert SetSelector("S_alpha", -1e-13).rotation == "0"


# ---------------------------------------------------------------- membership

def brute_member(a1, a2, p, k1, k2, sel):
    l1 = normalized_eigenvalue(a1, p, k1)
    l2 = normalized_eigenvalue(a2, p, k2)
    if sel.kind in ("S_star", "S_ad"):
        return not math.isclose(abs(l1), abs(l2), rel_tol=1e-12, abs_tol=1e-12)
    if sel.kind == "S_upper_star":
        return not math.isclose(l1 * l1 + l2 * l2, 2.0, rel_tol=1e-12)
    return abs(l1 - cmath.exp(1j * sel.alpha) * l2) > 1e-9


SELECTORS = [SetSelector.parse(t) for t in ("S_0", "S_pi", "S_alpha:1.0", "S_alpha:2.5", "S_star", "S_upper_star", "S_ad")]


@pytest.mark.parametrize("sel", SELECTORS, ids=str)
def test_classify_matches_float_oracle(delta, e11, cm32, delta_twist, sel):
    for s1, s2 in ((delta, e11), (cm32, e11), (delta, delta_twist), (cm32, cm32)):
        for p, a1, a2 in common_support(s1, s2, 3000):
            assert classify(s1, s2, p, sel) == brute_member(a1, a2, p, s1.weight, s2.weight, sel), (sel, p)


def test_classify_requires_common_prime(delta, e11):
    with pytest.raises(RangeError):
        classify(delta, e11, 11, SELECTORS[0])


def test_s_ad_equals_s_star(delta, e11, cm32, delta_twist):
    for s1, s2 in ((delta, e11), (cm32, e11), (delta, delta_twist)):
        assert members(s1, s2, 10**4, SetSelector("S_ad")) == members(s1, s2, 10**4, SetSelector("S_star"))


def test_adjoint_coeff_criterion(delta, e11):
    # adjoint coefficients agree exactly when |lambda_1| = |lambda_2|
    for p, _, _ in common_support(delta, e11, 500):
        n1, d1 = adjoint_coeff(delta, p)
        n2, d2 = adjoint_coeff(e11, p)
        same = Fraction(n1, d1) == Fraction(n2, d2)
        assert same == (not classify(delta, e11, p, SetSelector("S_ad")))
    with pytest.raises(RangeError):
        adjoint_coeff(e11, 11)


def test_subset_relations(cm32, e11, delta):
    star = SetSelector("S_star")
    for s1, s2 in ((delta, e11), (cm32, e11)):
        support = {p for p, _, _ in common_support(s1, s2, 10**4)}
        s_star = set(members(s1, s2, 10**4, star))
        s0 = set(members(s1, s2, 10**4, SetSelector.parse("S_0")))
        spi = set(members(s1, s2, 10**4, SetSelector.parse("S_pi")))
        generic = set(members(s1, s2, 10**4, SetSelector.parse("S_alpha:1.0")))
        # outside S_0 and S_pi both eigenvalue signs match up to sign, so |lambda| agree
        assert s_star <= s0 and s_star <= spi
        assert s0 <= generic and spi <= generic
        assert generic <= support
        r = [density_estimate(s1, s2, sel, 10**4).ratios for sel in (star, SetSelector.parse("S_0"))]
        assert all(a <= b for a, b in zip(*r))


def test_twist_pair_s_star_empty(delta, delta_twist):
    est = density_estimate(delta, delta_twist, SetSelector("S_star"), 10**4)
    assert est.member_count == 0 and all(r == 0.0 for r in est.ratios)


# ---------------------------------------------------------------- estimates

def test_default_schedule():
    sched = default_schedule(10**5)
    assert sched[:3] == [1.2, 1.1, 1.05]
    assert sched[3] == pytest.approx(1 + 3 / math.log(10**5))


def test_prime_zeta_partial_small():
    assert prime_zeta_partial([2, 3, 5], 2.0) == pytest.approx(1 / 4 + 1 / 9 + 1 / 25)
    assert prime_zeta_partial([], 2.0) == 0.0


def test_density_estimate_shape(delta, e11):
    est = density_estimate(delta, e11, SetSelector("S_star"), 10**4, [1.5, 1.2])
    assert est.s_schedule == [1.5, 1.2]
    assert len(est.ratios) == len(est.tail_bound) == len(est.full_ratios) == 2
    assert est.reference_ratio == est.ratios[-1]
    assert all(0 <= r <= f for r, f in zip(est.ratios, est.full_ratios))
    d = est.to_dict()
    assert set(d) >= {"selector", "X", "s_schedule", "numerators", "denominators", "ratios", "tail_bound"}


@pytest.mark.parametrize("bad", [[], [1.0], [1.2, 0.9]])
def test_density_schedule_validation(delta, e11, bad):
    with pytest.raises(ValidationError):
        density_estimate(delta, e11, SetSelector("S_star"), 1000, bad)


def test_density_beyond_bound(delta, e11):
    with pytest.raises(RangeError):
        density_estimate(delta.restrict(1000), e11, SetSelector("S_star"), 2000)


def test_pole_order_proxies_are_finite(delta, e11):
    proxies = pole_order_proxies(delta, e11, 10**4, 1.1)
    assert len(proxies) == 7 and all(math.isfinite(v) for v in proxies.values())


# ---------------------------------------------------------------- Cauchy-Schwarz

@settings(max_examples=300)
@given(st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=3), st.floats(0, 2 * math.pi))
def test_fourth_power_expansion_property(a, b, alpha):
    direct = abs(a - cmath.exp(1j * alpha) * b) ** 4
    assert fourth_power_expansion(a, b, alpha) == pytest.approx(direct, rel=1e-9, abs=1e-9)


def test_cauchy_schwarz_identical_sequences(e11):
    chk = cauchy_schwarz_check(e11, e11, 0.0, 1.1, 10**4)
    assert chk.lhs == 0.0 and chk.rhs == 0.0 and chk.holds


def test_cauchy_schwarz_rejects_bad_s(delta, e11):
    with pytest.raises(ValidationError):
        cauchy_schwarz_check(delta, e11, 0.0, 1.0, 100)


def test_cauchy_schwarz_samples(delta, e11):
    chk = cauchy_schwarz_check(delta, e11, math.pi / 3, 1.1, 10**4, samples=100)
    assert chk.sampled == 100 and chk.identity_ok and chk.holds


# ---------------------------------------------------------------- bound tables

def test_main_dist_minimum_and_alpha_zero():
    grid = np.linspace(0, 2 * math.pi, 10_000)
    values = [bound_table("Main-dist", alpha=a) for a in grid]
    i = int(np.argmin(values))
    assert values[i] == pytest.approx(1 / 16)
    assert abs(grid[i] - math.pi) < 1e-3
    assert bound_table("Main-dist", alpha=0.0) == 0.125
    assert bound_table("Main-dist", alpha=math.pi) == 0.0625
    assert min(values) >= 1 / 16 - 1e-15


def test_main_dist_kappa1_branch():
    v, _ = bound_entry("Main-dist", alpha=0.0, dihedral=(False, False), kappa1=1)
    assert v == pytest.approx(1 / 4)  # min{1/4, 1/2}
    v, _ = bound_entry("Main-dist", alpha=math.pi, dihedral=(False, False), kappa1=1)
    assert v == pytest.approx(1 / 6)  # min{1/4, 1/6}
    v, _ = bound_entry("Main-dist", alpha=math.pi, dihedral=(False, False), kappa1=0)
    assert v == pytest.approx(1 / 4)
    with pytest.raises(ValidationError):
        bound_entry("Main-dist", alpha=0.0, dihedral=(True, False), kappa1=1)


def test_non_twist_branches():
    assert bound_table("main-thm-non-twist-equiv", alpha=math.pi, dihedral=(True, True)) == pytest.approx(2 / 13)
    assert bound_table("main-thm-non-twist-equiv", alpha=0.0, dihedral=(True, False)) == pytest.approx(2 / 7)
    assert bound_table("main-thm-non-twist-equiv", alpha=math.pi / 2, dihedral=(True, False)) == pytest.approx(2 / 5)
    assert bound_table("main-thm-non-twist-equiv", alpha=0.0, dihedral=(False, False), kappa2=1) == pytest.approx(2 / 5)
    assert bound_table("main-thm-non-twist-equiv", alpha=0.0, dihedral=(False, False), kappa2=0) == pytest.approx(1 / 2)
    with pytest.raises(ValidationError):
        bound_table("main-thm-non-twist-equiv", alpha=0.0, dihedral=(False, False))
    with pytest.raises(ValidationError):
        bound_table("main-thm-non-twist-equiv", alpha=0.0, dihedral=(True, False), kappa2=1)


def test_fixed_tables():
    non, one, both = (False, False), (True, False), (True, True)
    assert bound_table("Wa-thm", dihedral=non) == 2 / 5
    assert bound_table("lD_S*", dihedral=both) == 1 / 8
    assert Fraction(bound_table("lD_S*", dihedral=one)) == Fraction(float(Fraction(100, 958)))
    assert bound_entry("lD_S*", dihedral=non) == (float(Fraction(100, 1076)), "1/10.76")
    assert bound_table("S''", dihedral=non) == 1 / 18 == bound_table("S''", dihedral=both)
    assert bound_table("S''", dihedral=one) == 1 / 12
    assert {k: v[0] for k, v in ABSTRACT.items()} == {
        "S_alpha": Fraction(1, 16), "S_alpha_non_twist": Fraction(2, 13), "S_star": Fraction(1, 11)
    }


def test_ld_constants_below_closed_forms():
    # the decimal constants are safe roundings of closed-form values
    assert 1 / 9.58 <= 5 / 27 - math.sqrt(19) / 54
    assert 1 / 10.76 <= 4 / (math.sqrt(3) + 2 * math.sqrt(2) + 2) ** 2
    assert 1 / 11 <= 1 / 10.76


def test_inapplicable_parameters_rejected():
    with pytest.raises(ValidationError):
        bound_table("Wa-thm", alpha=1.0, dihedral=(False, False))
    with pytest.raises(ValidationError):
        bound_table("abstract", quantity="nope")
    with pytest.raises(ValidationError):
        bound_table("nope")
    with pytest.raises(ValidationError):
        bound_table("Main-dist")


def test_bound_tables_rows():
    rows = bound_tables((False, False))
    assert [r[0] for r in rows].count("Main-dist") == 5
    assert ("lD_S*", "", float(Fraction(100, 1076)), "1/10.76") in rows
    rows = bound_tables((True, True))
    assert any(r[0] == "main-thm-non-twist-equiv" for r in rows)


def test_theorem_constants_embed_values():
    c = theorem_constants()
    assert c["Wa-thm(iii)"] == 0.4 and c["S''"]["same_type"] == 1 / 18

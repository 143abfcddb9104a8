"""Brute-force enumeration oracle and the dual-number derivative check.

The enumeration has two independent implementations (compiled term walk
and raw per-candidate composition); their agreement on full fields is the
core correctness evidence.  The dual-number check ties the symbolic
Jacobian to actual first-order variation, closing the loop between the
rank certificates and the composition arithmetic.
"""
import numpy as np
import pytest

from rclab.formulas import ProblemInstance
from rclab.oracle import (
    DEFAULT_SAMPLES,
    BudgetError,
    CountProfile,
    compile_system,
    compose_dual,
    count_profile,
    dimension_estimate,
    enumerate_solutions,
    enumerate_solutions_direct,
    fixed_profile,
    jacobian_direction_check,
)
from rclab.curvespace import sample_incidence
from rclab.poly import random_homogeneous, random_map

P = 10007


def _random_form(n, d, q, seed):
    return random_homogeneous(n + 1, d, q, np.random.default_rng(seed))


# ---------------------------------------------------------------- enumeration

@pytest.mark.parametrize("n,d,e,q", [
    (2, 2, 1, 3),
    (2, 2, 1, 5),
    (2, 1, 2, 3),
    (2, 3, 1, 3),
])
def test_fast_and_direct_enumeration_agree(n, d, e, q):
    F = _random_form(n, d, q, seed=1000 * n + 100 * d + 10 * e + q)
    fast = enumerate_solutions(F, e)
    slow = enumerate_solutions_direct(F, e, budget=1 << 18)
    assert fast == slow


def test_enumeration_slices_partition_the_count():
    q = 3
    F = _random_form(2, 2, q, seed=5)
    total = q ** (3 * 3)
    full = enumerate_solutions(F, 2)
    cuts = [0, 1234, 5000, 12000, total]
    parts = [enumerate_solutions(F, 2, start=a, stop=b)
             for a, b in zip(cuts, cuts[1:])]
    assert sum(parts) == full
    assert enumerate_solutions(F, 2, start=77, stop=77) == 0


def test_enumeration_counts_the_zero_candidate():
    # candidate 0 is the zero array; it always composes to zero
    F = _random_form(2, 2, 3, seed=6)
    assert enumerate_solutions(F, 1, start=0, stop=1) == 1


def test_budget_refusal():
    F = _random_form(2, 2, 3, seed=7)
    with pytest.raises(BudgetError) as exc:
        enumerate_solutions(F, 1, budget=100)
    assert exc.value.required == 3 ** 6
    assert exc.value.budget == 100
    assert "729" in str(exc.value)
    # a slice inside the budget is allowed
    assert enumerate_solutions(F, 1, budget=100, start=0, stop=100) >= 0


def test_bad_slices_rejected():
    F = _random_form(2, 2, 3, seed=8)
    total = 3 ** 6
    with pytest.raises(ValueError):
        enumerate_solutions(F, 1, start=-1, stop=10)
    with pytest.raises(ValueError):
        enumerate_solutions(F, 1, start=0, stop=total + 1)
    with pytest.raises(ValueError):
        enumerate_solutions(F, 1, start=10, stop=5)


def test_compile_system_rejects_bad_degree():
    F = _random_form(2, 2, 3, seed=9)
    with pytest.raises(ValueError):
        compile_system(F, 0)


def test_linear_form_count_is_exact_power():
    # x_0 + x_1 + x_2 + x_3 = 0 forces one coordinate row, leaving q^(n(e+1))
    profile = fixed_profile(3, 1, 1, (3, 5), coeffs=[1, 1, 1, 1])
    assert profile.counts == ((3, 3 ** 6), (5, 5 ** 6))
    assert abs(profile.slope() - 6.0) < 1e-9
    assert profile.expected_exponent == 6


def test_fixed_profile_validates_coefficient_length():
    with pytest.raises(ValueError):
        fixed_profile(3, 1, 1, (3,), coeffs=[1, 1, 1])


# ---------------------------------------------------------------- profiles

def test_count_profile_reproducible():
    a = count_profile(2, 2, 1, (3, 5), seed=0, samples=3)
    b = count_profile(2, 2, 1, (3, 5), seed=0, samples=3)
    assert a.counts == b.counts
    assert a.samples == 3
    c = count_profile(2, 2, 1, (3, 5), seed=1, samples=3)
    assert c.counts != a.counts


def test_count_profile_validation():
    with pytest.raises(ValueError):
        count_profile(2, 2, 1, (), seed=0)
    with pytest.raises(ValueError):
        count_profile(2, 2, 1, (4,), seed=0)
    with pytest.raises(ValueError):
        count_profile(2, 2, 1, (3,), seed=0, samples=0)


def test_default_samples_is_plural():
    # averaging over one hypersurface would reintroduce per-field arithmetic
    # accidents; the default must aggregate
    assert DEFAULT_SAMPLES >= 8


def test_slope_needs_two_primes():
    profile = fixed_profile(3, 1, 1, (3,), coeffs=[1, 1, 1, 1])
    with pytest.raises(ValueError):
        profile.slope()
    assert profile.as_dict()["slope"] is None


def test_slope_rejects_zero_counts():
    profile = CountProfile(n=2, d=2, e=1, seed=0, samples=1,
                           counts=((3, 0), (5, 10)))
    with pytest.raises(ValueError):
        profile.slope()


def test_dimension_estimate_is_the_slope():
    profile = fixed_profile(3, 1, 1, (3, 5), coeffs=[1, 1, 1, 1])
    assert dimension_estimate(profile) == profile.slope()


def test_expected_exponent():
    assert CountProfile(n=3, d=2, e=1, seed=0, samples=1,
                        counts=()).expected_exponent == 5


def test_count_profile_as_dict_round_trips():
    import json
    profile = count_profile(2, 2, 1, (3, 5), seed=0, samples=2)
    blob = json.loads(json.dumps(profile.as_dict()))
    assert blob["samples"] == 2
    assert blob["counts"] == [[q, c] for q, c in profile.counts]


# ---------------------------------------------------------------- dual check

def test_compose_dual_value_matches_composition():
    rng = np.random.default_rng(40)
    F = random_homogeneous(4, 2, P, rng)
    f = random_map(3, 2, P, rng)
    g = rng.integers(0, P, size=f.coeffs.shape, dtype=np.int64)
    value, variation = compose_dual(F, f.coeffs, g)
    assert np.array_equal(value, F.compose(f).coeffs)
    assert variation.shape == value.shape


def test_compose_dual_variation_is_linear():
    rng = np.random.default_rng(41)
    F = random_homogeneous(4, 3, P, rng)
    f = random_map(3, 2, P, rng)
    g1 = rng.integers(0, P, size=f.coeffs.shape, dtype=np.int64)
    g2 = rng.integers(0, P, size=f.coeffs.shape, dtype=np.int64)
    v1 = compose_dual(F, f.coeffs, g1)[1]
    v2 = compose_dual(F, f.coeffs, g2)[1]
    v12 = compose_dual(F, f.coeffs, (g1 + g2) % P)[1]
    assert np.array_equal(v12, (v1 + v2) % P)


def test_compose_dual_zero_direction_has_zero_variation():
    rng = np.random.default_rng(42)
    F = random_homogeneous(4, 2, P, rng)
    f = random_map(3, 1, P, rng)
    value, variation = compose_dual(F, f.coeffs, np.zeros_like(f.coeffs))
    assert not variation.any()


def test_jacobian_matches_dual_variation():
    for seed in range(10):
        pt = sample_incidence(ProblemInstance(3, 2, 1), P,
                              np.random.default_rng(seed))
        assert jacobian_direction_check(pt, directions=20,
                                        rng=np.random.default_rng(seed))


def test_jacobian_direction_check_other_shapes():
    for seed in range(3):
        pt = sample_incidence(ProblemInstance(4, 3, 2), P,
                              np.random.default_rng(seed))
        assert jacobian_direction_check(pt, directions=5,
                                        rng=np.random.default_rng(seed))

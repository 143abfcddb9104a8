"""Rank certification: matrices, invariances, statistical wrappers.

The invariance tests are the strongest evidence that the Jacobian is the
right matrix: its rank must not move under any change of coordinates that
preserves the geometry (reparametrizing the curve, scaling, or acting on
the ambient space by an invertible linear map).
"""
import numpy as np
import pytest

from rclab import curvespace
from rclab.curvespace import (
    CHECKS,
    GROUP_DIM,
    IncidencePoint,
    InconsistentMarkingError,
    TrialResult,
    containment_matrix,
    default_threshold,
    jacobian_matrix,
    kernel_backend,
    local_moduli_dim,
    marked_local_fiber_dim,
    marked_system_matrix,
    run_check,
    sample_incidence,
    singular_along_curve_rank,
)
from rclab.formulas import ProblemInstance, expected_fiber_dim, expected_moduli_dim
from rclab.linalg import MAX_MODULUS, ModMatrix, next_prime_above, random_invertible
from rclab.poly import MapParam, MultiPoly, random_map

P = 10007


def _inverse(mat: ModMatrix) -> np.ndarray:
    # invert by reducing [A | I]; valid since A has full rank
    n = mat.shape[0]
    aug = np.hstack([mat.array, np.eye(n, dtype=np.int64)])
    rank, _, red = ModMatrix(aug, mat.p).rref()
    assert rank == n
    return red[:, n:]


# ---------------------------------------------------------------- matrices

def test_containment_matrix_shape_and_rank():
    for seed, (n, d, e) in enumerate([(4, 3, 2), (5, 3, 2), (6, 4, 3), (7, 5, 2)]):
        f = random_map(n, e, P, np.random.default_rng(seed))
        m = containment_matrix(f, d)
        from rclab.poly import monomial_count
        assert m.shape == (d * e + 1, monomial_count(n + 1, d))
        assert m.rank() == d * e + 1


def test_containment_kernel_vectors_vanish_on_curve():
    rng = np.random.default_rng(21)
    f = random_map(3, 2, P, rng)
    m = containment_matrix(f, 2)
    vec = m.random_kernel_point(rng)
    F = MultiPoly.from_coeff_vector(4, 2, P, vec)
    assert F.compose(f).is_zero()


def test_incidence_point_validates_composition():
    rng = np.random.default_rng(22)
    f = random_map(3, 2, P, rng)
    F = MultiPoly(4, 2, P, {(2, 0, 0, 0): 1})
    with pytest.raises(ValueError):
        IncidencePoint(F, f)


def test_incidence_point_chart_derivation():
    pt = sample_incidence(ProblemInstance(3, 2, 1), P, np.random.default_rng(1),
                          marked=True)
    coords = pt.marked_point()
    nz = np.nonzero(coords)[0]
    assert pt.chart == int(nz[0])
    with pytest.raises(InconsistentMarkingError):
        IncidencePoint(pt.hypersurface, pt.curve, t_marked=pt.t_marked,
                       chart=pt.chart + 1)
    with pytest.raises(InconsistentMarkingError):
        IncidencePoint(pt.hypersurface, pt.curve, chart=0)


def test_jacobian_shape():
    pt = sample_incidence(ProblemInstance(4, 3, 2), P, np.random.default_rng(2))
    jac = jacobian_matrix(pt)
    assert jac.shape == (3 * 2 + 1, 5 * 3)


def test_local_moduli_dim_spot_values():
    # certified dimension equals the closed form at generic samples
    for seed in range(5):
        pt = sample_incidence(ProblemInstance(4, 3, 2), P, np.random.default_rng(seed))
        assert local_moduli_dim(pt) == expected_moduli_dim(4, 3, 2) == 4
    for seed in range(5):
        pt = sample_incidence(ProblemInstance(6, 4, 3), P, np.random.default_rng(seed))
        assert local_moduli_dim(pt) == expected_moduli_dim(6, 4, 3) == 11


def test_jacobian_rank_invariant_under_reparametrization():
    rng = np.random.default_rng(30)
    pt = sample_incidence(ProblemInstance(4, 3, 2), P, rng)
    base = jacobian_matrix(pt).rank()
    gamma = random_invertible(2, P, rng).array
    moved = IncidencePoint(pt.hypersurface, pt.curve.reparametrize(gamma))
    assert jacobian_matrix(moved).rank() == base


def test_jacobian_rank_invariant_under_scaling():
    rng = np.random.default_rng(31)
    pt = sample_incidence(ProblemInstance(4, 3, 2), P, rng)
    base = jacobian_matrix(pt).rank()
    moved = IncidencePoint(pt.hypersurface, pt.curve.scale(9))
    assert jacobian_matrix(moved).rank() == base


def test_jacobian_rank_invariant_under_ambient_action():
    rng = np.random.default_rng(32)
    pt = sample_incidence(ProblemInstance(4, 3, 2), P, rng)
    base = jacobian_matrix(pt).rank()
    A = random_invertible(5, P, rng)
    # G(x) = F(A^-1 x), so G vanishes on A f
    G = pt.hypersurface.compose_linear(_inverse(A))
    moved = IncidencePoint(G, pt.curve.transform(A.array))
    assert jacobian_matrix(moved).rank() == base


def test_marked_system_rank_has_one_dependency():
    # de+1 composed rows + n chart rows, exactly one linear relation
    for seed in range(5):
        pt = sample_incidence(ProblemInstance(6, 4, 1), P,
                              np.random.default_rng(seed), marked=True)
        m = marked_system_matrix(pt)
        assert m.shape == (4 * 1 + 1 + 6, 7 * 2 + 1)
        assert m.rank() == 4 * 1 + 6


def test_marked_fiber_dim_line_case():
    # degree-1 fiber dimension is n - d - 1
    for seed in range(8):
        pt = sample_incidence(ProblemInstance(6, 4, 1), P,
                              np.random.default_rng(seed), marked=True)
        assert marked_local_fiber_dim(pt) == 1 == expected_fiber_dim(6, 4, 1)


def test_marked_fiber_dim_conic_case():
    for seed in range(5):
        pt = sample_incidence(ProblemInstance(5, 3, 2), P,
                              np.random.default_rng(seed), marked=True)
        assert marked_local_fiber_dim(pt) == expected_fiber_dim(5, 3, 2) == 4


def test_marked_system_requires_marking():
    pt = sample_incidence(ProblemInstance(3, 2, 1), P, np.random.default_rng(3))
    with pytest.raises(InconsistentMarkingError):
        marked_system_matrix(pt)
    with pytest.raises(InconsistentMarkingError):
        pt.marked_point()


def test_singular_rank_exact_for_lines():
    for n, d in ((2, 2), (4, 3), (6, 4)):
        for seed in range(10):
            f = random_map(n, 1, P, np.random.default_rng(seed))
            assert singular_along_curve_rank(f, d) == n * d + 1


def test_singular_rank_at_least_line_count_in_higher_degree():
    for n, d in ((4, 3), (6, 4)):
        for seed in range(5):
            f = random_map(n, 2, P, np.random.default_rng(seed))
            assert singular_along_curve_rank(f, d) >= n * d + 1


def test_singular_rank_needs_degree_two():
    f = random_map(3, 1, P, np.random.default_rng(4))
    with pytest.raises(ValueError):
        singular_along_curve_rank(f, 1)


# ---------------------------------------------------------------- sampling

def test_sample_incidence_reproducible():
    inst = ProblemInstance(4, 3, 2)
    a = sample_incidence(inst, P, np.random.default_rng(77), marked=True)
    b = sample_incidence(inst, P, np.random.default_rng(77), marked=True)
    assert a.curve == b.curve
    assert a.hypersurface == b.hypersurface
    assert a.t_marked == b.t_marked


def test_sample_incidence_prime_floor():
    with pytest.raises(ValueError):
        sample_incidence(ProblemInstance(4, 3, 2), 5, np.random.default_rng(0))


# ---------------------------------------------------------------- wrappers

def test_checks_constant():
    assert CHECKS == ("containment", "jacobian", "marked", "singular")
    assert GROUP_DIM == 4


def test_default_threshold():
    assert default_threshold("singular", 1, 50) == 50
    assert default_threshold("singular", 2, 50) == 49
    assert default_threshold("jacobian", 1, 50) == 49
    assert default_threshold("marked", 3, 1) == 1


def test_run_check_passes_small_case():
    report = run_check("jacobian", 4, 2, 1, trials=8, seed=0)
    assert report.verdict
    assert report.invariant_ok
    assert len(report.rounds) == 1
    assert report.final_prime == P
    assert report.rounds[0].passes == 8
    assert [t.trial for t in report.rounds[0].trials] == list(range(8))


def test_run_check_report_serializes():
    import json
    report = run_check("marked", 6, 4, 1, trials=3, seed=1)
    blob = json.loads(json.dumps(report.as_dict()))
    assert blob["check"] == "marked"
    assert blob["rounds"][0]["trials"][0]["expected"] == 1


def test_run_check_validation():
    with pytest.raises(ValueError):
        run_check("curvature", 4, 2, 1)
    with pytest.raises(ValueError):
        run_check("jacobian", 4, 2, 1, trials=0)
    with pytest.raises(ValueError):
        run_check("jacobian", 4, 2, 1, trials=5, threshold=6)


def _always(ok: bool):
    def fake(check, inst, p, rng):
        return TrialResult(trial=-1, ok=ok, rank=0, value=0, expected=1,
                           invariant_ok=True)
    return fake


def test_retry_round_advances_prime(monkeypatch):
    seen = []

    def fake(check, inst, p, rng):
        seen.append(p)
        return TrialResult(trial=-1, ok=False, rank=0, value=0, expected=1,
                           invariant_ok=True)

    monkeypatch.setattr(curvespace, "_run_one", fake)
    report = run_check("containment", 3, 2, 1, prime=P, trials=4, seed=0)
    retry_prime = next_prime_above(2 * P)
    assert len(report.rounds) == 2
    assert (report.rounds[0].prime, report.rounds[1].prime) == (P, retry_prime)
    assert not report.verdict
    assert set(seen) == {P, retry_prime}
    assert report.rounds[0].anomalies == (0, 1, 2, 3)


def test_retry_can_rescue_the_verdict(monkeypatch):
    def fake(check, inst, p, rng):
        return TrialResult(trial=-1, ok=p != P, rank=0, value=0, expected=1,
                           invariant_ok=True)

    monkeypatch.setattr(curvespace, "_run_one", fake)
    report = run_check("containment", 3, 2, 1, prime=P, trials=4, seed=0)
    assert len(report.rounds) == 2
    assert report.verdict
    assert report.final_prime == next_prime_above(2 * P)


def test_retry_disabled(monkeypatch):
    monkeypatch.setattr(curvespace, "_run_one", _always(False))
    report = run_check("containment", 3, 2, 1, trials=2, retry=False)
    assert len(report.rounds) == 1 and not report.verdict


def test_retry_respects_modulus_cap(monkeypatch):
    monkeypatch.setattr(curvespace, "_run_one", _always(False))
    big = next_prime_above(MAX_MODULUS // 2)
    assert next_prime_above(2 * big) > MAX_MODULUS
    report = run_check("containment", 3, 2, 1, prime=big, trials=2, seed=0)
    assert len(report.rounds) == 1 and not report.verdict


def test_trial_seeds_are_cell_addressed():
    # rerunning one (round, trial) cell reproduces its draw exactly
    a = curvespace._trial_rng(5, 0, 3).integers(0, 1 << 30, size=4)
    b = curvespace._trial_rng(5, 0, 3).integers(0, 1 << 30, size=4)
    c = curvespace._trial_rng(5, 1, 3).integers(0, 1 << 30, size=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_kernel_backend_reports_a_known_name():
    assert kernel_backend() in ("compiled", "pure")

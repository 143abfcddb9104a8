"""Finite-field certification of curve-space dimensions.

The objects here are pairs (F, f): a degree-d form F on P^n over F_p and a
degree-e parametrized rational curve f with F(f) = 0.  Around such a pair
the space of curves on {F = 0} is cut out, to first order, by linear
conditions on the map coefficients; its local dimension is certified by the
rank of an explicit Jacobian.  A marked variant pins the curve through a
fixed point and certifies the dimension of the evaluation fiber.

Everything reduces to three matrices, all built from compositions of
monomials with f:

  containment      (de+1) x (N+1)    form coefficients -> composed form
  jacobian         (de+1) x (n+1)(e+1)   map coefficients -> composed form
  singular stack   (n+1)((d-1)e+1) x (N+1)   form coefficients -> composed
                                             partial derivatives

Statistical wrappers run many random trials with derived seeds and issue a
verdict; a failed round is retried once at a larger prime, since rank drops
at special primes are expected at a rate of about 1/p.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

from rclab import _kernels
from rclab.formulas import ProblemInstance, expected_fiber_dim, expected_moduli_dim
from rclab.linalg import DEFAULT_PRIME, MAX_MODULUS, ModMatrix, next_prime_above
from rclab.poly import (
    MapParam,
    MultiPoly,
    monomial_composition_table,
    monomial_exponents,
    monomial_index,
    random_map,
)

GROUP_DIM = 4  # reparametrizations of P^1 act with 3 + 1 parameters (PGL_2 and scaling)

CHECKS = ("containment", "jacobian", "marked", "singular")


class InconsistentMarkingError(ValueError):
    """Raised when a marked parameter value does not give a usable point."""


@dataclass(frozen=True)
class IncidencePoint:
    """A curve lying on a hypersurface, optionally with a marked parameter.

    Invariant (checked): hypersurface composed with curve is identically
    zero.  For marked points, `chart` is the smallest coordinate index
    nonzero at the marked point; the affine chart conditions in the marked
    system are written against it.
    """

    hypersurface: MultiPoly
    curve: MapParam
    t_marked: int | None = None
    chart: int | None = None

    def __post_init__(self):
        F, f = self.hypersurface, self.curve
        if F.p != f.p:
            raise ValueError(f"mixed moduli {F.p} and {f.p}")
        if F.n_vars != f.n + 1:
            raise ValueError(f"form in {F.n_vars} variables cannot vanish on a curve in P^{f.n}")
        if not F.compose(f).is_zero():
            raise ValueError("curve does not lie on the hypersurface")
        if self.t_marked is not None:
            point = f.evaluate_at(self.t_marked)
            nz = np.nonzero(point)[0]
            if nz.size == 0:
                raise InconsistentMarkingError(
                    f"curve parametrization vanishes at t={self.t_marked}")
            expected_chart = int(nz[0])
            if self.chart is None:
                object.__setattr__(self, "chart", expected_chart)
            elif self.chart != expected_chart:
                raise InconsistentMarkingError(
                    f"chart {self.chart} does not match first nonzero coordinate {expected_chart}")
        elif self.chart is not None:
            raise InconsistentMarkingError("chart given without a marked parameter")

    @property
    def p(self) -> int:
        return self.hypersurface.p

    def marked_point(self) -> NDArray[np.int64]:
        if self.t_marked is None:
            raise InconsistentMarkingError("no marked parameter on this point")
        return self.curve.evaluate_at(self.t_marked)


def containment_matrix(f: MapParam, d: int) -> ModMatrix:
    """The linear map {degree-d forms} -> {degree-de binary forms} given by
    composition with f, in canonical monomial coordinates.

    Its kernel is the space of forms vanishing on the curve; for
    nondegenerate f it has full rank de + 1.
    """
    if d < 1:
        raise ValueError("form degree must be at least 1")
    table = monomial_composition_table(f, d)
    monos = monomial_exponents(f.n + 1, d)
    mat = np.empty((d * f.e + 1, len(monos)), dtype=np.int64)
    for j, exps in enumerate(monos):
        mat[:, j] = table[exps]
    return ModMatrix(mat, f.p)


def _partial_composition_matrices(f: MapParam, d: int) -> list[NDArray[np.int64]]:
    """For each variable i, the matrix D_i sending a degree-d form F (as a
    coefficient vector) to the composition (dF/dx_i)(f) (as a binary form
    of degree (d-1)e).

    Column rule: the monomial x^m contributes m_i * (x^(m - unit_i))(f).
    """
    p = f.p
    n1 = f.n + 1
    table = monomial_composition_table(f, d - 1)
    monos = monomial_exponents(n1, d)
    rows = (d - 1) * f.e + 1
    mats = [np.zeros((rows, len(monos)), dtype=np.int64) for _ in range(n1)]
    for j, exps in enumerate(monos):
        for i in range(n1):
            m = exps[i]
            if m == 0:
                continue
            lowered = list(exps)
            lowered[i] -= 1
            mats[i][:, j] = m * table[tuple(lowered)] % p
    return mats


def jacobian_matrix(point: IncidencePoint) -> ModMatrix:
    """Derivative of (map coefficients) -> (composed form coefficients) at
    the given incidence, a (de+1) x (n+1)(e+1) matrix.

    Column (i, j) is the composed form's response to perturbing coefficient
    j of coordinate i, which is (dF/dx_i)(f) shifted up by t^j:

        J[k, i(e+1)+j] = coeff_{k-j} of (dF/dx_i)(f)
    """
    F, f = point.hypersurface, point.curve
    d, e, n = F.degree, f.e, f.n
    p = f.p
    cF = F.coeff_vector()
    mats = _partial_composition_matrices(f, d)
    jac = np.zeros((d * e + 1, (n + 1) * (e + 1)), dtype=np.int64)
    block = (d - 1) * e + 1
    for i in range(n + 1):
        v = mats[i] @ cF % p
        for j in range(e + 1):
            jac[j:j + block, i * (e + 1) + j] = v
    return ModMatrix(jac, p)


def local_moduli_dim(point: IncidencePoint) -> int:
    """Dimension of the curve space on the hypersurface at this point:
    parameter count minus Jacobian rank, minus the reparametrization group."""
    f = point.curve
    return (f.n + 1) * (f.e + 1) - jacobian_matrix(point).rank() - GROUP_DIM


def marked_system_matrix(point: IncidencePoint) -> ModMatrix:
    """Jacobian of the marked incidence system in the unknowns (map
    coefficients, marked parameter), a (de+1+n) x ((n+1)(e+1)+1) matrix.

    Rows are the de+1 composed-form coefficients (independent of the marked
    parameter) followed by the n chart conditions

        g_i = p_c f_i(t) - p_i f_c(t),   i != c

    which pin f(t) to the fixed point (p_0 : ... : p_n) in the chart of its
    first nonzero coordinate c.  Exactly one linear dependency relates the
    composed rows at t to the chart rows (the composed form vanishes to
    order coming from F(p) = 0 and the Euler relation), so the generic rank
    is de + n, not de + n + 1.
    """
    F, f = point.hypersurface, point.curve
    if point.t_marked is None:
        raise InconsistentMarkingError("marked system needs a marked parameter")
    d, e, n = F.degree, f.e, f.n
    p = f.p
    t0 = point.t_marked % p
    c = point.chart
    pt = point.marked_point()

    cols = (n + 1) * (e + 1) + 1
    mat = np.zeros((d * e + 1 + n, cols), dtype=np.int64)
    mat[:d * e + 1, :cols - 1] = jacobian_matrix(point).array

    tpow = np.ones(e + 1, dtype=np.int64)
    for j in range(1, e + 1):
        tpow[j] = tpow[j - 1] * t0 % p
    deriv = f.derivative_at(t0)

    r = d * e + 1
    for i in range(n + 1):
        if i == c:
            continue
        mat[r, i * (e + 1):(i + 1) * (e + 1)] = pt[c] * tpow % p
        mat[r, c * (e + 1):(c + 1) * (e + 1)] = (
            mat[r, c * (e + 1):(c + 1) * (e + 1)] - pt[i] * tpow) % p
        mat[r, cols - 1] = (pt[c] * deriv[i] - pt[i] * deriv[c]) % p
        r += 1
    return ModMatrix(mat, p)


def marked_local_fiber_dim(point: IncidencePoint) -> int:
    """Dimension of the space of curves on the hypersurface through the
    marked point: unknowns minus marked-system rank, minus the group."""
    f = point.curve
    unknowns = (f.n + 1) * (f.e + 1) + 1
    return unknowns - marked_system_matrix(point).rank() - GROUP_DIM


def singular_along_curve_rank(f: MapParam, d: int) -> int:
    """Rank of the conditions on a degree-d form to be singular along the
    whole curve: all n+1 partial derivatives composed with f must vanish.

    For a line this rank is exactly nd + 1; higher-degree curves impose at
    least that many conditions.
    """
    if d < 2:
        raise ValueError("singularity conditions need form degree at least 2")
    mats = _partial_composition_matrices(f, d)
    return ModMatrix(np.vstack(mats), f.p).rank()


def sample_incidence(inst: ProblemInstance, p: int, rng,
                     marked: bool = False) -> IncidencePoint:
    """A random incidence: draw a nondegenerate curve, then a random
    hypersurface through it (uniform over the kernel of the containment
    map), then, if marked, a random parameter value.

    Draw order is fixed (curve entries, kernel coordinates, marked
    parameter) so a seeded generator reproduces the sample exactly.
    Requires p > d*e so composed forms have more coefficients than the
    field has roots to hide behind.
    """
    n, d, e = inst.n, inst.d, inst.e
    if p <= d * e:
        raise ValueError(f"prime {p} too small: need p > d*e = {d * e}")
    rng = np.random.default_rng(rng)
    f = random_map(n, e, p, rng)
    cF = containment_matrix(f, d).random_kernel_point(rng)
    F = MultiPoly.from_coeff_vector(n + 1, d, p, cF)
    t0 = None
    if marked:
        t0 = int(rng.integers(0, p))
    return IncidencePoint(F, f, t_marked=t0)


@dataclass(frozen=True)
class TrialResult:
    """One random trial of one check."""

    trial: int
    ok: bool
    rank: int
    value: int | None
    expected: int | None
    invariant_ok: bool
    t_marked: int | None = None
    chart: int | None = None

    def as_dict(self) -> dict:
        return {
            "trial": self.trial,
            "ok": self.ok,
            "rank": self.rank,
            "value": self.value,
            "expected": self.expected,
            "invariant_ok": self.invariant_ok,
            "t_marked": self.t_marked,
            "chart": self.chart,
        }


@dataclass(frozen=True)
class RoundResult:
    """All trials of one check at one prime."""

    prime: int
    trials: tuple[TrialResult, ...]
    passes: int
    threshold: int
    verdict: bool

    @property
    def anomalies(self) -> tuple[int, ...]:
        return tuple(t.trial for t in self.trials if not t.ok)

    def as_dict(self) -> dict:
        return {
            "prime": self.prime,
            "passes": self.passes,
            "threshold": self.threshold,
            "verdict": self.verdict,
            "anomalies": list(self.anomalies),
            "trials": [t.as_dict() for t in self.trials],
        }


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of a statistical check, possibly after a retry round."""

    check: str
    n: int
    d: int
    e: int
    seed: int
    trials: int
    threshold: int
    rounds: tuple[RoundResult, ...]

    @property
    def verdict(self) -> bool:
        return self.rounds[-1].verdict

    @property
    def invariant_ok(self) -> bool:
        return all(t.invariant_ok for r in self.rounds for t in r.trials)

    @property
    def final_prime(self) -> int:
        return self.rounds[-1].prime

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "n": self.n,
            "d": self.d,
            "e": self.e,
            "seed": self.seed,
            "trials": self.trials,
            "threshold": self.threshold,
            "verdict": self.verdict,
            "invariant_ok": self.invariant_ok,
            "final_prime": self.final_prime,
            "rounds": [r.as_dict() for r in self.rounds],
        }


def _trial_rng(seed: int, round_index: int, trial: int) -> np.random.Generator:
    # derived, not sequential: any (round, trial) cell can be replayed alone
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(round_index, trial)))


def _run_one(check: str, inst: ProblemInstance, p: int, rng) -> TrialResult:
    n, d, e = inst.n, inst.d, inst.e
    if check == "containment":
        f = random_map(n, e, p, rng)
        rank = containment_matrix(f, d).rank()
        expected = d * e + 1
        return TrialResult(trial=-1, ok=rank == expected, rank=rank,
                           value=rank, expected=expected, invariant_ok=rank <= expected)
    if check == "jacobian":
        pt = sample_incidence(inst, p, rng)
        rank = jacobian_matrix(pt).rank()
        dim = (n + 1) * (e + 1) - rank - GROUP_DIM
        expected = expected_moduli_dim(n, d, e)
        # rank can only drop at special points, so dim >= expected always
        return TrialResult(trial=-1, ok=dim == expected, rank=rank,
                           value=dim, expected=expected, invariant_ok=dim >= expected)
    if check == "marked":
        pt = sample_incidence(inst, p, rng, marked=True)
        rank = marked_system_matrix(pt).rank()
        dim = (n + 1) * (e + 1) + 1 - rank - GROUP_DIM
        expected = expected_fiber_dim(n, d, e)
        ok = rank == d * e + n and dim == expected
        return TrialResult(trial=-1, ok=ok, rank=rank, value=dim, expected=expected,
                           invariant_ok=dim >= expected,
                           t_marked=pt.t_marked, chart=pt.chart)
    if check == "singular":
        f = random_map(n, e, p, rng)
        rank = singular_along_curve_rank(f, d)
        expected = n * d + 1
        # for lines the count is a theorem, not a genericity statement
        ok = rank == expected if e == 1 else rank >= expected
        return TrialResult(trial=-1, ok=ok, rank=rank,
                           value=rank, expected=expected,
                           invariant_ok=ok if e == 1 else True)
    raise ValueError(f"unknown check {check!r}; choose from {CHECKS}")


def default_threshold(check: str, e: int, trials: int) -> int:
    """Pass threshold: all trials for the deterministic line-singularity
    count, trials - 1 otherwise (one rank drop per round is tolerated)."""
    if check == "singular" and e == 1:
        return trials
    return max(1, trials - 1)


def run_check(check: str, n: int, d: int, e: int, *,
              prime: int = DEFAULT_PRIME, trials: int = 50, seed: int = 0,
              threshold: int | None = None, retry: bool = True) -> VerificationReport:
    """Run one statistical check: `trials` independent random trials at
    `prime`, verdict by threshold, and on failure one retry round at the
    next prime above twice the first.

    Checks:
      containment   rank of the containment map equals de + 1
      jacobian      certified local curve-space dimension equals
                    e(n-d+1) + n - 4 (and never falls below it)
      marked        marked-system rank equals de + n, so the evaluation
                    fiber has dimension e(n-d+1) - 2
      singular      conditions to be singular along the curve: exactly
                    nd + 1 for lines, at least that in higher degree
    """
    if check not in CHECKS:
        raise ValueError(f"unknown check {check!r}; choose from {CHECKS}")
    if trials < 1:
        raise ValueError("need at least one trial")
    inst = ProblemInstance(n, d, e)
    if threshold is None:
        threshold = default_threshold(check, e, trials)
    if not 1 <= threshold <= trials:
        raise ValueError(f"threshold {threshold} out of range for {trials} trials")

    rounds: list[RoundResult] = []
    p = prime
    for round_index in (0, 1):
        results = []
        for trial in range(trials):
            rng = _trial_rng(seed, round_index, trial)
            results.append(replace(_run_one(check, inst, p, rng), trial=trial))
        passes = sum(1 for r in results if r.ok)
        rounds.append(RoundResult(prime=p, trials=tuple(results), passes=passes,
                                  threshold=threshold, verdict=passes >= threshold))
        if rounds[-1].verdict or not retry:
            break
        next_p = next_prime_above(2 * p)
        if next_p > MAX_MODULUS:
            break
        p = next_p
    return VerificationReport(check=check, n=n, d=d, e=e, seed=seed, trials=trials,
                              threshold=threshold, rounds=tuple(rounds))


def kernel_backend() -> str:
    """Which kernel backend this process selected ('compiled' or 'pure')."""
    return _kernels.BACKEND

"""Brute-force cross-checks over tiny fields.

The rank certificates in curvespace are first-order and statistical; this
module provides zeroth-order ground truth.  Over a tiny field F_q the set
of ALL degree-e parameter vectors a with F(f_a) = 0 can be enumerated
outright, and the growth of its count with q estimates the dimension of
the solution cone with no Jacobian anywhere in sight.  A dual-number
composition gives an independent check of the Jacobian itself.

Counts here are raw: the full (n+1)(e+1)-dimensional coefficient cone,
zero vector and degenerate maps included, never divided by the group.
Comparisons against quotient dimensions must add the group back on the
other side.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import factorial, prod

import numpy as np
from numpy.typing import NDArray

from rclab import _kernels
from rclab.curvespace import IncidencePoint, jacobian_matrix
from rclab.linalg import is_prime
from rclab.poly import MultiPoly, monomial_count

DEFAULT_BUDGET = 1 << 26


class BudgetError(RuntimeError):
    """Raised instead of starting an enumeration that would not finish."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"enumeration would visit {required} candidates, over the budget of "
            f"{budget}; raise the budget or pass a [start, stop) slice")


def compile_system(F: MultiPoly, e: int) -> tuple[NDArray[np.int64], NDArray[np.int64], NDArray[np.int64]]:
    """Expand F(f_a) into explicit terms in the map coefficients a.

    Each composed coefficient (of t^k, on the affine chart s = 1) is a sum
    of terms c * a_{i_1} ... a_{i_d} with flat indices i = var*(e+1) + slot.
    Returns (coeffs, var_idx, offsets): term t has coefficient coeffs[t]
    and variable list var_idx[t]; terms of composed coefficient k occupy
    rows offsets[k]:offsets[k+1].

    The expansion is the multinomial one: for x_i^m, choose a multiset of m
    slots from row i, multiplicity m! / prod(count_j!).
    """
    if e < 1:
        raise ValueError("map degree must be at least 1")
    q = F.p
    d = F.degree
    buckets: list[list[tuple[int, list[int]]]] = [[] for _ in range(d * e + 1)]
    for exps, c in F.terms.items():
        partial: list[tuple[int, int, list[int]]] = [(c, 0, [])]
        for i, m in enumerate(exps):
            if m == 0:
                continue
            choices = []
            for slots in combinations_with_replacement(range(e + 1), m):
                counts = [slots.count(j) for j in set(slots)]
                mult = factorial(m) // prod(factorial(x) for x in counts)
                idx = [i * (e + 1) + j for j in slots]
                choices.append((mult % q, sum(slots), idx))
            partial = [
                (coef * mult % q, tdeg + td, idx + more)
                for coef, tdeg, idx in partial
                for mult, td, more in choices
            ]
        for coef, tdeg, idx in partial:
            if coef:
                buckets[tdeg].append((coef, idx))

    n_terms = sum(len(b) for b in buckets)
    coeffs = np.empty(n_terms, dtype=np.int64)
    var_idx = np.empty((n_terms, d), dtype=np.int64)
    offsets = np.zeros(d * e + 2, dtype=np.int64)
    t = 0
    for k, bucket in enumerate(buckets):
        for coef, idx in bucket:
            coeffs[t] = coef
            var_idx[t] = idx
            t += 1
        offsets[k + 1] = t
    return coeffs, var_idx, offsets


def enumerate_solutions(F: MultiPoly, e: int, *, budget: int = DEFAULT_BUDGET,
                        start: int = 0, stop: int | None = None) -> int:
    """Count parameter vectors a in F_q^(n+1)(e+1) with F(f_a) = 0.

    Candidate c encodes a in base q, least significant digit first, so
    [start, stop) slices partition the full count exactly.  Refuses to
    start if the slice exceeds the budget.
    """
    q = F.p
    n_vars = F.n_vars * (e + 1)
    total = q ** n_vars
    if stop is None:
        stop = total
    if not 0 <= start <= stop <= total:
        raise ValueError(f"bad slice [{start}, {stop}) of {total} candidates")
    span = stop - start
    if span > budget:
        raise BudgetError(required=span, budget=budget)
    if span == 0:
        return 0
    coeffs, var_idx, offsets = compile_system(F, e)
    return int(_kernels.count_vanishing(coeffs, var_idx, offsets, n_vars, q, start, stop))


def enumerate_solutions_direct(F: MultiPoly, e: int, *, budget: int = 1 << 16) -> int:
    """Same count by a different route: compose F with every candidate map
    by raw convolution, no term compilation.  Slow; exists to catch bugs in
    the fast path."""
    q = F.p
    n1 = F.n_vars
    n_vars = n1 * (e + 1)
    total = q ** n_vars
    if total > budget:
        raise BudgetError(required=total, budget=budget)
    count = 0
    arr = np.zeros((n1, e + 1), dtype=np.int64)
    for cand in range(total):
        x = cand
        for i in range(n1):
            for j in range(e + 1):
                arr[i, j] = x % q
                x //= q
        out = np.zeros(F.degree * e + 1, dtype=np.int64)
        for exps, c in F.terms.items():
            term = np.array([c], dtype=np.int64)
            for i, m in enumerate(exps):
                for _ in range(m):
                    term = np.convolve(term, arr[i]) % q
            out = (out + term) % q
        if not out.any():
            count += 1
    return count


@dataclass(frozen=True)
class CountProfile:
    """Solution counts for one instance shape across several primes.

    `counts` holds, per prime, the total over `samples` random
    hypersurfaces.  Averaging matters: a single hypersurface over a tiny
    field can have arithmetic all its own (a quadric surface without
    F_q-lines, say), while the ensemble total tracks the incidence variety
    of (hypersurface, solution) pairs, whose relative dimension is exactly
    the expected cone dimension."""

    n: int
    d: int
    e: int
    seed: int
    samples: int
    counts: tuple[tuple[int, int], ...]  # (prime, summed count)

    @property
    def expected_exponent(self) -> int:
        """Dimension of the solution cone when conditions are independent:
        (n+1)(e+1) - (de+1)."""
        return (self.n + 1) * (self.e + 1) - (self.d * self.e + 1)

    def slope(self) -> float:
        """Least-squares slope of log(count) against log(prime): the
        empirical dimension of the solution cone."""
        if len(self.counts) < 2:
            raise ValueError("need counts at two or more primes for a slope")
        qs = np.array([q for q, _ in self.counts], dtype=float)
        cs = np.array([c for _, c in self.counts], dtype=float)
        if (cs <= 0).any():
            raise ValueError("zero count at some prime; no slope to fit")
        return float(np.polyfit(np.log(qs), np.log(cs), 1)[0])

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "e": self.e,
            "seed": self.seed,
            "samples": self.samples,
            "counts": [[q, c] for q, c in self.counts],
            "expected_exponent": self.expected_exponent,
            "slope": self.slope() if len(self.counts) >= 2 else None,
        }


DEFAULT_SAMPLES = 12


def count_profile(n: int, d: int, e: int, primes, seed: int = 0,
                  budget: int = DEFAULT_BUDGET,
                  samples: int = DEFAULT_SAMPLES) -> CountProfile:
    """Enumerate solution counts over several primes, summed over `samples`
    random hypersurfaces.

    Master integer coefficient vectors are drawn once (uniform below 2^30)
    and reduced mod each prime, so every field sees the same ensemble of
    hypersurfaces.  The per-call budget applies to each enumeration
    separately.
    """
    primes = [int(q) for q in primes]
    if not primes:
        raise ValueError("need at least one prime")
    for q in primes:
        if not is_prime(q):
            raise ValueError(f"{q} is not prime")
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    masters = rng.integers(0, 1 << 30, size=(samples, monomial_count(n + 1, d)),
                           dtype=np.int64)
    counts = []
    for q in primes:
        total = 0
        for r in range(samples):
            F = MultiPoly.from_coeff_vector(n + 1, d, q, masters[r] % q)
            total += enumerate_solutions(F, e, budget=budget)
        counts.append((q, total))
    return CountProfile(n=n, d=d, e=e, seed=seed, samples=samples,
                        counts=tuple(counts))


def fixed_profile(n: int, d: int, e: int, primes, coeffs, seed: int = 0,
                  budget: int = DEFAULT_BUDGET) -> CountProfile:
    """Counts for one explicitly given hypersurface.

    `coeffs` is an integer vector in canonical monomial order, reduced mod
    each prime.  Useful for systems with known exact counts (a linear form
    forces one coordinate row to zero, so the count is an exact power)."""
    primes = [int(q) for q in primes]
    if not primes:
        raise ValueError("need at least one prime")
    for q in primes:
        if not is_prime(q):
            raise ValueError(f"{q} is not prime")
    vec = np.asarray(coeffs, dtype=np.int64)
    expected = monomial_count(n + 1, d)
    if vec.shape != (expected,):
        raise ValueError(f"need {expected} coefficients for (n={n}, d={d}), "
                         f"got {vec.shape}")
    counts = []
    for q in primes:
        F = MultiPoly.from_coeff_vector(n + 1, d, q, vec % q)
        counts.append((q, enumerate_solutions(F, e, budget=budget)))
    return CountProfile(n=n, d=d, e=e, seed=seed, samples=1, counts=tuple(counts))


def dimension_estimate(profile: CountProfile) -> float:
    """The empirical cone dimension; compare with expected_exponent."""
    return profile.slope()


class _DualForm:
    """A binary form with an infinitesimal part: re + eps * im, eps^2 = 0."""

    __slots__ = ("re", "im", "p")

    def __init__(self, re, im, p):
        self.re = np.asarray(re, dtype=np.int64) % p
        self.im = np.asarray(im, dtype=np.int64) % p
        self.p = p

    def __mul__(self, other):
        p = self.p
        re = np.convolve(self.re, other.re) % p
        im = (np.convolve(self.re, other.im) + np.convolve(self.im, other.re)) % p
        return _DualForm(re, im, p)


def compose_dual(F: MultiPoly, f_rows: NDArray[np.int64],
                 g_rows: NDArray[np.int64]) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """Compose F with the perturbed map f + eps*g.

    Returns (value, derivative): the composition with f and its exact first
    variation in direction g, each as a degree-de coefficient array.
    """
    p = F.p
    de = F.degree * (f_rows.shape[1] - 1)
    acc_re = np.zeros(de + 1, dtype=np.int64)
    acc_im = np.zeros(de + 1, dtype=np.int64)
    for exps, c in F.terms.items():
        term = _DualForm(np.array([c], dtype=np.int64), np.zeros(1, dtype=np.int64), p)
        for i, m in enumerate(exps):
            row = _DualForm(f_rows[i], g_rows[i], p)
            for _ in range(m):
                term = term * row
        acc_re = (acc_re + term.re) % p
        acc_im = (acc_im + term.im) % p
    return acc_re, acc_im


def jacobian_direction_check(point: IncidencePoint, directions: int = 20,
                             rng=None) -> bool:
    """Check the curvespace Jacobian against dual-number composition.

    For random directions g, the first variation of F(f + eps*g) computed
    with dual arithmetic must equal J @ vec(g), and the value part must
    vanish.  Exact equality over F_p; any mismatch returns False.
    """
    rng = np.random.default_rng(rng)
    F, f = point.hypersurface, point.curve
    p = f.p
    jac = jacobian_matrix(point)
    for _ in range(directions):
        g = rng.integers(0, p, size=f.coeffs.shape, dtype=np.int64)
        value, variation = compose_dual(F, f.coeffs, g)
        if value.any():
            return False
        if not np.array_equal(jac.matvec(g.reshape(-1)), variation):
            return False
    return True

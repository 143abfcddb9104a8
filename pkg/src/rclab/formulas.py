"""Closed-form dimension counts.

Pure integer formulas for the geometry of degree-e rational curves on a
general degree-d hypersurface in P^n: expected dimensions, codimensions of
the loci of badly behaved hypersurfaces, boundary and multiple-cover
dimensions, and a consistency scan that checks the formulas against each
other over a large parameter range.

Everything is exact; no floats.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb


def _check_pair(n: int, d: int) -> None:
    if n < 2:
        raise ValueError(f"ambient dimension n={n} must be at least 2")
    if d < 1:
        raise ValueError(f"degree d={d} must be at least 1")


def _check_triple(n: int, d: int, e: int) -> None:
    _check_pair(n, d)
    if e < 1:
        raise ValueError(f"curve degree e={e} must be at least 1")


def form_space_dim(n: int, d: int) -> int:
    """Dimension N of the projective space of degree-d forms on P^n."""
    _check_pair(n, d)
    return comb(n + d, d) - 1


def param_count(n: int, e: int) -> int:
    """Coefficients of a degree-e parametrized map P^1 -> P^n."""
    return (n + 1) * (e + 1)


def obstruction_count(d: int, e: int) -> int:
    """Coefficients of a degree d*e binary form: conditions for containment."""
    return d * e + 1


def ambient_moduli_dim(n: int, e: int) -> int:
    """Dimension of the space of degree-e rational curves in P^n itself:
    parameter count minus the 4-dimensional reparametrization group."""
    return param_count(n, e) - 4


def expected_moduli_dim(n: int, d: int, e: int) -> int:
    """Expected dimension of the space of degree-e rational curves on a
    general degree-d hypersurface in P^n:

        e(n - d + 1) + n - 4

    which is parameter count (n+1)(e+1), minus the d*e + 1 containment
    conditions, minus the 4-dimensional reparametrization group.  May be
    negative when d is large.
    """
    _check_triple(n, d, e)
    return e * (n - d + 1) + n - 4


def expected_fiber_dim(n: int, d: int, e: int) -> int:
    """Expected dimension of the fiber of evaluation at a marked point:
    curves of degree e through a fixed general point of the hypersurface.

        e(n - d + 1) - 2
    """
    _check_triple(n, d, e)
    return e * (n - d + 1) - 2


def threshold_degree(n: int, d: int) -> int | None:
    """Largest e for which e(n - d + 1) - 2 <= n - 2 still forces curves
    through every point, i.e. floor((n+1)/(n-d+1)); None when d > n."""
    _check_pair(n, d)
    if n - d + 1 <= 0:
        return None
    return (n + 1) // (n - d + 1)


def containment_conditions(d: int, k: int) -> int:
    """Conditions on a degree-d form to vanish on a fixed degree-k rational
    subvariety's worth of parameter directions: C(d + k, k)."""
    if d < 1 or k < 1:
        raise ValueError("degrees must be at least 1")
    return comb(d + k, k)


def line_singular_conditions(n: int, d: int) -> int:
    """Conditions on a degree-d form in n+1 variables to be singular along
    a fixed line: n*d + 1."""
    _check_pair(n, d)
    return n * d + 1


def singular_curve_codim(n: int, d: int, e: int) -> int:
    """Codimension of hypersurfaces singular along some degree-e rational
    curve, inside the space of all degree-d hypersurfaces:

        n(d - e - 1) - e + 4

    This is (conditions to be singular along the curve) minus (dimension of
    the family of such curves): nd + 1 - ((n+1)(e+1) - 4).
    """
    _check_triple(n, d, e)
    return n * (d - e - 1) - e + 4


def excess_base_codim(n: int, d: int) -> int:
    """Codimension bound for hypersurfaces with excess lines through some
    point or singular along some line:

        min(n(d - 2) + 3, C(n, 2) - n + 1)

    Stated for n >= d + 2.
    """
    _check_pair(n, d)
    if n < d + 2:
        raise ValueError(f"excess_base_codim requires n >= d + 2, got n={n}, d={d}")
    return min(n * (d - 2) + 3, comb(n, 2) - n + 1)


def excess_closed_codim(n: int, d: int, e: int) -> int:
    """Closed-form lower bound for the codimension of hypersurfaces whose
    degree-<=e curve spaces misbehave (excess dimension somewhere, or
    singularity along a small curve):

        C(n, 2) + d - 2en + e(e+1)(n-d+1)/2 - e + 1

    Always an integer (e(e+1) is even).  Stated for n >= d + 2.
    """
    _check_triple(n, d, e)
    if n < d + 2:
        raise ValueError(f"excess_closed_codim requires n >= d + 2, got n={n}, d={d}")
    return comb(n, 2) + d - 2 * e * n + e * (e + 1) * (n - d + 1) // 2 - e + 1


def excess_codim_bounds(n: int, d: int, e_max: int) -> list[tuple[int, int]]:
    """(recursive bound, closed form) for e = 1..e_max.

    The recursive bound starts from the base case and descends by

        L_e = min(L_{e-1},
                  L_{e-1} - 2n + e(n-d+1) - 1,
                  n(d-e-1) - e + 4)

    The closed form is excess_closed_codim.  Stated for n >= d + 2.
    """
    _check_triple(n, d, e_max)
    if n < d + 2:
        raise ValueError(f"excess_codim_bounds requires n >= d + 2, got n={n}, d={d}")
    out = []
    level = excess_base_codim(n, d)
    out.append((level, excess_closed_codim(n, d, 1)))
    for e in range(2, e_max + 1):
        level = min(level,
                    level - 2 * n + e * (n - d + 1) - 1,
                    singular_curve_codim(n, d, e))
        out.append((level, excess_closed_codim(n, d, e)))
    return out


def smooth_boundary_dim(n: int, d: int, e: int) -> int:
    """Dimension of the reducible-curve boundary in a marked evaluation
    fiber, smooth-point case: e(n - d + 1) - 3."""
    _check_triple(n, d, e)
    return e * (n - d + 1) - 3


def singular_boundary_dim(n: int, d: int, e: int) -> int:
    """Reducible-curve boundary through a singular point of the curve:
    e(n - d + 1) - 2 (matches the fiber dimension itself)."""
    _check_triple(n, d, e)
    return e * (n - d + 1) - 2


def cover_divisors(e: int) -> list[int]:
    """Cover degrees k >= 2 dividing e."""
    return [k for k in range(2, e + 1) if e % k == 0]


def multiple_cover_dims(n: int, d: int, e: int) -> dict[int, int]:
    """Dimension of the locus of degree-k covers of degree-e/k curves in a
    marked fiber, for each cover degree k >= 2 dividing e:

        (e/k)(n - d + 1) + 2k - 4
    """
    _check_triple(n, d, e)
    return {k: (e // k) * (n - d + 1) + 2 * k - 4 for k in cover_divisors(e)}


def positivity_margin(n: int, d: int) -> int:
    """Left minus right of the inequality guaranteeing the excess locus has
    positive codimension throughout the threshold range:

        (n^2 + 2d + 3)(n - d + 1) > 3n^2 + 4n + 1

    Positive margin means the inequality holds.
    """
    _check_pair(n, d)
    return (n * n + 2 * d + 3) * (n - d + 1) - (3 * n * n + 4 * n + 1)


@dataclass(frozen=True)
class ProblemInstance:
    """One (n, d, e) case: degree-e rational curves on a degree-d
    hypersurface in P^n."""

    n: int
    d: int
    e: int

    def __post_init__(self):
        _check_triple(self.n, self.d, self.e)

    @property
    def form_space_dim(self) -> int:
        return form_space_dim(self.n, self.d)

    @property
    def param_count(self) -> int:
        return param_count(self.n, self.e)

    @property
    def obstruction_count(self) -> int:
        return obstruction_count(self.d, self.e)

    @property
    def ambient_moduli_dim(self) -> int:
        return ambient_moduli_dim(self.n, self.e)

    @property
    def expected_moduli_dim(self) -> int:
        return expected_moduli_dim(self.n, self.d, self.e)

    @property
    def expected_fiber_dim(self) -> int:
        return expected_fiber_dim(self.n, self.d, self.e)

    @property
    def fano_range(self) -> bool:
        """n >= d + 2: the range where the excess-locus bounds are stated."""
        return self.n >= self.d + 2


@dataclass(frozen=True)
class DimReport:
    """Every closed-form count for one (n, d, e), plus self-consistency
    verdicts.  Fields that are only stated for n >= d + 2 are None outside
    that range."""

    n: int
    d: int
    e: int
    form_space_dim: int
    param_count: int
    obstruction_count: int
    ambient_moduli_dim: int
    expected_moduli_dim: int
    expected_fiber_dim: int
    threshold_degree: int | None
    line_singular_conditions: int
    singular_curve_codim: int
    smooth_boundary_dim: int
    singular_boundary_dim: int
    multiple_cover_dims: dict[int, int] = field(compare=False)
    excess_base_codim: int | None
    excess_recursive_codim: int | None
    excess_closed_codim: int | None
    verdicts: dict[str, bool | None] = field(compare=False)

    def as_dict(self) -> dict:
        """JSON-ready dict; cover degrees become string keys."""
        return {
            "n": self.n,
            "d": self.d,
            "e": self.e,
            "form_space_dim": self.form_space_dim,
            "param_count": self.param_count,
            "obstruction_count": self.obstruction_count,
            "ambient_moduli_dim": self.ambient_moduli_dim,
            "expected_moduli_dim": self.expected_moduli_dim,
            "expected_fiber_dim": self.expected_fiber_dim,
            "threshold_degree": self.threshold_degree,
            "line_singular_conditions": self.line_singular_conditions,
            "singular_curve_codim": self.singular_curve_codim,
            "smooth_boundary_dim": self.smooth_boundary_dim,
            "singular_boundary_dim": self.singular_boundary_dim,
            "multiple_cover_dims": {str(k): v for k, v in sorted(self.multiple_cover_dims.items())},
            "excess_base_codim": self.excess_base_codim,
            "excess_recursive_codim": self.excess_recursive_codim,
            "excess_closed_codim": self.excess_closed_codim,
            "verdicts": dict(self.verdicts),
        }


def dim_report(n: int, d: int, e: int) -> DimReport:
    """Assemble every count for one case and cross-check them."""
    _check_triple(n, d, e)
    covers = multiple_cover_dims(n, d, e)
    fano = n >= d + 2
    base = recursive = closed = None
    if fano:
        base = excess_base_codim(n, d)
        recursive, closed = excess_codim_bounds(n, d, e)[-1]

    # positivity of the closed form is only claimed up to the threshold degree
    thr = threshold_degree(n, d)
    in_threshold = fano and thr is not None and e <= thr
    verdicts: dict[str, bool | None] = {
        "recursive_ge_closed": (recursive >= closed) if fano else None,
        "closed_positive": (closed > 0) if in_threshold else None,
        "covers_below_fiber_dim": None,
        "positivity_inequality": positivity_margin(n, d) > 0 if fano else None,
    }
    if covers and n - d + 1 >= 3:
        fiber = expected_fiber_dim(n, d, e)
        verdicts["covers_below_fiber_dim"] = all(v < fiber for v in covers.values())

    return DimReport(
        n=n, d=d, e=e,
        form_space_dim=form_space_dim(n, d),
        param_count=param_count(n, e),
        obstruction_count=obstruction_count(d, e),
        ambient_moduli_dim=ambient_moduli_dim(n, e),
        expected_moduli_dim=expected_moduli_dim(n, d, e),
        expected_fiber_dim=expected_fiber_dim(n, d, e),
        threshold_degree=threshold_degree(n, d),
        line_singular_conditions=line_singular_conditions(n, d),
        singular_curve_codim=singular_curve_codim(n, d, e),
        smooth_boundary_dim=smooth_boundary_dim(n, d, e),
        singular_boundary_dim=singular_boundary_dim(n, d, e),
        multiple_cover_dims=covers,
        excess_base_codim=base,
        excess_recursive_codim=recursive,
        excess_closed_codim=closed,
        verdicts=verdicts,
    )


@dataclass(frozen=True)
class ScanResult:
    """Outcome of the formula consistency scan."""

    n_max: int
    cases_scanned: int
    violations: tuple[dict, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def consistency_scan(n_max: int = 60) -> ScanResult:
    """Check the formula web against itself over the whole stated range:
    6 <= n <= n_max, ceil((n+1)/2) <= d <= n-2, 1 <= e <= threshold.

    Per case: recursive bound >= closed form, closed form positive, the
    degree-1 closed form equals C(n,2) - n + 1, and the positivity
    inequality holds.  Returns every violation found (expected: none).
    n_max below 6 gives an empty scan, which passes.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    violations: list[dict] = []
    cases = 0

    def bad(n, d, e, check, value):
        violations.append({"n": n, "d": d, "e": e, "check": check, "value": value})

    for n in range(6, n_max + 1):
        d_lo = (n + 2) // 2  # ceil((n+1)/2)
        for d in range(d_lo, n - 1):
            e_top = threshold_degree(n, d)
            bounds = excess_codim_bounds(n, d, e_top)
            if positivity_margin(n, d) <= 0:
                bad(n, d, 0, "positivity_inequality", positivity_margin(n, d))
            for e in range(1, e_top + 1):
                cases += 1
                recursive, closed = bounds[e - 1]
                if recursive < closed:
                    bad(n, d, e, "recursive_ge_closed", (recursive, closed))
                if closed <= 0:
                    bad(n, d, e, "closed_positive", closed)
                if e == 1 and closed != comb(n, 2) - n + 1:
                    bad(n, d, e, "closed_base_identity", closed)
    return ScanResult(n_max=n_max, cases_scanned=cases, violations=tuple(violations))

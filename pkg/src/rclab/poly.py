"""Polynomials for the curve laboratory.

Three shapes of data:

  MultiPoly   a homogeneous polynomial in x_0..x_n over F_p, stored sparsely
              as {exponent tuple: coefficient}
  BinaryForm  a homogeneous form in (s, t), stored densely: coeffs[k] is the
              coefficient of s^(degree-k) t^k
  MapParam    a degree-e map P^1 -> P^n: an (n+1) x (e+1) array whose row i
              holds the BinaryForm coefficients of the i-th coordinate

Composition of a MultiPoly with a MapParam is the workhorse: every coefficient
extraction this package does reduces to it.  It is pure convolution
arithmetic, reduced mod p after every convolve so int64 never overflows.
"""
from __future__ import annotations

from functools import lru_cache
import math

import numpy as np
from numpy.typing import NDArray

from rclab.linalg import Fp, ModulusMismatchError, _check_modulus


class DegenerateMapError(ValueError):
    """Raised when map coordinates share a common factor (or are all zero)."""


@lru_cache(maxsize=None)
def monomial_exponents(n_vars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """All exponent tuples of the given total degree, ascending lex order."""
    if n_vars < 1:
        raise ValueError("need at least one variable")
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if n_vars == 1:
        return ((degree,),)
    out = []
    for first in range(degree + 1):
        for rest in monomial_exponents(n_vars - 1, degree - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(n_vars: int, degree: int) -> dict[tuple[int, ...], int]:
    """Position of each exponent tuple in monomial_exponents order."""
    return {m: i for i, m in enumerate(monomial_exponents(n_vars, degree))}


def monomial_count(n_vars: int, degree: int) -> int:
    return math.comb(n_vars + degree - 1, degree)


def _trim(coeffs: list[int]) -> list[int]:
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _affine_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    """Monic gcd of two univariate polynomials (ascending coefficients)."""
    a = _trim(list(a))
    b = _trim(list(b))
    while b != [0]:
        # a mod b by long division
        while len(a) >= len(b) and a != [0]:
            shift = len(a) - len(b)
            factor = a[-1] * pow(b[-1], -1, p) % p
            for i in range(len(b)):
                a[shift + i] = (a[shift + i] - factor * b[i]) % p
            _trim(a)
            if a[-1] == 0 and len(a) == 1:
                break
        a, b = b, a
    if a != [0]:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


class BinaryForm:
    """Dense homogeneous form in (s, t) over F_p."""

    __slots__ = ("coeffs", "degree", "p")

    def __init__(self, coeffs, p: int):
        _check_modulus(p)
        arr = np.asarray(coeffs, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("coefficients must form a nonempty 1-d array")
        object.__setattr__(self, "p", int(p))
        object.__setattr__(self, "coeffs", arr % int(p))
        object.__setattr__(self, "degree", int(arr.size - 1))
        self.coeffs.setflags(write=False)

    def __setattr__(self, name, value):
        raise AttributeError("BinaryForm is immutable")

    @classmethod
    def zero(cls, degree: int, p: int) -> "BinaryForm":
        return cls(np.zeros(degree + 1, dtype=np.int64), p)

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def _check_pair(self, other: "BinaryForm") -> None:
        if not isinstance(other, BinaryForm):
            raise TypeError("expected a BinaryForm")
        if other.p != self.p:
            raise ModulusMismatchError(f"mixed moduli {self.p} and {other.p}")

    def __eq__(self, other):
        if not isinstance(other, BinaryForm):
            return NotImplemented
        return self.p == other.p and self.degree == other.degree \
            and bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.p, self.coeffs.tobytes()))

    def __add__(self, other):
        self._check_pair(other)
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degree")
        return BinaryForm((self.coeffs + other.coeffs) % self.p, self.p)

    def __sub__(self, other):
        self._check_pair(other)
        if other.degree != self.degree:
            raise ValueError("cannot subtract forms of different degree")
        return BinaryForm((self.coeffs - other.coeffs) % self.p, self.p)

    def __mul__(self, other):
        self._check_pair(other)
        return BinaryForm(np.convolve(self.coeffs, other.coeffs) % self.p, self.p)

    def scale(self, c: int) -> "BinaryForm":
        return BinaryForm(self.coeffs * (int(c) % self.p) % self.p, self.p)

    def evaluate(self, s: int, t: int) -> Fp:
        p = self.p
        s %= p
        t %= p
        acc = 0
        for k in range(self.degree + 1):
            acc = (acc + self.coeffs[k] * pow(s, self.degree - k, p) * pow(t, k, p)) % p
        return Fp(acc, p)

    def eval_affine(self, t: int) -> int:
        """Value at (s, t) = (1, t), by Horner."""
        p = self.p
        t %= p
        acc = 0
        for c in self.coeffs[::-1]:
            acc = (acc * t + c) % p
        return int(acc)

    def eval_affine_deriv(self, t: int) -> int:
        """d/dt at (1, t)."""
        p = self.p
        t %= p
        acc = 0
        for k in range(self.degree, 0, -1):
            acc = (acc * t + k * self.coeffs[k]) % p
        return int(acc)

    def reparametrize(self, gamma) -> "BinaryForm":
        """Substitute (s, t) -> (a s + b t, c s + d t) for gamma = [[a, b], [c, d]]."""
        g = np.asarray(gamma, dtype=np.int64) % self.p
        if g.shape != (2, 2):
            raise ValueError("reparametrization must be a 2x2 matrix")
        row_s = g[0]
        row_t = g[1]
        p = self.p
        out = np.zeros(self.degree + 1, dtype=np.int64)
        pow_s = np.array([1], dtype=np.int64)
        pows_s = [pow_s]
        for _ in range(self.degree):
            pow_s = np.convolve(pow_s, row_s) % p
            pows_s.append(pow_s)
        pow_t = np.array([1], dtype=np.int64)
        pows_t = [pow_t]
        for _ in range(self.degree):
            pow_t = np.convolve(pow_t, row_t) % p
            pows_t.append(pow_t)
        for k in range(self.degree + 1):
            if self.coeffs[k] == 0:
                continue
            term = np.convolve(pows_s[self.degree - k], pows_t[k]) % p
            out = (out + self.coeffs[k] * term) % p
        return BinaryForm(out, p)

    def __repr__(self):
        return f"BinaryForm(deg={self.degree}, mod {self.p})"


class MultiPoly:
    """Sparse homogeneous polynomial in n_vars variables over F_p."""

    __slots__ = ("n_vars", "degree", "p", "terms")

    def __init__(self, n_vars: int, degree: int, p: int, terms):
        _check_modulus(p)
        if n_vars < 1:
            raise ValueError("need at least one variable")
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        p = int(p)
        clean: dict[tuple[int, ...], int] = {}
        for exps, c in dict(terms).items():
            exps = tuple(int(m) for m in exps)
            if len(exps) != n_vars:
                raise ValueError(f"exponent tuple {exps} has wrong length")
            if any(m < 0 for m in exps):
                raise ValueError(f"negative exponent in {exps}")
            if sum(exps) != degree:
                raise ValueError(f"term {exps} breaks homogeneity of degree {degree}")
            c = int(c) % p
            if c:
                clean[exps] = c
        object.__setattr__(self, "n_vars", int(n_vars))
        object.__setattr__(self, "degree", int(degree))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    @classmethod
    def from_coeff_vector(cls, n_vars: int, degree: int, p: int, vec) -> "MultiPoly":
        monos = monomial_exponents(n_vars, degree)
        vec = np.asarray(vec, dtype=np.int64)
        if vec.shape != (len(monos),):
            raise ValueError(f"expected {len(monos)} coefficients, got {vec.shape}")
        return cls(n_vars, degree, p, dict(zip(monos, vec.tolist())))

    def coeff_vector(self) -> NDArray[np.int64]:
        """Dense coefficients in monomial_exponents order."""
        idx = monomial_index(self.n_vars, self.degree)
        out = np.zeros(len(idx), dtype=np.int64)
        for exps, c in self.terms.items():
            out[idx[exps]] = c
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def _check_pair(self, other: "MultiPoly") -> None:
        if not isinstance(other, MultiPoly):
            raise TypeError("expected a MultiPoly")
        if other.p != self.p:
            raise ModulusMismatchError(f"mixed moduli {self.p} and {other.p}")
        if other.n_vars != self.n_vars or other.degree != self.degree:
            raise ValueError("shape mismatch")

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (self.n_vars, self.degree, self.p) == (other.n_vars, other.degree, other.p) \
            and self.terms == other.terms

    def __hash__(self):
        return hash((self.n_vars, self.degree, self.p, frozenset(self.terms.items())))

    def __add__(self, other):
        self._check_pair(other)
        merged = dict(self.terms)
        for exps, c in other.terms.items():
            merged[exps] = (merged.get(exps, 0) + c) % self.p
        return MultiPoly(self.n_vars, self.degree, self.p, merged)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c: int) -> "MultiPoly":
        c = int(c) % self.p
        return MultiPoly(self.n_vars, self.degree, self.p,
                         {e: v * c % self.p for e, v in self.terms.items()})

    def partial(self, i: int) -> "MultiPoly":
        """Partial derivative with respect to variable i (degree drops by 1)."""
        if not 0 <= i < self.n_vars:
            raise ValueError(f"variable index {i} out of range")
        if self.degree == 0:
            raise ValueError("cannot differentiate a constant to a homogeneous form")
        out: dict[tuple[int, ...], int] = {}
        for exps, c in self.terms.items():
            if exps[i] == 0:
                continue
            lowered = list(exps)
            lowered[i] -= 1
            out[tuple(lowered)] = exps[i] * c % self.p
        return MultiPoly(self.n_vars, self.degree - 1, self.p, out)

    def evaluate(self, point) -> Fp:
        pt = [int(x) % self.p for x in point]
        if len(pt) != self.n_vars:
            raise ValueError(f"point has {len(pt)} coordinates, need {self.n_vars}")
        acc = 0
        for exps, c in self.terms.items():
            v = c
            for x, m in zip(pt, exps):
                if m:
                    v = v * pow(x, m, self.p) % self.p
            acc = (acc + v) % self.p
        return Fp(acc, self.p)

    def compose(self, f: "MapParam") -> BinaryForm:
        """The pullback F(f_0(s,t), ..., f_n(s,t)), a form of degree d*e."""
        if f.p != self.p:
            raise ModulusMismatchError(f"mixed moduli {self.p} and {f.p}")
        if f.n + 1 != self.n_vars:
            raise ValueError(f"map targets P^{f.n}, polynomial has {self.n_vars} variables")
        p = self.p
        cache = _RowPowerCache(f)
        out = np.zeros(self.degree * f.e + 1, dtype=np.int64)
        for exps, c in self.terms.items():
            term = np.array([c], dtype=np.int64)
            for i, m in enumerate(exps):
                if m:
                    term = np.convolve(term, cache.power(i, m)) % p
            out = (out + term) % p
        return BinaryForm(out, p)

    def compose_linear(self, matrix) -> "MultiPoly":
        """Substitute x_i -> sum_j matrix[i, j] x_j (same degree, same variables)."""
        a = np.asarray(matrix, dtype=np.int64) % self.p
        if a.shape != (self.n_vars, self.n_vars):
            raise ValueError(f"matrix shape {a.shape} does not match {self.n_vars} variables")
        p = self.p
        # linear form for each variable, as sparse dicts
        unit = tuple([0] * self.n_vars)
        lin = []
        for i in range(self.n_vars):
            d: dict[tuple[int, ...], int] = {}
            for j in range(self.n_vars):
                if a[i, j]:
                    e = list(unit)
                    e[j] = 1
                    d[tuple(e)] = int(a[i, j])
            lin.append(d)
        total: dict[tuple[int, ...], int] = {}
        for exps, c in self.terms.items():
            prod = {unit: c}
            for i, m in enumerate(exps):
                for _ in range(m):
                    prod = _mul_sparse(prod, lin[i], p)
            for e, v in prod.items():
                total[e] = (total.get(e, 0) + v) % p
        return MultiPoly(self.n_vars, self.degree, self.p, total)

    def __repr__(self):
        return f"MultiPoly(n_vars={self.n_vars}, deg={self.degree}, " \
               f"{len(self.terms)} terms, mod {self.p})"


def _mul_sparse(a: dict, b: dict, p: int) -> dict:
    out: dict[tuple[int, ...], int] = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = (out.get(e, 0) + c1 * c2) % p
    return {e: c for e, c in out.items() if c}


class MapParam:
    """A parametrized degree-e map P^1 -> P^n over F_p.

    coeffs[i, j] is the coefficient of s^(e-j) t^j in the i-th coordinate.
    At least one entry must be nonzero; degeneracy (a common factor among
    the coordinates, i.e. a lower-degree map in disguise or a map through a
    smaller space) is detectable but not forbidden at construction.
    """

    __slots__ = ("coeffs", "n", "e", "p")

    def __init__(self, coeffs, p: int):
        _check_modulus(p)
        arr = np.asarray(coeffs, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] < 2 or arr.shape[1] < 2:
            raise ValueError("map coefficients must be (n+1) x (e+1) with n, e >= 1")
        arr = arr % int(p)
        if not arr.any():
            raise ValueError("the zero array parametrizes no map")
        object.__setattr__(self, "p", int(p))
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "n", int(arr.shape[0] - 1))
        object.__setattr__(self, "e", int(arr.shape[1] - 1))
        self.coeffs.setflags(write=False)

    def __setattr__(self, name, value):
        raise AttributeError("MapParam is immutable")

    def __eq__(self, other):
        if not isinstance(other, MapParam):
            return NotImplemented
        return self.p == other.p and self.coeffs.shape == other.coeffs.shape \
            and bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.p, self.coeffs.tobytes(), self.coeffs.shape))

    def row_form(self, i: int) -> BinaryForm:
        return BinaryForm(self.coeffs[i], self.p)

    def forms(self) -> list[BinaryForm]:
        return [self.row_form(i) for i in range(self.n + 1)]

    def evaluate_at(self, t: int) -> NDArray[np.int64]:
        """The point f(1, t) as a coordinate vector."""
        p = self.p
        t = int(t) % p
        tp = np.ones(self.e + 1, dtype=np.int64)
        for j in range(1, self.e + 1):
            tp[j] = tp[j - 1] * t % p
        return self.coeffs @ tp % p

    def derivative_at(self, t: int) -> NDArray[np.int64]:
        """d/dt of the affine parametrization at t, one value per coordinate."""
        p = self.p
        t = int(t) % p
        out = np.zeros(self.n + 1, dtype=np.int64)
        for i in range(self.n + 1):
            acc = 0
            for j in range(self.e, 0, -1):
                acc = (acc * t + j * self.coeffs[i, j]) % p
            out[i] = acc
        return out

    def gcd_degree(self) -> int:
        """Degree of the common divisor of the coordinate forms.

        Split off powers of s and t (read from leading/trailing zeros), then
        run Euclid on the deflated affine parts.  Zero rows divide anything
        and are skipped.
        """
        p = self.p
        s_vals = []
        t_vals = []
        deflated = []
        for i in range(self.n + 1):
            row = self.coeffs[i]
            nz = np.nonzero(row)[0]
            if nz.size == 0:
                continue
            lo, hi = int(nz[0]), int(nz[-1])
            t_vals.append(lo)
            s_vals.append(self.e - hi)
            deflated.append([int(c) for c in row[lo:hi + 1]])
        g = deflated[0]
        for other in deflated[1:]:
            g = _affine_gcd(g, other, p)
            if len(g) == 1:
                break
        return min(s_vals) + min(t_vals) + len(g) - 1

    def is_degenerate(self) -> bool:
        return self.gcd_degree() > 0

    def reparametrize(self, gamma) -> "MapParam":
        """Precompose with the projective change of parameter gamma (2x2)."""
        rows = [self.row_form(i).reparametrize(gamma).coeffs for i in range(self.n + 1)]
        return MapParam(np.stack(rows), self.p)

    def scale(self, c: int) -> "MapParam":
        c = int(c) % self.p
        if c == 0:
            raise ValueError("scaling a map by zero")
        return MapParam(self.coeffs * c % self.p, self.p)

    def transform(self, matrix) -> "MapParam":
        """Postcompose with the ambient linear map given by matrix ((n+1) x (n+1))."""
        a = np.asarray(matrix, dtype=np.int64) % self.p
        if a.shape != (self.n + 1, self.n + 1):
            raise ValueError(f"matrix shape {a.shape} does not fit P^{self.n}")
        return MapParam(a @ self.coeffs % self.p, self.p)

    def __repr__(self):
        return f"MapParam(n={self.n}, e={self.e}, mod {self.p})"


class _RowPowerCache:
    """Convolution powers of the coordinate forms of one map, built lazily."""

    def __init__(self, f: MapParam):
        self.f = f
        self.p = f.p
        self._pows: dict[int, list[NDArray[np.int64]]] = {}

    def power(self, i: int, m: int) -> NDArray[np.int64]:
        pows = self._pows.setdefault(i, [np.array([1], dtype=np.int64)])
        while len(pows) <= m:
            pows.append(np.convolve(pows[-1], self.f.coeffs[i]) % self.p)
        return pows[m]


def monomial_composition_table(f: MapParam, degree: int) -> dict[tuple[int, ...], NDArray[np.int64]]:
    """Compose every degree-`degree` monomial with f.

    Returns {exponent tuple: coefficient array of the composed form}, arrays
    of length degree*e + 1.  One shared power cache serves all monomials,
    which is what makes whole-matrix builds cheap.
    """
    cache = _RowPowerCache(f)
    p = f.p
    out = {}
    for exps in monomial_exponents(f.n + 1, degree):
        term = np.array([1], dtype=np.int64)
        for i, m in enumerate(exps):
            if m:
                term = np.convolve(term, cache.power(i, m)) % p
        out[exps] = term
    return out


def random_homogeneous(n_vars: int, degree: int, p: int, rng) -> MultiPoly:
    """Uniform random homogeneous polynomial (coefficients drawn in canonical
    monomial order, so a given generator state fixes the result)."""
    rng = np.random.default_rng(rng)
    monos = monomial_exponents(n_vars, degree)
    vec = rng.integers(0, p, size=len(monos), dtype=np.int64)
    return MultiPoly(n_vars, degree, p, dict(zip(monos, vec.tolist())))


def random_map(n: int, e: int, p: int, rng, max_tries: int = 64) -> MapParam:
    """Uniform random nondegenerate degree-e map, by rejection."""
    rng = np.random.default_rng(rng)
    for _ in range(max_tries):
        arr = rng.integers(0, p, size=(n + 1, e + 1), dtype=np.int64)
        if not arr.any():
            continue
        f = MapParam(arr, p)
        if not f.is_degenerate():
            return f
    raise DegenerateMapError(
        f"no nondegenerate map found in {max_tries} draws (n={n}, e={e}, p={p})")

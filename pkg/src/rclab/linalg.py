"""Exact linear algebra over prime fields.

Everything here is integer arithmetic: matrices are int64 arrays with entries
reduced into [0, p), and every operation reduces mod p before values can
approach the int64 overflow line.  With p <= MAX_MODULUS a dot product of
length up to 4096 stays below 2^63, which covers every matrix this package
builds.
"""
from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from rclab import _kernels

# Largest allowed modulus.  (MAX_MODULUS - 1)^2 * 4096 < 2^63, so convolutions
# and matrix products over int64 are exact for every supported shape.
MAX_MODULUS = 1 << 25

DEFAULT_PRIME = 10007

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class ModulusMismatchError(ValueError):
    """Raised when operands live over different primes."""


class EmptyKernelError(ValueError):
    """Raised when a kernel point is requested from an injective matrix."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond MAX_MODULUS."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime_above(n: int) -> int:
    """Smallest prime strictly greater than n."""
    k = n + 1
    if k <= 2:
        return 2
    if k % 2 == 0:
        k += 1
    while not is_prime(k):
        k += 2
    return k


def _check_modulus(p: int) -> None:
    if not isinstance(p, (int, np.integer)):
        raise TypeError(f"modulus must be an integer, got {type(p).__name__}")
    if not is_prime(int(p)):
        raise ValueError(f"modulus {p} is not prime")
    if p > MAX_MODULUS:
        raise ValueError(f"modulus {p} exceeds MAX_MODULUS={MAX_MODULUS}")


class Fp:
    """An element of F_p.  Immutable; arithmetic checks the modulus."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        _check_modulus(p)
        object.__setattr__(self, "p", int(p))
        object.__setattr__(self, "value", int(value) % int(p))

    def __setattr__(self, name, value):
        raise AttributeError("Fp is immutable")

    def _coerce(self, other) -> "Fp":
        if isinstance(other, Fp):
            if other.p != self.p:
                raise ModulusMismatchError(f"mixed moduli {self.p} and {other.p}")
            return other
        if isinstance(other, (int, np.integer)):
            return Fp(int(other), self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.value + o.value, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.value - o.value, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(o.value - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.value * o.value, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Fp(-self.value, self.p)

    def inverse(self) -> "Fp":
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse mod {self.p}")
        return Fp(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return Fp(pow(self.value, k, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, Fp):
            return self.p == other.p and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"Fp({self.value}, {self.p})"


def _as_mod_array(data, p: int) -> NDArray[np.int64]:
    a = np.asarray(data, dtype=np.int64)
    if a.ndim != 2:
        raise ValueError(f"matrix data must be 2-dimensional, got shape {a.shape}")
    if a.size == 0:
        raise ValueError("matrix must have at least one row and one column")
    return a % p


class ModMatrix:
    """A dense matrix over F_p backed by an int64 array."""

    __slots__ = ("array", "p")

    def __init__(self, data, p: int):
        _check_modulus(p)
        object.__setattr__(self, "p", int(p))
        object.__setattr__(self, "array", _as_mod_array(data, int(p)))
        self.array.setflags(write=False)

    def __setattr__(self, name, value):
        raise AttributeError("ModMatrix is immutable")

    @property
    def shape(self) -> tuple[int, int]:
        return self.array.shape

    def _check_pair(self, other: "ModMatrix") -> None:
        if not isinstance(other, ModMatrix):
            raise TypeError("expected a ModMatrix")
        if other.p != self.p:
            raise ModulusMismatchError(f"mixed moduli {self.p} and {other.p}")

    def __eq__(self, other):
        if not isinstance(other, ModMatrix):
            return NotImplemented
        return self.p == other.p and self.array.shape == other.array.shape \
            and bool(np.array_equal(self.array, other.array))

    def __hash__(self):
        return hash((self.p, self.array.tobytes(), self.array.shape))

    def __add__(self, other):
        self._check_pair(other)
        return ModMatrix((self.array + other.array) % self.p, self.p)

    def __sub__(self, other):
        self._check_pair(other)
        return ModMatrix((self.array - other.array) % self.p, self.p)

    def __matmul__(self, other):
        self._check_pair(other)
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return ModMatrix(self.array @ other.array % self.p, self.p)

    def scale(self, c: int) -> "ModMatrix":
        return ModMatrix(self.array * (int(c) % self.p) % self.p, self.p)

    def transpose(self) -> "ModMatrix":
        return ModMatrix(self.array.T, self.p)

    @property
    def T(self) -> "ModMatrix":
        return self.transpose()

    def matvec(self, v) -> NDArray[np.int64]:
        v = np.asarray(v, dtype=np.int64) % self.p
        if v.shape != (self.shape[1],):
            raise ValueError(f"vector length {v.shape} does not match {self.shape}")
        return self.array @ v % self.p

    def rref(self) -> tuple[int, list[int], NDArray[np.int64]]:
        """Reduced row echelon form.  Returns (rank, pivot columns, matrix)."""
        work = self.array.copy()
        rank, pivots = _kernels.rref_mod(work, self.p)
        return rank, pivots, work

    def rank(self) -> int:
        work = self.array.copy()
        rank, _ = _kernels.rref_mod(work, self.p)
        return rank

    def kernel_basis(self) -> list[NDArray[np.int64]]:
        """A basis of the right kernel, one vector per free column.

        Vector j has a 1 in its free column, 0 in the other free columns, and
        back-substituted values in the pivot columns, so linear independence
        is visible by inspection.
        """
        rank, pivots, red = self.rref()
        cols = self.shape[1]
        pivot_set = set(pivots)
        free = [c for c in range(cols) if c not in pivot_set]
        basis = []
        for fc in free:
            v = np.zeros(cols, dtype=np.int64)
            v[fc] = 1
            if pivots:
                v[pivots] = (-red[:rank, fc]) % self.p
            basis.append(v)
        return basis

    def random_kernel_point(self, rng) -> NDArray[np.int64]:
        """A nonzero kernel vector with uniform random free-column values.

        Equivalent to a uniform random combination of the kernel basis; redraws
        if the zero vector comes up (only likely for tiny p).
        """
        rank, pivots, red = self.rref()
        cols = self.shape[1]
        pivot_set = set(pivots)
        free = [c for c in range(cols) if c not in pivot_set]
        if not free:
            raise EmptyKernelError("matrix has trivial kernel")
        rng = np.random.default_rng(rng)
        reduced_free = red[:rank][:, free] if rank else None
        for _ in range(16):
            u = rng.integers(0, self.p, size=len(free), dtype=np.int64)
            if not u.any():
                continue
            v = np.zeros(cols, dtype=np.int64)
            v[free] = u
            if rank:
                v[pivots] = (-(reduced_free @ u)) % self.p
            return v
        raise EmptyKernelError("failed to draw a nonzero kernel vector")

    def __repr__(self):
        r, c = self.shape
        return f"ModMatrix({r}x{c} mod {self.p})"


def identity(n: int, p: int) -> ModMatrix:
    return ModMatrix(np.eye(n, dtype=np.int64), p)


def random_invertible(n: int, p: int, rng) -> ModMatrix:
    """Uniformish invertible n x n matrix: rejection sample on full rank."""
    rng = np.random.default_rng(rng)
    for _ in range(64):
        m = ModMatrix(rng.integers(0, p, size=(n, n), dtype=np.int64), p)
        if m.rank() == n:
            return m
    raise RuntimeError(f"could not sample an invertible {n}x{n} matrix mod {p}")

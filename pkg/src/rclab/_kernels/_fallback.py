"""Pure numpy kernels.  Semantics must match _speedups exactly."""
from __future__ import annotations

import numpy as np

_BLOCK = 1 << 16


def rref_mod(a: np.ndarray, p: int) -> tuple[int, list[int]]:
    """Reduce `a` (int64, entries in [0, p)) to RREF in place.

    Pivot rule: first nonzero entry in the column, scanning down.  Returns
    (rank, pivot column list).  Entries stay below p^2 + p before each
    reduction, which is int64-safe for p <= 2^25.
    """
    rows, cols = a.shape
    r = 0
    pivots: list[int] = []
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = a[r] * inv % p
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        if others.size:
            a[others] = (a[others] - np.outer(a[others, c], a[r])) % p
        pivots.append(c)
        r += 1
    return r, pivots


def count_vanishing(
    coeffs: np.ndarray,
    var_idx: np.ndarray,
    offsets: np.ndarray,
    n_vars: int,
    q: int,
    start: int,
    stop: int,
) -> int:
    """Count candidates c in [start, stop) whose parameter vector kills
    every composed coefficient.

    Candidate c encodes a vector in F_q^n_vars in base q, least significant
    digit = variable 0.  Composed coefficient k is the sum of the terms in
    rows offsets[k]:offsets[k+1]; each term is coeffs[t] times the product
    of the variables listed in var_idx[t].  Candidates are discarded at the
    first nonzero coefficient.

    Works in blocks: decode a block of candidates into a (n_vars, block)
    value table, then narrow an alive-index array coefficient by
    coefficient.
    """
    n_coefs = len(offsets) - 1
    total = 0
    pos = start
    while pos < stop:
        block = min(_BLOCK, stop - pos)
        c = pos + np.arange(block, dtype=np.int64)
        vals = np.empty((n_vars, block), dtype=np.int64)
        for m in range(n_vars):
            vals[m] = c % q
            c //= q
        alive = np.arange(block, dtype=np.int64)
        for k in range(n_coefs):
            if alive.size == 0:
                break
            acc = np.zeros(alive.size, dtype=np.int64)
            for t in range(int(offsets[k]), int(offsets[k + 1])):
                prod = np.full(alive.size, int(coeffs[t]), dtype=np.int64)
                for u in var_idx[t]:
                    prod = prod * vals[u, alive] % q
                acc = (acc + prod) % q
            alive = alive[acc == 0]
        total += int(alive.size)
        pos += block
    return total

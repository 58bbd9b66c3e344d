"""Linear algebra over prime fields F_q.

Matrices are plain ``numpy.int64`` arrays with entries in ``[0, q)``; the
modulus travels as an explicit argument. Only primes below 2**31 are
supported, so that a product of two reduced entries fits in an int64.
"""

from __future__ import annotations

import numpy as np
import sympy

from .errors import BadParams, FieldTooSmall, Inconsistent, RankDeficient

MAX_Q = 2**31
_FLOAT_EXACT = 2**53


def check_prime(q: int) -> int:
    q = int(q)
    if q >= MAX_Q or not sympy.isprime(q):
        raise BadParams(f"field size must be a prime below 2**31, got {q}")
    return q


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    n = int(n)
    if n <= 2:
        return 2
    return int(sympy.nextprime(n - 1))


def asfield(a, q: int) -> np.ndarray:
    return np.mod(np.asarray(a, dtype=np.int64), q)


def inv_scalar(a: int, q: int) -> int:
    a = int(a) % q
    if a == 0:
        raise ZeroDivisionError("0 has no inverse")
    return pow(a, q - 2, q)


def matmul(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """(a @ b) mod q, exact.

    Goes through float64 BLAS when every partial sum stays below 2**53, and
    otherwise splits the inner dimension into int64-safe chunks.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1]
    if inner == 0:
        return np.zeros(a.shape[:-1] + b.shape[-1:], dtype=np.int64)
    bound = (q - 1) ** 2
    if inner * bound < _FLOAT_EXACT:
        out = a.astype(np.float64) @ b.astype(np.float64)
        return np.mod(out.astype(np.int64), q)
    step = max(1, (2**62) // max(bound, 1))
    out = np.zeros(a.shape[:-1] + b.shape[-1:], dtype=np.int64)
    for lo in range(0, inner, step):
        hi = min(inner, lo + step)
        out = np.mod(out + np.mod(a[..., lo:hi] @ b[lo:hi], q), q)
    return out


_PANEL = 32


def _echelon(a, q: int, ncols: int | None = None):
    """Row echelon form by Gaussian elimination, pivots in the first ``ncols`` columns.

    Works panel by panel: pivots inside a narrow panel are found with vector
    ops, and the deferred update of the trailing columns is one matrix
    product. Pivot rows are not normalized.
    """
    m = asfield(a, q).copy()
    rows, cols = m.shape
    ncols = cols if ncols is None else ncols
    blocked = _PANEL * (q - 1) ** 2 < _FLOAT_EXACT
    pivots = []
    r = 0
    c0 = 0
    while c0 < ncols and r < rows:
        c1 = min(ncols, c0 + _PANEL) if blocked else ncols
        pend = c1 if blocked else cols
        r0 = r
        mult = np.zeros((rows - r0, c1 - c0), dtype=np.int64)
        k = 0
        for c in range(c0, c1):
            if r == rows:
                break
            nz = np.flatnonzero(m[r:, c])
            if nz.size == 0:
                continue
            p = r + int(nz[0])
            if p != r:
                m[[r, p]] = m[[p, r]]
                mult[[r - r0, p - r0]] = mult[[p - r0, r - r0]]
            f = (m[r + 1 :, c] * inv_scalar(m[r, c], q)) % q
            if f.size:
                sub = m[r + 1 :, c:pend]
                sub -= np.outer(f, m[r, c:pend])
                np.mod(sub, q, out=sub)
                mult[r + 1 - r0 :, k] = f
            pivots.append(c)
            r += 1
            k += 1
        if blocked and k and c1 < cols:
            lm = mult[:, :k]
            top = m[r0 : r0 + k, c1:]
            for j in range(1, k):
                top[j] = (top[j] - matmul(lm[j, :j], top[:j], q)) % q
            if r0 + k < rows:
                tail = m[r0 + k :, c1:]
                tail -= matmul(lm[k:], top, q)
                np.mod(tail, q, out=tail)
        c0 = c1
    return m, pivots


def rank(m, q: int) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(_echelon(m, q)[1])


def solve_linear(a, b, q: int) -> np.ndarray:
    """The unique x with a @ x = b over F_q.

    Raises RankDeficient if ``a`` lacks full column rank and Inconsistent if
    ``b`` is outside its column space.
    """
    a = asfield(a, q)
    b = asfield(b, q)
    vec = b.ndim == 1
    if vec:
        b = b[:, None]
    if a.shape[0] != b.shape[0]:
        raise BadParams(f"row mismatch: a has {a.shape[0]}, b has {b.shape[0]}")
    n = a.shape[1]
    red, pivots = _echelon(np.hstack([a, b]), q, ncols=n)
    if len(pivots) < n:
        raise RankDeficient(f"coefficient matrix has rank {len(pivots)} < {n}")
    if np.any(red[n:, n:]):
        raise Inconsistent("right-hand side is not in the column space")
    u = red[:n, :n]
    x = red[:n, n:].copy()
    for j in range(n - 1, -1, -1):
        if j + 1 < n:
            x[j] = (x[j] - matmul(u[j, j + 1 :], x[j + 1 :], q)) % q
        x[j] = (x[j] * inv_scalar(u[j, j], q)) % q
    return x[:, 0] if vec else x


def inv(a, q: int) -> np.ndarray:
    a = asfield(a, q)
    if a.shape[0] != a.shape[1]:
        raise BadParams("only square matrices have inverses")
    return solve_linear(a, np.eye(a.shape[0], dtype=np.int64), q)


def random_full_rank(n: int, q: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform sample from GL(n, q) by rejection."""
    if n < 1:
        raise BadParams(f"n must be >= 1, got {n}")
    while True:
        m = rng.integers(0, q, size=(n, n), dtype=np.int64)
        if rank(m, q) == n:
            return m


def batch_invertible(ms: np.ndarray, q: int) -> np.ndarray:
    """Boolean mask: which of the stacked square matrices are invertible mod q."""
    m = asfield(ms, q).copy()
    count, n, _ = m.shape
    ok = np.ones(count, dtype=bool)
    idx = np.arange(count)
    inv_table = np.zeros(q, dtype=np.int64)
    if q <= 4096:
        inv_table[1:] = [pow(v, q - 2, q) for v in range(1, q)]
    for c in range(n):
        nz = m[:, c:, c] != 0
        has = nz.any(axis=1)
        ok &= has
        p = c + np.argmax(nz, axis=1)
        rows_p = m[idx, p].copy()
        m[idx, p] = m[idx, c]
        m[idx, c] = rows_p
        piv = m[:, c, c]
        if q <= 4096:
            pinv = inv_table[piv]
        else:
            pinv = np.array([pow(int(v), q - 2, q) if v else 0 for v in piv], dtype=np.int64)
        m[:, c] = (m[:, c] * pinv[:, None]) % q
        f = m[:, c + 1 :, c]
        m[:, c + 1 :] = (m[:, c + 1 :] - f[:, :, None] * m[:, c : c + 1, :]) % q
    return ok


def random_full_rank_batch(count: int, n: int, q: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent uniform samples from GL(n, q), stacked."""
    out = np.empty((count, n, n), dtype=np.int64)
    filled = 0
    while filled < count:
        need = count - filled
        draw = rng.integers(0, q, size=(need + need // 2 + 8, n, n), dtype=np.int64)
        good = draw[batch_invertible(draw, q)][:need]
        out[filled : filled + len(good)] = good
        filled += len(good)
    return out


def vandermonde_mds(code_len: int, dim: int, q: int) -> np.ndarray:
    """``code_len x dim`` Vandermonde matrix at points 0..code_len-1.

    Any ``dim`` rows form an invertible matrix when the points are distinct,
    which needs q >= code_len.
    """
    if dim > code_len or dim < 0:
        raise BadParams(f"need 0 <= dim <= code_len, got dim={dim}, code_len={code_len}")
    if q < code_len:
        raise FieldTooSmall(f"q={q} has fewer than {code_len} distinct evaluation points")
    pts = np.arange(code_len, dtype=np.int64) % q
    out = np.ones((code_len, dim), dtype=np.int64)
    for j in range(1, dim):
        out[:, j] = (out[:, j - 1] * pts) % q
    return out

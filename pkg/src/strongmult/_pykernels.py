"""numpy implementations of the compiled kernels, used when the extension is absent."""

import numpy as np


def mul_sparse_mod(acc, offsets, coeffs, modulus, out):
    n = out.shape[0]
    total = np.zeros(n, dtype=np.int64)
    for e, c in zip(offsets.tolist(), coeffs.tolist()):
        if e >= n:
            break
        total[e:] += c * acc[: n - e]
    out[:] = np.mod(total, modulus)


def cubic_character_sums(primes, c3, c2, c1, c0, out):
    for j, p in enumerate(primes.tolist()):
        x = np.arange(p, dtype=np.int64)
        square = np.zeros(p, dtype=bool)
        y = x[1 : (p - 1) // 2 + 1]
        square[(y * y) % p] = True
        v = (c3 % p * x + c2 % p) % p
        v = (v * x + c1 % p) % p
        v = (v * x + c0 % p) % p
        nonzero = v != 0
        residues = np.count_nonzero(square[v[nonzero]])
        out[j] = 2 * residues - np.count_nonzero(nonzero)

"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--bound 100000] [--series 100000] [--repeat 3] [--json]

Both backends are run on identical inputs; the script fails if their
outputs differ.  Times are the best of ``--repeat`` runs.
"""

import argparse
import json
import math
import sys
import time

import numpy as np

from strongmult import kernels
from strongmult.forms import E11_CUBIC, prime_array

MODULUS = 2_147_483_629  # a prime just below 2**31


def jacobi_terms(n):
    """Offsets and coefficients of prod (1 - q^m)^3 up to q^(n-1)."""
    offsets, coeffs, k = [], [], 0
    while k * (k + 1) // 2 < n:
        offsets.append(k * (k + 1) // 2)
        coeffs.append((-1) ** k * (2 * k + 1))
        k += 1
    return np.array(offsets), np.array(coeffs)


def best_of(fn, repeat):
    best, result = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bound", type=int, default=100_000, help="largest prime for the character sums")
    ap.add_argument("--series", type=int, default=100_000, help="series length for the sparse product")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    primes = prime_array(args.bound)[1:]
    offsets, coeffs = jacobi_terms(args.series)
    acc = np.random.default_rng(0).integers(0, MODULUS, args.series)

    cases = {
        "cubic_character_sums": lambda impl: kernels.cubic_character_sums(primes, E11_CUBIC, impl=impl),
        # eight products make up one Delta series evaluation
        "mul_sparse_mod_x8": lambda impl: _eight_products(acc, offsets, coeffs, impl),
    }
    rows, outputs = [], {}
    for case, fn in cases.items():
        for name, impl in sorted(backends.items()):
            seconds, out = best_of(lambda: fn(impl), args.repeat)
            outputs.setdefault(case, []).append(out)
            rows.append({"kernel": case, "backend": name, "seconds": seconds})
    for case, outs in outputs.items():
        if any(not np.array_equal(outs[0], o) for o in outs[1:]):
            print(f"backends disagree on {case}", file=sys.stderr)
            return 1

    if args.json:
        print(json.dumps({"bound": args.bound, "series": args.series, "rows": rows}, indent=2))
        return 0
    print(f"primes <= {args.bound}: {primes.size}; series length {args.series}")
    print(f"{'kernel':24s} {'backend':10s} {'seconds':>9s} {'speedup':>8s}")
    for case in cases:
        mine = [r for r in rows if r["kernel"] == case]
        base = next((r["seconds"] for r in mine if r["backend"] == "python"), None)
        for r in mine:
            speed = f"{base / r['seconds']:7.1f}x" if base else ""
            print(f"{case:24s} {r['backend']:10s} {r['seconds']:9.3f} {speed:>8s}")
    return 0


def _eight_products(acc, offsets, coeffs, impl):
    out = acc
    for _ in range(8):
        out = kernels.mul_sparse_mod(out, offsets, coeffs, MODULUS, impl=impl)
    return out


if __name__ == "__main__":
    sys.exit(main())

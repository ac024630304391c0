"""Hot-loop dispatch.

The compiled extension ``strongmult._ckernels`` is preferred; the pure numpy
versions in ``strongmult._pykernels`` are used when it is missing or when the
environment variable ``STRONGMULT_PURE`` is set to a non-empty value other
than ``0``.  Both expose the same two functions and write into a caller-owned
``int64`` output array.
"""

import os

import numpy as np

from . import _pykernels

if os.environ.get("STRONGMULT_PURE", "0") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _pykernels
        BACKEND = "python"


def available_backends():
    """Map backend name to module for every backend importable here."""
    backends = {"python": _pykernels}
    try:
        from . import _ckernels

        backends["compiled"] = _ckernels
    except ImportError:  # pragma: no cover
        pass
    return backends


def thread_count():
    """Worker cap from ``STRONGMULT_THREADS`` (default: CPU count)."""
    raw = os.environ.get("STRONGMULT_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def mul_sparse_mod(acc, offsets, coeffs, modulus, impl=None):
    """Truncated product of a dense series by a sparse one, modulo ``modulus``.

    ``acc`` holds residues in ``[0, modulus)``; ``offsets`` is ascending and
    ``coeffs`` small enough that ``len(offsets) * max|c| * modulus < 2**62``.
    """
    impl = impl or _impl
    acc = np.ascontiguousarray(acc, dtype=np.int64)
    out = np.empty_like(acc)
    impl.mul_sparse_mod(
        acc,
        np.ascontiguousarray(offsets, dtype=np.int64),
        np.ascontiguousarray(coeffs, dtype=np.int64),
        int(modulus),
        out,
    )
    return out


def cubic_character_sums(primes, coeffs, impl=None):
    """Sum of Legendre symbols of a cubic over all residues, one value per odd prime.

    ``coeffs`` is ``(c3, c2, c1, c0)``.  Primes must be odd and below 2**31.
    """
    impl = impl or _impl
    primes = np.ascontiguousarray(primes, dtype=np.int64)
    out = np.zeros(primes.shape[0], dtype=np.int64)
    if primes.size:
        impl.cubic_character_sums(primes, *(int(c) for c in coeffs), out)
    return out

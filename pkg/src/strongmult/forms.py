"""Hecke eigenvalue sequences: built-in generators, twists, file exchange, angles.

Sequences hold the unnormalised integer eigenvalue ``a_p`` for every prime
``p <= bound`` that does not divide the level.  Ramified primes are absent,
never zero-filled.
"""

from __future__ import annotations

import math
import re
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import numpy as np

from . import kernels
from .errors import (
    DeligneBoundError,
    DuplicatePrimeError,
    GeneratorLimitError,
    InvariantError,
    MalformedHeaderError,
    MalformedRowError,
    MissingPrimeError,
    NonPrimeIndexError,
    OrderError,
    RamifiedPrimeError,
    RangeError,
    ValidationError,
)

DEFAULT_BOUND = 10**5
GENERATOR_LIMIT = 10**6
SOURCES = ("builtin-delta", "builtin-e11", "builtin-cm32", "file", "twist")

# y^2 + y = x^3 - x^2 - 10x - 20, after completing the square in y
E11_CUBIC = (4, -4, -40, -79)
E11_WEIERSTRASS = (0, -1, 1, -10, -20)  # a1, a2, a3, a4, a6


# ---------------------------------------------------------------- primes

def _small_sieve(limit):
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags)


def prime_array(bound, segment=1 << 16):
    """Primes in ``[2, bound]`` as an ascending int64 array (segmented sieve)."""
    if bound < 2:
        return np.zeros(0, dtype=np.int64)
    base = _small_sieve(math.isqrt(bound))
    chunks = []
    for low in range(2, bound + 1, segment):
        high = min(low + segment, bound + 1)
        flags = np.ones(high - low, dtype=bool)
        for p in base.tolist():
            if p * p >= high:
                break
            start = max(p * p, -(-low // p) * p)
            flags[start - low :: p] = False
        chunks.append(np.flatnonzero(flags) + low)
    return np.concatenate(chunks).astype(np.int64)


def sieve_primes(bound):
    """Ascending list of the primes ``<= bound``; empty when ``bound < 2``."""
    return prime_array(bound).tolist()


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n):
    """Deterministic Miller-Rabin, valid for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
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


def legendre(a, p):
    """Legendre symbol (a/p) for an odd prime p, by Euler's criterion."""
    t = pow(a % p, (p - 1) // 2, p)
    return -1 if t == p - 1 else t


def kronecker(d, p):
    """Kronecker symbol (d/p) for a prime p."""
    if p == 2:
        if d % 2 == 0:
            return 0
        return 1 if d % 8 in (1, 7) else -1
    return legendre(d, p)


def _squarefree(n):
    n = abs(n)
    f = 2
    while f * f <= n:
        if n % (f * f) == 0:
            return False
        f += 1
    return True


def is_fundamental_discriminant(d):
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class FormDescriptor:
    label: str
    weight: int
    level: int
    cm: bool = False
    source: str = field(default="file", compare=False)

    def __post_init__(self):
        if not self.label or any(c.isspace() for c in self.label):
            raise ValidationError(f"label must be a non-empty token, got {self.label!r}")
        if self.weight < 2 or self.weight % 2:
            raise ValidationError(f"weight must be a positive even integer, got {self.weight}")
        if self.level < 1:
            raise ValidationError(f"level must be >= 1, got {self.level}")
        if self.source not in SOURCES:
            raise ValidationError(f"unknown source {self.source!r}")


@dataclass(frozen=True)
class EigenSequence:
    """Exact eigenvalues ``a_p`` for every unramified prime ``p <= bound``."""

    descriptor: FormDescriptor
    bound: int
    primes: tuple
    coeffs: tuple

    def __post_init__(self):
        if len(self.primes) != len(self.coeffs):
            raise InvariantError("primes and coeffs differ in length")
        level = self.descriptor.level
        expected = [p for p in sieve_primes(self.bound) if level % p]
        if list(self.primes) != expected:
            raise InvariantError(
                f"{self.descriptor.label}: support is not the unramified primes <= {self.bound}"
            )
        for p, a in zip(self.primes, self.coeffs):
            if not deligne_ok(a, p, self.descriptor.weight):
                raise InvariantError(f"{self.descriptor.label}: Deligne bound fails at p={p}")

    @property
    def weight(self):
        return self.descriptor.weight

    @cached_property
    def entries(self):
        return dict(zip(self.primes, self.coeffs))

    @cached_property
    def prime_array(self):
        return np.asarray(self.primes, dtype=np.int64)

    def __getitem__(self, p):
        try:
            return self.entries[p]
        except KeyError:
            raise RangeError(f"{self.descriptor.label}: no eigenvalue at p={p}") from None

    def __contains__(self, p):
        return p in self.entries

    def __len__(self):
        return len(self.primes)

    def restrict(self, x):
        """The same form cut down to primes ``<= x``."""
        if x > self.bound:
            raise RangeError(f"cutoff {x} beyond sequence bound {self.bound}")
        n = int(np.searchsorted(self.prime_array, x, side="right"))
        return EigenSequence(self.descriptor, x, self.primes[:n], self.coeffs[:n])


def deligne_ok(a, p, k):
    return a * a <= 4 * p ** (k - 1)


@dataclass(frozen=True)
class AngleSequence:
    """Frobenius angles in ``[0, pi]`` with ``normalized = 2 cos(angles)``.

    ``primes``, ``angles`` and ``normalized`` are aligned float/int arrays.
    """

    descriptor: FormDescriptor
    bound: int
    primes: np.ndarray = field(compare=False)
    angles: np.ndarray = field(compare=False)
    normalized: np.ndarray = field(compare=False)

    def angle(self, p):
        i = int(np.searchsorted(self.primes, p))
        if i == len(self.primes) or self.primes[i] != p:
            raise RangeError(f"{self.descriptor.label}: no angle at p={p}")
        return float(self.angles[i])


def normalized_eigenvalue(a, p, k):
    """``a / p**((k-1)/2)`` in double precision, for even ``k``."""
    half = (k - 2) // 2
    return float(Fraction(a, p**half)) / math.sqrt(p)


def angles(seq):
    lam = np.array(
        [normalized_eigenvalue(a, p, seq.weight) for p, a in zip(seq.primes, seq.coeffs)],
        dtype=np.float64,
    )
    theta = np.arccos(np.clip(lam / 2.0, -1.0, 1.0))
    return AngleSequence(seq.descriptor, seq.bound, seq.prime_array.copy(), theta, lam)


# ---------------------------------------------------------------- generators

def _check_bound(bound, limit):
    if bound < 2:
        raise ValidationError(f"bound must be >= 2, got {bound}")
    if bound > limit:
        raise GeneratorLimitError(bound, limit)
    if bound > DEFAULT_BOUND:
        warnings.warn(
            f"generator bound {bound} exceeds {DEFAULT_BOUND}; expect long runtimes",
            RuntimeWarning,
            stacklevel=3,
        )


def _map(fn, items):
    workers = min(kernels.thread_count(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))


def _word_primes(count):
    """The ``count`` largest primes below 2**31 (all exceed 2**30)."""
    out = []
    n = (1 << 31) - 1
    while len(out) < count:
        if is_prime(n):
            out.append(n)
        n -= 2
    return out


def _moduli_for(bound_sq):
    """Fewest word primes whose product squared exceeds ``bound_sq``."""
    count = 1
    while True:
        moduli = _word_primes(count)
        if math.prod(moduli) ** 2 > bound_sq:
            return moduli
        count += 1


def _eta_cubed(n):
    # prod (1 - q^m)^3 = sum_k (-1)^k (2k+1) q^(k(k+1)/2)
    offsets, coeffs = [], []
    k = 0
    while k * (k + 1) // 2 < n:
        offsets.append(k * (k + 1) // 2)
        coeffs.append((-1) ** k * (2 * k + 1))
        k += 1
    return np.array(offsets, dtype=np.int64), np.array(coeffs, dtype=np.int64)


def _delta_residues(n, modulus):
    """tau(1..n) mod ``modulus``; index j holds tau(j+1)."""
    offsets, coeffs = _eta_cubed(n)
    acc = np.zeros(n, dtype=np.int64)
    acc[0] = 1
    for _ in range(8):
        acc = kernels.mul_sparse_mod(acc, offsets, coeffs, modulus)
    return acc


def _crt_signed(residue_rows, moduli):
    """Combine residues column-wise into centred integers."""
    big = math.prod(moduli)
    weights = []
    for m in moduli:
        rest = big // m
        weights.append(rest * pow(rest, -1, m))
    half = big // 2
    out = []
    for column in zip(*residue_rows):
        v = sum(w * r for w, r in zip(weights, column)) % big
        out.append(v - big if v > half else v)
    return out


def _tau_at(indices, n, bound_sq):
    moduli = _moduli_for(bound_sq)
    rows = _map(lambda m: _delta_residues(n, m), moduli)
    idx = np.asarray(indices, dtype=np.int64) - 1
    return _crt_signed([r[idx].tolist() for r in rows], moduli)


def tau_coefficients(n):
    """Exact ``tau(1), ..., tau(n)``.

    Uses ``|tau(m)| <= d(m) m^(11/2) <= m^(13/2)`` to size the CRT modulus.
    """
    if n < 1:
        return []
    return _tau_at(range(1, n + 1), n, (2 * n**7) ** 2)


def tau_sequence(bound=DEFAULT_BOUND, limit=GENERATOR_LIMIT):
    """Ramanujan tau at primes: the weight 12 level 1 cusp form Delta."""
    _check_bound(bound, limit)
    primes = sieve_primes(bound)
    # modulus > 8 X^(11/2)  <=>  modulus^2 > 64 X^11
    coeffs = _tau_at(primes, bound, 64 * bound**11)
    desc = FormDescriptor("delta", 12, 1, False, "builtin-delta")
    return EigenSequence(desc, bound, tuple(primes), tuple(coeffs))


def _affine_point_count(p, a1, a2, a3, a4, a6):
    return sum(
        1
        for x in range(p)
        for y in range(p)
        if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % p == 0
    )


def e11_sequence(bound=DEFAULT_BOUND, limit=GENERATOR_LIMIT):
    """Trace of Frobenius of the level 11 curve y^2 + y = x^3 - x^2 - 10x - 20."""
    _check_bound(bound, limit)
    primes = [p for p in sieve_primes(bound) if p != 11]
    odd = np.array([p for p in primes if p != 2], dtype=np.int64)
    nchunks = max(1, min(kernels.thread_count(), len(odd)))
    # round-robin so every chunk gets a similar mix of large primes
    sums = _map(lambda i: kernels.cubic_character_sums(odd[i::nchunks], E11_CUBIC), range(nchunks))
    traces = np.empty(len(odd), dtype=np.int64)
    for i, s in enumerate(sums):
        traces[i::nchunks] = s
    coeffs = (-traces).tolist()
    if primes and primes[0] == 2:
        coeffs.insert(0, 2 - _affine_point_count(2, *E11_WEIERSTRASS))
    desc = FormDescriptor("e11", 2, 11, False, "builtin-e11")
    return EigenSequence(desc, bound, tuple(primes), tuple(coeffs))


def _sqrt_minus_one(p):
    for g in range(2, p):
        if legendre(g, p) == -1:
            return pow(g, (p - 1) // 4, p)
    raise InvariantError(f"no quadratic non-residue mod {p}")


def cornacchia(p):
    """``(a, b)`` with ``a*a + b*b == p`` for a prime ``p = 1 mod 4``; a odd, b even."""
    r = _sqrt_minus_one(p)
    if 2 * r < p:
        r = p - r
    a, b = p, r
    while b * b > p:
        a, b = b, a % b
    rest = p - b * b
    c = math.isqrt(rest)
    if c * c != rest:
        raise InvariantError(f"Cornacchia failed for p={p}")
    x, y = b, c
    return (x, y) if x % 2 else (y, x)


def cm32_ap(p):
    """a_p of y^2 = x^3 - x at an odd prime.

    For p = 1 mod 4 write p = a^2 + b^2 with a + bi primary (a odd, b even,
    a + b = 1 mod 4); then a_p = 2a.
    """
    if p % 2 == 0 or not is_prime(p):
        raise ValidationError(f"cm32_ap needs an odd prime, got {p}")
    if p % 4 == 3:
        return 0
    a, b = cornacchia(p)
    if (a + b) % 4 != 1:
        a = -a
    return 2 * a


def cm32_sequence(bound=DEFAULT_BOUND, limit=GENERATOR_LIMIT):
    """The CM newform of level 32 attached to y^2 = x^3 - x."""
    _check_bound(bound, limit)
    primes = [p for p in sieve_primes(bound) if p != 2]
    desc = FormDescriptor("cm32", 2, 32, True, "builtin-cm32")
    return EigenSequence(desc, bound, tuple(primes), tuple(cm32_ap(p) for p in primes))


BUILTINS = {"delta": tau_sequence, "e11": e11_sequence, "cm32": cm32_sequence}


def twist(seq, d):
    """Twist by the quadratic character of fundamental discriminant ``d``.

    ``d == 1`` returns ``seq`` itself.  Primes dividing ``d`` become ramified and
    are dropped; the recorded level is ``lcm(level, d^2)``.
    """
    if d == 1:
        return seq
    if not is_fundamental_discriminant(d):
        raise ValidationError(f"{d} is not a fundamental discriminant")
    kept = [(p, kronecker(d, p) * a) for p, a in zip(seq.primes, seq.coeffs) if d % p]
    old = seq.descriptor
    desc = FormDescriptor(
        f"twist({old.label},{d})", old.weight, math.lcm(old.level, d * d), old.cm, "twist"
    )
    return EigenSequence(desc, seq.bound, tuple(p for p, _ in kept), tuple(a for _, a in kept))


# ---------------------------------------------------------------- exchange format

_HEADER_KEYS = ("label", "weight", "level", "cm")
_INT = re.compile(r"-?[0-9]+\Z")


def format_sequence(seq):
    d = seq.descriptor
    lines = [f"# label={d.label} weight={d.weight} level={d.level} cm={int(d.cm)} bound={seq.bound}"]
    lines.extend(f"{p},{a}" for p, a in zip(seq.primes, seq.coeffs))
    return "\n".join(lines) + "\n"


def write_sequence(seq, path):
    Path(path).write_text(format_sequence(seq), encoding="utf-8")


def _parse_header(line):
    if not line.startswith("#"):
        raise MalformedHeaderError(1, "expected '# label=... weight=... level=... cm=...'")
    fields = {}
    for token in line[1:].split():
        key, sep, value = token.partition("=")
        if not sep or key in fields or key not in (*_HEADER_KEYS, "bound"):
            raise MalformedHeaderError(1, f"bad token {token!r}")
        fields[key] = value
    missing = [k for k in _HEADER_KEYS if k not in fields]
    if missing:
        raise MalformedHeaderError(1, f"missing {', '.join(missing)}")
    for key in ("weight", "level", "bound"):
        if key in fields and not _INT.match(fields[key]):
            raise MalformedHeaderError(1, f"{key} must be an integer")
    if fields["cm"] not in ("0", "1"):
        raise MalformedHeaderError(1, "cm must be 0 or 1")
    try:
        desc = FormDescriptor(
            fields["label"], int(fields["weight"]), int(fields["level"]), fields["cm"] == "1", "file"
        )
    except ValidationError as exc:
        raise MalformedHeaderError(1, str(exc)) from None
    bound = int(fields["bound"]) if "bound" in fields else None
    return desc, bound


def parse_sequence(text):
    """Parse exchange-format text; every problem is reported with its line number."""
    lines = text.splitlines()
    if not lines:
        raise MalformedHeaderError(1, "empty file")
    desc, bound = _parse_header(lines[0])
    k, level = desc.weight, desc.level
    primes, coeffs, seen = [], [], set()
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        p_str, sep, a_str = line.partition(",")
        p_str, a_str = p_str.strip(), a_str.strip()
        if not sep or not _INT.match(p_str) or not _INT.match(a_str):
            raise MalformedRowError(lineno, repr(raw))
        p, a = int(p_str), int(a_str)
        if not is_prime(p):
            raise NonPrimeIndexError(lineno, str(p))
        if p in seen:
            raise DuplicatePrimeError(lineno, str(p))
        if primes and p < primes[-1]:
            raise OrderError(lineno, f"{p} after {primes[-1]}")
        if level % p == 0:
            raise RamifiedPrimeError(lineno, str(p))
        if not deligne_ok(a, p, k):
            raise DeligneBoundError(lineno, f"{a}^2 > 4*{p}^{k - 1}")
        seen.add(p)
        primes.append(p)
        coeffs.append(a)
    if bound is None:
        bound = primes[-1] if primes else 2
    if primes and primes[-1] > bound:
        raise MalformedHeaderError(1, f"bound {bound} below listed prime {primes[-1]}")
    expected = [p for p in sieve_primes(bound) if level % p]
    if expected != primes:
        gap = next((q for q, r in zip(expected, primes + [None] * len(expected)) if q != r), None)
        raise MissingPrimeError(len(lines) + 1, f"no row for p={gap}")
    return EigenSequence(desc, bound, tuple(primes), tuple(coeffs))


def load_sequence(path):
    return parse_sequence(Path(path).read_text(encoding="utf-8"))

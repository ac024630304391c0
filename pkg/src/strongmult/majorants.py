"""Fejer, Vaaler, Beurling and Selberg trigonometric polynomials.

All evaluators accept scalars or numpy arrays and treat ``x`` as a point of
the circle R/Z.  The Selberg polynomial majorises the indicator of
``J = [0, delta]`` and has degree ``M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantError, ValidationError

_SINGULAR = 1e-8


def _out(value, like):
    return float(value) if np.ndim(like) == 0 else value


def fejer(M, x):
    """Fejer kernel ``(1/M) (sin(pi M x) / sin(pi x))**2``, equal to ``M`` at integers."""
    if M < 1:
        raise ValidationError(f"M must be >= 1, got {M}")
    xa = np.asarray(x, dtype=np.float64)
    t = xa - np.round(xa)  # periodic representative in [-1/2, 1/2]
    s = np.sin(np.pi * t)
    near = np.abs(s) < _SINGULAR
    safe = np.where(near, 1.0, s)
    value = np.sin(np.pi * M * t) ** 2 / (M * safe * safe)
    # series of the removable singularity: M (1 - (pi t)^2 (M^2 - 1) / 3)
    series = M * (1.0 - (np.pi * t) ** 2 * (M * M - 1) / 3.0)
    return _out(np.where(near, series, value), x)


def vaaler(M, x):
    """Vaaler's degree-``M`` approximation to the sawtooth ``{x} - 1/2``."""
    if M < 1:
        raise ValidationError(f"M must be >= 1, got {M}")
    xa = np.asarray(x, dtype=np.float64)
    n = M + 1
    total = np.zeros_like(xa)
    for k in range(1, M + 1):
        total = total + (k / n - 0.5) * fejer(n, xa - k / n)
    total = total / n
    total = total + np.sin(2 * np.pi * n * xa) / (2 * np.pi * n)
    total = total - fejer(n, xa) * np.sin(2 * np.pi * xa) / (2 * np.pi)
    return _out(total, x)


def beurling(M, x):
    """Beurling majorant of the sawtooth: ``V_M(x) + Delta_{M+1}(x) / (2(M+1))``."""
    xa = np.asarray(x, dtype=np.float64)
    return _out(vaaler(M, xa) + fejer(M + 1, xa) / (2 * (M + 1)), x)


def _check_delta(delta):
    if not 0.0 < delta < 1.0:
        raise ValidationError(f"delta must lie in (0, 1), got {delta}")


def selberg_plus(delta, M, x):
    """Selberg majorant ``delta + B_M(x - delta) + B_M(-x)`` of the indicator of [0, delta]."""
    _check_delta(delta)
    xa = np.asarray(x, dtype=np.float64)
    return _out(delta + beurling(M, xa - delta) + beurling(M, -xa), x)


def indicator(delta, x):
    """Indicator of ``[0, delta]`` read modulo 1."""
    xa = np.asarray(x, dtype=np.float64)
    r = xa - np.floor(xa)
    return _out((r <= delta).astype(np.float64), x)


def default_delta(M):
    """Largest admissible width ``1/(pi (M+1))``."""
    return 1.0 / (math.pi * (M + 1))


@dataclass(frozen=True)
class SelbergMajorant:
    """Real parts ``coeffs[n]`` of the Fourier coefficients of the Selberg polynomial, n = 0..M."""

    M: int
    delta: float
    coeffs: np.ndarray = field(compare=False, repr=False)
    quadrature_nodes: int
    _spectrum: np.ndarray = field(compare=False, repr=False)

    def coefficient(self, n):
        """Real Fourier coefficient at any ``|n| <= nodes - M - 2`` (free of aliasing)."""
        n = abs(n)
        if n > self.quadrature_nodes - self.M - 2:
            raise ValidationError(f"index {n} aliases with {self.quadrature_nodes} nodes")
        return float(self._spectrum[n].real)

    def evaluate(self, theta):
        return majorant_bound(self, theta)


def _check_coefficients(maj):
    M, delta, c = maj.M, maj.delta, maj.coeffs
    if abs(c[0] - (delta + 1.0 / (M + 1))) > 1e-10:
        raise InvariantError(f"c_0 = {c[0]!r} differs from delta + 1/(M+1)")
    for n in range(1, M + 1):
        cap = 1.0 / (M + 1) + min(delta, 1.0 / (math.pi * n)) + 1e-10
        if abs(c[n]) > cap:
            raise InvariantError(f"|c_{n}| = {abs(c[n])!r} exceeds 1/(M+1) + min(delta, 1/(pi n))")
    for n in range(M + 1, 2 * M + 5):
        if abs(maj.coefficient(n)) >= 1e-8:
            raise InvariantError(f"coefficient {n} > M does not vanish: {maj.coefficient(n)!r}")


def selberg_fourier(delta, M, nodes=None):
    """Fourier data of the Selberg polynomial by equispaced quadrature.

    With ``N`` nodes the discrete transform is exact for a trigonometric
    polynomial of degree ``D`` at every index ``n < N - D``; the default
    ``N = 4(M+2)`` covers the probe range ``n <= 2M + 4``.
    """
    _check_delta(delta)
    if M < 1:
        raise ValidationError(f"M must be >= 1, got {M}")
    N = nodes or 4 * (M + 2)
    if N < 4 * (M + 2):
        raise ValidationError(f"need at least {4 * (M + 2)} quadrature nodes, got {N}")
    values = selberg_plus(delta, M, np.arange(N) / N)
    spectrum = np.fft.fft(values) / N
    maj = SelbergMajorant(M, float(delta), spectrum.real[: M + 1].copy(), N, spectrum)
    _check_coefficients(maj)
    return maj


def majorant_bound(maj, theta):
    """Trigonometric upper bound for ``(chi_J(theta/2pi) + chi_J(-theta/2pi)) / 2``."""
    th = np.asarray(theta, dtype=np.float64)
    n = np.arange(1, maj.M + 1, dtype=np.float64)
    cos_terms = np.cos(np.multiply.outer(th, n))
    value = maj.delta + 1.0 / (maj.M + 1) + 2.0 * (cos_terms @ maj.coeffs[1:])
    return _out(value, theta)


def symmetric_indicator(delta, theta):
    th = np.asarray(theta, dtype=np.float64) / (2 * np.pi)
    return _out(0.5 * (indicator(delta, th) + indicator(delta, -th)), theta)


def chebyshev_u(n, x):
    """Chebyshev polynomial of the second kind by the three-term recurrence."""
    if n < 0:
        raise ValidationError(f"degree must be nonnegative, got {n}")
    xa = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(xa) > 1.0):
        raise ValidationError("chebyshev_u needs |x| <= 1")
    prev, cur = np.ones_like(xa), 2.0 * xa
    if n == 0:
        return _out(prev, x)
    for _ in range(n - 1):
        prev, cur = cur, 2.0 * xa * cur - prev
    return _out(cur, x)


def chebyshev_table(m_max, x):
    """Rows ``U_0(x), ..., U_{m_max}(x)`` for an array ``x``."""
    xa = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(xa) > 1.0):
        raise ValidationError("chebyshev_table needs |x| <= 1")
    rows = [np.ones_like(xa)]
    if m_max >= 1:
        rows.append(2.0 * xa)
    for _ in range(2, m_max + 1):
        rows.append(2.0 * xa * rows[-1] - rows[-2])
    return np.array(rows)


def check_grid(M_values, deltas, samples=10_000, random_points=1_000, seed=0):
    """Evaluate every majorant invariant on an (M, delta) grid.

    Returns rows ``(M, delta, check, worst, passed)``.  ``deltas`` may contain
    ``None`` for the default width ``1/(pi (M+1))``.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for M in M_values:
        for d in deltas:
            delta = default_delta(M) if d is None else d
            x = np.concatenate(
                [np.arange(samples) / samples, [0.0, delta / 2, delta], rng.random(random_points)]
            )
            gap = float(np.min(selberg_plus(delta, M, x) - indicator(delta, x)))
            rows.append((M, delta, "majorization", gap, gap >= -1e-10))
            try:
                maj = selberg_fourier(delta, M)
                ok, detail = True, 0.0
            except InvariantError as exc:
                maj, ok, detail = None, False, str(exc)
            rows.append((M, delta, "fourier", detail, ok))
            if maj is not None:
                c0 = abs(maj.coeffs[0] - (delta + 1 / (M + 1)))
                rows.append((M, delta, "c0", c0, c0 <= 1e-10))
                excess = max(
                    (abs(maj.coeffs[n]) - 1 / (M + 1) - min(delta, 1 / (math.pi * n)) for n in range(1, M + 1)),
                    default=0.0,
                )
                rows.append((M, delta, "cn_bound", excess, excess <= 1e-10))
                tail = max(abs(maj.coefficient(n)) for n in range(M + 1, 2 * M + 5))
                rows.append((M, delta, "vanishing", tail, tail < 1e-8))
            period = float(np.max(np.abs(selberg_plus(delta, M, x[:512]) - selberg_plus(delta, M, x[:512] + 1))))
            rows.append((M, delta, "periodicity", period, period <= 1e-12))
    return rows

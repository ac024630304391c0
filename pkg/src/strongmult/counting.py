"""Coincidence counts for a pair of forms and their Selberg-majorant upper bounds.

Integer decisions (``lambda_1^2 == lambda_2^2`` and the sign splits) are made
on exact integers.  Float sums go through ``math.fsum``, which is correctly
rounded and therefore independent of summation order.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import RangeError, ValidationError
from .forms import angles as to_angles, prime_array
from .majorants import chebyshev_table, default_delta, majorant_bound, selberg_fourier


def _require_cover(x, *seqs):
    for s in seqs:
        if x > s.bound:
            raise RangeError(f"cutoff {x} beyond bound {s.bound} of {s.descriptor.label}")


def common_support(s1, s2, x):
    """``(p, a1, a2)`` over primes ``<= x`` unramified for both forms, ascending."""
    _require_cover(x, s1, s2)
    e2 = s2.entries
    out = []
    for p, a in zip(s1.primes, s1.coeffs):
        if p > x:
            break
        if p in e2:
            out.append((p, a, e2[p]))
    return out


def _aligned_angles(t1, t2, x):
    _require_cover(x, t1, t2)
    p1, p2 = t1.primes[t1.primes <= x], t2.primes[t2.primes <= x]
    common, i1, i2 = np.intersect1d(p1, p2, assume_unique=True, return_indices=True)
    return common, t1.angles[i1], t2.angles[i2]


def squares_equal(a1, a2, p, k1, k2):
    # lambda_1^2 == lambda_2^2 with denominators cleared
    return a1 * a1 * p ** (k2 - 1) == a2 * a2 * p ** (k1 - 1)


def lambda_sign_relation(a1, a2, p, k1, k2):
    """``(lambda_1 == lambda_2, lambda_1 == -lambda_2)`` decided on integers (even weights)."""
    if k1 > k2:
        a1, a2, k1, k2 = a2, a1, k2, k1
    lifted = a1 * p ** ((k2 - k1) // 2)
    return lifted == a2, lifted == -a2


def count_square_equal(s1, s2, x):
    k1, k2 = s1.weight, s2.weight
    return sum(1 for p, a1, a2 in common_support(s1, s2, x) if squares_equal(a1, a2, p, k1, k2))


def count_split(s1, s2, x):
    """Counts of ``theta_1 == theta_2`` and ``theta_1 == pi - theta_2``."""
    k1, k2 = s1.weight, s2.weight
    equal = flip = 0
    for p, a1, a2 in common_support(s1, s2, x):
        same, opposite = lambda_sign_relation(a1, a2, p, k1, k2)
        equal += same
        flip += opposite
    return equal, flip


def count_double_zero(s1, s2, x):
    """Common primes with ``a_1 = a_2 = 0`` (counted in both halves of the split)."""
    return sum(1 for _, a1, a2 in common_support(s1, s2, x) if a1 == 0 and a2 == 0)


def sato_tate_sum(t1, t2, m1, m2, x):
    """``sum_{p <= x} U_m1(cos theta_1p) U_m2(cos theta_2p)`` over the common support."""
    if m1 < 1 or m2 < 1:
        raise ValidationError("Chebyshev degrees must be >= 1")
    _, th1, th2 = _aligned_angles(t1, t2, x)
    u1 = chebyshev_table(m1, np.clip(np.cos(th1), -1.0, 1.0))[m1]
    u2 = chebyshev_table(m2, np.clip(np.cos(th2), -1.0, 1.0))[m2]
    return math.fsum((u1 * u2).tolist())


def sato_tate_grid(t1, t2, m_max, x):
    """All sums for ``1 <= m1, m2 <= m_max`` keyed by ``(m1, m2)``."""
    _, th1, th2 = _aligned_angles(t1, t2, x)
    u1 = chebyshev_table(m_max, np.clip(np.cos(th1), -1.0, 1.0))
    u2 = chebyshev_table(m_max, np.clip(np.cos(th2), -1.0, 1.0))
    return {
        (i, j): math.fsum((u1[i] * u2[j]).tolist())
        for i in range(1, m_max + 1)
        for j in range(1, m_max + 1)
    }


def majorant_count_bound(t1, t2, maj, x, flip=False):
    """Pointwise majorant sum bounding ``#{theta_1 = theta_2}`` (or ``pi - theta_2`` when ``flip``)."""
    _, th1, th2 = _aligned_angles(t1, t2, x)
    if flip:
        th2 = np.pi - th2
    terms = majorant_bound(maj, th1 - th2) + majorant_bound(maj, th1 + th2)
    return math.fsum(np.atleast_1d(terms).tolist())


@dataclass(frozen=True)
class FourierForm:
    """The majorant sum rewritten through the Fourier coefficients.

    ``main + low_order + chebyshev`` equals ``total``; ``low_order`` holds the
    ``n = 1, 2`` frequencies and ``chebyshev`` the ``n >= 3`` frequencies written
    with products of ``U_n - U_{n-2}``.
    """

    main: float
    low_order: float
    chebyshev: float
    total: float


def majorant_count_fourier(t1, t2, maj, x, flip=False):
    common, th1, th2 = _aligned_angles(t1, t2, x)
    M = maj.M
    main = (2 * maj.delta + 2.0 / (M + 1)) * len(common)
    sign = [(-1) ** n if flip else 1 for n in range(M + 1)]
    low, terms = [], []
    for n in range(1, M + 1):
        s = math.fsum((np.cos(n * th1) * np.cos(n * th2)).tolist())
        terms.append(4 * maj.coeffs[n] * sign[n] * s)
        if n <= 2:
            low.append(terms[-1])
    cheb = []
    if M >= 3:
        u1 = chebyshev_table(M, np.clip(np.cos(th1), -1.0, 1.0))
        u2 = chebyshev_table(M, np.clip(np.cos(th2), -1.0, 1.0))
        for n in range(3, M + 1):
            # 2 cos(n theta) = U_n(cos theta) - U_{n-2}(cos theta)
            d = (u1[n] - u1[n - 2]) * (u2[n] - u2[n - 2])
            cheb.append(maj.coeffs[n] * sign[n] * math.fsum(d.tolist()))
    return FourierForm(main, math.fsum(low), math.fsum(cheb), math.fsum([main, *terms]))


def prime_pi(x):
    return int(prime_array(int(x)).size)


def bound_shape(x, Q, mode="unconditional"):
    """Growth shape of the coincidence count (implied constant unknown; ratios only)."""
    if x < 16:
        raise ValidationError(f"bound_shape needs x >= 16, got {x}")
    if Q < 1:
        raise ValidationError(f"Q must be >= 1, got {Q}")
    if mode == "unconditional":
        ll = math.log(math.log(x))
        return prime_pi(x) * math.log(Q * ll) / math.sqrt(ll)
    if mode == "grh":
        return x ** (5 / 6) * math.log(Q * x) ** (1 / 3) / math.log(x) ** (2 / 3)
    raise ValidationError(f"unknown mode {mode!r}")


@dataclass
class CountReport:
    x_grid: list
    pi_x: list
    n_square_equal: list
    n_angle_equal: list
    n_angle_flip: list
    majorant_rhs_plus: list
    majorant_rhs_minus: list
    sato_tate: list
    bound_shape_uncond: list
    bound_shape_grh: list
    params: dict
    decomposition: list = field(default_factory=list)
    decay_ratio: list = field(default_factory=list)
    invariants: list = field(default_factory=list)

    @property
    def ok(self):
        return all(inv["passed"] for inv in self.invariants)

    def to_dict(self):
        return {
            "x_grid": self.x_grid,
            "pi_x": self.pi_x,
            "n_square_equal": self.n_square_equal,
            "n_angle_equal": self.n_angle_equal,
            "n_angle_flip": self.n_angle_flip,
            "majorant_rhs_plus": self.majorant_rhs_plus,
            "majorant_rhs_minus": self.majorant_rhs_minus,
            "sato_tate": [{f"{i},{j}": v for (i, j), v in row.items()} for row in self.sato_tate],
            "bound_shape_uncond": self.bound_shape_uncond,
            "bound_shape_grh": self.bound_shape_grh,
            "params": self.params,
            "decomposition": self.decomposition,
            "decay_ratio": self.decay_ratio,
            "invariants": self.invariants,
        }


def build_count_report(s1, s2, x_grid, M, delta=None, m_max=4):
    x_grid = [int(x) for x in x_grid]
    if not x_grid or any(b <= a for a, b in zip(x_grid, x_grid[1:])):
        raise ValidationError("x grid must be non-empty and strictly ascending")
    _require_cover(x_grid[-1], s1, s2)
    delta = default_delta(M) if delta is None else float(delta)
    maj = selberg_fourier(delta, M)
    t1, t2 = to_angles(s1), to_angles(s2)
    d1, d2 = s1.descriptor, s2.descriptor
    Q = d1.weight * d1.level * d2.weight * d2.level
    report = CountReport(
        x_grid, [], [], [], [], [], [], [], [], [],
        {"M": M, "delta": delta, "Q": Q, "m_max": m_max,
         "forms": [d1.label, d2.label], "weights": [d1.weight, d2.weight],
         "levels": [d1.level, d2.level], "cm": [d1.cm, d2.cm]},
    )
    inv = report.invariants
    for x in x_grid:
        support = common_support(s1, s2, x)
        pi_x = len(support)
        sq = count_square_equal(s1, s2, x)
        eq, fl = count_split(s1, s2, x)
        zeros = count_double_zero(s1, s2, x)
        plus = majorant_count_bound(t1, t2, maj, x, flip=False)
        minus = majorant_count_bound(t1, t2, maj, x, flip=True)
        four_p = majorant_count_fourier(t1, t2, maj, x, flip=False)
        four_m = majorant_count_fourier(t1, t2, maj, x, flip=True)
        shape_u = bound_shape(x, Q, "unconditional") if x >= 16 else None
        shape_g = bound_shape(x, Q, "grh") if x >= 16 else None
        report.pi_x.append(pi_x)
        report.n_square_equal.append(sq)
        report.n_angle_equal.append(eq)
        report.n_angle_flip.append(fl)
        report.majorant_rhs_plus.append(plus)
        report.majorant_rhs_minus.append(minus)
        report.sato_tate.append(sato_tate_grid(t1, t2, m_max, x) if m_max >= 1 else {})
        report.bound_shape_uncond.append(shape_u)
        report.bound_shape_grh.append(shape_g)
        report.decomposition.append({
            "plus": asdict(four_p), "minus": asdict(four_m), "double_zero": zeros,
        })
        if shape_u and pi_x:
            report.decay_ratio.append((sq / pi_x) / (shape_u / prime_pi(x)))
        else:
            report.decay_ratio.append(None)
        slack = 1e-9 * pi_x
        checks = [
            ("start_decomp", sq <= eq + fl),
            ("start_decomp_equality", (sq == eq + fl) == (zeros == 0)),
            ("majorant_plus", eq <= plus + slack),
            ("majorant_minus", fl <= minus + slack),
            ("fourier_plus", math.isclose(plus, four_p.total, rel_tol=1e-6, abs_tol=1e-9)),
            ("fourier_minus", math.isclose(minus, four_m.total, rel_tol=1e-6, abs_tol=1e-9)),
        ]
        inv.extend({"name": name, "x": x, "passed": bool(ok)} for name, ok in checks)
    return report

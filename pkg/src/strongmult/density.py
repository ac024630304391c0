"""Coincidence-set membership, truncated Dirichlet densities and lower-bound tables."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .counting import common_support, lambda_sign_relation, squares_equal
from .errors import RangeError, ValidationError
from .forms import normalized_eigenvalue, prime_array

TWO_PI = 2 * math.pi
_ROTATION_TOL = 1e-12
KINDS = ("S_alpha", "S_star", "S_upper_star", "S_ad")


@dataclass(frozen=True)
class SetSelector:
    kind: str
    alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown selector kind {self.kind!r}")
        object.__setattr__(self, "alpha", float(self.alpha) % TWO_PI)

    @classmethod
    def parse(cls, text):
        """``S_0``, ``S_pi``, ``S_alpha:<radians>``, ``S_star``, ``S_upper_star`` or ``S_ad``."""
        if text == "S_0":
            return cls("S_alpha", 0.0)
        if text == "S_pi":
            return cls("S_alpha", math.pi)
        if text.startswith("S_alpha:"):
            try:
                return cls("S_alpha", float(text.split(":", 1)[1]))
            except ValueError:
                raise ValidationError(f"bad rotation in {text!r}") from None
        if text in KINDS[1:]:
            return cls(text)
        raise ValidationError(f"unknown selector {text!r}")

    @property
    def rotation(self):
        """``"0"``, ``"pi"`` or ``"generic"`` for the S_alpha kind."""
        a = self.alpha
        if min(a, TWO_PI - a) <= _ROTATION_TOL:
            return "0"
        if abs(a - math.pi) <= _ROTATION_TOL:
            return "pi"
        return "generic"

    def __str__(self):
        if self.kind != "S_alpha":
            return self.kind
        return {"0": "S_0", "pi": "S_pi"}.get(self.rotation, f"S_alpha:{self.alpha!r}")


def _member(a1, a2, p, k1, k2, sel):
    if sel.kind in ("S_star", "S_ad"):
        # |lambda_1| != |lambda_2|; the adjoint coefficients |lambda|^2 - 1 differ iff this holds
        return not squares_equal(a1, a2, p, k1, k2)
    if sel.kind == "S_upper_star":
        return a1 * a1 * p ** (k2 - 1) + a2 * a2 * p ** (k1 - 1) != 2 * p ** (k1 + k2 - 2)
    rotation = sel.rotation
    if rotation == "generic":
        # real eigenvalues: lambda_1 = e^{i alpha} lambda_2 with sin(alpha) != 0 forces both zero
        return a1 != 0 or a2 != 0
    same, opposite = lambda_sign_relation(a1, a2, p, k1, k2)
    return not (same if rotation == "0" else opposite)


def classify(s1, s2, p, sel):
    """Whether the common unramified prime ``p`` lies in the selected set."""
    if p not in s1 or p not in s2:
        raise RangeError(f"p={p} is not in the common unramified support")
    return _member(s1[p], s2[p], p, s1.weight, s2.weight, sel)


def members(s1, s2, X, sel):
    """Ascending common primes ``<= X`` lying in the selected set."""
    k1, k2 = s1.weight, s2.weight
    return [p for p, a1, a2 in common_support(s1, s2, X) if _member(a1, a2, p, k1, k2, sel)]


def adjoint_coeff(seq, p):
    """``(a_p^2 - p^(k-1), p^(k-1))``: the adjoint coefficient as an unreduced fraction."""
    if p not in seq:
        raise RangeError(f"p={p} is ramified or beyond the bound for {seq.descriptor.label}")
    den = p ** (seq.weight - 1)
    return seq[p] ** 2 - den, den


def default_schedule(X):
    """``1.2, 1.1, 1.05`` then ``1 + 3/log X``, which keeps the truncation tail small."""
    return [1.2, 1.1, 1.05, 1.0 + 3.0 / math.log(X)]


def _check_schedule(schedule):
    if not schedule:
        raise ValidationError("empty s schedule")
    for s in schedule:
        if not s > 1.0:
            raise ValidationError(f"every s must exceed 1, got {s}")


def prime_zeta_partial(primes, s):
    """``sum p^(-s)`` over ``primes``, correctly rounded."""
    arr = np.asarray(primes, dtype=np.float64)
    return math.fsum(np.power(arr, -s).tolist()) if arr.size else 0.0


@dataclass
class DensityEstimate:
    """Truncated ratios ``sum_{p in S, p <= X} p^-s / log(1/(s-1))`` along a schedule.

    The last scheduled ``s`` is the reference point used for comparisons
    against theorem bounds.
    """

    selector: str
    X: int
    s_schedule: list
    numerators: list
    denominators: list
    ratios: list
    tail_bound: list
    full_ratios: list = field(default_factory=list)
    member_count: int = 0
    support_count: int = 0

    @property
    def reference_ratio(self):
        return self.ratios[-1]

    def to_dict(self):
        return dict(self.__dict__)


def density_estimate(s1, s2, sel, X, s_schedule=None):
    if X > s1.bound or X > s2.bound:
        raise RangeError(f"X={X} beyond sequence bounds {s1.bound}, {s2.bound}")
    schedule = list(default_schedule(X) if s_schedule is None else s_schedule)
    _check_schedule(schedule)
    chosen = members(s1, s2, X, sel)
    every = prime_array(X)
    logX = math.log(X)
    est = DensityEstimate(str(sel), X, schedule, [], [], [], [])
    est.member_count = len(chosen)
    est.support_count = len(common_support(s1, s2, X))
    for s in schedule:
        num = prime_zeta_partial(chosen, s)
        den = math.log(1.0 / (s - 1.0))
        est.numerators.append(num)
        est.denominators.append(den)
        est.ratios.append(num / den)
        est.tail_bound.append(X ** (1.0 - s) / ((s - 1.0) * logX))
        est.full_ratios.append(prime_zeta_partial(every, s) / den)
    return est


def pole_order_proxies(s1, s2, X, s, exponents=None):
    """Truncated ``D(s; i, j, k, l) / log(1/(s-1))`` for real eigenvalue data (diagnostic only)."""
    exponents = exponents or [
        (2, 1, 0, 1), (0, 1, 2, 1), (1, 1, 1, 1), (2, 2, 0, 0),
        (0, 0, 2, 2), (2, 0, 0, 2), (0, 2, 2, 0),
    ]
    k1, k2 = s1.weight, s2.weight
    rows = [
        (normalized_eigenvalue(a1, p, k1), normalized_eigenvalue(a2, p, k2), p ** -s)
        for p, a1, a2 in common_support(s1, s2, X)
    ]
    den = math.log(1.0 / (s - 1.0))
    return {
        e: math.fsum(a ** (e[0] + e[1]) * b ** (e[2] + e[3]) * w for a, b, w in rows) / den
        for e in exponents
    }


# ---------------------------------------------------------------- Cauchy-Schwarz

def fourth_power_expansion(a, b, alpha):
    """Ten-term expansion of ``|a - e^{i alpha} b|^4`` in ``a, conj(a), b, conj(b)``."""
    ac, bc = a.conjugate(), b.conjugate()
    e1, e2 = cmath.exp(1j * alpha), cmath.exp(2j * alpha)
    e1c, e2c = e1.conjugate(), e2.conjugate()
    value = (
        a * a * ac * ac + e2c * a * a * bc * bc + e2 * ac * ac * b * b + b * b * bc * bc
        + 4 * a * ac * b * bc
        - 2 * e1c * a * a * ac * bc - 2 * e1 * a * ac * ac * b
        - 2 * e1c * a * b * bc * bc - 2 * e1 * ac * b * b * bc
    )
    return value.real


@dataclass(frozen=True)
class CauchySchwarzCheck:
    lhs: float
    rhs: float
    holds: bool
    identity_max_error: float
    identity_ok: bool
    sampled: int


def cauchy_schwarz_check(s1, s2, alpha, s, X, samples=100):
    if not s > 1.0:
        raise ValidationError(f"s must exceed 1, got {s}")
    sel = SetSelector("S_alpha", alpha)
    rot = cmath.exp(1j * sel.alpha)
    k1, k2 = s1.weight, s2.weight
    support = common_support(s1, s2, X)
    lam = [
        (p, normalized_eigenvalue(a1, p, k1), normalized_eigenvalue(a2, p, k2), _member(a1, a2, p, k1, k2, sel))
        for p, a1, a2 in support
    ]
    square, fourth, in_set = [], [], []
    for p, a, b, member in lam:
        w = p ** -s
        d2 = abs(a - rot * b) ** 2
        square.append(d2 * w)
        fourth.append(d2 * d2 * w)
        if member:
            in_set.append(w)
    lhs = math.fsum(square)
    rhs = math.sqrt(math.fsum(fourth)) * math.sqrt(math.fsum(in_set))
    worst = 0.0
    picks = sorted({round(i * (len(lam) - 1) / max(samples - 1, 1)) for i in range(samples)}) if lam else []
    for i in picks:
        _, a, b, _ = lam[i]
        direct = abs(a - rot * b) ** 4
        expanded = fourth_power_expansion(complex(a), complex(b), sel.alpha)
        worst = max(worst, abs(expanded - direct) / max(direct, 1.0))
    return CauchySchwarzCheck(lhs, rhs, lhs <= rhs + 1e-9, worst, worst <= 1e-9, len(picks))


# ---------------------------------------------------------------- bound tables

THEOREMS = ("Main-dist", "main-thm-non-twist-equiv", "Wa-thm", "lD_S*", "S''", "abstract")
ABSTRACT = {
    "S_alpha": (Fraction(1, 16), "1/16"),
    "S_alpha_non_twist": (Fraction(2, 13), "2/13"),
    "S_star": (Fraction(1, 11), "1/11"),
}


def _need(value, name, theorem):
    if value is None:
        raise ValidationError(f"{theorem} needs {name}")
    return value


def _forbid(theorem, **given):
    for name, value in given.items():
        if value is not None:
            raise ValidationError(f"{name} does not apply to {theorem}")


def _dihedral_count(dihedral, theorem):
    d = _need(dihedral, "dihedral flags for both forms", theorem)
    if len(d) != 2:
        raise ValidationError("dihedral flags must be a pair")
    return sum(bool(f) for f in d)


def _main_dist(alpha, dihedral, kappa1):
    c2, c1 = math.cos(2 * alpha), math.cos(alpha)
    if kappa1 is not None:
        if dihedral is None or any(dihedral):
            raise ValidationError("kappa1 applies only when both forms are non-dihedral")
        if kappa1 not in (0, 1):
            raise ValidationError("kappa1 must be 0 or 1")
        if c2 >= 0:
            value = min(1 / (3 + c2), 1 / (3 + c2 - 2 * kappa1 * c1))
            return value, "min{1/(3+cos 2a), 1/(3+cos 2a-2k1 cos a)}"
        return min(1 / 3, 1 / (3 - 2 * kappa1 * c1)), "min{1/3, 1/(3-2k1 cos a)}"
    if c2 >= 0 and c1 >= 0:
        return 1 / (6 + 2 * c2), "1/(6+2cos 2a)"
    if c2 >= 0:
        return 1 / (6 + 2 * c2 - 8 * c1), "1/(6+2cos 2a-8cos a)"
    if c1 >= 0:
        return 1 / 6, "1/6"
    return 1 / (6 - 8 * c1), "1/(6-8cos a)"


def _non_twist(alpha, dihedral, kappa2):
    count = _dihedral_count(dihedral, "main-thm-non-twist-equiv")
    c2, c1 = math.cos(2 * alpha), math.cos(alpha)
    if count != 0 and kappa2 is not None:
        raise ValidationError("kappa2 applies only when both forms are non-dihedral")
    if count == 2:
        if c2 >= 0 and c1 >= 0:
            d, f = 2 / (7 + 2 * c2), "2/(7+2cos 2a)"
        elif c2 >= 0:
            d, f = 2 / (7 + 2 * c2 - 4 * c1), "2/(7+2cos 2a-4cos a)"
        elif c1 >= 0:
            d, f = 2 / 7, "2/7"
        else:
            d, f = 2 / (7 - 4 * c1), "2/(7-4cos a)"
        return min(d, 1 / 4), f"min{{{f}, 1/4}}"
    if count == 1:
        if c2 >= 0:
            return 2 / (5 + 2 * c2), "2/(5+2cos 2a)"
        return 2 / 5, "2/5"
    k2 = _need(kappa2, "kappa2 (1 iff the central characters agree; user supplied)", "main-thm-non-twist-equiv")
    if k2 not in (0, 1):
        raise ValidationError("kappa2 must be 0 or 1")
    return 2 / (4 + k2 * c2), "2/(4+k2 cos 2a)"


def bound_entry(theorem, alpha=None, dihedral=None, kappa1=None, kappa2=None, quantity=None):
    """``(value, formula)`` for one branch of a lower-bound theorem.

    ``dihedral`` is a pair of flags, one per form.  ``kappa1``/``kappa2`` are
    user-supplied 0/1 flags and are rejected where the theorem has no use for them.
    """
    if theorem == "Main-dist":
        _forbid(theorem, kappa2=kappa2, quantity=quantity)
        return _main_dist(_need(alpha, "alpha", theorem), dihedral, kappa1)
    if theorem == "main-thm-non-twist-equiv":
        _forbid(theorem, kappa1=kappa1, quantity=quantity)
        return _non_twist(_need(alpha, "alpha", theorem), dihedral, kappa2)
    if theorem in ("Wa-thm", "lD_S*", "S''"):
        _forbid(theorem, alpha=alpha, kappa1=kappa1, kappa2=kappa2, quantity=quantity)
        count = _dihedral_count(dihedral, theorem)
        if theorem == "Wa-thm":
            exact, label = {2: (Fraction(2, 9), "2/9"), 1: (Fraction(2, 7), "2/7"), 0: (Fraction(2, 5), "2/5")}[count]
        elif theorem == "lD_S*":
            exact, label = {
                2: (Fraction(1, 8), "1/8"),
                1: (1 / Fraction("9.58"), "1/9.58"),
                0: (1 / Fraction("10.76"), "1/10.76"),
            }[count]
        else:
            exact, label = (Fraction(1, 12), "1/12") if count == 1 else (Fraction(1, 18), "1/18")
        return float(exact), label
    if theorem == "abstract":
        _forbid(theorem, alpha=alpha, dihedral=dihedral, kappa1=kappa1, kappa2=kappa2)
        if quantity not in ABSTRACT:
            raise ValidationError(f"abstract quantity must be one of {sorted(ABSTRACT)}")
        exact, label = ABSTRACT[quantity]
        return float(exact), label
    raise ValidationError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}")


def bound_table(theorem, alpha=None, dihedral=None, kappa1=None, kappa2=None, quantity=None):
    return bound_entry(theorem, alpha, dihedral, kappa1, kappa2, quantity)[0]


def bound_tables(dihedral=(False, False), alpha=None, kappa1=None, kappa2=None):
    """Every applicable table entry for one pair of dihedral flags, as rows ``(theorem, case, value, formula)``."""
    rows = []
    alphas = [0.0, math.pi / 3, math.pi / 2, 2 * math.pi / 3, math.pi] if alpha is None else [alpha]
    both_non = not any(dihedral)
    for a in alphas:
        rows.append(("Main-dist", f"alpha={a!r}", *bound_entry("Main-dist", alpha=a)))
        if both_non and kappa1 is not None:
            rows.append(("Main-dist", f"alpha={a!r},kappa1={kappa1}",
                         *bound_entry("Main-dist", alpha=a, dihedral=dihedral, kappa1=kappa1)))
        if not both_non or kappa2 is not None:
            rows.append(("main-thm-non-twist-equiv", f"alpha={a!r}",
                         *bound_entry("main-thm-non-twist-equiv", alpha=a, dihedral=dihedral,
                                      kappa2=kappa2 if both_non else None)))
    for theorem in ("Wa-thm", "lD_S*", "S''"):
        rows.append((theorem, "", *bound_entry(theorem, dihedral=dihedral)))
    for quantity in ABSTRACT:
        rows.append(("abstract", quantity, *bound_entry("abstract", quantity=quantity)))
    return rows


def theorem_constants():
    """The fixed constants compared against data, keyed by theorem and case."""
    return {
        "Wa-thm(iii)": 2 / 5,
        "lD_S*": {"both_dihedral": 1 / 8, "one_dihedral": float(1 / Fraction("9.58")),
                  "non_dihedral": float(1 / Fraction("10.76"))},
        "S''": {"same_type": 1 / 18, "mixed": 1 / 12},
        "abstract": {k: float(v) for k, (v, _) in ABSTRACT.items()},
    }

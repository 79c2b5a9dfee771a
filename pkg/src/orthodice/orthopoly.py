"""Monic orthogonal polynomials of thinned orthogonal dice and of Poisson laws.

Die systems are built by Gram-Schmidt on exact raw moments.  Charlier
polynomials come from the monic three-term recurrence
``C_{k+1} = (x - k - theta) C_k - k theta C_{k-1}``.  Poisson-weighted sums
(inner products and L^p distances) run in mpmath at elevated precision and
are truncated at a point certified by a geometric tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import mpmath

from . import law
from .dice import die_from_index, in_index_set, mean_of_index
from .errors import DegenerateMomentMatrix, IndexNotInI

DEFAULT_TAIL_TOL = 1e-12
_DPS = 60


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with coefficients in ascending degree."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = list(self.coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs) if coeffs else (Fraction(0),))

    @classmethod
    def monomial(cls, k: int) -> "Polynomial":
        return cls((Fraction(0),) * k + (Fraction(1),))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self):
        return self.coefficients[-1]

    def is_monic(self) -> bool:
        return self.leading == 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (0,) * (n - len(self.coefficients))
        b = other.coefficients + (0,) * (n - len(other.coefficients))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coefficients))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            out = [0] * (len(self.coefficients) + len(other.coefficients) - 1)
            for i, a in enumerate(self.coefficients):
                for j, b in enumerate(other.coefficients):
                    out[i + j] += a * b
            return Polynomial(tuple(out))
        return Polynomial(tuple(c * other for c in self.coefficients))

    __rmul__ = __mul__

    def shift_up(self) -> "Polynomial":
        """Multiply by ``x``."""
        return Polynomial((0,) + self.coefficients)

    def abs_coef_sum(self) -> float:
        return float(sum(abs(c) for c in self.coefficients))

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coefficients):
            if c == 0 and self.degree > 0:
                continue
            terms.append(f"{c}" if k == 0 else f"{c}*x^{k}")
        return " + ".join(terms)


@dataclass(frozen=True)
class PolySystem:
    """Orthogonal polynomials ``P_0..P_d`` with a description of their weight."""

    measure: dict
    polys: tuple = field(default_factory=tuple)

    def __getitem__(self, k: int) -> Polynomial:
        return self.polys[k]

    def __len__(self):
        return len(self.polys)

    @property
    def d_max(self) -> int:
        return len(self.polys) - 1


def _rational(x):
    if isinstance(x, Rational):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def moment_inner(p: Polynomial, q: Polynomial, moments: Sequence) -> Fraction:
    """``<p, q>`` under the functional ``x**r -> moments[r]``."""
    if p.degree + q.degree >= len(moments):
        raise ValueError("not enough moments for this inner product")
    tot = 0
    for i, a in enumerate(p.coefficients):
        if a:
            for j, b in enumerate(q.coefficients):
                if b:
                    tot += a * b * moments[i + j]
    return tot


def hankel_minors(moments: Sequence, size: int) -> list:
    """Leading principal minors of the Hankel matrix ``[moments[i+j]]``, exact."""
    mat = [[Fraction(moments[i + j]) for j in range(size)] for i in range(size)]
    minors = []
    det = Fraction(1)
    # Gaussian elimination without pivoting; a zero pivot means a zero minor
    for k in range(size):
        piv = mat[k][k]
        det *= piv
        minors.append(det)
        if piv == 0:
            minors.extend([Fraction(0)] * (size - k - 1))
            return minors
        for i in range(k + 1, size):
            f = mat[i][k] / piv
            if f:
                for j in range(k, size):
                    mat[i][j] -= f * mat[k][j]
    return minors


def gram_schmidt_system(moments: Sequence, d_max: int, measure: dict | None = None) -> PolySystem:
    """Monic orthogonal polynomials up to degree ``d_max`` from raw moments ``mu_0..mu_{2 d_max}``."""
    moments = [_rational(m) for m in moments]
    if len(moments) < 2 * d_max + 1:
        raise ValueError(f"need {2 * d_max + 1} moments for degree {d_max}")
    if moments[0] != 1:
        raise ValueError("moments[0] must be 1")
    for size, minor in enumerate(hankel_minors(moments, d_max + 1), start=1):
        if minor <= 0:
            raise DegenerateMomentMatrix(
                f"Hankel minor of order {size} is {minor}; no orthogonal polynomial of degree {size - 1}"
            )
    polys: list[Polynomial] = []
    norms: list = []
    for k in range(d_max + 1):
        xk = Polynomial.monomial(k)
        pk = xk
        for pj, nj in zip(polys, norms):
            pk = pk - pj * (moment_inner(xk, pj, moments) / nj)
        polys.append(pk)
        norms.append(moment_inner(pk, pk, moments))
    return PolySystem(measure or {"kind": "moments"}, tuple(polys))


def charlier_system(theta, d_max: int) -> PolySystem:
    """Monic Charlier polynomials of Poisson(theta) by three-term recurrence."""
    theta = _rational(theta)
    if theta <= 0:
        raise ValueError("theta must be positive")
    x = Polynomial.monomial(1)
    polys = [Polynomial((Fraction(1),))]
    if d_max >= 1:
        polys.append(x - Polynomial((theta,)))
    for k in range(1, d_max):
        nxt = (x - Polynomial((k + theta,))) * polys[k] - polys[k - 1] * (k * theta)
        polys.append(nxt)
    return PolySystem({"kind": "poisson", "theta": theta}, tuple(polys[: d_max + 1]))


def thinned_die_system(support, a, d_max: int) -> PolySystem:
    """Monic orthogonal polynomials of the ``a``-thinned uniform count (exact)."""
    a = Fraction(a) if not isinstance(a, Fraction) else a
    moments = [law.raw_moment(support, a, r) for r in range(2 * d_max + 1)]
    s = law._support(support)
    return gram_schmidt_system(moments, d_max, {"kind": "thinned_die", "m": s.m, "n": s.n, "a": a})


def pmf_inner(p: Polynomial, q: Polynomial, pmf: law.DiscreteLaw):
    """``sum_x pmf(x) p(x) q(x)`` over a finite exact law."""
    return sum(
        (w * p(pmf.offset + i) * q(pmf.offset + i) for i, w in enumerate(pmf.probs) if w),
        Fraction(0),
    )


# Poisson-weighted sums


def _log_poisson_weight(theta: float, x: int) -> float:
    return -theta + x * math.log(theta) - math.lgamma(x + 1)


def poisson_truncation_point(theta, degree: float, coef: float, tail_tol: float = DEFAULT_TAIL_TOL) -> int:
    """Cut ``X`` with ``sum_{x > X} Poisson(theta){x} * coef * x**degree < tail_tol``.

    For ``x`` past the mode the ratio of successive terms is at most
    ``rho = theta / (X + 2) * (1 + 1/(X + 1))**degree``, so the tail is bounded
    by the first dropped term over ``1 - rho``.
    """
    theta = float(theta)
    coef = max(float(coef), 1e-300)
    X = max(int(theta) + 1, 1)
    log_tol = math.log(tail_tol)
    while True:
        nxt = X + 1
        rho = theta / (nxt + 1) * (1 + 1 / nxt) ** degree
        if rho < 1:
            log_term = _log_poisson_weight(theta, nxt) + math.log(coef) + degree * math.log(nxt)
            if log_term - math.log1p(-rho) < log_tol:
                return X
        X += max(1, X // 16)


def _mp_rational(x):
    if isinstance(x, Rational):
        return mpmath.mpf(int(x.numerator)) / int(x.denominator)
    return mpmath.mpf(x)


def _poisson_weights(theta, cut: int):
    th = _mp_rational(theta)
    w = mpmath.exp(-th)
    out = [w]
    for x in range(1, cut + 1):
        w = w * th / x
        out.append(w)
    return out


def poisson_inner(p: Polynomial, q: Polynomial, theta, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """``sum_x Poisson(theta){x} p(x) q(x)``, truncated with tail bound ``tail_tol``."""
    cut = poisson_truncation_point(theta, p.degree + q.degree, p.abs_coef_sum() * q.abs_coef_sum(), tail_tol)
    with mpmath.workdps(_DPS):
        weights = _poisson_weights(theta, cut)
        tot = mpmath.fsum(w * _mp_rational(p(x)) * _mp_rational(q(x)) for x, w in enumerate(weights))
        return float(tot)


def truncated_poisson_moments(theta, count: int, tail_tol: float = DEFAULT_TAIL_TOL) -> list[Fraction]:
    """Raw moments ``0..count-1`` of Poisson(theta) conditioned on a certified truncation window."""
    cut = poisson_truncation_point(theta, count - 1, 1.0, tail_tol)
    with mpmath.workdps(_DPS):
        weights = _poisson_weights(theta, cut)
        out = []
        for r in range(count):
            val = mpmath.fsum(w * mpmath.mpf(x) ** r for x, w in enumerate(weights))
            man, exp = val.man_exp
            out.append(Fraction(int(man)) * Fraction(2) ** int(exp))
        # renormalise to the truncated window so mu_0 == 1 exactly
        return [m / out[0] for m in out]


def lp_distance(P: Polynomial, Q: Polynomial, theta, p: int = 2, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """``(sum_x Poisson(theta){x} |P(x) - Q(x)|**p)**(1/p)``."""
    return lp_distance_with_cut(P, Q, theta, p, tail_tol)[0]


def lp_distance_with_cut(P, Q, theta, p: int = 2, tail_tol: float = DEFAULT_TAIL_TOL) -> tuple[float, int]:
    if p < 1:
        raise ValueError("p must be >= 1")
    diff = P - Q
    if all(c == 0 for c in diff.coefficients):
        return 0.0, 0
    cut = poisson_truncation_point(theta, p * diff.degree, diff.abs_coef_sum() ** p, tail_tol)
    with mpmath.workdps(_DPS):
        weights = _poisson_weights(theta, cut)
        tot = mpmath.fsum(w * abs(_mp_rational(diff(x))) ** p for x, w in enumerate(weights))
        return float(tot ** (mpmath.mpf(1) / p)), cut


@dataclass(frozen=True)
class PolyReportRow:
    l: int
    a: Fraction
    distances: dict  # p -> d(P_degree, C_degree)


@dataclass(frozen=True)
class PolyReport:
    k0: int
    theta: int
    degree: int
    rows: list
    plot_header: list
    plot_rows: list


def convergence_report(
    k0: int,
    indices: Sequence[int],
    degree: int = 3,
    p_list: Sequence[int] = (1, 2),
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> PolyReport:
    """L^p distances between thinned-die and Charlier polynomials of one degree.

    Each index ``l`` is thinned by ``c(k0)/c(l)`` so all laws share mean
    ``c(k0)``; distances are measured under Poisson(c(k0)).  Plot rows hold
    ``x``, the Poisson weight, and ``P(x) * weight`` for Charlier and every ``l``.
    """
    for k in (k0, *indices):
        if not in_index_set(k):
            raise IndexNotInI(f"index {k} is not in the index set")
    theta = mean_of_index(k0)
    charlier = charlier_system(theta, degree)[degree]
    rows = []
    die_polys = []
    for l in indices:
        a = law.matched_thinning(k0, l)
        poly = thinned_die_system(die_from_index(l).support, a, degree)[degree]
        die_polys.append(poly)
        rows.append(PolyReportRow(l, a, {p: lp_distance(poly, charlier, theta, p, tail_tol) for p in p_list}))

    cut = poisson_truncation_point(theta, 0, 1.0, tail_tol)
    header = ["x", "poisson_weight", "charlier"] + [f"l={l}" for l in indices]
    plot_rows = []
    for x in range(cut + 1):
        w = math.exp(_log_poisson_weight(float(theta), x))
        plot_rows.append([x, w, float(charlier(x)) * w] + [float(q(x)) * w for q in die_polys])
    return PolyReport(k0, theta, degree, rows, header, plot_rows)

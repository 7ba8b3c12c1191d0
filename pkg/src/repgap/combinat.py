"""Exact counting: special numbers, terminating 2F1 sums and cell sizes.

Everything here is integer or ``Fraction`` arithmetic.  Gamma functions only
ever appear at integer arguments and are evaluated as factorials, with the
convention that a reciprocal Gamma at a non-positive integer is zero.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
import math
from math import comb, factorial

from .diagram import Family
from .errors import (
    BadParameters,
    FormulaBruteMismatch,
    HypothesisViolated,
    PoleError,
)


def binomial(a: int, b: int) -> int:
    if b < 0 or a < 0 or b > a:
        return 0
    return comb(a, b)


_catalan = [1]
_motzkin = [1, 1]


def catalan(l: int) -> int:
    if l < 0:
        raise ValueError("catalan index must be nonnegative")
    while len(_catalan) <= l:
        m = len(_catalan)
        # C(m) = sum_{i=1}^{m} C(i-1) C(m-i)
        _catalan.append(sum(_catalan[i - 1] * _catalan[m - i] for i in range(1, m + 1)))
    return _catalan[l]


def motzkin(m: int) -> int:
    if m < 0:
        raise ValueError("motzkin index must be nonnegative")
    while len(_motzkin) <= m:
        t = len(_motzkin)
        _motzkin.append(
            _motzkin[t - 1] + sum(_motzkin[i] * _motzkin[t - 2 - i] for i in range(t - 1))
        )
    return _motzkin[m]


def pochhammer(x: int, m: int) -> int:
    """Rising factorial ``x (x+1) ... (x+m-1)``; defined for negative ``x`` too."""
    if m < 0:
        raise ValueError("pochhammer length must be nonnegative")
    out = 1
    for i in range(m):
        out *= x + i
    return out


def _shifted_pochhammer(x: int, m: int) -> tuple[int, int]:
    """``(x + eps)_m`` as ``(order of eps, leading coefficient)``."""
    order, coeff = 0, 1
    for i in range(m):
        f = x + i
        if f == 0:
            order += 1
        else:
            coeff *= f
    return order, coeff


def hyp2f1_terminating(m: int, b: int, c: int) -> Fraction:
    """``2F1(-m, b; c; 1)`` as the finite alternating sum.

    Negative integer ``c`` is handled as the limit ``c + eps``: a term whose
    numerator vanishes is zero, a vanishing denominator alone is a pole.
    """
    if m < 0:
        raise BadParameters("m must be nonnegative")
    total = Fraction(0)
    for r in range(m + 1):
        num = pochhammer(b, r)
        if num == 0:
            continue
        order, den = _shifted_pochhammer(c, r)
        if order:
            raise PoleError(r)
        total += Fraction((-1) ** r * comb(m, r) * num, den)
    return total


def chu_vandermonde(m: int, b: int, c: int) -> Fraction:
    """``(c-b)_m / (c)_m``, taken as the ``c + eps`` limit."""
    if m < 0:
        raise BadParameters("m must be nonnegative")
    if m == 0:
        return Fraction(1)
    if m + c - 1 == 0:
        raise HypothesisViolated(f"m + c - 1 = 0 for m={m}, c={c}")
    zn, num = _shifted_pochhammer(c - b, m)
    zd, den = _shifted_pochhammer(c, m)
    if zd > zn:
        raise PoleError(next(i for i in range(m) if c + i == 0))
    if zn > zd:
        return Fraction(0)
    return Fraction(num, den)


def wz_certificate_residual(m: int, k: int, b: Fraction | int, c: Fraction | int) -> Fraction:
    """``F(m,k) - F(m-1,k) - (H(m,k+1) - H(m,k))`` for the Chu-Vandermonde WZ pair.

    Zero for every admissible ``(m, k, b, c)``.
    """

    def poch(x, n):
        out = Fraction(1)
        for i in range(n):
            out *= x + i
        return out

    def F(mm: int, kk: int) -> Fraction:
        return (
            poch(-mm, kk) * poch(b, kk) * poch(c, mm)
            / (factorial(kk) * poch(c, kk) * poch(c - b, mm))
        )

    def G(mm: int, kk: int) -> Fraction:
        return Fraction(kk) * (1 - c - kk) / (mm * (mm + c - 1))

    def H(mm: int, kk: int) -> Fraction:
        return F(mm, kk) * G(mm, kk)

    return F(m, k) - F(m - 1, k) - (H(m, k + 1) - H(m, k))


def catalan_convolution(kfold: int, n: int) -> int:
    """Number of ``kfold``-tuples of Catalan objects of total size ``n``."""
    if kfold < 1 or n < 0:
        raise BadParameters("need kfold >= 1 and n >= 0")
    value = Fraction(kfold, 2 * n + kfold) * comb(2 * n + kfold, n)
    assert value.denominator == 1
    return int(value)


def sequence_count(k: int, j: int) -> int:
    """Number of words of length ``k`` in {1,2} with ``j`` factors ``1 2``."""
    if k < 0 or j < 0 or j > k // 2:
        raise BadParameters(f"bad (k, j) = ({k}, {j})")
    return comb(k + 1, 2 * j + 1)


def count_12(seq) -> int:
    return sum(1 for a, b in zip(seq, seq[1:]) if (a, b) == (1, 2))


def sequences(k: int, j: int | None = None) -> list[tuple[int, ...]]:
    """All {1,2}-words of length ``k`` (optionally with ``j`` factors ``1 2``)."""
    out = [s for s in product((1, 2), repeat=k) if j is None or count_12(s) == j]
    return sorted(out)


# ---------------------------------------------------------------- cell sizes

def _gamma_int(x: int) -> int:
    if x <= 0:
        raise BadParameters(f"Gamma pole at {x}")
    return factorial(x - 1)


def _gamma_ratio(prefactor: int, num_arg: int, den_args: tuple[int, ...]) -> int:
    """``prefactor * Gamma(num) / prod Gamma(den)`` with 1/Gamma(<=0) = 0."""
    if any(a <= 0 for a in den_args):
        return 0
    num = prefactor * _gamma_int(num_arg)
    den = 1
    for a in den_args:
        den *= _gamma_int(a)
    q, r = divmod(num, den)
    if r:
        raise FormulaBruteMismatch(f"non-integral Gamma form {Fraction(num, den)}")
    return q


def _ballot(a: int, m: int, shift: int = 0) -> int:
    """``a / (2m + a + shift) * C(2m + a + shift, m + shift // 2)``, an integer."""
    top = 2 * m + a + shift
    q, r = divmod(a * comb(top, m + shift // 2), top)
    assert r == 0
    return q


@lru_cache(maxsize=None)
def rmo_right_alternating(n: int, k: int, j: int) -> int:
    return sum(
        (-1) ** r * comb(k - j, r) * _ballot(k - r + 1, n)
        for r in range(k - j + 1)
    )


@lru_cache(maxsize=None)
def rmo_left_alternating(n: int, k: int, j: int) -> int:
    return sum(
        (-1) ** r * comb(k - j + 1, r) * _ballot(k - r + 1, n, shift=2)
        for r in range(k - j + 2)
    )


def rmo_right_log10(n: int, k: int, j: int) -> float:
    """log10 of the Gamma form of the rMo right cell size (``-inf`` if empty)."""
    if 1 + j - k + n <= 0:
        return float("-inf")
    return (
        math.log(1 - j + 2 * k) + math.lgamma(1 + j + 2 * n)
        - math.lgamma(1 + j - k + n) - math.lgamma(2 + k + n)
    ) / math.log(10)


@lru_cache(maxsize=None)
def rmo_right_gamma(n: int, k: int, j: int) -> int:
    return _gamma_ratio(1 - j + 2 * k, 1 + j + 2 * n, (1 + j - k + n, 2 + k + n))


@lru_cache(maxsize=None)
def rmo_left_gamma(n: int, k: int, j: int) -> int:
    return _gamma_ratio(2 - j + 2 * k, 2 + j + 2 * n, (1 + j - k + n, 3 + k + n))


def cell_count(
    family: Family | str, n: int, k: int, j: int | None, side: str, verify: bool = True
) -> int:
    """Right or left cell size at apex ``(k, j)`` of a rigid family.

    For rMo both closed forms are evaluated and compared unless ``verify`` is
    off, in which case only the cheaper Gamma form is used.
    """
    fam = Family.parse(family)
    if side not in ("left", "right"):
        raise BadParameters(f"side must be left or right, not {side!r}")
    if n < 1:
        raise BadParameters("n must be positive")
    if fam is Family.RTL:
        if k % 2 or not 2 <= k <= 2 * n:
            raise BadParameters(f"rTL needs even 2 <= k <= 2n, got k={k}")
        arcs = (2 * n - k) // 2
        return binomial(n - 1, arcs) if side == "right" else binomial(n, arcs)
    if fam in (Family.RMO, Family.RPRO):
        if j is None or not 0 <= k <= 2 * n or not 0 <= j <= k // 2:
            raise BadParameters(f"need 0 <= k <= 2n and 0 <= j <= k/2, got k={k}, j={j}")
        if fam is Family.RPRO:
            return binomial(n + j, k)
        gam = rmo_right_gamma(n, k, j) if side == "right" else rmo_left_gamma(n, k, j)
        if not verify:
            return gam
        alt = rmo_right_alternating(n, k, j) if side == "right" else rmo_left_alternating(n, k, j)
        if alt != gam:
            raise FormulaBruteMismatch(
                f"rMo {side} cell (n={n}, k={k}, j={j}): alternating {alt} != Gamma {gam}"
            )
        return alt
    raise BadParameters(f"no closed-form cell sizes for {fam.value}")


def rigid_apex_classes(family: Family | str, n: int) -> list[tuple[int, int]]:
    """Feasible ``(k, j)`` apex classes (rTL uses ``j = k // 2``)."""
    fam = Family.parse(family)
    if fam is Family.RTL:
        return [(k, k // 2) for k in range(2, 2 * n + 1, 2)]
    out = []
    for k in range(2 * n + 1):
        for j in range(k // 2 + 1):
            if cell_count(fam, n, k, j, "right") > 0:
                out.append((k, j))
    return out


# ---------------------------------------------------------------- monoid sizes

def _formula_size(fam: Family, n: int) -> int:
    if fam is Family.RTL:
        return binomial(2 * n - 1, n)
    if fam is Family.RMO:
        return sum(
            sequence_count(k, j) * cell_count(fam, n, k, j, "right") * cell_count(fam, n, k, j, "left")
            for k in range(2 * n + 1)
            for j in range(k // 2 + 1)
        )
    if fam is Family.RPRO:
        return sum(
            sequence_count(k, j) * binomial(n + j, k) ** 2
            for k in range(2 * n + 1)
            for j in range(k // 2 + 1)
        )
    if fam is Family.TL:
        return catalan(2 * n)
    if fam is Family.MO:
        return motzkin(4 * n)
    if fam is Family.PRO:
        return sum(binomial(2 * n, k) ** 2 for k in range(2 * n + 1))
    raise BadParameters(f"unknown family {fam}")  # pragma: no cover


@lru_cache(maxsize=None)
def _cached_formula_size(fam: Family, n: int) -> int:
    return _formula_size(fam, n)


def monoid_size(family: Family | str, n: int, mode: str = "formula", budget: int | None = None) -> int:
    fam = Family.parse(family)
    if n < 1:
        raise BadParameters("n must be positive")
    if mode not in ("formula", "brute", "both"):
        raise BadParameters(f"unknown mode {mode!r}")
    formula = _cached_formula_size(fam, n)
    if mode == "formula":
        return formula
    from .monoids import DEFAULT_BUDGET, enumerate_monoid

    brute = len(enumerate_monoid(fam, n, budget=budget or DEFAULT_BUDGET))
    if mode == "both" and brute != formula:
        raise FormulaBruteMismatch(f"|{fam.value}_{n}|: formula {formula} != brute {brute}")
    return brute


def pivotal_half_counts(family: Family | str, m: int) -> list[int]:
    """Half diagrams on ``m`` pivotal points with ``k`` through strands, for k = 0..m.

    A half diagram read left to right is a lattice path: an arc opens with an
    up step and closes with a down step, a dot is a flat step and a through
    strand is an up step that is never closed.  So the count at ``k`` is the
    number of non-negative prefixes of length ``m`` ending at height ``k``.
    """
    fam = Family.parse(family)
    if fam.rigid:
        raise BadParameters("half counts are computed here for pivotal families only")
    if fam is Family.PRO:
        return [comb(m, k) for k in range(m + 1)]
    flat = fam.allows_dots
    row = [1] + [0] * m
    for _ in range(m):
        nxt = [0] * (m + 1)
        for h, v in enumerate(row):
            if not v:
                continue
            if h < m:
                nxt[h + 1] += v
            if h:
                nxt[h - 1] += v
            if flat:
                nxt[h] += v
        row = nxt
    return row
